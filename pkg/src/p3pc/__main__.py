"""Allow ``python -m p3pc`` as an alternative to the console script."""
import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
