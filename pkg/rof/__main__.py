"""
Enable running rof as a module: python -m rof
"""

import sys
from rof.cli import main

if __name__ == "__main__":
    sys.exit(main())
