#!/usr/bin/env python
"""Run freudsobolev commands from the command line."""

import sys

from freudsobolev.cli import main


if __name__ == "__main__":
    sys.exit(main())
