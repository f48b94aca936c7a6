#!/usr/bin/env python3
"""Export all radial kernel profiles as CSV tables (same as
`varbesov kernels export`), one file per profile, for plotting."""

import sys

from varbesov.cli import main

if __name__ == "__main__":
    sys.exit(main(["kernels", "export"] + sys.argv[1:]))
