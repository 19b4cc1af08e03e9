# coding: utf-8
"""Run the gmix command line without installing the package.

usage: python gmix.py <command> [options]   (see gaussmix_filter/cli.py)
"""
import sys

from gaussmix_filter.cli import main

if __name__ == "__main__":
    sys.exit(main())
