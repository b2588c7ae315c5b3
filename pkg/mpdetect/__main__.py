#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Main entry point for the mpdetect package when run as a module.

This allows the package to be run directly with:
    python -m mpdetect
"""

import sys
from mpdetect.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
