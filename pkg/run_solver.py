#!/usr/bin/env python3
"""
Startup script for the vorticity-waves command line
"""
import sys

from vorticity_waves.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
