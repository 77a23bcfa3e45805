"""
Main entry point for the Bergman lab command line
This file should be run from the project root directory:

    python main.py report --run --out runs
"""

import os
import sys

# Add the current directory to sys.path to allow importing bergman_lab as a module
sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

if __name__ == "__main__":
    from bergman_lab.cli import main

    sys.exit(main())
