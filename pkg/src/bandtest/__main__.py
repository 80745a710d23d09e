#!/usr/bin/env python
"""
Command-line entry point for bandtest.
This allows running the package directly with `python -m bandtest`.
"""

from bandtest.cli import app

if __name__ == "__main__":
    app()
