#!/usr/bin/env python3
"""Entry point: python hopfcyclic.py <command> ..."""

import sys

from dotenv import load_dotenv

from app.cli.main import main

if __name__ == "__main__":
    load_dotenv()
    sys.exit(main())
