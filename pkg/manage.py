#!/usr/bin/env python
"""Django's command-line utility for the simulation commands and the run ledger."""
from cavidades.cli import manage

if __name__ == '__main__':
    manage()
