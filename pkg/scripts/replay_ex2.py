"""Replay the bundled ex2 iteration table and print the bound table.

Exit status follows the CLI: 0 when every cell matches, 4 on a mismatch.
"""

from __future__ import annotations

import sys

from lfl3.cli import main

if __name__ == "__main__":
    sys.exit(main(["replay", "ex2", "--timing", *sys.argv[1:]]))
