import logging
import sys
from typing import Optional, Sequence

from src import config
from src import cli

# ---------------------- Logging ----------------------
# Reports go to stdout (or --out); log records go to stderr.


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=config.LOG_LEVEL, format=config.LOG_FORMAT, stream=sys.stderr)
    return cli.main(argv)


# ---------------------- Main Entry ----------------------
if __name__ == "__main__":
    sys.exit(main())
