import logging
import sys

from core.config import settings

_configured = False


def setup_logging(level: str | None = None) -> None:
    """
    Configure the root logger once

    Log records go to stderr so stdout only ever carries JSON.

    Args:
        level: Level name overriding RT_LOG
    """
    global _configured

    name = (level or settings.LOG_LEVEL).upper()
    root = logging.getLogger()
    root.setLevel(getattr(logging, name, logging.WARNING))

    if not _configured:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)
        _configured = True
