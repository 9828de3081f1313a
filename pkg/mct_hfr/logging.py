"""Process-wide console-logging (written to stderr)."""

import sys
from time import time


class Logging:
    """
    Process-wide console-logging settings.

    Messages are printed if their level does not exceed `LOGLEVEL`.
    Command results go to stdout, so everything here stays on stderr.
    """

    LEVELS = {"none": -1, "error": 0, "info": 1, "debug": 2}
    LOGLEVEL = LEVELS["error"]
    LOGFILE = sys.stderr
    LOGPREFIX = "[mct-hfr]"

    @classmethod
    def set_level(cls, level: str) -> None:
        """Set loglevel by name (one of `Logging.LEVELS`)."""
        if level not in cls.LEVELS:
            raise ValueError(f"Unknown loglevel '{level}'.")
        cls.LOGLEVEL = cls.LEVELS[level]

    @classmethod
    def emit(cls, level: str, msg: str) -> None:
        """Print `msg` with a millisecond timestamp."""
        if cls.LEVELS[level] <= cls.LOGLEVEL:
            print(
                f"{cls.LOGPREFIX} [{int(time() * 1000)}] {level.upper()} "
                + msg,
                file=cls.LOGFILE,
            )

    @classmethod
    def error(cls, msg: str) -> None:
        cls.emit("error", msg)

    @classmethod
    def info(cls, msg: str) -> None:
        cls.emit("info", msg)

    @classmethod
    def debug(cls, msg: str) -> None:
        cls.emit("debug", msg)
