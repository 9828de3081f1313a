from .logger import LogMessage, LoggingContext, Logger
from .logging import Logging


__all__ = [
    "LogMessage",
    "LoggingContext",
    "Logger",
    "Logging",
]
