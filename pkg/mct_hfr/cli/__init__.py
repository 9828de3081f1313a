from .config import ValueType, Argument, Section, SECTIONS, RunConfig
from .app import build_parser, main


__all__ = [
    "ValueType",
    "Argument",
    "Section",
    "SECTIONS",
    "RunConfig",
    "build_parser",
    "main",
]
