"""
Run logger attached to training logs and evaluation reports.

Messages are kept in logging order; the serialized form groups them by
context.
"""

from typing import Iterator, Optional
from dataclasses import dataclass, field
from enum import Enum
from datetime import datetime as datetime_
import json as json_

from mct_hfr.util import now


@dataclass(frozen=True)
class LogMessage:
    """
    Class describing a log entry.

    Keyword arguments:
    body -- message body
    origin -- origin of message creation
              (default None)
    datetime -- record's datetime
                (default current time)
    """

    body: str
    origin: Optional[str] = None
    datetime: datetime_ = field(default_factory=now)

    def __str__(self) -> str:
        return f"[{self.datetime.isoformat()}] {self.origin}: {self.body}"

    @property
    def json(self) -> dict[str, Optional[str]]:
        """Convert to `JSONObject`."""
        return {
            "datetime": self.datetime.isoformat(),
            "origin": self.origin,
            "body": self.body,
        }

    @classmethod
    def from_json(cls, json) -> "LogMessage":
        """Initialize from `JSONObject`."""
        return cls(
            body=json["body"],
            origin=json.get("origin"),
            datetime=(
                datetime_.fromisoformat(json["datetime"])
                if json.get("datetime") is not None
                else now()
            ),
        )


class LoggingContext(Enum):
    """Enum-class for the contexts of a `Logger`."""

    ERROR = "ERRORS"
    WARNING = "WARNINGS"
    INFO = "INFO"
    EVENT = "EVENTS"
    TRAINING = "TRAINING"
    EVALUATION = "EVALUATION"
    FILE_SYSTEM = "FILE_SYSTEM"
    STARTUP = "STARTUP"
    SHUTDOWN = "SHUTDOWN"


class Logger:
    """
    Record of `LogMessage`s by context (see also `LoggingContext`).

    Keyword arguments:
    default_origin -- origin for messages logged by body
                      (default None)
    json -- serialized `Logger` to use for initialization
            (default None)
    """

    def __init__(
        self,
        default_origin: Optional[str] = None,
        json: Optional[dict[str, list[dict[str, Optional[str]]]]] = None,
    ) -> None:
        self._entries: list[tuple[LoggingContext, LogMessage]] = []
        self.default_origin = default_origin
        if json is not None:
            restored = [
                (LoggingContext[context], LogMessage.from_json(msg))
                for context, msgs in json.items()
                for msg in msgs
            ]
            # stable; equal datetimes keep their serialized order
            self._entries = sorted(restored, key=lambda e: e[1].datetime)

    @property
    def json(self) -> dict[str, list[dict[str, Optional[str]]]]:
        """Format as json (contexts in order of first use)."""
        json: dict[str, list[dict[str, Optional[str]]]] = {}
        for context, msg in self._entries:
            json.setdefault(context.name, []).append(msg.json)
        return json

    @classmethod
    def from_json(cls, json) -> "Logger":
        """Initialize from `JSONObject`."""
        return cls(json=json)

    def log(
        self,
        context: LoggingContext,
        *args: LogMessage,
        body: Optional[str | list[str]] = None,
        origin: Optional[str] = None,
    ) -> None:
        """
        Add message(s) to log, either given as `LogMessage`s or created
        from `body` (with `origin` or the default origin).
        """
        for msg in args:
            if not isinstance(msg, LogMessage):
                raise TypeError(
                    "Logger.log args expected type 'LogMessage' "
                    + f"but found '{type(msg).__name__}'."
                )
            self._entries.append((context, msg))
        if body is not None:
            _origin = origin or self.default_origin or "unknown"
            for b in body if isinstance(body, list) else [body]:
                self._entries.append(
                    (context, LogMessage(body=b, origin=_origin))
                )

    def jsonl(self) -> str:
        """
        Returns line-delimited JSON in logging order; every line holds
        one message and its context.
        """
        return "".join(
            json_.dumps({"context": context.name} | msg.json, sort_keys=True)
            + "\n"
            for context, msg in self._entries
        )

    def keys(self) -> list[LoggingContext]:
        """Returns the contexts in order of first use."""
        return list(dict.fromkeys(context for context, _ in self._entries))

    def __getitem__(self, context: LoggingContext) -> list[LogMessage]:
        if context not in self:
            raise KeyError(context)
        return [msg for c, msg in self._entries if c is context]

    def __contains__(self, context: LoggingContext) -> bool:
        return any(c is context for c, _ in self._entries)

    def __iter__(self) -> Iterator[tuple[LoggingContext, LogMessage]]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __str__(self) -> str:
        return "\n".join(
            f"{context.value} {msg}" for context, msg in self._entries
        )
