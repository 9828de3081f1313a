"""Test suite for logger- and logging-module."""

from datetime import datetime, timedelta, timezone
from io import StringIO
import json

import pytest

from mct_hfr import LoggingContext as Context, Logger, LogMessage, Logging


@pytest.fixture(name="some_logger")
def init_logger():
    return Logger(default_origin="Trainer")


def test_logger_log(some_logger):
    """Test method `log` of `Logger` for basic example."""
    some_logger.log(Context.TRAINING, body="Epoch 1 done.")

    assert Context.TRAINING in some_logger
    assert Context.ERROR not in some_logger
    assert len(some_logger[Context.TRAINING]) == 1
    assert some_logger[Context.TRAINING][0].origin == "Trainer"
    assert some_logger[Context.TRAINING][0].body == "Epoch 1 done."

    some_logger.log(Context.WARNING, body="Odd.", origin="Sweep")
    assert some_logger[Context.WARNING][0].origin == "Sweep"


def test_logger_log_multiple(some_logger):
    """Test method `log` of `Logger` by various items."""
    msg = LogMessage("Loaded.", "Checkpoint")
    some_logger.log(Context.EVENT, msg, body=["a", "b"])

    assert [m.body for m in some_logger[Context.EVENT]] == [
        "Loaded.",
        "a",
        "b",
    ]
    assert some_logger[Context.EVENT][0] is msg
    assert len(some_logger) == 3


def test_logger_log_rejects_bad_args(some_logger):
    """Test method `log` of `Logger` with bad positional argument."""
    with pytest.raises(TypeError):
        some_logger.log(Context.INFO, "not a message")


def test_logger_missing_context(some_logger):
    """Test item access for unused context."""
    with pytest.raises(KeyError):
        some_logger[Context.SHUTDOWN]  # pylint: disable=pointless-statement


def test_logger_keeps_logging_order(some_logger):
    """Test that iteration and `jsonl` follow the logging order."""
    some_logger.log(Context.TRAINING, body="1")
    some_logger.log(Context.STARTUP, body="2")
    some_logger.log(Context.TRAINING, body="3")

    assert some_logger.keys() == [Context.TRAINING, Context.STARTUP]
    assert [msg.body for _, msg in some_logger] == ["1", "2", "3"]
    lines = [json.loads(line) for line in some_logger.jsonl().splitlines()]
    assert [(line["context"], line["body"]) for line in lines] == [
        ("TRAINING", "1"),
        ("STARTUP", "2"),
        ("TRAINING", "3"),
    ]
    assert all(line["origin"] == "Trainer" for line in lines)


def test_logger_json(some_logger):
    """Test property `json` and `from_json` of `Logger`."""
    some_logger.log(Context.TRAINING, body=["1", "2"])
    some_logger.log(Context.FILE_SYSTEM, body="Wrote file.")

    json_ = some_logger.json
    assert list(json_) == ["TRAINING", "FILE_SYSTEM"]
    assert [m["body"] for m in json_["TRAINING"]] == ["1", "2"]

    restored = Logger.from_json(json_)
    assert restored.json == json_
    assert restored[Context.FILE_SYSTEM] == some_logger[Context.FILE_SYSTEM]


def test_logger_from_json_sorts_by_datetime():
    """Test that deserialization restores chronological order."""
    t0 = datetime(2024, 1, 1, tzinfo=timezone.utc)
    late = LogMessage("late", "x", t0 + timedelta(seconds=5))
    early = LogMessage("early", "x", t0)
    logger = Logger(
        json={"ERROR": [late.json], "STARTUP": [early.json]}
    )
    assert [msg.body for _, msg in logger] == ["early", "late"]


def test_logmessage_json():
    """Test (de-)serialization of `LogMessage`."""
    msg = LogMessage("Body.", "Origin")
    assert msg.datetime.microsecond == 0
    assert LogMessage.from_json(msg.json) == msg
    assert "Origin: Body." in str(msg)


@pytest.mark.parametrize(
    ("level", "expected"),
    [
        ("none", []),
        ("error", ["ERROR"]),
        ("info", ["ERROR", "INFO"]),
        ("debug", ["ERROR", "INFO", "DEBUG"]),
    ],
)
def test_console_logging_levels(monkeypatch, level, expected):
    """Test filtering of console output by loglevel."""
    out = StringIO()
    monkeypatch.setattr(Logging, "LOGFILE", out)
    monkeypatch.setattr(Logging, "LOGLEVEL", Logging.LOGLEVEL)
    Logging.set_level(level)
    Logging.error("e")
    Logging.info("i")
    Logging.debug("d")
    lines = out.getvalue().splitlines()
    assert [line.split()[2] for line in lines] == expected
    assert all(line.startswith(Logging.LOGPREFIX) for line in lines)


def test_console_logging_unknown_level():
    """Test rejection of unknown loglevel."""
    with pytest.raises(ValueError):
        Logging.set_level("verbose")
