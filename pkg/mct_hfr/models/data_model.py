"""
Base data-model definition
"""

from typing import (
    Callable,
    Any,
    TypeVar,
    Union,
    get_type_hints,
    get_args,
    get_origin,
)
from collections.abc import Mapping, MutableMapping
from dataclasses import fields, is_dataclass
from enum import Enum
from types import UnionType

from .jsonable import JSONable, JSONObject, to_jsonable


def _handler(category: str, name: str):
    class HandlerRegistration:
        """Registers a decorated classmethod as field handler."""

        def __init__(self, handler):
            if not isinstance(handler, classmethod):
                raise TypeError(
                    f"Bad field handler '{handler}' for 'DataModel' "
                    + "(expected 'classmethod'; check decorator-order)."
                )
            self.handler = handler

        def __set_name__(self, owner, name_):
            # copy-on-write; subclasses own their registry
            if category not in owner.__dict__:
                setattr(owner, category, getattr(owner, category).copy())
            getattr(owner, category)[name] = self.handler.__func__
            setattr(owner, name_, self.handler)

    return HandlerRegistration


T = TypeVar("T", bound="DataModel")


def _strip_optional(type_):
    """Returns `type_` without `None` if it is an `Optional`."""
    if get_origin(type_) in (Union, UnionType):
        args = [a for a in get_args(type_) if a is not type(None)]
        if len(args) == 1:
            return args[0]
    return type_


class DataModel:
    """
    The `DataModel` class serves as a base for the definition of
    records that support serialization to and deserialization from
    JSON. It is intended to be used with `dataclasses`:
     >>> @dataclass
     ... class Record(DataModel):
     ...     value: float
     ...     tags: list[str] = field(default_factory=list)

    Private attributes (leading underscore) and `None`-values are not
    included in the serialized form. Nested `DataModel`s (also inside
    lists and string-keyed dictionaries), `Enum`-members (serialized by
    value), tuples and numpy-scalars/-arrays are supported by default.

    Field-specific behavior can be defined with handlers:
     >>> @dataclass
     ... class Record(DataModel):
     ...     log: Logger
     ...     @DataModel.serialization_handler("log")
     ...     @classmethod
     ...     def log_serialization(cls, value):
     ...         return value.json
     ...     @DataModel.deserialization_handler("log")
     ...     @classmethod
     ...     def log_deserialization(cls, value):
     ...         return Logger.from_json(value)
    """

    _SERIALIZATION_ERR_MSG = (
        "{model}.{key}: {msg} (cannot serialize; register a "
        + "serialization handler)."
    )
    _DESERIALIZATION_ERR_MSG = (
        "{model}.{key}: {msg} (cannot deserialize; register a "
        + "deserialization handler)."
    )

    _serialization_handlers: dict = {}
    _deserialization_handlers: dict = {}

    @staticmethod
    def serialization_handler(
        name: str,
    ) -> Callable[[Callable[[type, Any], JSONable]], None]:
        """Registers decorated classmethod as serializer of `name`."""
        return _handler("_serialization_handlers", name)

    @staticmethod
    def deserialization_handler(
        name: str,
    ) -> Callable[[Callable[[type, JSONable], Any]], None]:
        """
        Registers decorated classmethod as deserializer of `name`; its
        `cls`-parameter is the field's type.
        """
        return _handler("_deserialization_handlers", name)

    def _attributes(self) -> dict[str, Any]:
        if is_dataclass(self):
            return {f.name: getattr(self, f.name) for f in fields(self)}
        return dict(self.__dict__)

    @property
    def json(self) -> JSONObject:
        """Returns dictionary that can be jsonified."""
        result = {}
        for key, value in self._attributes().items():
            if key in self._serialization_handlers:
                result[key] = self._serialization_handlers[key](
                    type(self), value
                )
                continue
            if key.startswith("_") or value is None:
                continue
            result[key] = self._value_to_json(key, value)
        return result

    @classmethod
    def _value_to_json(cls, key: str, value: Any) -> JSONable:
        if isinstance(value, DataModel) or (
            hasattr(value, "json") and not callable(value.json)
        ):
            return value.json
        if isinstance(value, Enum):
            return value.value
        if isinstance(value, Mapping):
            return {
                str(k): cls._value_to_json(key, v) for k, v in value.items()
            }
        if isinstance(value, (list, tuple)):
            return [cls._value_to_json(key, v) for v in value]
        value = to_jsonable(value)
        if value is None or isinstance(value, (str, int, float, bool, list)):
            return value
        raise ValueError(
            cls._SERIALIZATION_ERR_MSG.format(
                msg=f"Encountered non-supported attribute '{value}' "
                + f"(type '{type(value).__name__}')",
                key=key,
                model=cls.__name__,
            )
        )

    @classmethod
    def from_json(cls: type[T], json: JSONObject) -> T:
        """
        Instantiate this class `T` based on the given `json`.
        """
        if not isinstance(json, MutableMapping):
            raise ValueError(
                cls._DESERIALIZATION_ERR_MSG.format(
                    msg=f"Encountered bad input value '{json}' "
                    + f"(got type '{type(json).__name__}')",
                    key="<root>",
                    model=cls.__name__,
                )
            )

        kwargs = {}
        for key, type_ in get_type_hints(cls).items():
            if key.startswith("__") or key in (
                "_serialization_handlers",
                "_deserialization_handlers",
                "_SERIALIZATION_ERR_MSG",
                "_DESERIALIZATION_ERR_MSG",
            ):
                continue
            if key not in json:
                continue
            if key in cls._deserialization_handlers:
                kwargs[key] = cls._deserialization_handlers[key](
                    type_, json[key]
                )
                continue
            kwargs[key] = cls._value_from_json(key, type_, json[key])
        try:
            return cls(**kwargs)
        except TypeError as exc_info:
            raise TypeError(
                f"Unable to instantiate class '{cls.__name__}' with kwargs "
                + f"'{kwargs}'. Maybe class is missing proper attribute "
                + "annotation?"
            ) from exc_info

    @classmethod
    def _value_from_json(cls, key: str, type_, value: JSONable) -> Any:
        if value is None:
            return None
        type_ = _strip_optional(type_)
        origin = get_origin(type_)
        args = get_args(type_)
        if isinstance(type_, type) and issubclass(type_, Enum):
            return type_(value)
        if isinstance(type_, type) and issubclass(type_, DataModel):
            return type_.from_json(value)
        if origin in (list, tuple) and isinstance(value, list):
            if origin is tuple:
                item_types = (
                    [args[0]] * len(value)
                    if len(args) == 2 and args[1] is Ellipsis
                    else list(args)
                )
                return tuple(
                    cls._value_from_json(key, t, v)
                    for t, v in zip(item_types, value)
                )
            item_type = args[0] if args else Any
            return [cls._value_from_json(key, item_type, v) for v in value]
        if origin is not None and isinstance(origin, type):
            if issubclass(origin, Mapping) and isinstance(value, Mapping):
                item_type = args[1] if len(args) == 2 else Any
                return {
                    k: cls._value_from_json(key, item_type, v)
                    for k, v in value.items()
                }
        if type_ is float and isinstance(value, int):
            return float(value)
        if type_ is Any or origin is not None or not isinstance(type_, type):
            return value
        if not isinstance(value, type_):
            raise ValueError(
                cls._DESERIALIZATION_ERR_MSG.format(
                    msg=f"Encountered bad input value '{value}' "
                    + f"(got type '{type(value).__name__}' but "
                    + f"expected type '{type_.__name__}')",
                    key=key,
                    model=cls.__name__,
                )
            )
        return value


def get_model_serialization_test(
    model: type[DataModel],
    instances: tuple[DataModel, ...],
) -> Callable:
    """
    Returns a pytest-test method for one iteration of a serialization-
    deserialization sequence for every given instance.

    Use by inserting a definition like
     >>> test_record_serialization = get_model_serialization_test(
     ...    Record, instances=(Record(1.0), ...)
     ... )
    into your pytest-compatible file.

    Keyword arguments:
    model -- DataModel-type
    instances -- tuple of initialized instances to be tested
    """
    # pylint: disable=import-outside-toplevel
    import json

    def _():
        problems = []
        for i, instance in enumerate(instances):
            try:
                _json = instance.json
                json.dumps(_json)
            except (ValueError, TypeError) as exc_info:
                problems.append((i, f"Unable to serialize ({exc_info})."))
                continue
            try:
                restored = model.from_json(_json)
            except (ValueError, TypeError) as exc_info:
                problems.append((i, f"Unable to deserialize ({exc_info})."))
                continue
            if restored.json != _json:
                problems.append(
                    (
                        i,
                        "Lost information during serialization-"
                        + "deserialization-cycle.",
                    )
                )
        assert not problems, (
            f"Failed serialization-test for '{model.__name__}':"
            + "".join(f"\n* instance#{p[0]}: {p[1]}" for p in problems)
        )

    return _
