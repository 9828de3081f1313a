"""
Run configuration: a strict sectioned key=value text format with the
sections `[data]`, `[model]`, `[train]` and `[eval]`.
"""

from typing import Any, Callable, Iterable, Mapping, Optional
from dataclasses import dataclass, field
from configparser import ConfigParser, Error as ConfigParserError

from mct_hfr.errors import ConfigError
from mct_hfr.util import MODALITIES, qjoin
from mct_hfr.datasim import GenConfig
from mct_hfr.mct import ModelConfig
from mct_hfr.trainer import Strategy, TrainPlan
from mct_hfr.evalkit import DEFAULT_RATES


class ValueType:
    """Enum for value types of the text format."""

    STRING = "string"
    INTEGER = "integer"
    NUMBER = "number"
    BOOLEAN = "boolean"
    LIST = "list"
    SCALAR = [STRING, INTEGER, NUMBER, BOOLEAN]
    ANY = [*SCALAR, LIST]


_TRUE = ("true", "yes", "on", "1")
_FALSE = ("false", "no", "off", "0")


def _parse_scalar(type_: str, text: str) -> Any:
    text = text.strip()
    match type_:
        case ValueType.STRING:
            return text
        case ValueType.INTEGER:
            return int(text)
        case ValueType.NUMBER:
            return float(text)
        case ValueType.BOOLEAN:
            if text.lower() in _TRUE:
                return True
            if text.lower() in _FALSE:
                return False
            raise ValueError(f"'{text}' is not a boolean")
    raise ValueError(f"unknown type '{type_}'")


def _format_scalar(type_: str, value: Any) -> str:
    if type_ == ValueType.BOOLEAN:
        return "true" if value else "false"
    if type_ == ValueType.NUMBER:
        return repr(float(value))
    return str(value)


class Argument:
    """
    Class to represent a configuration key.

    Required attributes:
    type_ -- value type (given via `ValueType`)

    Optional attributes:
    required -- if `True`, the key has to be given (default False)
    description -- brief description
    default -- default value (`None` means unset)
    item_type -- (required only if type_ is `ValueType.LIST`) type of
                 list elements (`ValueType.SCALAR`)
    length -- (only if type_ is `ValueType.LIST`) required number of
              elements
    check -- domain check returning a problem description or `None`
    """

    def __init__(
        self,
        type_: str,
        required: bool = False,
        description: Optional[str] = None,
        default: Optional[Any] = None,
        item_type: Optional[str] = None,
        length: Optional[int] = None,
        check: Optional[Callable[[Any], Optional[str]]] = None,
    ) -> None:
        if type_ not in ValueType.ANY:
            raise ValueError(
                f"Bad type: 'type_' has to be one of '{ValueType.ANY}' "
                + f"instead of '{type_}'."
            )
        if type_ == ValueType.LIST and item_type not in ValueType.SCALAR:
            raise ValueError(
                "Missing or bad type for list items ('type_' is "
                + f"'{ValueType.LIST}' but 'item_type' is '{item_type}')."
            )
        self.type_ = type_
        self.required = required
        self.description = description
        self.item_type = item_type if type_ == ValueType.LIST else None
        self.length = length
        self.check = check
        self.default = default

    @property
    def json(self) -> dict[str, Any]:
        """Format as json"""
        json = {"type": self.type_, "required": self.required}
        if self.description is not None:
            json["description"] = self.description
        if self.default is not None:
            json["default"] = self.default
        if self.item_type is not None:
            json["itemType"] = self.item_type
        if self.length is not None:
            json["length"] = self.length
        return json

    def parse(self, text: str) -> Any:
        """
        Returns the typed value of `text`; raises `ValueError` with a
        reason otherwise.
        """
        if self.type_ != ValueType.LIST:
            try:
                return _parse_scalar(self.type_, text)
            except ValueError as exc_info:
                raise ValueError(
                    f"expected {self.type_} but found '{text.strip()}'"
                ) from exc_info
        items = [item for item in text.split(",") if item.strip()]
        try:
            value = [_parse_scalar(self.item_type, item) for item in items]
        except ValueError as exc_info:
            raise ValueError(
                f"expected comma-separated {self.item_type}s but found "
                + f"'{text.strip()}'"
            ) from exc_info
        if self.length is not None and len(value) != self.length:
            raise ValueError(
                f"expected {self.length} values but found {len(value)}"
            )
        return value

    def format(self, value: Any) -> str:
        """Returns the canonical text of `value`."""
        if self.type_ == ValueType.LIST:
            return ", ".join(_format_scalar(self.item_type, v) for v in value)
        return _format_scalar(self.type_, value)

    def validate(self, value: Any) -> tuple[bool, str]:
        """
        Validate `value` against the domain check. Returns a tuple of
        `bool` (`True` if valid) and `str` (reason for result).
        """
        if self.check is not None and (problem := self.check(value)):
            return False, problem
        return True, "Value is valid."


class Section:
    """
    Class to represent the keys of one configuration section.

    Use as
    >>> Section(key1=Argument(...), key2=Argument(...), ...)
    """

    def __init__(self, **kwargs: Argument) -> None:
        self.properties = kwargs

    @property
    def json(self) -> dict[str, Any]:
        """Format as json"""
        return {name: arg.json for name, arg in self.properties.items()}

    def parse(
        self, name: str, raw: Mapping[str, str]
    ) -> tuple[dict[str, Any], list[str]]:
        """
        Returns the typed values of `raw` (without defaults) and a list
        of every problem found.
        """
        values, problems = {}, []
        for key, text in raw.items():
            if key not in self.properties:
                problems.append(
                    f"[{name}] unknown key '{key}' (allowed: "
                    + qjoin(sorted(self.properties))
                    + ")."
                )
                continue
            try:
                value = self.properties[key].parse(text)
            except ValueError as exc_info:
                problems.append(f"[{name}] bad value for '{key}': {exc_info}.")
                continue
            ok, reason = self.properties[key].validate(value)
            if not ok:
                problems.append(f"[{name}] bad value for '{key}': {reason}")
                continue
            values[key] = value
        return values, problems

    def hydrate(
        self, name: str, values: Mapping[str, Any]
    ) -> tuple[dict[str, Any], list[str]]:
        """
        Returns `values` with missing keys replaced by their defaults
        and problems for missing required keys.
        """
        result, problems = {}, []
        for key, arg in self.properties.items():
            if key in values:
                result[key] = values[key]
            elif arg.required:
                problems.append(f"[{name}] missing required key '{key}'.")
            elif arg.default is not None:
                result[key] = (
                    list(arg.default)
                    if isinstance(arg.default, (list, tuple))
                    else arg.default
                )
        return result, problems


def _at_least(minimum: float) -> Callable[[Any], Optional[str]]:
    def check(value):
        values = value if isinstance(value, list) else [value]
        if any(v < minimum for v in values):
            return f"needs to be at least {minimum} (got {value})."
        return None

    return check


def _within(lower: float, upper: float) -> Callable[[Any], Optional[str]]:
    def check(value):
        values = value if isinstance(value, list) else [value]
        if any(not lower <= v <= upper for v in values):
            return f"needs to be in [{lower}, {upper}] (got {value})."
        return None

    return check


def _one_of(*options: str) -> Callable[[Any], Optional[str]]:
    def check(value):
        if value.replace("-", "_") not in options:
            return f"needs to be one of {qjoin(options)} (got '{value}')."
        return None

    return check


_M = len(MODALITIES)
_GEN = GenConfig(seed=0)
_MODEL = ModelConfig()
_PLAN = TrainPlan(seed=0)

SECTIONS = {
    "data": Section(
        seed=Argument(
            ValueType.INTEGER, required=True, description="generator seed"
        ),
        classes=Argument(
            ValueType.INTEGER, default=_GEN.classes, check=_at_least(2)
        ),
        dims=Argument(
            ValueType.LIST,
            item_type=ValueType.INTEGER,
            length=_M,
            default=list(_GEN.dims),
            check=_at_least(1),
            description="feature dimensions (a, v, l)",
        ),
        length_min=Argument(
            ValueType.LIST,
            item_type=ValueType.INTEGER,
            length=_M,
            default=[lo for lo, _ in _GEN.length_ranges],
            check=_at_least(1),
            description="smallest generated lengths (a, v, l)",
        ),
        length_max=Argument(
            ValueType.LIST,
            item_type=ValueType.INTEGER,
            length=_M,
            default=[hi for _, hi in _GEN.length_ranges],
            check=_at_least(1),
            description="largest generated lengths (a, v, l)",
        ),
        max_lengths=Argument(
            ValueType.LIST,
            item_type=ValueType.INTEGER,
            length=_M,
            default=list(_GEN.max_lengths),
            check=_at_least(1),
        ),
        snr=Argument(ValueType.NUMBER, default=_GEN.snr),
        redundancy=Argument(
            ValueType.NUMBER, default=_GEN.redundancy, check=_within(0, 1)
        ),
        attenuation=Argument(
            ValueType.NUMBER, default=_GEN.attenuation, check=_within(0, 1)
        ),
        test_fraction=Argument(
            ValueType.NUMBER,
            default=0.2,
            check=_within(0, 1),
            description="fraction of generated samples set aside for testing",
        ),
    ),
    "model": Section(
        d=Argument(ValueType.INTEGER, default=_MODEL.d, check=_at_least(1)),
        layers=Argument(
            ValueType.INTEGER, default=_MODEL.layers, check=_at_least(0)
        ),
        heads=Argument(
            ValueType.INTEGER, default=_MODEL.heads, check=_at_least(1)
        ),
        d_k=Argument(
            ValueType.INTEGER, default=_MODEL.d_k, check=_at_least(1)
        ),
        kernel_sizes=Argument(
            ValueType.LIST,
            item_type=ValueType.INTEGER,
            length=_M,
            default=list(_MODEL.kernel_sizes),
        ),
        max_lengths=Argument(
            ValueType.LIST,
            item_type=ValueType.INTEGER,
            length=_M,
            default=list(_MODEL.max_lengths),
            check=_at_least(1),
        ),
        ffn_hidden=Argument(
            ValueType.INTEGER,
            check=_at_least(1),
            description="feed-forward width (unset: 2 * d)",
        ),
        classifier_layers=Argument(
            ValueType.INTEGER,
            default=_MODEL.classifier_layers,
            check=_at_least(1),
        ),
        hfr=Argument(ValueType.BOOLEAN, default=_MODEL.hfr),
        use_lfi=Argument(ValueType.BOOLEAN, default=_MODEL.use_lfi),
        use_gfa=Argument(ValueType.BOOLEAN, default=_MODEL.use_gfa),
        gfa_metric=Argument(
            ValueType.STRING,
            default=_MODEL.gfa_metric,
            check=_one_of("cmd", "cosine", "jsd", "smooth_l1"),
        ),
        cmd_order=Argument(
            ValueType.INTEGER, default=_MODEL.cmd_order, check=_at_least(1)
        ),
        decoder_blocks=Argument(
            ValueType.INTEGER,
            default=_MODEL.decoder_blocks,
            check=_at_least(1),
        ),
        use_gamma_b=Argument(ValueType.BOOLEAN, default=_MODEL.use_gamma_b),
        use_gamma_e=Argument(ValueType.BOOLEAN, default=_MODEL.use_gamma_e),
        ln_eps=Argument(ValueType.NUMBER, default=_MODEL.ln_eps),
        dtype=Argument(
            ValueType.STRING,
            default=_MODEL.dtype,
            check=_one_of("float32", "float64"),
        ),
    ),
    "train": Section(
        seed=Argument(
            ValueType.INTEGER,
            required=True,
            description="seed of initialization, shuffling and masking",
        ),
        strategy=Argument(
            ValueType.STRING,
            default=_PLAN.strategy.value,
            check=_one_of(*(s.value for s in Strategy)),
        ),
        alpha=Argument(
            ValueType.NUMBER, default=_PLAN.alpha, check=_at_least(0)
        ),
        beta=Argument(
            ValueType.NUMBER, default=_PLAN.beta, check=_at_least(0)
        ),
        p_miss=Argument(
            ValueType.NUMBER, default=_PLAN.p_miss, check=_within(0, 1)
        ),
        lr=Argument(ValueType.NUMBER, default=_PLAN.lr),
        weight_decay=Argument(
            ValueType.NUMBER, default=_PLAN.weight_decay, check=_at_least(0)
        ),
        batch_size=Argument(
            ValueType.INTEGER, default=_PLAN.batch_size, check=_at_least(1)
        ),
        epochs=Argument(
            ValueType.INTEGER, default=_PLAN.epochs, check=_at_least(1)
        ),
        patience=Argument(
            ValueType.INTEGER, default=_PLAN.patience, check=_at_least(1)
        ),
        ramp_epochs=Argument(
            ValueType.INTEGER, default=_PLAN.ramp_epochs, check=_at_least(1)
        ),
        val_fraction=Argument(
            ValueType.NUMBER,
            default=0.2,
            check=_within(0, 1),
            description="fraction of training samples used for validation",
        ),
    ),
    "eval": Section(
        rates=Argument(
            ValueType.LIST,
            item_type=ValueType.NUMBER,
            default=list(DEFAULT_RATES),
            check=_within(0, 1),
        ),
        mask_seeds=Argument(
            ValueType.LIST,
            item_type=ValueType.INTEGER,
            default=[0, 1, 2, 3, 4],
        ),
        workers=Argument(
            ValueType.INTEGER, default=1, check=_at_least(1)
        ),
        batch_size=Argument(
            ValueType.INTEGER, default=64, check=_at_least(1)
        ),
    ),
}


@dataclass
class RunConfig:
    """
    Validated run configuration with defaults filled in.

    Keyword arguments:
    data -- `[data]`-section values
    model -- `[model]`-section values
    train -- `[train]`-section values
    eval -- `[eval]`-section values
    explicit -- keys given explicitly per section (file or overrides)
    """

    data: dict[str, Any] = field(default_factory=dict)
    model: dict[str, Any] = field(default_factory=dict)
    train: dict[str, Any] = field(default_factory=dict)
    eval: dict[str, Any] = field(default_factory=dict)
    explicit: dict[str, set[str]] = field(default_factory=dict)

    @classmethod
    def parse(
        cls,
        text: str = "",
        overrides: Optional[Mapping[str, Mapping[str, Any]]] = None,
        require: Iterable[str] = tuple(SECTIONS),
    ) -> "RunConfig":
        """
        Parses and validates configuration `text`. Raises a
        `ConfigError` listing every problem.

        Keyword arguments:
        text -- configuration text
                (default ""; only defaults)
        overrides -- typed values per section that take precedence over
                     the text; `None`-values are ignored
                     (default None)
        require -- sections whose required keys have to be given
                   (default all sections)
        """
        parser = ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            parser.read_string(text)
        except ConfigParserError as exc_info:
            raise ConfigError(
                [f"unreadable configuration: {exc_info}"]
            ) from exc_info

        problems = [
            f"unknown section [{name}] (allowed: "
            + ", ".join(f"[{s}]" for s in SECTIONS)
            + ")."
            for name in parser.sections()
            if name not in SECTIONS
        ]
        sections, explicit = {}, {}
        for name, section in SECTIONS.items():
            raw = dict(parser[name]) if parser.has_section(name) else {}
            values, _problems = section.parse(name, raw)
            problems += _problems
            for key, value in ((overrides or {}).get(name) or {}).items():
                if key not in section.properties:
                    problems.append(f"[{name}] unknown key '{key}'.")
                    continue
                if value is not None:
                    values[key] = value
            explicit[name] = set(values)
            sections[name], _problems = section.hydrate(name, values)
            if name in require:
                problems += _problems

        config = cls(**sections, explicit=explicit)
        if not problems:
            problems += config.check()
        if problems:
            raise ConfigError(problems)
        return config

    def check(self) -> list[str]:
        """Returns problems that involve more than one key."""
        problems = []
        for name, build in (
            ("data", self.gen_config),
            ("model", self.model_config),
            ("train", self.train_plan),
        ):
            # unseeded sections (not required by caller) cannot be built
            if name != "model" and "seed" not in getattr(self, name):
                continue
            try:
                build()
            except ConfigError as exc_info:
                problems += [f"[{name}] {p}" for p in exc_info.problems]
        rates = self.eval["rates"]
        if len(rates) == 0 or any(b <= a for a, b in zip(rates, rates[1:])):
            problems.append(
                "[eval] rates must be non-empty and strictly increasing "
                + f"(got {rates})."
            )
        if len(set(self.eval["mask_seeds"])) != len(self.eval["mask_seeds"]):
            problems.append("[eval] mask_seeds must be unique.")
        return problems

    def serialize(self) -> str:
        """
        Returns the canonical text (sections in fixed order, keys
        sorted, defaults included).
        """
        lines = []
        for name, section in SECTIONS.items():
            values = getattr(self, name)
            lines.append(f"[{name}]")
            for key in sorted(values):
                lines.append(
                    f"{key} = {section.properties[key].format(values[key])}"
                )
            lines.append("")
        return "\n".join(lines)

    def gen_config(self) -> GenConfig:
        """Returns the data generator configuration."""
        values = dict(self.data)
        del values["test_fraction"]
        ranges = tuple(zip(values.pop("length_min"), values.pop("length_max")))
        return GenConfig(**values, length_ranges=ranges)

    def model_config(
        self,
        classes: Optional[int] = None,
        dims: Optional[tuple[int, ...]] = None,
    ) -> ModelConfig:
        """
        Returns the model configuration for a dataset with `classes`
        and `dims` (default: taken from the `[data]`-section).
        """
        return ModelConfig(
            **self.model,
            classes=self.data["classes"] if classes is None else classes,
            dims=tuple(self.data["dims"] if dims is None else dims),
        )

    def train_plan(self) -> TrainPlan:
        """Returns the training plan."""
        values = dict(self.train)
        values.pop("val_fraction")
        return TrainPlan(**values)
