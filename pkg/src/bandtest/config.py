"""
Experiment configuration.

Configs are flat `key=value` files with `#` comments. The same keys may be given
as nested YAML mappings (`noise: {model: block}` means `noise.model=block`), which
are flattened and then validated exactly like the flat form.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import yaml

from bandtest.band.builder import record_ecdf
from bandtest.band.io import load_sample
from bandtest.core.errors import ConfigParseError, ConfigRangeError, UnknownKeyError
from bandtest.core.sample import TiePolicy
from bandtest.simulation.channel import ChannelModel, FastFading, SlowFading
from bandtest.simulation.noise import (
    MIXTURE_WEIGHT_TOL,
    BlockNonstationaryNoise,
    GaussianNoise,
    MixtureComponent,
    MixtureNoise,
    NoiseModel,
)
from bandtest.statistics.baselines import MOMENT_FUNCTIONS
from bandtest.statistics.degenerate import NullCdf, normal_null, step_null, uniform_null
from bandtest.statistics.registry import TestRegistry
from bandtest.utils.fs_utils import read_text
from bandtest.utils.logger import logger

MALFORMED_LINE_ERROR = "expected key=value, got {!r}"
BAD_VALUE_ERROR = "invalid value {!r} for {}: {}"
UNKNOWN_KEY_ERROR = "unknown key {!r}"
DUPLICATE_KEY_ERROR = "key {!r} given twice"
NULL_SPEC_ERROR = "Unknown null CDF {!r}; use normal:mean:sd, uniform:low:high or ecdf:<file>"

NULL_SPEC_PREFIXES = ("normal", "uniform", "ecdf")
REFERENCE_NULL = "reference"


@dataclass(frozen=True)
class NoiseSettings:
    model: str = "block"
    mean: float = 0.0
    sd: float = 1.0
    mixture: tuple[MixtureComponent, ...] = ()
    block_len: int = 100
    sd_low: float = 0.5
    sd_high: float = 2.0

    def build(self, seed: int) -> NoiseModel:
        if self.model == "gaussian":
            return GaussianNoise(self.mean, self.sd, seed)
        if self.model == "mixture":
            return MixtureNoise(self.mixture, seed)
        return BlockNonstationaryNoise(self.block_len, self.sd_low, self.sd_high, self.mean, seed)


@dataclass(frozen=True)
class ChannelSettings:
    fading: str = "fast"
    gain: float = 3.0
    low: float = -10.0
    high: float = 10.0

    def build(self) -> ChannelModel:
        if self.fading == "slow":
            return SlowFading(self.gain)
        return FastFading(self.low, self.high)


@dataclass(frozen=True)
class BandSettings:
    file: Optional[str] = None
    group_size: int = 100
    samples: int = 20000


@dataclass(frozen=True)
class DegenerateSettings:
    groups: int = 1
    group_size: Optional[int] = None
    two_sided: bool = False
    null: str = REFERENCE_NULL


@dataclass(frozen=True)
class MomentSettings:
    moment: str = "mean"
    lower: float = -0.5
    upper: float = 0.5


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully validated settings of one ROC experiment."""

    test: str = "elrdf"
    n: int = 10
    trials: int = 2000
    seed: int = 0
    tol: float = 1e-8
    tie_policy: TiePolicy = TiePolicy.ERROR
    threshold_count: int = 200
    noise: NoiseSettings = field(default_factory=NoiseSettings)
    channel: ChannelSettings = field(default_factory=ChannelSettings)
    band: BandSettings = field(default_factory=BandSettings)
    degen: DegenerateSettings = field(default_factory=DegenerateSettings)
    elrm: MomentSettings = field(default_factory=MomentSettings)

    @property
    def degen_group_size(self) -> int:
        return self.degen.group_size if self.degen.group_size is not None else self.n // self.degen.groups


def _integer(minimum: int, maximum: Optional[int] = None) -> Callable[[str], int]:
    def parse(text: str) -> int:
        value = int(text)
        if value < minimum or (maximum is not None and value > maximum):
            upper = "" if maximum is None else f" and at most {maximum}"
            raise ConfigRangeError(f"must be at least {minimum}{upper}")
        return value

    return parse


def _real(positive: bool = False) -> Callable[[str], float]:
    def parse(text: str) -> float:
        value = float(text)
        if not math.isfinite(value):
            raise ConfigRangeError("must be finite")
        if positive and value <= 0:
            raise ConfigRangeError("must be positive")
        return value

    return parse


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ConfigRangeError(f"must be one of {', '.join(options)}")
        return text

    return parse


def _boolean(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError("expected true or false")


def _mixture(text: str) -> tuple[MixtureComponent, ...]:
    components = []
    for item in text.split(","):
        parts = item.strip().split(":")
        if len(parts) != 3:
            raise ValueError("mixture components are weight:mean:sd")
        weight, mean, sd = (float(p) for p in parts)
        if weight <= 0 or sd <= 0:
            raise ConfigRangeError("mixture weights and sds must be positive")
        components.append(MixtureComponent(weight, mean, sd))
    if abs(math.fsum(c.weight for c in components) - 1.0) > MIXTURE_WEIGHT_TOL:
        raise ConfigRangeError("mixture weights must sum to 1")
    return tuple(components)


def _null_spec(text: str) -> str:
    if text != REFERENCE_NULL and text.split(":", 1)[0] not in NULL_SPEC_PREFIXES:
        raise ConfigRangeError("must be 'reference' or normal:mean:sd, uniform:low:high, ecdf:file")
    return text


def _test_name(text: str) -> str:
    if TestRegistry.get(text) is None:
        raise ConfigRangeError(f"must be one of {', '.join(TestRegistry.names())}")
    return text


# Dotted key -> (section or "" for top level, attribute, parser)
_KEYS: dict[str, tuple[str, str, Callable[[str], Any]]] = {
    "test": ("", "test", _test_name),
    "n": ("", "n", _integer(1)),
    "trials": ("", "trials", _integer(1)),
    "seed": ("", "seed", _integer(0, 2**64 - 1)),
    "tol": ("", "tol", _real(positive=True)),
    "tie_policy": ("", "tie_policy", lambda text: TiePolicy(_choice("error", "jitter")(text))),
    "thresholds.count": ("", "threshold_count", _integer(2)),
    "noise.model": ("noise", "model", _choice("gaussian", "mixture", "block")),
    "noise.mean": ("noise", "mean", _real()),
    "noise.sd": ("noise", "sd", _real(positive=True)),
    "noise.mixture": ("noise", "mixture", _mixture),
    "noise.block_len": ("noise", "block_len", _integer(1)),
    "noise.sd_low": ("noise", "sd_low", _real(positive=True)),
    "noise.sd_high": ("noise", "sd_high", _real(positive=True)),
    "channel.fading": ("channel", "fading", _choice("slow", "fast")),
    "channel.gain": ("channel", "gain", _real()),
    "channel.low": ("channel", "low", _real()),
    "channel.high": ("channel", "high", _real()),
    "band.file": ("band", "file", str),
    "band.group_size": ("band", "group_size", _integer(1)),
    "band.samples": ("band", "samples", _integer(2)),
    "degen.groups": ("degen", "groups", _integer(1)),
    "degen.group_size": ("degen", "group_size", _integer(1)),
    "degen.two_sided": ("degen", "two_sided", _boolean),
    "degen.null": ("degen", "null", _null_spec),
    "elrm.moment": ("elrm", "moment", _choice(*MOMENT_FUNCTIONS)),
    "elrm.lower": ("elrm", "lower", _real()),
    "elrm.upper": ("elrm", "upper", _real()),
}


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse a flat key=value configuration.

    Args:
        text: File contents

    Returns:
        ExperimentConfig with defaults applied to every missing key

    Raises:
        ConfigParseError: If a line is malformed or a value cannot be converted
        UnknownKeyError: If a key is not part of the configuration
        ConfigRangeError: If a value is outside its allowed range
    """
    entries: list[tuple[str, str, Optional[int]]] = []
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(MALFORMED_LINE_ERROR.format(line), line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigParseError(MALFORMED_LINE_ERROR.format(line), line=number)
        entries.append((key, value, number))
    return _build(entries)


def _build(entries: list[tuple[str, str, Optional[int]]]) -> ExperimentConfig:
    top: dict[str, Any] = {}
    sections: dict[str, dict[str, Any]] = {name: {} for name in ("noise", "channel", "band", "degen", "elrm")}
    lines: dict[str, Optional[int]] = {}

    for key, value, line in entries:
        if key not in _KEYS:
            raise UnknownKeyError(UNKNOWN_KEY_ERROR.format(key), line=line)
        if key in lines:
            raise ConfigParseError(DUPLICATE_KEY_ERROR.format(key), line=line)
        section, attribute, parser = _KEYS[key]
        try:
            parsed = parser(value)
        except ConfigRangeError as e:
            raise ConfigRangeError(f"{key} {e.message}", line=line) from None
        except ValueError as e:
            raise ConfigParseError(BAD_VALUE_ERROR.format(value, key, e), line=line) from None
        (sections[section] if section else top)[attribute] = parsed
        lines[key] = line

    config = ExperimentConfig(
        **top,
        noise=NoiseSettings(**sections["noise"]),
        channel=ChannelSettings(**sections["channel"]),
        band=BandSettings(**sections["band"]),
        degen=DegenerateSettings(**sections["degen"]),
        elrm=MomentSettings(**sections["elrm"]),
    )
    _check_consistency(config, lines)
    return config


def _check_consistency(config: ExperimentConfig, lines: dict[str, Optional[int]]) -> None:
    def fail(message: str, *keys: str) -> None:
        line = max((lines[k] for k in keys if lines.get(k) is not None), default=None)
        raise ConfigRangeError(message, line=line)

    if config.noise.sd_low > config.noise.sd_high:
        fail("noise.sd_low must not exceed noise.sd_high", "noise.sd_low", "noise.sd_high")
    if config.noise.model == "mixture" and not config.noise.mixture:
        fail("noise.model=mixture needs noise.mixture", "noise.model")
    if config.channel.low >= config.channel.high:
        fail("channel.low must be below channel.high", "channel.low", "channel.high")
    if config.band.samples < 2 * config.band.group_size:
        fail("band.samples must cover at least two groups of band.group_size", "band.samples", "band.group_size")
    if config.degen.groups * config.degen_group_size > config.n:
        fail("degen.groups * degen.group_size must not exceed n", "degen.groups", "degen.group_size", "n")
    if config.degen_group_size < 1:
        fail("degen.groups must not exceed n", "degen.groups", "n")
    if config.elrm.lower > config.elrm.upper:
        logger.warning("elrm.lower exceeds elrm.upper; the bounds will be swapped")


def flatten_mapping(data: dict[str, Any], prefix: str = "") -> dict[str, str]:
    """Flatten nested mappings to dotted keys with string values."""
    flat: dict[str, str] = {}
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten_mapping(value, f"{dotted}."))
        elif isinstance(value, bool):
            flat[dotted] = "true" if value else "false"
        else:
            flat[dotted] = str(value)
    return flat


def load_config(path: str) -> ExperimentConfig:
    """
    Load a configuration file through fsspec.

    Files ending in .yaml or .yml are read as nested YAML; anything else as flat
    key=value text.
    """
    text = read_text(path)
    if not path.endswith((".yaml", ".yml")):
        return parse_config(text)

    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        logger.error(f"Invalid YAML in config {path}")
        raise ConfigParseError(f"invalid YAML: {e}") from e
    if data is None:
        return ExperimentConfig()
    if not isinstance(data, dict):
        raise ConfigParseError("YAML config must be a mapping")
    return _build([(key, value, None) for key, value in flatten_mapping(data).items()])


def parse_null_spec(spec: str) -> NullCdf:
    """
    Resolve a fully known null CDF from its textual form.

    Accepted forms are `normal:mean:sd`, `uniform:low:high` and `ecdf:<sample file>`.

    Raises:
        ValueError: If the form is unknown or its parameters are invalid
        InputFileError: If an ECDF file cannot be read
    """
    kind, _, rest = spec.partition(":")
    if kind == "ecdf":
        if not rest:
            raise ValueError(NULL_SPEC_ERROR.format(spec))
        return step_null(record_ecdf(load_sample(rest)))
    if kind not in ("normal", "uniform"):
        raise ValueError(NULL_SPEC_ERROR.format(spec))
    try:
        first, second = (float(part) for part in rest.split(":"))
    except ValueError:
        raise ValueError(NULL_SPEC_ERROR.format(spec)) from None
    return normal_null(first, second) if kind == "normal" else uniform_null(first, second)
