# Notes:
#   Run configuration of the simulator and its KEY VALUE file format.
#   Keys mirror the parameter tables of the reference experiments
#   (SIMULATION-TIME, TERRAIN-DIMENSIONS, NUMBER-OF-NODES, ...) plus the keys
#   needed by the retaliation model and the sweeps. Absent keys take the
#   documented defaults; unknown keys are rejected with their line number.
#
# Purpose:
#   To turn a config file into a fully-populated, immutable SimConfig, and back
#   (render_config), so a run can always be reproduced from its rendered text.

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, List, Tuple

from src.reputation.engine import LbpFunction, PunishmentConfig
from src.utils.errors import InvalidConfig, MalformedValue, UnknownKey
from src.utils.time_utils import format_duration, parse_duration


class Variant(str, Enum):
    PDSR = "PDSR"  # plain DSR
    MDSR = "MDSR"  # DSR + retaliation model
    FGMDSR = "FGMDSR"  # MDSR + friendly groups


class Placement(str, Enum):
    GRID = "GRID"


class MobilityModel(str, Enum):
    RANDOM_WAYPOINT = "RANDOM-WAYPOINT"
    NONE = "NONE"


class FlowScope(str, Enum):
    ANY = "ANY"  # uniform over all ordered pairs
    GROUP = "GROUP"  # both ends in the same friendly group


class BehaviorKind(str, Enum):
    HONEST = "HONEST"
    SELFISH = "SELFISH"


@dataclass(frozen=True)
class BehaviorProfile:
    kind: BehaviorKind = BehaviorKind.HONEST
    data_drop_prob: float = 0.0
    participates_in_control: bool = True

    def __post_init__(self):
        if self.kind is BehaviorKind.HONEST and self.data_drop_prob != 0.0:
            raise InvalidConfig("Honest profile cannot drop data packets")
        if not 0.0 <= self.data_drop_prob <= 1.0:
            raise InvalidConfig(f"Drop probability out of [0,1]: {self.data_drop_prob}")


HONEST = BehaviorProfile()


@dataclass(frozen=True)
class MobilityConfig:
    model: MobilityModel = MobilityModel.RANDOM_WAYPOINT
    pause: float = 30.0  # s
    v_min: float = 0.0  # m/s
    v_max: float = 10.0  # m/s
    granularity: float = 0.5  # m
    update_interval: float = 1.0  # s between position updates

    @property
    def is_static(self) -> bool:
        return self.model is MobilityModel.NONE or self.v_max == 0.0


@dataclass(frozen=True)
class TrafficConfig:
    flow_count: int = 10
    packet_interval: float = 0.25  # s, 4 packets/s per flow
    packet_size: int = 512  # bytes
    scope: FlowScope = FlowScope.ANY


@dataclass(frozen=True)
class SimConfig:
    sim_time: float = 900.0
    terrain: Tuple[float, float] = (1250.0, 1250.0)
    node_count: int = 121
    placement: Placement = Placement.GRID
    mobility: MobilityConfig = MobilityConfig()
    radio_range: float = 125.227
    promiscuous: bool = True
    protected_window: float = 60.0
    normal_window: float = 120.0
    forward_timeout: float = 0.1
    variant: Variant = Variant.MDSR
    selfish_fraction: float = 0.0
    selfish_profile: BehaviorProfile = BehaviorProfile(BehaviorKind.SELFISH, 1.0, True)
    grade_threshold: float = 0.5
    punishment: PunishmentConfig = PunishmentConfig()
    group_count: int = 4
    traffic: TrafficConfig = TrafficConfig()
    seed: int = 1

    @property
    def uses_reputation(self) -> bool:
        return self.variant is not Variant.PDSR


# Epoch broadcast round trip; phases sit 3, 2 and 1 rounds before a window ends
BROADCAST_ROUND = 0.05


def validate_config(cfg: SimConfig) -> SimConfig:
    """
    Checks the cross-field invariants of a SimConfig.
    Raises:
        InvalidConfig: On the first violated invariant.
    """
    m = cfg.mobility
    checks: List[Tuple[bool, str]] = [
        (cfg.sim_time >= 0, "SIMULATION-TIME must be >= 0"),
        (cfg.terrain[0] > 0 and cfg.terrain[1] > 0, "TERRAIN-DIMENSIONS must be positive"),
        (cfg.node_count >= 4, "NUMBER-OF-NODES must be >= 4"),
        (
            math.isqrt(cfg.node_count) ** 2 == cfg.node_count,
            "NUMBER-OF-NODES must be a perfect square for GRID placement",
        ),
        (0 <= m.v_min <= m.v_max, "MOBILITY-WP-MIN-SPEED must be <= MAX-SPEED"),
        (m.pause >= 0 and m.granularity > 0, "Pause >= 0 and granularity > 0 required"),
        (m.update_interval > 0, "MOBILITY-UPDATE-INTERVAL must be > 0"),
        (cfg.radio_range > 0, "RADIO-RANGE must be > 0"),
        (0.0 <= cfg.selfish_fraction <= 1.0, "SELFISH-FRACTION must lie in [0,1]"),
        (0.0 <= cfg.grade_threshold <= 1.0, "GRADE-THRESHOLD must lie in [0,1]"),
        (cfg.normal_window > 0, "NORMAL-WINDOW must be > 0"),
        (cfg.forward_timeout > 0, "FORWARD-TIMEOUT must be > 0"),
        (
            cfg.protected_window > 3 * BROADCAST_ROUND + cfg.forward_timeout,
            "PROTECTED-WINDOW too short for the epoch broadcasts",
        ),
        (cfg.group_count >= 1, "GROUP-COUNT must be >= 1"),
        (cfg.traffic.flow_count >= 1, "FLOW-COUNT must be >= 1"),
        (cfg.traffic.packet_interval > 0, "PACKET-INTERVAL must be > 0"),
        (cfg.traffic.packet_size > 0, "PACKET-SIZE must be > 0"),
        (cfg.punishment.grade_rounding >= 0, "GRADE-PRECISION must be >= 0"),
    ]
    for ok, message in checks:
        if not ok:
            raise InvalidConfig(message)
    return cfg


# Value codecs


def _parse_bool(text: str) -> bool:
    up = text.strip().upper()
    if up not in ("YES", "NO"):
        raise ValueError(f"expected YES or NO, got {text!r}")
    return up == "YES"


def _parse_pair(text: str) -> Tuple[float, float]:
    m = re.fullmatch(r"\s*\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)\s*", text)
    if m is None:
        raise ValueError(f"expected (x, y), got {text!r}")
    return float(m.group(1)), float(m.group(2))


def _parse_enum(enum_cls) -> Callable[[str], Enum]:
    def parse(text: str):
        return enum_cls(text.strip().upper())

    return parse


def _parse_finite(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {text!r}")
    return value


def _yes_no(flag: bool) -> str:
    return "YES" if flag else "NO"


@dataclass(frozen=True)
class _Key:
    parse: Callable[[str], object]
    get: Callable[[SimConfig], object]
    set: Callable[[SimConfig, object], SimConfig]
    render: Callable[[object], str] = repr


def _mob(name: str) -> Tuple[Callable, Callable]:
    return (
        lambda c: getattr(c.mobility, name),
        lambda c, v: replace(c, mobility=replace(c.mobility, **{name: v})),
    )


def _trf(name: str) -> Tuple[Callable, Callable]:
    return (
        lambda c: getattr(c.traffic, name),
        lambda c, v: replace(c, traffic=replace(c.traffic, **{name: v})),
    )


def _top(name: str) -> Tuple[Callable, Callable]:
    return lambda c: getattr(c, name), lambda c, v: replace(c, **{name: v})


def _pun(name: str) -> Tuple[Callable, Callable]:
    return (
        lambda c: getattr(c.punishment, name),
        lambda c, v: replace(c, punishment=replace(c.punishment, **{name: v})),
    )


def _sp(name: str) -> Tuple[Callable, Callable]:
    return (
        lambda c: getattr(c.selfish_profile, name),
        lambda c, v: replace(c, selfish_profile=replace(c.selfish_profile, **{name: v})),
    )


_enum_value = lambda v: v.value  # noqa: E731
_pair = lambda v: f"({v[0]!r}, {v[1]!r})"  # noqa: E731

KEYS: Dict[str, _Key] = {
    # parameter-table keys
    "SIMULATION-TIME": _Key(parse_duration, *_top("sim_time"), format_duration),
    "TERRAIN-DIMENSIONS": _Key(_parse_pair, *_top("terrain"), _pair),
    "NUMBER-OF-NODES": _Key(int, *_top("node_count"), str),
    "NODE-PLACEMENT": _Key(_parse_enum(Placement), *_top("placement"), _enum_value),
    "MOBILITY": _Key(_parse_enum(MobilityModel), *_mob("model"), _enum_value),
    "MOBILITY-WP-PAUSE": _Key(parse_duration, *_mob("pause"), format_duration),
    "MOBILITY-WP-MIN-SPEED": _Key(_parse_finite, *_mob("v_min")),
    "MOBILITY-WP-MAX-SPEED": _Key(_parse_finite, *_mob("v_max")),
    "MOBILITY-POSITION-GRANULARITY": _Key(_parse_finite, *_mob("granularity")),
    "PROMISCUOUS-MODE": _Key(_parse_bool, *_top("promiscuous"), _yes_no),
    "ROUTING-PROTOCOL": _Key(
        lambda t: _require(t, "DSR"), lambda c: "DSR", lambda c, v: c, str
    ),
    "RADIO-RANGE": _Key(_parse_finite, *_top("radio_range")),
    # model and experiment keys
    "VARIANT": _Key(_parse_enum(Variant), *_top("variant"), _enum_value),
    "SELFISH-FRACTION": _Key(_parse_finite, *_top("selfish_fraction")),
    "SELFISH-DROP-PROB": _Key(_parse_finite, *_sp("data_drop_prob")),
    "SELFISH-CONTROL": _Key(_parse_bool, *_sp("participates_in_control"), _yes_no),
    "GRADE-THRESHOLD": _Key(_parse_finite, *_top("grade_threshold")),
    "GRADE-PRECISION": _Key(int, *_pun("grade_rounding"), str),
    "PROTECTED-WINDOW": _Key(parse_duration, *_top("protected_window"), format_duration),
    "NORMAL-WINDOW": _Key(parse_duration, *_top("normal_window"), format_duration),
    "FORWARD-TIMEOUT": _Key(parse_duration, *_top("forward_timeout"), format_duration),
    "GROUP-COUNT": _Key(int, *_top("group_count"), str),
    "LBP-FUNCTION": _Key(_parse_enum(LbpFunction), *_pun("lbp_function"), _enum_value),
    "FLOW-COUNT": _Key(int, *_trf("flow_count"), str),
    "PACKET-INTERVAL": _Key(parse_duration, *_trf("packet_interval"), format_duration),
    "PACKET-SIZE": _Key(int, *_trf("packet_size"), str),
    "FLOW-SCOPE": _Key(_parse_enum(FlowScope), *_trf("scope"), _enum_value),
    "MOBILITY-UPDATE-INTERVAL": _Key(
        parse_duration, *_mob("update_interval"), format_duration
    ),
    "SEED": _Key(int, *_top("seed"), str),
}


def _require(text: str, expected: str) -> str:
    if text.strip().upper() != expected:
        raise ValueError(f"only {expected} is supported, got {text!r}")
    return expected


def apply_overrides(
    cfg: SimConfig, items: Dict[str, str], line_of: Dict[str, int] = None
) -> SimConfig:
    """
    Applies KEY -> raw value overrides on top of cfg.
    Raises:
        UnknownKey / MalformedValue: With the line number when known.
    """
    line_of = line_of or {}
    for key, raw in items.items():
        spec = KEYS.get(key.upper())
        if spec is None:
            raise UnknownKey(f"Unknown key {key!r}", line_of.get(key))
        try:
            value = spec.parse(raw)
            cfg = spec.set(cfg, value)
        except (ValueError, InvalidConfig) as exc:
            raise MalformedValue(f"Bad value for {key}: {raw!r} ({exc})", line_of.get(key))
    return cfg


def read_config_items(text: str) -> Tuple[Dict[str, str], Dict[str, int]]:
    """
    Splits config text into KEY -> raw value, remembering each key's line.
    Raises:
        MalformedValue: On a line without a value or a repeated key.
    """
    items: Dict[str, str] = {}
    line_of: Dict[str, int] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise MalformedValue(f"Expected 'KEY VALUE', got {line!r}", lineno)
        key = parts[0].upper()
        if key in items:
            raise MalformedValue(f"Repeated key {key}", lineno)
        items[key] = parts[1].strip()
        line_of[key] = lineno
    return items, line_of


def parse_config(text: str, base: SimConfig = SimConfig()) -> SimConfig:
    """
    Parses a KEY VALUE config file into a validated SimConfig.
    Args:
        text: File content, one "KEY VALUE" pair per line.
        base: Values used for absent keys (documented defaults by default).
    Returns:
        SimConfig: Fully populated and validated configuration.
    Raises:
        UnknownKey, MalformedValue, InvalidConfig
    """
    items, line_of = read_config_items(text)
    for key in items:
        if key not in KEYS:
            raise UnknownKey(f"Unknown key {key!r}", line_of[key])
    return validate_config(apply_overrides(base, items, line_of))


def render_config(cfg: SimConfig) -> str:
    """Renders every key of cfg, one per line, in a fixed order."""
    lines = [f"{key} {spec.render(spec.get(cfg))}" for key, spec in KEYS.items()]
    return "\n".join(lines) + "\n"


def config_as_dict(cfg: SimConfig) -> Dict[str, str]:
    """Rendered KEY -> value mapping, used for lineage records and manifests."""
    return {key: spec.render(spec.get(cfg)) for key, spec in KEYS.items()}


__all__ = [
    "BROADCAST_ROUND",
    "BehaviorKind",
    "BehaviorProfile",
    "HONEST",
    "KEYS",
    "MobilityConfig",
    "MobilityModel",
    "Placement",
    "SimConfig",
    "TrafficConfig",
    "Variant",
    "apply_overrides",
    "config_as_dict",
    "parse_config",
    "read_config_items",
    "render_config",
    "validate_config",
]

