"""JSON scenario documents for the command-line harness.

A scenario bundles system parameters with either a list of power-game
classes or a list of power-and-rate-game users (exactly one of the two),
plus an optional sweep axis. Parsing is strict: unknown or ill-typed
entries raise ConfigError naming the offending field.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError
from .powergame import ReceiverKind

_RECEIVER_NAMES = {r.value: r for r in ReceiverKind}
SWEEP_VARIABLES = ("split_a", "source_rate_bps", "arrival_rate_pps")


@dataclass
class SystemConfig:
    packet_bits: int
    noise_power: float  # W
    processing_gain: Optional[float] = None  # N, power-game scenarios
    bandwidth: Optional[float] = None  # B Hz, rate-game scenarios
    max_power: float = math.inf  # W
    rate: float = 100_000.0  # representative R, bit/s
    gain: float = 1.0  # representative h


@dataclass
class PcgClassConfig:
    load: float
    max_transmissions: int
    confidence: float
    name: str = ""
    gain: float = 1.0
    count: Optional[int] = None  # finite-K user count; default round(load * N)


@dataclass
class PrcgUserConfig:
    arrival_rate: float  # packets/s
    delay_bound: float  # s
    gain: float = 1.0
    max_power: Optional[float] = None  # default: system max_power


@dataclass
class SweepAxis:
    variable: str
    start: float
    stop: float
    steps: int
    scale: str = "linear"

    def values(self) -> list[float]:
        if self.steps == 1:
            return [self.start]
        if self.scale == "log":
            ratio = (self.stop / self.start) ** (1.0 / (self.steps - 1))
            return [self.start * ratio**i for i in range(self.steps)]
        step = (self.stop - self.start) / (self.steps - 1)
        return [self.start + step * i for i in range(self.steps)]


@dataclass
class Scenario:
    system: SystemConfig
    seed: int = 0
    receivers: list[ReceiverKind] = field(
        default_factory=lambda: list(ReceiverKind)
    )
    pcg_classes: Optional[list[PcgClassConfig]] = None
    prcg_users: Optional[list[PrcgUserConfig]] = None
    sweep: Optional[SweepAxis] = None
    out: Optional[str] = None


def _get(mapping, key, kind, path, *, required=True, default=None):
    if key not in mapping:
        if required:
            raise ConfigError(f"{path}.{key}" if path else key, "missing")
        return default
    value = mapping[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}.{key}" if path else key, f"expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}.{key}" if path else key, f"expected an integer, got {value!r}")
        return value
    if not isinstance(value, kind):
        raise ConfigError(
            f"{path}.{key}" if path else key,
            f"expected {kind.__name__}, got {type(value).__name__}",
        )
    return value


def _positive(value, field_path):
    if not value > 0:
        raise ConfigError(field_path, f"must be > 0, got {value!r}")
    return value


def parse_scenario(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "scenario document must be a JSON object")

    sys_doc = _get(doc, "system", dict, "")
    system = SystemConfig(
        packet_bits=_get(sys_doc, "packet_bits", int, "system"),
        noise_power=_positive(
            _get(sys_doc, "noise_power_w", float, "system"), "system.noise_power_w"
        ),
        processing_gain=_get(sys_doc, "processing_gain", float, "system", required=False),
        bandwidth=_get(sys_doc, "bandwidth_hz", float, "system", required=False),
        max_power=_get(sys_doc, "max_power_w", float, "system", required=False, default=math.inf),
        rate=_get(sys_doc, "rate_bps", float, "system", required=False, default=100_000.0),
        gain=_get(sys_doc, "gain", float, "system", required=False, default=1.0),
    )
    if system.packet_bits < 2:
        raise ConfigError("system.packet_bits", f"must be >= 2, got {system.packet_bits}")
    if system.processing_gain is not None:
        _positive(system.processing_gain, "system.processing_gain")
    if system.bandwidth is not None:
        _positive(system.bandwidth, "system.bandwidth_hz")
    _positive(system.max_power, "system.max_power_w")
    _positive(system.rate, "system.rate_bps")
    _positive(system.gain, "system.gain")

    receivers = []
    for i, name in enumerate(
        _get(doc, "receivers", list, "", required=False, default=[r.value for r in ReceiverKind])
    ):
        if name not in _RECEIVER_NAMES:
            raise ConfigError(
                f"receivers[{i}]",
                f"unknown receiver {name!r}; expected one of {sorted(_RECEIVER_NAMES)}",
            )
        receivers.append(_RECEIVER_NAMES[name])
    if not receivers:
        raise ConfigError("receivers", "must not be empty")

    pcg_classes = None
    if "pcg_classes" in doc:
        pcg_classes = []
        for i, entry in enumerate(_get(doc, "pcg_classes", list, "")):
            if not isinstance(entry, dict):
                raise ConfigError(f"pcg_classes[{i}]", "expected an object")
            path = f"pcg_classes[{i}]"
            cfg = PcgClassConfig(
                load=_get(entry, "load", float, path),
                max_transmissions=_get(entry, "max_transmissions", int, path),
                confidence=_get(entry, "confidence", float, path),
                name=_get(entry, "name", str, path, required=False, default=""),
                gain=_get(entry, "gain", float, path, required=False, default=1.0),
                count=_get(entry, "count", int, path, required=False),
            )
            if cfg.load < 0:
                raise ConfigError(f"{path}.load", f"must be >= 0, got {cfg.load}")
            if cfg.max_transmissions < 1:
                raise ConfigError(
                    f"{path}.max_transmissions", f"must be >= 1, got {cfg.max_transmissions}"
                )
            if not 0.0 < cfg.confidence < 1.0:
                raise ConfigError(
                    f"{path}.confidence", f"must lie in (0, 1), got {cfg.confidence}"
                )
            _positive(cfg.gain, f"{path}.gain")
            if cfg.count is not None and cfg.count < 1:
                raise ConfigError(f"{path}.count", f"must be >= 1, got {cfg.count}")
            pcg_classes.append(cfg)

    prcg_users = None
    if "prcg_users" in doc:
        prcg_users = []
        for i, entry in enumerate(_get(doc, "prcg_users", list, "")):
            if not isinstance(entry, dict):
                raise ConfigError(f"prcg_users[{i}]", "expected an object")
            path = f"prcg_users[{i}]"
            cfg = PrcgUserConfig(
                arrival_rate=_get(entry, "arrival_rate_pps", float, path),
                delay_bound=_get(entry, "delay_bound_s", float, path),
                gain=_get(entry, "gain", float, path, required=False, default=1.0),
                max_power=_get(entry, "max_power_w", float, path, required=False),
            )
            if cfg.arrival_rate < 0:
                raise ConfigError(
                    f"{path}.arrival_rate_pps", f"must be >= 0, got {cfg.arrival_rate}"
                )
            _positive(cfg.delay_bound, f"{path}.delay_bound_s")
            _positive(cfg.gain, f"{path}.gain")
            if cfg.max_power is not None:
                _positive(cfg.max_power, f"{path}.max_power_w")
            prcg_users.append(cfg)

    if (pcg_classes is None) == (prcg_users is None):
        raise ConfigError(
            "pcg_classes/prcg_users", "exactly one of the two lists must be present"
        )
    if pcg_classes is not None and not pcg_classes:
        raise ConfigError("pcg_classes", "must not be empty")
    if prcg_users is not None and not prcg_users:
        raise ConfigError("prcg_users", "must not be empty")

    sweep = None
    if "sweep" in doc:
        sweep_doc = _get(doc, "sweep", dict, "")
        sweep = SweepAxis(
            variable=_get(sweep_doc, "variable", str, "sweep"),
            start=_get(sweep_doc, "start", float, "sweep"),
            stop=_get(sweep_doc, "stop", float, "sweep"),
            steps=_get(sweep_doc, "steps", int, "sweep"),
            scale=_get(sweep_doc, "scale", str, "sweep", required=False, default="linear"),
        )
        if sweep.variable not in SWEEP_VARIABLES:
            raise ConfigError(
                "sweep.variable",
                f"unknown variable {sweep.variable!r}; expected one of {SWEEP_VARIABLES}",
            )
        if sweep.steps < 1:
            raise ConfigError("sweep.steps", f"must be >= 1, got {sweep.steps}")
        if not sweep.start <= sweep.stop:
            raise ConfigError("sweep.start", "range must be ordered (start <= stop)")
        if sweep.scale not in ("linear", "log"):
            raise ConfigError("sweep.scale", f"must be 'linear' or 'log', got {sweep.scale!r}")
        if sweep.scale == "log" and not sweep.start > 0:
            raise ConfigError("sweep.start", "log scale requires start > 0")

    return Scenario(
        system=system,
        seed=_get(doc, "seed", int, "", required=False, default=0),
        receivers=receivers,
        pcg_classes=pcg_classes,
        prcg_users=prcg_users,
        sweep=sweep,
        out=_get(doc, "out", str, "", required=False),
    )


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON in {path}: {exc}") from exc
    return parse_scenario(doc)


def scenario_to_dict(s: Scenario) -> dict:
    """Echo a scenario back as a JSON-ready document (parse round-trips)."""
    system = {
        "packet_bits": s.system.packet_bits,
        "noise_power_w": s.system.noise_power,
        "rate_bps": s.system.rate,
        "gain": s.system.gain,
    }
    if math.isfinite(s.system.max_power):
        system["max_power_w"] = s.system.max_power
    if s.system.processing_gain is not None:
        system["processing_gain"] = s.system.processing_gain
    if s.system.bandwidth is not None:
        system["bandwidth_hz"] = s.system.bandwidth
    doc = {
        "seed": s.seed,
        "system": system,
        "receivers": [r.value for r in s.receivers],
    }
    if s.pcg_classes is not None:
        doc["pcg_classes"] = [
            {
                "name": c.name,
                "load": c.load,
                "max_transmissions": c.max_transmissions,
                "confidence": c.confidence,
                "gain": c.gain,
                **({"count": c.count} if c.count is not None else {}),
            }
            for c in s.pcg_classes
        ]
    if s.prcg_users is not None:
        doc["prcg_users"] = [
            {
                "arrival_rate_pps": u.arrival_rate,
                "delay_bound_s": u.delay_bound,
                "gain": u.gain,
                **({"max_power_w": u.max_power} if u.max_power is not None else {}),
            }
            for u in s.prcg_users
        ]
    if s.sweep is not None:
        doc["sweep"] = {
            "variable": s.sweep.variable,
            "start": s.sweep.start,
            "stop": s.sweep.stop,
            "steps": s.sweep.steps,
            "scale": s.sweep.scale,
        }
    if s.out is not None:
        doc["out"] = s.out
    return doc
