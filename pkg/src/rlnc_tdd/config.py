"""Scenario files: JSON, every quantity in SI base units (bits, seconds, watts)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional

from .analysis import erasures_from_ber
from .errors import DomainError
from .markov import CodingParameters, LinkParameters

SWEEP_VARIABLES = ("Pe", "n")
OBJECTIVE_CHOICES = ("energy", "time", "both")

_LINK_FIELDS = ("data_rate", "propagation_delay", "transmit_power")
_CODING_FIELDS = ("block_size", "payload_bits", "header_bits", "coeff_bits", "ack_bits")


class ConfigError(ValueError):
    """Invalid scenario; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class Sweep:
    variable: str
    values: tuple


@dataclass(frozen=True)
class ScenarioConfig:
    link: LinkParameters
    coding: CodingParameters
    sweep: Optional[Sweep] = None
    objective: str = "both"
    simulation: dict = field(default_factory=dict)

    def points(self) -> list[tuple[LinkParameters, CodingParameters]]:
        """Parameter sets in sweep order (a single point without a sweep)."""
        if self.sweep is None:
            return [(self.link, self.coding)]
        out = []
        for v in self.sweep.values:
            if self.sweep.variable == "Pe":
                out.append((self.link.with_erasures(v), self.coding))
            else:
                coding = replace(self.coding, payload_bits=v)
                out.append((_apply_ber(self.link, coding), coding))
        return out


def _apply_ber(link: LinkParameters, coding: CodingParameters) -> LinkParameters:
    if link.bit_error_rate is None:
        return link
    pe, pa = erasures_from_ber(link.bit_error_rate, coding)
    return link.with_erasures(pe, pa)


def _number(section: dict, prefix: str, name: str, required: bool = True, integer: bool = False):
    key = f"{prefix}.{name}"
    if name not in section or section[name] is None:
        if required:
            raise ConfigError(key, "required field is missing")
        return None
    v = section[name]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(key, f"expected a number, got {v!r}")
    if integer:
        if float(v) != int(v):
            raise ConfigError(key, f"expected an integer, got {v!r}")
        return int(v)
    return float(v)


def _section(raw: dict, name: str) -> dict:
    sec = raw.get(name)
    if sec is None:
        raise ConfigError(name, "required section is missing")
    if not isinstance(sec, dict):
        raise ConfigError(name, "must be a JSON object")
    return sec


def parse_scenario(raw: dict) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "scenario must be a JSON object")
    link_raw = _section(raw, "link")
    coding_raw = _section(raw, "coding")

    coding_kw = {k: _number(coding_raw, "coding", k, integer=True) for k in _CODING_FIELDS}
    try:
        coding = CodingParameters(**coding_kw)
    except DomainError as exc:
        raise ConfigError("coding." + str(exc).split()[0], str(exc)) from None

    link_kw = {k: _number(link_raw, "link", k) for k in _LINK_FIELDS}
    ber = _number(link_raw, "link", "bit_error_rate", required=False)
    if ber is not None:
        for k in ("pkt_erasure", "ack_erasure"):
            if link_raw.get(k) is not None:
                raise ConfigError(f"link.{k}", "give either erasure probabilities or bit_error_rate, not both")
        if not 0.0 <= ber < 1.0:
            raise ConfigError("link.bit_error_rate", f"must lie in [0, 1), got {ber}")
        pe, pa = erasures_from_ber(ber, coding)
    else:
        pe = _number(link_raw, "link", "pkt_erasure")
        pa = _number(link_raw, "link", "ack_erasure")
    try:
        link = LinkParameters(pkt_erasure=pe, ack_erasure=pa, bit_error_rate=ber, **link_kw)
    except DomainError as exc:
        raise ConfigError("link." + str(exc).split()[0], str(exc)) from None

    sweep = None
    if raw.get("sweep") is not None:
        sweep = _parse_sweep(raw["sweep"], link, coding)

    objective = raw.get("objective", "both")
    if objective not in OBJECTIVE_CHOICES:
        raise ConfigError("objective", f"must be one of {OBJECTIVE_CHOICES}, got {objective!r}")

    simulation = raw.get("simulation") or {}
    if not isinstance(simulation, dict):
        raise ConfigError("simulation", "must be a JSON object")
    return ScenarioConfig(link=link, coding=coding, sweep=sweep, objective=objective, simulation=dict(simulation))


def _parse_sweep(sweep_raw, link: LinkParameters, coding: CodingParameters) -> Sweep:
    if not isinstance(sweep_raw, dict):
        raise ConfigError("sweep", "must be a JSON object")
    variable = sweep_raw.get("variable")
    if variable not in SWEEP_VARIABLES:
        raise ConfigError("sweep.variable", f"must be one of {SWEEP_VARIABLES}, got {variable!r}")
    values = sweep_raw.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values", "must be a non-empty list")
    out = []
    for k, v in enumerate(values):
        key = f"sweep.values[{k}]"
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(key, f"expected a number, got {v!r}")
        if variable == "Pe":
            if link.bit_error_rate is not None:
                raise ConfigError("sweep.variable", "cannot sweep Pe when it is derived from bit_error_rate")
            if not 0.0 <= v < 1.0:
                raise ConfigError(key, f"Pe must lie in [0, 1), got {v}")
            out.append(float(v))
        else:
            if float(v) != int(v) or v < 1:
                raise ConfigError(key, f"n must be an integer >= 1, got {v}")
            out.append(int(v))
    return Sweep(variable, tuple(out))


def bundled_scenarios() -> list[str]:
    root = resources.files("rlnc_tdd") / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def read_scenario_text(path: str) -> str:
    """File contents of ``path``, falling back to a bundled scenario name such as ``fig4``."""
    p = Path(path)
    if p.exists():
        return p.read_text()
    name = p.name if p.name.endswith(".json") else p.name + ".json"
    if str(p.parent) in ("", ".") and name in bundled_scenarios():
        return (resources.files("rlnc_tdd") / "scenarios" / name).read_text()
    raise ConfigError("config", f"no such file or bundled scenario: {path}")


def load_scenario(path: str) -> ScenarioConfig:
    text = read_scenario_text(path)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from None
    return parse_scenario(raw)
