"""Scenario configuration: INI parsing, validation, and run manifests.

The grammar is flat key/value pairs under named sections, decimal
numbers, and '#' comments; see the README for the full key table.
External units are linear frequency (MHz or kHz as suffixed), nm, K,
and kg; conversion to internal angular frequencies happens in the
build_* methods.
"""

from __future__ import annotations

import configparser
import copy
from dataclasses import dataclass, field
from io import StringIO

import numpy as np

from .doppler import VelocityGrid, delta_grid, thermal_grid
from .exceptions import ConfigError
from .levels import MHZ, TWO_PI, DriveSet, Field, LevelScheme
from .presets import DEFAULTS, PRESETS
from .spectra import detuning_axis

MODES = ("spectrum", "cutoff-scan", "rabi-scan", "zeeman", "stark")
_KNOWN_SECTIONS = ("scenario", *DEFAULTS.keys())

#: Value type per key, applied during validate(): number, integer,
#: boolean, list (comma-separated numbers), or raw (checked elsewhere).
_SCHEMA: dict[str, dict[str, str]] = {
    "levels": {
        "gamma2_mhz": "number", "gamma4_mhz": "number",
        "transit_khz": "number", "branching_21": "number",
        "branching_23": "number", "branching_43": "number",
        "transit_as_dephasing": "boolean",
    },
    "drives": {
        "probe_rabi_mhz": "number", "coupling_rabi_mhz": "number",
        "control_rabi_mhz": "number", "coupling_detuning_mhz": "number",
        "control_detuning_mhz": "number", "wavelength_nm": "number",
    },
    "grid": {
        "kind": "raw", "temperature_k": "number", "atomic_mass_kg": "number",
        "n_nodes": "integer", "span_sigma": "number", "velocity_ms": "number",
    },
    "axis": {
        "inner_mhz": "number", "inner_step_mhz": "number",
        "outer_mhz": "number", "outer_step_mhz": "number",
    },
    "output": {"target_od": "number", "noise_floor": "number"},
    "cutoff_scan": {"cutoffs_gamma2": "list"},
    "rabi_scan": {"control_rabi_list_mhz": "list"},
    "zeeman": {"offsets_mhz": "list", "weights": "list"},
    "stark": {
        "control_rabi_list_mhz": "list", "window_mhz": "number",
        "step_mhz": "number",
    },
}


def _parser() -> configparser.ConfigParser:
    return configparser.ConfigParser(inline_comment_prefixes=("#",),
                                     interpolation=None)


@dataclass
class ScenarioConfig:
    """A fully merged scenario: defaults, preset, file, and overrides.

    Values are stored as strings in external units, exactly as they
    appear in a config file, so a manifest echo reloads bit-identically.
    """

    values: dict[str, dict[str, str]]
    preset: str | None = None
    sources: list[str] = field(default_factory=list)

    # -- construction ---------------------------------------------------

    @classmethod
    def from_sources(cls, preset: str | None = None,
                     config_path: str | None = None,
                     overrides: list[str] | None = None) -> "ScenarioConfig":
        """Merge defaults, an optional preset, a file, and overrides."""
        values: dict[str, dict[str, str]] = copy.deepcopy(DEFAULTS)
        values["scenario"] = {}
        sources = ["defaults"]
        if preset is not None:
            if preset not in PRESETS:
                raise ConfigError(
                    f"unknown preset {preset!r}; choose from "
                    f"{', '.join(sorted(PRESETS))}", field="preset")
            _merge(values, PRESETS[preset])
            sources.append(f"preset:{preset}")
        if config_path is not None:
            _merge(values, _read_ini(config_path))
            sources.append(f"file:{config_path}")
        for item in overrides or []:
            section_key, _, raw = item.partition("=")
            section, _, key = section_key.partition(".")
            if not raw or not section or not key:
                raise ConfigError(
                    f"override {item!r} must look like section.key=value",
                    field=item)
            _merge(values, {section: {key: raw}})
            sources.append(f"override:{item}")
        cfg = cls(values=values, preset=preset, sources=sources)
        cfg.validate()
        return cfg

    # -- access helpers -------------------------------------------------

    def _get(self, section: str, key: str) -> str:
        try:
            return self.values[section][key]
        except KeyError:
            raise ConfigError(f"missing required field [{section}] {key}",
                              field=f"{section}.{key}") from None

    def number(self, section: str, key: str) -> float:
        raw = self._get(section, key)
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key} = {raw!r} is not a number",
                              field=f"{section}.{key}") from None

    def integer(self, section: str, key: str) -> int:
        value = self.number(section, key)
        if value != int(value):
            raise ConfigError(f"[{section}] {key} must be an integer",
                              field=f"{section}.{key}")
        return int(value)

    def boolean(self, section: str, key: str) -> bool:
        raw = self._get(section, key).strip().lower()
        if raw in ("true", "yes", "on", "1"):
            return True
        if raw in ("false", "no", "off", "0"):
            return False
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a boolean",
                          field=f"{section}.{key}")

    def number_list(self, section: str, key: str) -> list[float]:
        raw = self._get(section, key)
        try:
            return [float(tok) for tok in raw.split(",") if tok.strip()]
        except ValueError:
            raise ConfigError(f"[{section}] {key} = {raw!r} is not a "
                              "comma-separated number list",
                              field=f"{section}.{key}") from None

    @property
    def mode(self) -> str:
        return self._get("scenario", "mode").strip()

    # -- validation -----------------------------------------------------

    def validate(self) -> None:
        """Raise ConfigError on unknown keys or malformed values."""
        readers = {"number": self.number, "integer": self.integer,
                   "boolean": self.boolean, "list": self.number_list}
        for section in self.values:
            if section not in _KNOWN_SECTIONS:
                raise ConfigError(f"unknown section [{section}]", field=section)
            known = _SCHEMA.get(section, {"mode": "raw"})
            for key in self.values[section]:
                if key not in known:
                    raise ConfigError(f"unknown key {key!r} in [{section}]",
                                      field=f"{section}.{key}")
                if known[key] != "raw":
                    readers[known[key]](section, key)
        if self.mode not in MODES:
            raise ConfigError(f"[scenario] mode must be one of "
                              f"{', '.join(MODES)}, got {self.mode!r}",
                              field="scenario.mode")
        gkind = self._get("grid", "kind").strip()
        if gkind not in ("thermal", "delta"):
            raise ConfigError(f"[grid] kind must be thermal or delta, "
                              f"got {gkind!r}", field="grid.kind")
        b21 = self.number("levels", "branching_21")
        b23 = self.number("levels", "branching_23")
        if self.number("levels", "gamma2_mhz") > 0 and abs(b21 + b23 - 1) > 1e-12:
            raise ConfigError("branching_21 + branching_23 must sum to 1",
                              field="levels.branching_21")
        if not 0 <= self.number("levels", "branching_43") <= 1:
            raise ConfigError("branching_43 must lie in [0, 1]",
                              field="levels.branching_43")
        if self.number("output", "target_od") <= 0:
            raise ConfigError("target_od must be positive",
                              field="output.target_od")
        if len(self.number_list("zeeman", "offsets_mhz")) != \
                len(self.number_list("zeeman", "weights")):
            raise ConfigError("zeeman offsets and weights differ in length",
                              field="zeeman.weights")

    # -- builders (external units -> rad/s) -----------------------------

    def build_scheme(self) -> LevelScheme:
        gamma2 = self.number("levels", "gamma2_mhz") * MHZ
        gamma4 = self.number("levels", "gamma4_mhz") * MHZ
        b21 = self.number("levels", "branching_21")
        b23 = self.number("levels", "branching_23")
        b43 = self.number("levels", "branching_43")
        scheme = LevelScheme(
            natural_decay=(0.0, gamma2, 0.0, gamma4),
            branching=((0.0, 0.0, 0.0, 0.0),
                       (b21, 0.0, b23, 0.0),
                       (0.0, 0.0, 0.0, 0.0),
                       (1.0 - b43, 0.0, b43, 0.0)),
            transit_rate=self.number("levels", "transit_khz") * TWO_PI * 1e3,
            transit_as_dephasing=self.boolean("levels", "transit_as_dephasing"),
        )
        try:
            scheme.validate()
        except ValueError as err:
            raise ConfigError(str(err), field="levels") from err
        return scheme

    def build_drives(self) -> DriveSet:
        wavelength = self.number("drives", "wavelength_nm") * 1e-9
        if wavelength <= 0:
            raise ConfigError("wavelength_nm must be positive",
                              field="drives.wavelength_nm")
        drives = DriveSet(
            probe=Field(self.number("drives", "probe_rabi_mhz") * MHZ, 0.0, -1),
            coupling=Field(self.number("drives", "coupling_rabi_mhz") * MHZ,
                           self.number("drives", "coupling_detuning_mhz") * MHZ, -1),
            control=Field(self.number("drives", "control_rabi_mhz") * MHZ,
                          self.number("drives", "control_detuning_mhz") * MHZ, +1),
            wavevector=TWO_PI / wavelength,
        )
        try:
            drives.validate()
        except ValueError as err:
            raise ConfigError(str(err), field="drives") from err
        return drives

    def build_grid(self) -> VelocityGrid:
        if self._get("grid", "kind").strip() == "delta":
            return delta_grid(self.number("grid", "velocity_ms"))
        return thermal_grid(self.number("grid", "temperature_k"),
                            self.number("grid", "atomic_mass_kg"),
                            span=self.number("grid", "span_sigma"),
                            n_nodes=self.integer("grid", "n_nodes"))

    def build_axis(self) -> np.ndarray:
        return detuning_axis(
            inner_half_width=self.number("axis", "inner_mhz") * MHZ,
            inner_step=self.number("axis", "inner_step_mhz") * MHZ,
            outer_half_width=self.number("axis", "outer_mhz") * MHZ,
            outer_step=self.number("axis", "outer_step_mhz") * MHZ,
        )

    @property
    def target_od(self) -> float:
        return self.number("output", "target_od")

    @property
    def noise_floor(self) -> float:
        return self.number("output", "noise_floor")

    def zeeman_parts(self) -> tuple[list[float], list[float]]:
        """Offsets in rad/s plus weights normalized to unit sum."""
        offsets = [o * MHZ for o in self.number_list("zeeman", "offsets_mhz")]
        weights = np.asarray(self.number_list("zeeman", "weights"), dtype=float)
        if np.any(weights < 0) or weights.sum() <= 0:
            raise ConfigError("zeeman weights must be nonnegative with a "
                              "positive sum", field="zeeman.weights")
        return offsets, list(weights / weights.sum())

    # -- manifest -------------------------------------------------------

    def to_ini(self, run_info: dict[str, str] | None = None) -> str:
        """Render the effective configuration, optionally with run info."""
        parser = _parser()
        parser["scenario"] = dict(self.values.get("scenario", {}))
        for section in DEFAULTS:
            parser[section] = dict(self.values[section])
        if run_info:
            parser["run"] = dict(run_info)
        buffer = StringIO()
        parser.write(buffer)
        return buffer.getvalue()


def _merge(base: dict[str, dict[str, str]],
           overlay: dict[str, dict[str, str]]) -> None:
    for section, payload in overlay.items():
        base.setdefault(section, {}).update(payload)


def _read_ini(path: str) -> dict[str, dict[str, str]]:
    parser = _parser()
    try:
        with open(path) as handle:
            parser.read_file(handle)
    except OSError as err:
        raise ConfigError(f"cannot read config {path!r}: {err}") from err
    except configparser.Error as err:
        raise ConfigError(f"config parse error in {path!r}: {err}") from err
    data = {}
    for section in parser.sections():
        if section == "run":
            continue
        data[section] = dict(parser[section])
    return data
