"""Scenario files for the command-line front end.

INI layout (every section optional except one of ``[model]`` / ``[preset]``)::

    [model]            ; dimensionless parameters
    A = 0.9
    g = 0.1
    alpha = 0.1
    kappa = 1.0

    [preset]           ; or: a detector closed onto dimensionless targets
    name = aLIGO
    file = my_presets.ini   ; optional, defaults to the built-in table
    A = 0.9
    g = 0.1
    alpha = 0.1

    [modulation]
    depths = 0, 0.5, 0.9    ; fractions of m_c unless units = absolute
    units = fraction
    phase = auto            ; auto makes eps_11 real and positive
    pump_half_frequency = auto

    [grid]
    half_width = 10         ; in units of gamma_1
    points = 2001

    [thermal]
    enabled = false

    [oracle]
    seed = 20240601
    runs = 8
    steps = 1048576
    dt = 0.04
    cutoff = 3.0
    workers = 1

    [output]
    dir = out
"""
from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, replace

from .noise import DetectorPreset, get_preset, load_presets
from .params import BASELINE_PARAMS, DimensionlessParams, ParameterError


class ConfigError(ValueError):
    pass


_SECTIONS = {
    "model": {"A", "g", "alpha", "kappa"},
    "preset": {"name", "file", "A", "g", "alpha"},
    "modulation": {"depths", "units", "phase", "pump_half_frequency"},
    "grid": {"half_width", "points"},
    "thermal": {"enabled"},
    "oracle": {"seed", "runs", "steps", "dt", "cutoff", "workers"},
    "output": {"dir"},
}


def parse_depths(text: str) -> tuple:
    items = [s for s in text.replace(";", ",").split(",") if s.strip()]
    if not items:
        raise ConfigError("depth list is empty")
    try:
        return tuple(float(s) for s in items)
    except ValueError:
        raise ConfigError(f"cannot parse depth list {text!r}") from None


@dataclass(frozen=True)
class OracleSettings:
    seed: int = 20240601
    runs: int = 8
    steps: int = 2**20
    dt: float = 0.04
    cutoff: float = 3.0
    workers: int = 1


@dataclass(frozen=True)
class ScenarioConfig:
    model: DimensionlessParams | None = None
    preset: DetectorPreset | None = None
    targets: DimensionlessParams = BASELINE_PARAMS
    depths: tuple = (0.0, 0.5, 0.9)
    depth_units: str = "fraction"
    phase: float | None = None
    pump_half_frequency: float | None = None
    half_width: float = 10.0
    points: int = 2001
    thermal: bool = False
    oracle: OracleSettings = field(default_factory=OracleSettings)
    out_dir: str = "out"

    def __post_init__(self):
        if (self.model is None) == (self.preset is None):
            raise ConfigError("give exactly one of [model] or [preset]")
        if self.depth_units not in ("fraction", "absolute"):
            raise ConfigError("modulation units must be 'fraction' or 'absolute'")
        if not self.depths:
            raise ConfigError("depth list is empty")
        for d in self.depths:
            if d < 0:
                raise ConfigError(f"modulation depth {d} is negative")
            if self.depth_units == "fraction" and d > 1:
                raise ConfigError(f"depth fraction {d} exceeds 1: beyond the parametric "
                                  "threshold m_c, no stationary spectrum exists")
        if self.points < 3 or self.half_width <= 0:
            raise ConfigError("grid needs half_width > 0 and at least 3 points")
        if self.thermal and self.preset is None:
            raise ConfigError("thermal noise needs a detector preset")
        if not 0 <= self.oracle.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    def dimensionless(self) -> DimensionlessParams:
        if self.model is not None:
            return self.model
        return self.preset.close(self.targets).dimensionless

    def replace(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)

    def header_lines(self) -> list:
        """``key=value`` lines describing the fully resolved scenario."""
        dp = self.dimensionless()
        lines = [f"A={dp.A!r}", f"g={dp.g!r}", f"alpha={dp.alpha!r}", f"kappa={dp.kappa!r}"]
        if self.preset is not None:
            lines.append(f"preset={self.preset.name}")
            lines.append(f"targets=A:{self.targets.A},g:{self.targets.g},alpha:{self.targets.alpha}")
        lines += [
            f"depths={','.join(repr(d) for d in self.depths)}",
            f"depth_units={self.depth_units}",
            f"phase={'auto' if self.phase is None else repr(self.phase)}",
            f"pump_half_frequency={'auto' if self.pump_half_frequency is None else repr(self.pump_half_frequency)}",
            f"grid=half_width:{self.half_width},points:{self.points}",
            f"thermal={self.thermal}",
            "oracle=" + ",".join(f"{k}:{v}" for k, v in asdict(self.oracle).items()),
        ]
        return lines


def _auto(raw: str):
    raw = raw.strip()
    return None if raw.lower() in ("", "auto", "none") else float(raw)


def _targets(items) -> DimensionlessParams:
    return DimensionlessParams(
        A=float(items.get("A", BASELINE_PARAMS.A)),
        g=float(items.get("g", BASELINE_PARAMS.g)),
        alpha=float(items.get("alpha", BASELINE_PARAMS.alpha)),
    )


def load_config(path=None, text: str | None = None) -> ScenarioConfig:
    """Read a scenario from an INI file (or string); unknown keys are errors."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        if text is not None:
            parser.read_string(text, source="<string>")
        else:
            with open(path) as fh:
                parser.read_file(fh)
    except (configparser.Error, OSError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        extra = set(parser[section]) - _SECTIONS[section]
        if extra:
            raise ConfigError(f"[{section}]: unknown keys {sorted(extra)}")
    try:
        return _build(parser)
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def _build(parser) -> ScenarioConfig:
    kw = {}
    if parser.has_section("model"):
        m = parser["model"]
        kw["model"] = DimensionlessParams(
            A=float(m.get("A", BASELINE_PARAMS.A)), g=float(m.get("g", BASELINE_PARAMS.g)),
            alpha=float(m.get("alpha", BASELINE_PARAMS.alpha)), kappa=float(m.get("kappa", 1.0)))
    if parser.has_section("preset"):
        p = parser["preset"]
        if "name" not in p:
            raise ConfigError("[preset] needs a name")
        if "file" in p:
            presets, _ = load_presets(p["file"])
            if p["name"] not in presets:
                raise ConfigError(f"preset {p['name']!r} not in {p['file']}")
            kw["preset"] = presets[p["name"]]
        else:
            kw["preset"] = get_preset(p["name"])
        kw["targets"] = _targets(p)
    if parser.has_section("modulation"):
        m = parser["modulation"]
        if "depths" in m:
            kw["depths"] = parse_depths(m["depths"])
        kw["depth_units"] = m.get("units", "fraction").strip()
        kw["phase"] = _auto(m.get("phase", "auto"))
        kw["pump_half_frequency"] = _auto(m.get("pump_half_frequency", "auto"))
    if parser.has_section("grid"):
        kw["half_width"] = parser["grid"].getfloat("half_width", 10.0)
        kw["points"] = parser["grid"].getint("points", 2001)
    if parser.has_section("thermal"):
        kw["thermal"] = parser["thermal"].getboolean("enabled", False)
    if parser.has_section("oracle"):
        o = parser["oracle"]
        base = OracleSettings()
        kw["oracle"] = OracleSettings(
            seed=o.getint("seed", base.seed), runs=o.getint("runs", base.runs),
            steps=o.getint("steps", base.steps), dt=o.getfloat("dt", base.dt),
            cutoff=o.getfloat("cutoff", base.cutoff), workers=o.getint("workers", base.workers))
    if parser.has_section("output"):
        kw["out_dir"] = parser["output"].get("dir", "out")
    try:
        return ScenarioConfig(**kw)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None
