"""Experiment configuration: one JSON document with sections
``layout``, ``ewam``, ``radar``, ``scenario``, ``sweep`` and ``seed``.

Absolute scenario constants (distance, reference gain, noise power, radar
size) are not given by the underlying model; the defaults below only set the
scale of absolute SNR and detection probability.  Normalised results do not
depend on them.
"""

from dataclasses import dataclass, field, fields, replace
import json
import math

import numpy as np

from .detection import RadarConfig
from .exceptions import ConfigError
from .geometry import AnglePair, RadarArrayShape, SurfaceLayout
from .channel import ScenarioGeometry
from .surface import EwamProfile

SWEEP_VARIABLES = ("n_irs", "absorb_p", "control_mode")

# CSV/plot method names -> optimizer modes
METHODS = {
    "proposed": "full",
    "no_irs": "none",
    "random_phase": "random_phase",
    "amplitude_only": "amplitude_only",
    "phase_only": "phase_only",
}


@dataclass(frozen=True)
class ScenarioConstants:
    distance: float = 5000.0
    speed: float = 300.0
    reference_gain: float = 1.0
    wavelength: float = 0.1
    coherence_interval: float = 1e-3

    def geometry(self, surface_angles, radar_angles=None):
        return ScenarioGeometry(
            distance=self.distance,
            speed=self.speed,
            radar_angles=radar_angles if radar_angles is not None else surface_angles,
            surface_angles=surface_angles,
            reference_gain=self.reference_gain,
            wavelength=self.wavelength,
            coherence_interval=self.coherence_interval,
        )

    def radar_norm(self, radar):
        """``|alpha|^4 M^2``: the scenario constant multiplying the normalised SNR."""
        alpha = math.sqrt(self.reference_gain) / self.distance
        return alpha ** 4 * float(radar.shape.size) ** 2


@dataclass(frozen=True)
class ExperimentConfig:
    variable: str = "n_irs"
    grid: tuple = (0, 10, 20, 30, 40, 50, 60)
    trials: int = 1000
    n_total: int = 70
    n_irs: int = 20
    n_ewam: int | None = None  # fixed EWAM count; overrides n_total when set
    p: float = 0.7
    angle_step_deg: float = 1.0
    seed: int = 0
    methods: tuple = tuple(METHODS)
    scenario: ScenarioConstants = field(default_factory=ScenarioConstants)
    radar: RadarConfig = field(default_factory=RadarConfig)
    spacing: float | None = None

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        if len(self.grid) == 0:
            raise ConfigError("sweep grid is empty")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown methods {sorted(unknown)}; choose from {list(METHODS)}")
        if self.variable == "control_mode":
            bad = set(self.grid) - set(METHODS)
            if bad:
                raise ConfigError(f"control_mode grid has unknown methods {sorted(bad)}")
        check_angle_step(self.angle_step_deg)

    def layout_for(self, n_irs=None):
        n_irs = self.n_irs if n_irs is None else int(n_irs)
        n_ewam = self.n_ewam if self.n_ewam is not None else self.n_total - n_irs
        if n_ewam < 0:
            raise ConfigError(f"n_irs={n_irs} exceeds the {self.n_total} surface elements")
        return SurfaceLayout.from_counts(n_irs, n_ewam, spacing=self.spacing,
                                         wavelength=self.scenario.wavelength)


def check_angle_step(step_deg):
    step_deg = float(step_deg)
    if not step_deg > 0:
        raise ConfigError(f"angle step must be positive, got {step_deg}")
    count = 180.0 / step_deg
    if abs(count - round(count)) > 1e-9:
        raise ConfigError(f"angle step {step_deg} deg does not divide the 180 deg range")
    return step_deg


def angle_grid_deg(step_deg=1.0):
    """Azimuth grid over [-90, 90] degrees with ``step_deg`` spacing, endpoints included."""
    step_deg = check_angle_step(step_deg)
    count = int(round(180.0 / step_deg))
    return -90.0 + step_deg * np.arange(count + 1)


FIGURES = {
    2: dict(variable="n_irs", grid=(0, 10, 20, 30, 40, 50, 60), n_total=70, p=0.7),
    3: dict(variable="absorb_p", grid=(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9), n_total=70, n_irs=20),
    4: dict(variable="n_irs", grid=(2, 6, 10, 14, 18, 22, 26, 30), n_ewam=40, p=0.7),
}


def figure_config(number, **overrides):
    try:
        base = FIGURES[int(number)]
    except (KeyError, ValueError):
        raise ConfigError(f"no preset for figure {number!r}; choose from {sorted(FIGURES)}") from None
    return ExperimentConfig(**{**base, **overrides})


def _section(doc, name):
    sec = doc.get(name, {})
    if sec is None:
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    return sec


def _pick(sec, cls, section):
    names = {f.name for f in fields(cls)}
    unknown = set(sec) - names
    if unknown:
        raise ConfigError(f"unknown keys in {section!r}: {sorted(unknown)}")
    return sec


@dataclass(frozen=True)
class LoadedConfig:
    """Every object a CLI command may need, parsed from one document."""

    layout: SurfaceLayout
    ewam_p: float
    ewam_records: list | None
    radar: RadarConfig
    scenario: ScenarioConstants
    surface_angles: AnglePair
    radar_angles: AnglePair
    experiment: ExperimentConfig
    seed: int
    method: str

    def ewam_profile(self, rng=None):
        if self.ewam_records is not None:
            profile = EwamProfile.from_records(self.ewam_records)
            if len(profile) != self.layout.n_ewam:
                raise ConfigError(
                    f"EWAM records give {len(profile)} elements but the layout has {self.layout.n_ewam}"
                )
            return profile
        rng = rng if rng is not None else np.random.default_rng(self.seed)
        return EwamProfile.uniform(self.layout.n_ewam, self.ewam_p, rng)

    def geometry(self):
        return self.scenario.geometry(self.surface_angles, self.radar_angles)


def _angles(value, default):
    if value is None:
        return default
    try:
        az, el = (float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"angles must be a [azimuth_deg, elevation_deg] pair, got {value!r}") from None
    return AnglePair.from_degrees(az, el)


def parse_config(doc):
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(doc) - {"layout", "ewam", "radar", "scenario", "sweep", "seed", "method"}
    if unknown:
        raise ConfigError(f"unknown top-level config keys: {sorted(unknown)}")
    try:
        seed = int(doc.get("seed", 0))
        scen = dict(_section(doc, "scenario"))
        surface_angles = _angles(scen.pop("surface_angles_deg", None), AnglePair(0.0, 0.0))
        radar_angles = _angles(scen.pop("radar_angles_deg", None), surface_angles)
        scenario = ScenarioConstants(**_pick(scen, ScenarioConstants, "scenario"))

        rad = dict(_section(doc, "radar"))
        shape = RadarArrayShape(
            m_x=int(rad.pop("m_x", 4)),
            m_z=int(rad.pop("m_z", 4)),
            spacing=rad.pop("spacing", None),
            wavelength=scenario.wavelength,
        )
        radar = RadarConfig(shape=shape, **_pick(rad, RadarConfig, "radar"))

        lay = dict(_section(doc, "layout"))
        spacing = lay.pop("spacing", None)
        if "n_x" in lay or "n_z" in lay:
            layout = SurfaceLayout(int(lay.pop("n_x")), int(lay.pop("n_z")), int(lay.pop("n_irs", 20)),
                                   spacing=spacing, wavelength=scenario.wavelength)
        else:
            n_irs = int(lay.pop("n_irs", 20))
            n_ewam = int(lay.pop("n_ewam", 70 - n_irs))
            layout = SurfaceLayout.from_counts(n_irs, n_ewam, spacing=spacing, wavelength=scenario.wavelength)
        if lay:
            raise ConfigError(f"unknown keys in 'layout': {sorted(lay)}")

        ew = dict(_section(doc, "ewam"))
        p = float(ew.pop("p", 0.7))
        records = ew.pop("records", None)
        if "file" in ew:
            records = EwamProfile.from_json(ew.pop("file")).to_records()
        if ew:
            raise ConfigError(f"unknown keys in 'ewam': {sorted(ew)}")

        sw = dict(_section(doc, "sweep"))
        figure = sw.pop("figure", None)
        sw.setdefault("seed", seed)
        if "grid" in sw:
            sw["grid"] = tuple(sw["grid"])
        if "methods" in sw:
            sw["methods"] = tuple(sw["methods"])
        _pick(sw, ExperimentConfig, "sweep")
        sw.update(scenario=scenario, radar=radar, spacing=spacing)
        experiment = figure_config(figure, **sw) if figure is not None else ExperimentConfig(**sw)

        method = doc.get("method", "proposed")
        if method not in METHODS:
            raise ConfigError(f"unknown method {method!r}; choose from {list(METHODS)}")
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    return LoadedConfig(layout, p, records, radar, scenario, surface_angles, radar_angles,
                        experiment, seed, method)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return parse_config(doc)


def with_seed(cfg, seed):
    return replace(cfg, seed=int(seed))
