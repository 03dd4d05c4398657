"""Monte-Carlo sweeps, offline lookup tables and CSV/SVG emission."""

from dataclasses import dataclass, field
import csv
import io
import json
import logging
import math
from pathlib import Path

import numpy as np

from .config import METHODS, angle_grid_deg
from .detection import detection_probability
from .exceptions import ConfigError, StealthError, SolverError
from .geometry import AnglePair, surface_responses
from .optimizer import SolverOptions, design_reflection, solve_kkt
from .surface import EwamProfile, build_echo_coefficients

logger = logging.getLogger(__name__)

CSV_HEADER = ["grid_value", "method", "trials", "snr_mean", "snr_median", "snr_min", "snr_max", "pd_mean"]
DB_FLOOR = -200.0

# independent sub-streams of one trial
_STREAM_ANGLE, _STREAM_EWAM, _STREAM_PHASE = 0, 1, 2


def trial_rng(seed, trial, stream):
    """Counter-based generator keyed by ``(seed, trial, stream)``."""
    return np.random.default_rng([int(seed), int(trial), stream])


@dataclass
class MethodStats:
    trials: int
    snr_mean: float
    snr_median: float
    snr_min: float
    snr_max: float
    pd_mean: float
    values: np.ndarray | None = None

    @classmethod
    def from_values(cls, values, p_d, keep=False):
        values = np.asarray(values, dtype=float)
        return cls(
            trials=int(values.size),
            snr_mean=float(np.mean(values)),
            snr_median=float(np.median(values)),
            snr_min=float(np.min(values)),
            snr_max=float(np.max(values)),
            pd_mean=float(np.mean(p_d)),
            values=values if keep else None,
        )


@dataclass
class SweepResult:
    variable: str
    grid: list = field(default_factory=list)
    methods: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)  # (grid_value, method) -> MethodStats
    errors: dict = field(default_factory=dict)  # grid_value -> message

    def mean(self, grid_value, method):
        return self.stats[(grid_value, method)].snr_mean

    def series(self, method):
        """``(grid_values, means)`` over the points where ``method`` ran."""
        xs = [g for g in self.grid if (g, method) in self.stats]
        return xs, [self.stats[(g, method)].snr_mean for g in xs]

    def rows(self):
        for g in self.grid:
            for m in self.methods:
                if (g, m) in self.stats:
                    yield g, m, self.stats[(g, m)]


def _grid_point(cfg, value):
    """(layout, absorb_p, methods) for one grid value."""
    if cfg.variable == "n_irs":
        return cfg.layout_for(int(value)), cfg.p, list(cfg.methods)
    if cfg.variable == "absorb_p":
        p = float(value)
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"absorbing efficiency {p} outside [0, 1]")
        return cfg.layout_for(), p, list(cfg.methods)
    return cfg.layout_for(), cfg.p, [value]


def run_trial(cfg, layout, p, methods, trial, azimuths, opts):
    """Normalised echo power of each method for one trial."""
    az = azimuths[trial_rng(cfg.seed, trial, _STREAM_ANGLE).integers(azimuths.size)]
    angles = AnglePair.from_degrees(az, 0.0)
    a_irs, a_ewam = surface_responses(angles, layout)
    ewam = EwamProfile.uniform(layout.n_ewam, p, trial_rng(cfg.seed, trial, _STREAM_EWAM))
    coeffs = build_echo_coefficients(a_irs, a_ewam, ewam)
    out = {}
    for m in methods:
        seed = trial_rng(cfg.seed, trial, _STREAM_PHASE) if METHODS[m] == "random_phase" else None
        _, out[m] = design_reflection(coeffs, METHODS[m], seed, opts)
    return out


def run_sweep(cfg, opts=None, keep_values=False):
    """Run ``cfg.trials`` independent draws per grid point for every method.

    Trial ``t`` uses the same random streams at every grid point, so curves
    are compared on common random numbers.  A grid point that cannot be built
    (e.g. an odd EWAM count) is recorded in ``errors`` and skipped.
    """
    opts = opts or SolverOptions()
    azimuths = angle_grid_deg(cfg.angle_step_deg)
    scale = cfg.scenario.radar_norm(cfg.radar) / cfg.radar.noise_variance
    result = SweepResult(cfg.variable, list(cfg.grid), [])
    for value in cfg.grid:
        try:
            layout, p, methods = _grid_point(cfg, value)
        except StealthError as exc:
            logger.warning("grid point %r skipped: %s", value, exc)
            result.errors[value] = str(exc)
            continue
        for m in methods:
            if m not in result.methods:
                result.methods.append(m)
        values = {m: np.empty(cfg.trials) for m in methods}
        for t in range(cfg.trials):
            try:
                objs = run_trial(cfg, layout, p, methods, t, azimuths, opts)
            except SolverError as exc:
                raise SolverError(f"grid point {value!r}, trial {t}: {exc}", exc.residuals) from exc
            for m, v in objs.items():
                values[m][t] = v
        for m in methods:
            p_d = [detection_probability(v * scale, cfg.radar.p_fa) for v in values[m]]
            result.stats[(value, m)] = MethodStats.from_values(values[m], p_d, keep_values)
    return result


def _fmt(value):
    return repr(float(value)) if isinstance(value, (float, np.floating)) else str(value)


def csv_text(result):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for g, m, s in result.rows():
        writer.writerow([_fmt(g), m, s.trials, _fmt(s.snr_mean), _fmt(s.snr_median),
                         _fmt(s.snr_min), _fmt(s.snr_max), _fmt(s.pd_mean)])
    return buf.getvalue()


def emit_csv(result, path):
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text(result))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return path


def to_db(values, floor=DB_FLOOR):
    values = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(values)
    return np.maximum(db, floor)


_XLABELS = {"n_irs": "number of IRS elements", "absorb_p": "absorbing efficiency p",
            "control_mode": "control mode"}


def emit_plot(result, path):
    """Mean normalised echo power (dB, floored) against the grid, one series per method."""
    if not result.stats:
        raise ConfigError("cannot plot an empty sweep result")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": "irs-stealth", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.8))
        categorical = result.variable == "control_mode"
        for i, m in enumerate(result.methods):
            xs, ys = result.series(m)
            if categorical:
                xs = [result.grid.index(x) for x in xs]
            ax.plot(xs, to_db(ys), marker="os^vD"[i % 5], label=m)
        if categorical:
            ax.set_xticks(range(len(result.grid)), result.grid)
        ax.set_xlabel(_XLABELS[result.variable])
        ax.set_ylabel("normalised SNR (dB)")
        ax.grid(True, alpha=0.3)
        ax.legend()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise OSError(f"cannot write SVG to {path}: {exc}") from exc
        finally:
            plt.close(fig)
    return path


@dataclass
class LookupTable:
    """Offline map from a quantised AoA grid to precomputed reflection vectors."""

    step_deg: float
    elevation_deg: float
    azimuths_deg: np.ndarray
    thetas: np.ndarray  # (n_angles, n_irs)
    objectives: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return self.azimuths_deg.shape[0]

    def key(self, angles):
        """Index of the nearest stored azimuth."""
        az = math.degrees(angles.azimuth)
        idx = int(round((az - self.azimuths_deg[0]) / self.step_deg))
        return min(max(idx, 0), len(self) - 1)

    def lookup(self, angles):
        idx = self.key(angles)
        return self.azimuths_deg[idx], self.thetas[idx]

    def to_dict(self):
        return {
            "metadata": dict(self.metadata, step_deg=self.step_deg, elevation_deg=self.elevation_deg),
            "entries": [
                {
                    "azimuth_deg": float(az),
                    "elevation_deg": float(self.elevation_deg),
                    "theta": [[float(z.real), float(z.imag)] for z in th],
                    "objective": float(obj),
                }
                for az, th, obj in zip(self.azimuths_deg, self.thetas, self.objectives)
            ],
        }

    @classmethod
    def from_dict(cls, doc):
        meta = dict(doc["metadata"])
        step = float(meta.pop("step_deg"))
        elev = float(meta.pop("elevation_deg"))
        entries = doc["entries"]
        az = np.array([e["azimuth_deg"] for e in entries], dtype=float)
        thetas = np.array([[complex(re, im) for re, im in e["theta"]] for e in entries], dtype=complex)
        obj = np.array([e["objective"] for e in entries], dtype=float)
        return cls(step, elev, az, thetas.reshape(len(entries), -1), obj, meta)

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def build_lookup_table(layout, ewam, angle_step_deg=1.0, elevation_deg=0.0, opts=None, metadata=None):
    """Solve the proposed design at every azimuth of the quantised grid."""
    opts = opts or SolverOptions()
    azimuths = angle_grid_deg(angle_step_deg)
    thetas = np.empty((azimuths.size, layout.n_irs), dtype=complex)
    objectives = np.empty(azimuths.size)
    for i, az in enumerate(azimuths):
        a_irs, a_ewam = surface_responses(AnglePair.from_degrees(az, elevation_deg), layout)
        coeffs = build_echo_coefficients(a_irs, a_ewam, ewam)
        try:
            report = solve_kkt(coeffs, opts)
        except SolverError as exc:
            raise SolverError(f"azimuth {az} deg: {exc}", exc.residuals) from exc
        thetas[i] = report.theta
        objectives[i] = report.primal_value
    meta = {"n_x": layout.n_x, "n_z": layout.n_z, "n_irs": layout.n_irs, "n_ewam": layout.n_ewam}
    meta.update(metadata or {})
    return LookupTable(float(angle_step_deg), float(elevation_deg), azimuths, thetas, objectives, meta)
