"""Single-snapshot DOA Monte-Carlo harness.

Every trial draws one snapshot per SNR point and feeds the same snapshot to
all methods, so method comparisons are paired. Trial ``t`` uses the random
stream ``SeedSequence(master_seed, spawn_key=(t,))`` at every SNR (source
phases and the unit-variance noise pattern are shared across SNR points;
only the noise scale changes). Results are therefore a pure function of the
configuration and ``master_seed``, whatever the worker count.
"""

import csv
import dataclasses
import functools
import io
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from typing import Optional, Sequence, Tuple

import numpy as np

from .dictionary import AngleGrid, Dictionary, build_ula_dictionary, steering_vectors
from .errors import ConfigurationError, DomainError
from .greedy import generalized_omp, ordinary_omp
from .oracle import exhaustive_k_term
from .sensing import DEFAULT_ALPHA, ideal_mvdr_sensing, nonadaptive_sensing, sbwmvdr_sensing

log = logging.getLogger(__name__)

METHODS = ("ordinary_omp", "sbwmvdr_omp", "nonadaptive_omp", "ideal_omp", "exhaustive_2term")
ALIASES = {
    "omp": "ordinary_omp",
    "ordinary": "ordinary_omp",
    "sbwmvdr": "sbwmvdr_omp",
    "semi_blind": "sbwmvdr_omp",
    "nonadaptive": "nonadaptive_omp",
    "non_adaptive": "nonadaptive_omp",
    "ideal": "ideal_omp",
    "exhaustive": "exhaustive_2term",
    "oracle": "exhaustive_2term",
}
SNR_CONVENTIONS = ("total", "per_source")
BETA_RANGE = (0.005, 0.5)
CSV_HEADER = ("method", "snr_db", "source_deg", "mad_deg", "trials", "seed")


def resolve_method(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    key = ALIASES.get(key, key)
    if key not in METHODS:
        valid = ", ".join(METHODS)
        raise DomainError(f"unknown method {name!r}; valid methods: {valid} (aliases: {', '.join(ALIASES)})")
    return key


@functools.lru_cache(maxsize=16)
def _cached_dictionary(element_count, spacing, grid):
    return build_ula_dictionary(element_count, spacing, grid)


@dataclass(frozen=True)
class Scenario:
    """Sources, array and noise level for one snapshot.

    With ``random_phase`` (the default) each trial multiplies the given
    amplitudes by independent uniform random phases. ``snr_convention``
    selects how ``snr_db`` sets the per-element noise variance ``sigma^2``:

    * ``"total"``: ``sigma^2 = ||A s||^2 / (M * 10^(snr/10))``, i.e. total
      clean energy over total noise energy.
    * ``"per_source"``: ``sigma^2 = mean|s_i|^2 / (M * 10^(snr/10))``, the
      per-element SNR of an average single source.
    """

    source_doas_deg: Tuple[float, ...] = (8.0, 17.0)
    source_amplitudes: Tuple[complex, ...] = (1.0, 1.0)
    element_count: int = 12
    spacing_wavelengths: float = 0.5
    grid: AngleGrid = AngleGrid(0.0, 30.0, 0.2)
    snr_db: float = 10.0
    seed: int = 0
    random_phase: bool = True
    snr_convention: str = "total"

    def __post_init__(self):
        doas = tuple(float(d) for d in self.source_doas_deg)
        amps = tuple(complex(a) for a in self.source_amplitudes)
        object.__setattr__(self, "source_doas_deg", doas)
        object.__setattr__(self, "source_amplitudes", amps)
        if not doas:
            raise ConfigurationError("scenario needs at least one source")
        if len(amps) != len(doas):
            raise ConfigurationError(f"{len(doas)} DOAs but {len(amps)} amplitudes")
        if any(a == 0 for a in amps):
            raise ConfigurationError("source amplitudes must be nonzero")
        lo, hi = self.grid.start_deg, self.grid.stop_deg
        if any(not lo <= d <= hi for d in doas):
            raise ConfigurationError(f"source DOAs {doas} fall outside the grid [{lo}, {hi}]")
        if self.snr_convention not in SNR_CONVENTIONS:
            raise ConfigurationError(
                f"snr_convention must be one of {SNR_CONVENTIONS}, got {self.snr_convention!r}"
            )
        if math.isnan(self.snr_db):
            raise ConfigurationError("snr_db is NaN")

    @property
    def n_sources(self) -> int:
        return len(self.source_doas_deg)

    def dictionary(self) -> Dictionary:
        return _cached_dictionary(self.element_count, self.spacing_wavelengths, self.grid)

    def true_support(self) -> Tuple[int, ...]:
        """Grid indices of the sources (nearest grid point for off-grid DOAs)."""
        angles = self.grid.angles()
        return tuple(int(np.argmin(np.abs(angles - d))) for d in self.source_doas_deg)

    def steering(self) -> np.ndarray:
        return steering_vectors(self.element_count, self.spacing_wavelengths, self.source_doas_deg)

    def with_snr(self, snr_db: float) -> "Scenario":
        return dataclasses.replace(self, snr_db=float(snr_db))


def noise_variance(scenario: Scenario, clean, amplitudes) -> float:
    """Per-element noise variance for ``scenario.snr_db`` (0 for infinite SNR)."""
    if math.isinf(scenario.snr_db) and scenario.snr_db > 0:
        return 0.0
    lin = 10.0 ** (scenario.snr_db / 10.0)
    m = scenario.element_count
    if scenario.snr_convention == "total":
        power = float(np.vdot(clean, clean).real)
    else:
        power = float(np.mean(np.abs(np.asarray(amplitudes)) ** 2))
    return power / (m * lin)


def draw_amplitudes(scenario: Scenario, rng: np.random.Generator) -> np.ndarray:
    amps = np.asarray(scenario.source_amplitudes, dtype=np.complex128)
    if scenario.random_phase:
        amps = amps * np.exp(2j * np.pi * rng.random(amps.size))
    return amps


def generate_snapshot(scenario: Scenario, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """One array snapshot ``x = sum_i s_i a(phi_i) + v``.

    ``v`` is circularly-symmetric complex white Gaussian noise. Sources use the
    exact steering model at their DOAs, not the nearest grid atom. ``rng``
    defaults to a generator seeded with ``scenario.seed``.
    """
    if rng is None:
        rng = np.random.default_rng(scenario.seed)
    amps = draw_amplitudes(scenario, rng)
    clean = scenario.steering() @ amps
    var = noise_variance(scenario, clean, amps)
    noise = rng.standard_normal(scenario.element_count) + 1j * rng.standard_normal(
        scenario.element_count
    )
    if var == 0.0:
        return clean
    return clean + math.sqrt(var / 2.0) * noise


# -- beta schedule ------------------------------------------------------------


@dataclass(frozen=True)
class BetaSchedule:
    """Breakpoints ``(snr_db, beta)``; beta is interpolated linearly in ``log(beta)``."""

    breakpoints: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(s), float(b)) for s, b in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        if not pts:
            raise ConfigurationError("beta schedule is empty")
        snrs = [s for s, _ in pts]
        if any(not math.isfinite(s) for s in snrs):
            raise ConfigurationError("schedule SNRs must be finite")
        if any(b <= 0 or not math.isfinite(b) for _, b in pts):
            raise ConfigurationError("schedule betas must be positive and finite")
        if any(b >= a for a, b in zip(snrs[1:], snrs)):
            raise ConfigurationError("schedule SNRs must be strictly increasing")
        lo, hi = BETA_RANGE
        if any(not lo <= b <= hi for _, b in pts):
            log.warning("beta schedule leaves the usual range [%g, %g]", lo, hi)

    @classmethod
    def constant(cls, beta: float) -> "BetaSchedule":
        return cls(((0.0, beta),))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["snr_db", "beta"])
        for s, b in self.breakpoints:
            w.writerow([repr(s), repr(b)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "BetaSchedule":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
        if not rows or [c.strip() for c in rows[0]] != ["snr_db", "beta"]:
            raise ConfigurationError("schedule file must start with header 'snr_db,beta'")
        try:
            pts = tuple((float(s), float(b)) for s, b in rows[1:])
        except ValueError as exc:
            raise ConfigurationError(f"bad schedule row: {exc}") from None
        return cls(pts)


def beta_for_snr(schedule: BetaSchedule, snr_db: float) -> float:
    """Log-linear interpolation of beta, clamped to the end breakpoints."""
    snrs = np.array([s for s, _ in schedule.breakpoints])
    logb = np.log([b for _, b in schedule.breakpoints])
    return float(np.exp(np.interp(snr_db, snrs, logb)))


def default_beta_schedule() -> BetaSchedule:
    """The shipped calibrated schedule for the 12-element, 8/17 degree scenario."""
    text = resources.files("mvdromp").joinpath("data/default_beta_schedule.csv").read_text()
    return BetaSchedule.from_csv(text)


# -- methods --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MethodOutcome:
    method: str
    support: Tuple[int, ...]
    angles_deg: Tuple[float, ...]
    residual_norm: float


class MethodRunner:
    """Runs any of :data:`METHODS` on one dictionary, caching signal-independent sensing."""

    def __init__(self, dictionary: Dictionary, sparsity: int, alpha: float = DEFAULT_ALPHA, true_support=None):
        self.dictionary = dictionary
        self.sparsity = int(sparsity)
        self.alpha = alpha
        self.true_support = None if true_support is None else tuple(true_support)
        self._ideal = None
        self._nonadaptive = {}

    def run(self, method: str, x, beta: Optional[float] = None) -> MethodOutcome:
        method = resolve_method(method)
        d, k = self.dictionary, self.sparsity
        if method == "ordinary_omp":
            sol = ordinary_omp(x, d, k)
        elif method == "sbwmvdr_omp":
            sol = generalized_omp(x, d, sbwmvdr_sensing(d, x, self._need_beta(beta)), k)
        elif method == "nonadaptive_omp":
            beta = self._need_beta(beta)
            if beta not in self._nonadaptive:
                self._nonadaptive[beta] = nonadaptive_sensing(d, beta)
            sol = generalized_omp(x, d, self._nonadaptive[beta], k)
        elif method == "ideal_omp":
            if self.true_support is None:
                raise DomainError("ideal_omp needs the true support")
            if self._ideal is None:
                self._ideal = ideal_mvdr_sensing(d, self.true_support, self.alpha)
            sol = generalized_omp(x, d, self._ideal, k)
        else:
            sol = exhaustive_k_term(x, d, k)
        support = tuple(sorted(sol.support))
        angles = tuple(d.angles_of(support)) if d.grid is not None else tuple(map(float, support))
        return MethodOutcome(method, support, angles, float(sol.residual_norm))

    @staticmethod
    def _need_beta(beta):
        if beta is None:
            raise DomainError("this method needs beta")
        return float(beta)


def estimate_doas(
    x,
    method: str,
    dictionary: Dictionary,
    *,
    sparsity: int = 2,
    beta: Optional[float] = None,
    alpha: float = DEFAULT_ALPHA,
    true_support=None,
) -> list:
    """Estimated source angles in degrees, sorted ascending."""
    runner = MethodRunner(dictionary, sparsity, alpha, true_support)
    return list(runner.run(method, x, beta).angles_deg)


def mad_assign(estimated, truth) -> np.ndarray:
    """Per-source absolute deviations under the best estimate-to-source pairing."""
    est = np.asarray(estimated, dtype=float)
    tru = np.asarray(truth, dtype=float)
    if est.shape != tru.shape or est.ndim != 1:
        raise DomainError(f"need equal-length angle lists, got {est.shape} and {tru.shape}")
    best = None
    for perm in itertools.permutations(range(est.size)):
        dev = np.abs(est[list(perm)] - tru)
        if best is None or dev.sum() < best.sum():
            best = dev
    return best


# -- Monte-Carlo ----------------------------------------------------------------


@dataclass(eq=False)
class MadReport:
    """MAD (degrees) per method, SNR point and source.

    ``mad_deg[i, j, s]`` is indexed by SNR point, method and source.
    """

    methods: Tuple[str, ...]
    snr_db: Tuple[float, ...]
    source_doas_deg: Tuple[float, ...]
    mad_deg: np.ndarray
    trials: int
    seed: int
    betas: Tuple[float, ...]
    schedule: Optional[BetaSchedule] = None
    started_at: str = ""
    finished_at: str = ""
    wall_time_s: float = 0.0
    extra: dict = field(default_factory=dict)

    def mad(self, method: str, snr_db: float, source_index: int) -> float:
        i = self.snr_db.index(float(snr_db))
        j = self.methods.index(resolve_method(method))
        return float(self.mad_deg[i, j, source_index])

    def rows(self):
        for j, method in enumerate(self.methods):
            for i, snr in enumerate(self.snr_db):
                for s, doa in enumerate(self.source_doas_deg):
                    yield (method, snr, doa, float(self.mad_deg[i, j, s]), self.trials, self.seed)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for method, snr, doa, mad, trials, seed in self.rows():
            w.writerow([method, repr(snr), repr(doa), repr(mad), trials, seed])
        return buf.getvalue()

    def plot_data_csv(self, source_index: int) -> str:
        """One row per SNR, one column per method, for a single source."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["snr_db", *self.methods])
        for i, snr in enumerate(self.snr_db):
            w.writerow([repr(snr), *(repr(float(v)) for v in self.mad_deg[i, :, source_index])])
        return buf.getvalue()

    def summary(self) -> str:
        src = "  ".join(f"{d:>7g}deg" for d in self.source_doas_deg)
        lines = [f"MAD (deg) over {self.trials} trials, seed {self.seed}",
                 f"{'method':<18}{'snr_db':>8}  {src}"]
        for j, method in enumerate(self.methods):
            for i, snr in enumerate(self.snr_db):
                vals = "  ".join(f"{v:>10.4f}" for v in self.mad_deg[i, j])
                lines.append(f"{method:<18}{snr:>8g}  {vals}")
        return "\n".join(lines)


def read_mad_csv(text: str) -> list:
    """Parse :meth:`MadReport.to_csv` output into a list of row dicts."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ConfigurationError(f"unexpected MAD CSV header {reader.fieldnames}")
    return [
        {
            "method": r["method"],
            "snr_db": float(r["snr_db"]),
            "source_deg": float(r["source_deg"]),
            "mad_deg": float(r["mad_deg"]),
            "trials": int(r["trials"]),
            "seed": int(r["seed"]),
        }
        for r in reader
    ]


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial,)))


def _run_trials(job):
    template, snrs, betas, methods, alpha, master_seed, trial_ids = job
    d = template.dictionary()
    runner = MethodRunner(d, template.n_sources, alpha, template.true_support())
    truth = template.source_doas_deg
    out = np.empty((len(trial_ids), len(snrs), len(methods), template.n_sources))
    for t, trial in enumerate(trial_ids):
        for i, snr in enumerate(snrs):
            x = generate_snapshot(template.with_snr(snr), trial_rng(master_seed, trial))
            for j, method in enumerate(methods):
                est = runner.run(method, x, betas[i])
                out[t, i, j] = mad_assign(est.angles_deg, truth)
    return out


def _chunks(n, parts):
    parts = max(1, min(parts, n))
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [range(a, b) for a, b in zip(bounds[:-1], bounds[1:])]


def run_monte_carlo(
    template: Scenario,
    snr_list: Sequence[float],
    methods: Sequence[str],
    trials: int,
    schedule: BetaSchedule,
    master_seed: Optional[int] = None,
    *,
    alpha: float = DEFAULT_ALPHA,
    workers: int = 1,
) -> MadReport:
    """MAD of every method at every SNR point over ``trials`` paired trials.

    Any exception inside a trial aborts the run.
    """
    if int(trials) != trials or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials}")
    if not snr_list:
        raise ConfigurationError("snr_list is empty")
    methods = tuple(resolve_method(m) for m in methods)
    if not methods:
        raise ConfigurationError("no methods selected")
    master_seed = template.seed if master_seed is None else int(master_seed)
    snrs = tuple(float(s) for s in snr_list)
    betas = tuple(beta_for_snr(schedule, s) for s in snrs)
    template.dictionary()  # fail fast on bad geometry

    started = datetime.now(timezone.utc)
    jobs = [
        (template, snrs, betas, methods, alpha, master_seed, ids)
        for ids in _chunks(int(trials), int(workers) * 4 if workers > 1 else 1)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            parts = list(pool.map(_run_trials, jobs))
    else:
        parts = [_run_trials(job) for job in jobs]
    devs = np.concatenate(parts, axis=0)
    finished = datetime.now(timezone.utc)

    return MadReport(
        methods=methods,
        snr_db=snrs,
        source_doas_deg=template.source_doas_deg,
        mad_deg=devs.sum(axis=0) / trials,
        trials=int(trials),
        seed=master_seed,
        betas=betas,
        schedule=schedule,
        started_at=started.isoformat(),
        finished_at=finished.isoformat(),
        wall_time_s=(finished - started).total_seconds(),
    )


# -- beta calibration -------------------------------------------------------------


def default_beta_grid(points: int = 9) -> np.ndarray:
    return np.geomspace(BETA_RANGE[0], BETA_RANGE[1], points)


@dataclass(eq=False)
class CalibrationResult:
    schedule: BetaSchedule
    beta_grid: Tuple[float, ...]
    snr_db: Tuple[float, ...]
    mad_sum: np.ndarray  # (snr, beta): MAD summed over sources


def calibrate_beta(
    template: Scenario,
    snr_list: Sequence[float],
    beta_grid=None,
    trials: int = 200,
    master_seed: Optional[int] = None,
    *,
    alpha: float = DEFAULT_ALPHA,
    workers: int = 1,
    method: str = "sbwmvdr_omp",
) -> CalibrationResult:
    """Pick, per SNR, the grid beta minimizing the source-summed MAD of ``method``.

    Ties go to the earlier grid entry.
    """
    grid = tuple(float(b) for b in (default_beta_grid() if beta_grid is None else beta_grid))
    if not grid:
        raise ConfigurationError("beta grid is empty")
    lo, hi = BETA_RANGE
    if any(not lo <= b <= hi for b in grid):
        log.warning("beta grid leaves the usual range [%g, %g]", lo, hi)
    snrs = tuple(sorted(float(s) for s in snr_list))
    if any(math.isinf(s) for s in snrs):
        raise ConfigurationError("cannot calibrate at infinite SNR")
    table = np.empty((len(snrs), len(grid)))
    for b, beta in enumerate(grid):
        rep = run_monte_carlo(
            template, snrs, [method], trials, BetaSchedule.constant(beta), master_seed,
            alpha=alpha, workers=workers,
        )
        table[:, b] = rep.mad_deg[:, 0, :].sum(axis=1)
    chosen = tuple((s, grid[int(np.argmin(table[i]))]) for i, s in enumerate(snrs))
    betas = [b for _, b in chosen]
    if any(b2 > b1 for b1, b2 in zip(betas, betas[1:])):
        log.info("calibrated beta is not monotone non-increasing in SNR: %s", chosen)
    return CalibrationResult(BetaSchedule(chosen), grid, snrs, table)
