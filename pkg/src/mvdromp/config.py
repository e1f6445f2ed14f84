"""INI run configuration.

Every section and key is optional; omitted values reproduce the 12-element,
0.2 degree grid, 8/17 degree scenario::

    [dictionary]
    kind = ula                ; ula | identity
    size = 12                 ; identity only

    [array]
    element_count = 12
    spacing_wavelengths = 0.5

    [grid]
    start_deg = 0
    stop_deg = 30
    step_deg = 0.2

    [sources]
    doas_deg = 8, 17
    amplitudes = 1, 1         ; python complex literals, e.g. 1+0.5j
    random_phase = true

    [noise]
    snr_db = 5, 10, 15, 20    ; inf disables noise
    convention = total        ; total | per_source

    [methods]
    names = ordinary_omp, sbwmvdr_omp, nonadaptive_omp, ideal_omp, exhaustive_2term
    alpha = 0.01

    [beta_schedule]
    points = 5:0.5, 20:0.1    ; snr_db:beta pairs
    file = schedule.csv       ; or a schedule CSV, relative to this file

    [run]
    trials = 500
    seed = 2010
    workers = 1

Without ``points`` or ``file`` the shipped calibrated schedule is used.
"""

import configparser
import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from .dictionary import AngleGrid, Dictionary, identity_dictionary
from .errors import ConfigurationError
from .experiment import METHODS, BetaSchedule, Scenario, default_beta_schedule, resolve_method
from .sensing import DEFAULT_ALPHA

SECTIONS = ("dictionary", "array", "grid", "sources", "noise", "methods", "beta_schedule", "run")


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario = Scenario()
    snr_list: Tuple[float, ...] = (5.0, 10.0, 15.0, 20.0)
    methods: Tuple[str, ...] = METHODS
    alpha: float = DEFAULT_ALPHA
    schedule: Optional[BetaSchedule] = None
    trials: int = 500
    seed: int = 2010
    workers: int = 1
    dictionary_kind: str = "ula"
    identity_size: int = 12

    def beta_schedule(self) -> BetaSchedule:
        return self.schedule if self.schedule is not None else default_beta_schedule()

    def dictionary(self) -> Dictionary:
        if self.dictionary_kind == "identity":
            return identity_dictionary(self.identity_size)
        return self.scenario.dictionary()

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_ini(self) -> str:
        """Fully resolved config (schedule inlined), loadable by :func:`parse_config`."""
        s = self.scenario
        sched = self.beta_schedule()
        cp = configparser.ConfigParser()
        cp["dictionary"] = {"kind": self.dictionary_kind, "size": str(self.identity_size)}
        cp["array"] = {
            "element_count": str(s.element_count),
            "spacing_wavelengths": repr(s.spacing_wavelengths),
        }
        cp["grid"] = {
            "start_deg": repr(s.grid.start_deg),
            "stop_deg": repr(s.grid.stop_deg),
            "step_deg": repr(s.grid.step_deg),
        }
        cp["sources"] = {
            "doas_deg": ", ".join(repr(d) for d in s.source_doas_deg),
            "amplitudes": ", ".join(repr(a) for a in s.source_amplitudes),
            "random_phase": str(s.random_phase).lower(),
        }
        cp["noise"] = {
            "snr_db": ", ".join(repr(v) for v in self.snr_list),
            "convention": s.snr_convention,
        }
        cp["methods"] = {"names": ", ".join(self.methods), "alpha": repr(self.alpha)}
        cp["beta_schedule"] = {
            "points": ", ".join(f"{snr!r}:{beta!r}" for snr, beta in sched.breakpoints)
        }
        cp["run"] = {"trials": str(self.trials), "seed": str(self.seed), "workers": str(self.workers)}
        out = []
        for name in cp.sections():
            out.append(f"[{name}]")
            out.extend(f"{k} = {v}" for k, v in cp[name].items())
            out.append("")
        return "\n".join(out)


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _points(text):
    pts = []
    for item in text.split(","):
        if not item.strip():
            continue
        snr, sep, beta = item.partition(":")
        if not sep:
            raise ConfigurationError(f"schedule point {item.strip()!r} is not snr:beta")
        pts.append((float(snr), float(beta)))
    return BetaSchedule(tuple(pts))


def parse_config(text: str, base_dir: Path = Path(".")) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None
    unknown = [s for s in cp.sections() if s not in SECTIONS]
    if unknown:
        raise ConfigurationError(f"unknown config sections {unknown}; expected {SECTIONS}")

    def get(section, key, default=None):
        return cp.get(section, key, fallback=default) if cp.has_section(section) else default

    base = RunConfig()
    sc = base.scenario
    try:
        grid = AngleGrid(
            float(get("grid", "start_deg", sc.grid.start_deg)),
            float(get("grid", "stop_deg", sc.grid.stop_deg)),
            float(get("grid", "step_deg", sc.grid.step_deg)),
        )
        doas = _floats(get("sources", "doas_deg", "8, 17"))
        amp_text = get("sources", "amplitudes")
        amps = (
            tuple(complex(v.strip().replace(" ", "")) for v in amp_text.split(","))
            if amp_text
            else (1.0,) * len(doas)
        )
        random_phase = (
            cp.getboolean("sources", "random_phase", fallback=True)
            if cp.has_section("sources")
            else True
        )
        scenario = Scenario(
            source_doas_deg=doas,
            source_amplitudes=amps,
            element_count=int(get("array", "element_count", sc.element_count)),
            spacing_wavelengths=float(get("array", "spacing_wavelengths", sc.spacing_wavelengths)),
            grid=grid,
            random_phase=random_phase,
            snr_convention=get("noise", "convention", sc.snr_convention).strip(),
        )
        snrs = _floats(get("noise", "snr_db", "5, 10, 15, 20"))
        if not snrs:
            raise ConfigurationError("noise.snr_db lists no SNR values")
        scenario = scenario.with_snr(snrs[0])
        names = get("methods", "names")
        methods = (
            tuple(resolve_method(m) for m in names.split(",") if m.strip()) if names else METHODS
        )
        alpha = float(get("methods", "alpha", DEFAULT_ALPHA))

        schedule = None
        if get("beta_schedule", "points"):
            schedule = _points(get("beta_schedule", "points"))
        elif get("beta_schedule", "file"):
            path = Path(base_dir) / get("beta_schedule", "file").strip()
            try:
                schedule = BetaSchedule.from_csv(path.read_text())
            except OSError as exc:
                raise ConfigurationError(f"cannot read schedule file {path}: {exc}") from None

        kind = get("dictionary", "kind", "ula").strip()
        if kind not in ("ula", "identity"):
            raise ConfigurationError(f"dictionary.kind must be ula or identity, got {kind!r}")
        cfg = RunConfig(
            scenario=scenario,
            snr_list=snrs,
            methods=methods,
            alpha=alpha,
            schedule=schedule,
            trials=int(get("run", "trials", base.trials)),
            seed=int(get("run", "seed", base.seed)),
            workers=int(get("run", "workers", base.workers)),
            dictionary_kind=kind,
            identity_size=int(get("dictionary", "size", scenario.element_count)),
        )
    except ConfigurationError:
        raise
    except ValueError as exc:
        raise ConfigurationError(f"bad config value: {exc}") from None
    if cfg.trials < 1 or cfg.workers < 1:
        raise ConfigurationError("run.trials and run.workers must be positive")
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text, path.parent)
