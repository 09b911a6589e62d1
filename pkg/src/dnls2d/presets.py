"""Named, self-contained experiment presets.

Each preset bundles everything one run needs: grid, model parameters,
integrator settings, an initial-data recipe, an optional co-moving frame,
and an expected-outcome descriptor that turns the finished RunRecord into a
match / mismatch verdict. Presets whose initial data is a perturbed
stationary state chain the Newton/continuation solve automatically; the
resulting profiles are cached on disk keyed by (grid, parameters, tolerance)
so repeated runs skip the solve.

Catalog naming: <family>_sigma<n>_<sign> where family encodes which axes the
regularizing operator P acts on and how the steepening vector is oriented
relative to it:

    nls_*                eps = 0, no steepening (classical NLS)
    dnls_*               eps = 0, steepening along x2
    full_offaxis_*       P acts on both axes, no steepening
    full_offaxis_steep_* P acts on both axes, steepening along x2
    partial_*            P acts on x1 only, no steepening
    partial_parallel_*   P acts on x1, steepening along x1
    partial_orthogonal_* P acts on x1, steepening along x2
    gauss_*              Gaussian initial data instead of a perturbed state

Every run at full resolution follows the reference configuration it
reproduces; `run_preset(name, reduced=True)` halves the grid (and possibly
retunes dt / t_end, kept per-preset below) for CI-scale checks. Qualitative
verdicts must survive the reduction; quantitative stop-time windows are
doubled.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.ndimage as _ndimage

from .evolution import (
    FrameState,
    IntegratorConfig,
    MonitorConfig,
    RunRecord,
    evolve,
)
from .spectral import Field, Grid, ModelParams
from .stationary import (
    ContinuationSchedule,
    StationaryProblem,
    StationaryState,
    continuation_solve,
    initial_iterate,
    newton_solve,
    steepening_schedule,
)

__all__ = [
    "ExpectedOutcome",
    "InitialSpec",
    "Preset",
    "PresetResult",
    "default_cache_dir",
    "evaluate_record",
    "gaussian_data",
    "get_preset",
    "list_presets",
    "perturbed_state_data",
    "run_preset",
    "stationary_state_for",
]


# ---------------------------------------------------------------------------
# initial data


def perturbed_state_data(Q: Field, grid: Grid, sign: int, amplitude: float = 0.1) -> Field:
    """Q plus a signed Gaussian bump: Q + sign * amplitude * e^{-x1^2 - x2^2}.

    `Q` must be a physical-space field sampled on `grid`; `sign` is +1 or -1.
    """
    if Q.space != "physical":
        raise ValueError("Q must be a physical-space field")
    if Q.values.shape != (grid.N1, grid.N2):
        raise ValueError("Q is not sampled on the given grid")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    x1, x2 = grid.meshgrid()
    bump = np.exp(-(x1**2) - x2**2)
    return Field(Q.values + sign * amplitude * bump, "physical")


def gaussian_data(grid: Grid, amplitude: float = 4.0) -> Field:
    """Radial Gaussian amplitude * e^{-(x1^2 + x2^2)} sampled on the grid."""
    x1, x2 = grid.meshgrid()
    return Field((amplitude * np.exp(-(x1**2) - x2**2)).astype(np.complex128), "physical")


# ---------------------------------------------------------------------------
# stationary-state chaining with a small on-disk cache

_CACHE_FORMAT = 1
_memo: Dict[str, Field] = {}


def default_cache_dir() -> Path:
    env = os.environ.get("DNLS2D_CACHE")
    if env:
        return Path(env)
    xdg = os.environ.get("XDG_CACHE_HOME")
    base = Path(xdg) if xdg else Path.home() / ".cache"
    return base / "dnls2d"


def _cache_key(grid: Grid, params: ModelParams, tol: float) -> str:
    canon = "|".join(
        (
            repr((grid.L1, grid.L2, grid.N1, grid.N2)),
            repr((params.epsilon, params.axes, params.delta, params.sigma)),
            repr(tol),
            f"fmt{_CACHE_FORMAT}",
        )
    )
    return hashlib.sha256(canon.encode()).hexdigest()[:24]


def _residual_of(Q: Field, grid: Grid, params: ModelParams) -> float:
    problem = StationaryProblem(grid, params)
    from .stationary import _CombinedSystem

    _, _, res = _CombinedSystem(problem).residual(Q.values)
    return res


def _cache_load(path: Path, grid: Grid, params: ModelParams, tol: float) -> Optional[Field]:
    try:
        with np.load(path) as payload:
            values = payload["re"] + 1j * payload["im"]
    except (OSError, KeyError, ValueError):
        return None
    if values.shape != (grid.N1, grid.N2):
        return None
    Q = Field(np.ascontiguousarray(values), "physical")
    # A stale or corrupted entry re-solves instead of poisoning the run.
    if not np.all(np.isfinite(values)) or _residual_of(Q, grid, params) > 10 * tol:
        return None
    return Q


def _cache_store(path: Path, Q: Field, residual: float) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            np.savez(
                handle,
                re=Q.values.real,
                im=Q.values.imag,
                residual=np.float64(residual),
            )
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _solve_state(grid: Grid, params: ModelParams, tol: float) -> StationaryState:
    base = replace(params, delta=(0.0, 0.0))
    state = newton_solve(initial_iterate(grid), StationaryProblem(grid, base), tol=tol)
    if max(abs(d) for d in params.delta) > 0.0:
        schedule = steepening_schedule(base, params.delta)
        state = continuation_solve(schedule, state, grid, tol=tol)
    return state


def stationary_state_for(
    grid: Grid,
    params: ModelParams,
    tol: float = 1e-10,
    cache: bool = True,
    cache_dir: Optional[Path] = None,
) -> Field:
    """Stationary profile Q for (grid, params), solved or loaded from cache.

    Zero-steepening parameters are solved directly from the standard radial
    seed; nonzero steepening continues from the zero-steepening profile in
    sup-norm increments of at most 0.2 per leg. Converged profiles are
    written to the cache directory (default `~/.cache/dnls2d`, overridable
    via the DNLS2D_CACHE environment variable) with an atomic
    write-then-rename, so concurrent runs may share the cache.
    """
    key = _cache_key(grid, params, tol)
    if cache and key in _memo:
        return _memo[key]
    path = (cache_dir or default_cache_dir()) / f"Q_{key}.npz"
    if cache:
        loaded = _cache_load(path, grid, params, tol)
        if loaded is not None:
            _memo[key] = loaded
            return loaded
    state = _solve_state(grid, params, tol)
    Q = state.Q
    if cache:
        _cache_store(path, Q, state.residual_norm)
        _memo[key] = Q
    return Q


# ---------------------------------------------------------------------------
# preset descriptions


@dataclass(frozen=True)
class InitialSpec:
    """Recipe for a run's initial data.

    kind "stationary_perturbed": chained profile solve plus a signed Gaussian
    bump. kind "gaussian": pure Gaussian of the given amplitude.
    """

    kind: str
    sign: int = +1
    amplitude: float = 0.1

    def __post_init__(self) -> None:
        if self.kind not in ("stationary_perturbed", "gaussian"):
            raise ValueError(f"unknown initial-data kind {self.kind!r}")


@dataclass(frozen=True)
class ExpectedOutcome:
    """Named predicates plus quantitative windows; all listed must hold.

    `stop_window` brackets the blow-up stop time at full resolution;
    `reduced_stop_window` is its doubled-tolerance counterpart. `v2_window`
    brackets the final frame velocity component v2 where a preset tracks a
    drifting maximum (skipped at reduced resolution unless
    `reduced_v2_window` is set).
    """

    verdicts: Tuple[str, ...]
    stop_window: Optional[Tuple[float, float]] = None
    reduced_stop_window: Optional[Tuple[float, float]] = None
    v2_window: Optional[Tuple[float, float]] = None
    reduced_v2_window: Optional[Tuple[float, float]] = None
    note: str = ""


@dataclass(frozen=True)
class Preset:
    name: str
    grid: Grid
    params: ModelParams
    integrator: IntegratorConfig
    initial: InitialSpec
    expected: ExpectedOutcome
    frame: Optional[FrameState] = None
    monitors: MonitorConfig = MonitorConfig()
    reduced_grid: Optional[Grid] = None
    reduced_integrator: Optional[IntegratorConfig] = None
    note: str = ""

    def reduced_setup(self) -> Tuple[Grid, IntegratorConfig]:
        grid = self.reduced_grid
        if grid is None:
            grid = Grid(self.grid.L1, self.grid.L2, self.grid.N1 // 2, self.grid.N2 // 2)
        integ = self.reduced_integrator if self.reduced_integrator is not None else self.integrator
        return grid, integ


@dataclass(frozen=True)
class PresetResult:
    preset: Preset
    record: RunRecord
    reduced: bool
    verdict: str  # "match" | "mismatch"
    details: Tuple[str, ...]
    elapsed: float

    def summary(self) -> str:
        lines = [
            f"preset {self.preset.name}{' (reduced)' if self.reduced else ''}: "
            f"{self.verdict} [{self.record.status}] in {self.elapsed:.1f}s"
        ]
        lines.extend(f"  - {d}" for d in self.details)
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# verdict predicates (pure functions of the finished record)

_MONOTONE_RTOL = 1e-8
_HUMP_FLOOR = 0.25  # maxima below this fraction of the peak are radiation


def _series(record: RunRecord) -> np.ndarray:
    arr = record.sample_array()
    if arr.shape[0] < 2:
        raise ValueError("record carries fewer than two samples")
    return arr


def _local_maxima_count(linf: np.ndarray) -> int:
    inner = (linf[1:-1] > linf[:-2]) & (linf[1:-1] > linf[2:])
    return int(np.count_nonzero(inner))


def _check_completed(record, expected, reduced):
    # resolution_warn still ran to t_end; only an early stop fails this.
    if record.status.kind not in ("completed", "resolution_warn"):
        return f"expected a run that reaches t_end, got {record.status}"
    return None


def _check_blow_up(record, expected, reduced):
    if record.status.kind not in ("mass_drift_stop", "overflow_stop"):
        return f"expected a blow-up stop, got {record.status}"
    window = expected.reduced_stop_window if reduced else expected.stop_window
    if window is not None:
        t = record.stop_time
        if not (window[0] <= t <= window[1]):
            return f"stop time {t:.4f} outside window [{window[0]:.4f}, {window[1]:.4f}]"
    return None


def _check_monotone_decreasing(record, expected, reduced):
    arr = _series(record)
    linf = arr[:, 1]
    rise = np.diff(linf) - _MONOTONE_RTOL * linf[:-1]
    k = int(np.argmax(rise))
    if rise[k] > 0.0:
        return (
            f"sup norm rises by {np.diff(linf)[k]:.2e} at t={arr[k + 1, 0]:.4f} "
            f"(monotone within rtol {_MONOTONE_RTOL:g} expected)"
        )
    return None


def _check_oscillatory(record, expected, reduced):
    linf = _series(record)[:, 1]
    n = _local_maxima_count(linf)
    if n < 3:
        return f"only {n} local maxima of the sup norm (need >= 3)"
    return None


def _check_oscillatory_stable(record, expected, reduced):
    arr = _series(record)
    linf = arr[:, 1]
    lo, hi = 0.5 * linf[0], 2.0 * linf[0]
    if linf.min() < lo or linf.max() > hi:
        return (
            f"sup norm leaves [{lo:.3f}, {hi:.3f}] "
            f"(range [{linf.min():.3f}, {linf.max():.3f}])"
        )
    return _check_oscillatory(record, expected, reduced)


def _check_dispersive_decay(record, expected, reduced):
    linf = _series(record)[:, 1]
    if linf[-1] > 0.6 * linf[0]:
        return f"final sup norm {linf[-1]:.3f} not below 0.6 x initial {linf[0]:.3f}"
    return None


def _check_focus_then_decay(record, expected, reduced):
    arr = _series(record)
    linf = arr[:, 1]
    k = int(np.argmax(linf))
    if k == 0 or k == len(linf) - 1:
        return f"sup-norm maximum sits at the {'start' if k == 0 else 'end'} of the run"
    if linf[k] < 1.05 * linf[0]:
        return f"peak {linf[k]:.3f} below 1.05 x initial {linf[0]:.3f}"
    if linf[-1] > 0.95 * linf[k]:
        return f"final {linf[-1]:.3f} has not dropped 5% below peak {linf[k]:.3f}"
    return None


def _check_multi_hump_snapshot(record, expected, reduced):
    if not record.snapshots:
        return "no snapshot recorded to count humps on"
    _, field = record.snapshots[-1]
    mod = np.abs(field.values)
    # Plateau-free spectral data: strict equality against a periodic
    # max-filter marks isolated local maxima.
    peaks = (mod == _ndimage.maximum_filter(mod, size=9, mode="wrap")) & (
        mod > _HUMP_FLOOR * mod.max()
    )
    n = int(peaks.sum())
    if n < 2:
        return f"{n} distinct humps in the final snapshot (need >= 2)"
    return None


def _check_v2_window(record, expected, reduced):
    window = expected.reduced_v2_window if reduced else expected.v2_window
    if window is None:
        return None
    v2 = _series(record)[-1, 5]
    if not (window[0] <= v2 <= window[1]):
        return f"final frame velocity v2={v2:.3f} outside [{window[0]:.3f}, {window[1]:.3f}]"
    return None


_PREDICATES = {
    "completed": _check_completed,
    "blow_up": _check_blow_up,
    "monotone_decreasing": _check_monotone_decreasing,
    "oscillatory": _check_oscillatory,
    "oscillatory_stable": _check_oscillatory_stable,
    "dispersive_decay": _check_dispersive_decay,
    "focus_then_decay": _check_focus_then_decay,
    "multi_hump_snapshot": _check_multi_hump_snapshot,
    "v2_window": _check_v2_window,
}


def evaluate_record(preset: Preset, record: RunRecord, reduced: bool = False):
    """Pure verdict: (verdict, details) from the finished record alone."""
    failures = []
    for name in preset.expected.verdicts:
        problem = _PREDICATES[name](record, preset.expected, reduced)
        if problem is not None:
            failures.append(f"{name}: {problem}")
    return ("match" if not failures else "mismatch", tuple(failures))


# ---------------------------------------------------------------------------
# the catalog

_L3 = 3.0
_G1024 = Grid(_L3, _L3, 1024, 1024)
_NLS = ModelParams()
_FULL = ("x1", "x2")
_PART = ("x1",)


def _preset(
    name,
    params,
    integrator,
    initial,
    expected,
    grid=_G1024,
    frame=None,
    monitors=MonitorConfig(),
    reduced_grid=None,
    reduced_integrator=None,
    note="",
):
    return Preset(
        name=name,
        grid=grid,
        params=params,
        integrator=integrator,
        initial=initial,
        expected=expected,
        frame=frame,
        monitors=monitors,
        reduced_grid=reduced_grid,
        reduced_integrator=reduced_integrator,
        note=note,
    )


def _build_catalog() -> Dict[str, Preset]:
    entries = []

    # Classical NLS: the unperturbed-below / collapsing-above pair.
    entries.append(
        _preset(
            "nls_minus",
            _NLS,
            IntegratorConfig(dt=1e-3, t_end=5.0),
            InitialSpec("stationary_perturbed", sign=-1),
            ExpectedOutcome(
                ("completed", "monotone_decreasing"),
                note="defocusing-side perturbation disperses; sup norm decays monotonically",
            ),
            reduced_integrator=IntegratorConfig(dt=2e-3, t_end=3.0),
        )
    )
    entries.append(
        _preset(
            "nls_plus",
            _NLS,
            IntegratorConfig(dt=4e-4, t_end=2.0),
            InitialSpec("stationary_perturbed", sign=+1),
            ExpectedOutcome(
                ("blow_up",),
                stop_window=(1.7955, 1.9845),
                reduced_stop_window=(1.701, 2.079),
                note="focusing-side perturbation collapses; reference stop near t=1.89",
            ),
            reduced_integrator=IntegratorConfig(dt=1e-3, t_end=2.2),
        )
    )

    # Steepening along x2 with P absent: perturbed state drifts but survives;
    # Gaussian data collapses.
    entries.append(
        _preset(
            "dnls_pert",
            ModelParams(delta=(0.0, 1.0)),
            IntegratorConfig(dt=5e-5, t_end=5.0, krasny_tau=1e-10),
            InitialSpec("stationary_perturbed", sign=+1),
            ExpectedOutcome(
                ("completed", "v2_window"),
                v2_window=(1.5, 2.5),
                note="no collapse; tracked maximum accelerates toward v2 near 2",
            ),
            frame=FrameState(pinned_axis=("x2",)),
            reduced_integrator=IntegratorConfig(dt=2e-4, t_end=0.2, krasny_tau=1e-10),
        )
    )
    entries.append(
        _preset(
            "dnls_gauss",
            ModelParams(delta=(0.0, 1.0)),
            IntegratorConfig(dt=2.5e-6, t_end=0.25, krasny_tau=1e-10),
            InitialSpec("gaussian", amplitude=4.0),
            ExpectedOutcome(
                ("blow_up",),
                stop_window=(0.1857, 0.2053),
                reduced_stop_window=(0.17595, 0.21505),
                note="Gaussian data collapses; reference stop near t=0.1955",
            ),
            grid=Grid(2.0, 2.0, 1024, 1024),
            reduced_integrator=IntegratorConfig(dt=2e-4, t_end=0.25, krasny_tau=1e-10),
        )
    )

    # P on both axes, no steepening: stability flips with sigma.
    ten = IntegratorConfig(dt=1e-2, t_end=10.0)
    for sigma, sign, verdicts in (
        (1.0, +1, ("completed", "dispersive_decay")),
        (1.0, -1, ("completed", "dispersive_decay")),
        (2.0, +1, ("completed", "oscillatory_stable")),
        (2.0, -1, ("completed", "oscillatory_stable")),
        (3.0, +1, ("completed", "oscillatory_stable")),
        (3.0, -1, ("completed", "monotone_decreasing")),
    ):
        tag = "plus" if sign > 0 else "minus"
        entries.append(
            _preset(
                f"full_offaxis_sigma{int(sigma)}_{tag}",
                ModelParams(epsilon=1.0, axes=_FULL, sigma=sigma),
                ten,
                InitialSpec("stationary_perturbed", sign=sign),
                ExpectedOutcome(verdicts),
            )
        )

    # P on both axes with steepening along x2.
    for sigma, delta2, sign, verdicts in (
        (1.0, 1.0, +1, ("completed", "oscillatory_stable")),
        (1.0, 1.0, -1, ("completed", "oscillatory_stable")),
        (3.0, 0.1, +1, ("completed", "oscillatory_stable")),
        (3.0, 0.1, -1, ("completed", "monotone_decreasing")),
    ):
        tag = "plus" if sign > 0 else "minus"
        entries.append(
            _preset(
                f"full_offaxis_steep_sigma{int(sigma)}_{tag}",
                ModelParams(epsilon=1.0, axes=_FULL, sigma=sigma, delta=(0.0, delta2)),
                ten,
                InitialSpec("stationary_perturbed", sign=sign),
                ExpectedOutcome(verdicts),
            )
        )

    # P on x1 only, no steepening: effectively 1D focusing along x2, so the
    # critical strength drops and sigma=2 collapses on the focusing side.
    for sign in (+1, -1):
        tag = "plus" if sign > 0 else "minus"
        entries.append(
            _preset(
                f"partial_sigma1_{tag}",
                ModelParams(epsilon=1.0, axes=_PART, sigma=1.0),
                IntegratorConfig(dt=1e-2, t_end=2.5),
                InitialSpec("stationary_perturbed", sign=sign),
                ExpectedOutcome(("completed", "monotone_decreasing", "multi_hump_snapshot")),
                monitors=MonitorConfig(snapshot_times=(2.5,)),
            )
        )
    entries.append(
        _preset(
            "partial_sigma2_plus",
            ModelParams(epsilon=1.0, axes=_PART, sigma=2.0),
            IntegratorConfig(dt=1e-3, t_end=0.7),
            InitialSpec("stationary_perturbed", sign=+1),
            ExpectedOutcome(
                ("blow_up",),
                stop_window=(0.608, 0.672),
                reduced_stop_window=(0.576, 0.704),
                note="reference stop near t=0.64",
            ),
            reduced_integrator=IntegratorConfig(dt=2e-3, t_end=0.72),
        )
    )
    entries.append(
        _preset(
            "partial_sigma2_minus",
            ModelParams(epsilon=1.0, axes=_PART, sigma=2.0),
            IntegratorConfig(dt=1e-3, t_end=3.0),
            InitialSpec("stationary_perturbed", sign=-1),
            ExpectedOutcome(("completed", "monotone_decreasing")),
        )
    )

    # P on x1 with steepening along x1.
    five = IntegratorConfig(dt=1e-2, t_end=5.0)
    entries.append(
        _preset(
            "partial_parallel_sigma2_plus",
            ModelParams(epsilon=1.0, axes=_PART, sigma=2.0, delta=(0.3, 0.0)),
            five,
            InitialSpec("stationary_perturbed", sign=+1),
            ExpectedOutcome(("completed", "dispersive_decay")),
        )
    )
    entries.append(
        _preset(
            "partial_parallel_sigma2_minus",
            ModelParams(epsilon=1.0, axes=_PART, sigma=2.0, delta=(0.3, 0.0)),
            five,
            InitialSpec("stationary_perturbed", sign=-1),
            ExpectedOutcome(("completed", "monotone_decreasing")),
        )
    )
    entries.append(
        _preset(
            "partial_parallel_sigma3_plus",
            ModelParams(epsilon=1.0, axes=_PART, sigma=3.0, delta=(0.1, 0.0)),
            IntegratorConfig(dt=1.7e-5, t_end=0.17),
            InitialSpec("stationary_perturbed", sign=+1),
            ExpectedOutcome(
                ("blow_up",),
                stop_window=(0.1477, 0.1633),
                reduced_stop_window=(0.13995, 0.17105),
                note="reference stop near t=0.1555",
            ),
            grid=Grid(_L3, _L3, 1024, 2048),
            reduced_integrator=IntegratorConfig(dt=2e-4, t_end=0.18),
        )
    )
    entries.append(
        _preset(
            "partial_parallel_sigma3_minus",
            ModelParams(epsilon=1.0, axes=_PART, sigma=3.0, delta=(0.1, 0.0)),
            five,
            InitialSpec("stationary_perturbed", sign=-1),
            ExpectedOutcome(("completed", "monotone_decreasing")),
        )
    )

    # P on x1 with steepening along x2: the analytically open case.
    twenty = IntegratorConfig(dt=1e-2, t_end=20.0)
    entries.append(
        _preset(
            "partial_orthogonal_sigma1_plus",
            ModelParams(epsilon=1.0, axes=_PART, sigma=1.0, delta=(0.0, 1.0)),
            twenty,
            InitialSpec("stationary_perturbed", sign=+1),
            ExpectedOutcome(("completed", "oscillatory_stable")),
        )
    )
    entries.append(
        _preset(
            "partial_orthogonal_sigma1_minus",
            ModelParams(epsilon=1.0, axes=_PART, sigma=1.0, delta=(0.0, 1.0)),
            twenty,
            InitialSpec("stationary_perturbed", sign=-1),
            ExpectedOutcome(("completed", "monotone_decreasing")),
        )
    )
    entries.append(
        _preset(
            "partial_orthogonal_sigma3_plus",
            ModelParams(epsilon=1.0, axes=_PART, sigma=3.0, delta=(0.0, 0.1)),
            IntegratorConfig(dt=5e-5, t_end=0.5),
            InitialSpec("stationary_perturbed", sign=+1),
            ExpectedOutcome(
                ("completed", "focus_then_decay"),
                note="transient focusing that saturates instead of collapsing",
            ),
            grid=Grid(_L3, _L3, 1024, 2048),
            reduced_integrator=IntegratorConfig(dt=2e-4, t_end=0.5),
        )
    )
    entries.append(
        _preset(
            "partial_orthogonal_sigma3_minus",
            ModelParams(epsilon=1.0, axes=_PART, sigma=3.0, delta=(0.0, 0.1)),
            five,
            InitialSpec("stationary_perturbed", sign=-1),
            ExpectedOutcome(("completed", "monotone_decreasing")),
        )
    )

    # Small partial regularization versus Gaussian data: collapse is replaced
    # by decaying sup-norm oscillations.
    entries.append(
        _preset(
            "gauss_orthogonal_eps01",
            ModelParams(epsilon=0.1, axes=_PART, sigma=1.0, delta=(0.0, 0.1)),
            IntegratorConfig(dt=2e-5, t_end=0.5),
            InitialSpec("gaussian", amplitude=4.0),
            ExpectedOutcome(("completed", "oscillatory")),
            grid=Grid(2.0, 2.0, 1024, 1024),
            reduced_integrator=IntegratorConfig(dt=5e-5, t_end=0.3),
        )
    )

    return {p.name: p for p in entries}


_CATALOG = _build_catalog()


def list_presets() -> Tuple[str, ...]:
    return tuple(sorted(_CATALOG))


def get_preset(name: str) -> Preset:
    try:
        return _CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; see list_presets()") from None


def _initial_field(preset: Preset, grid: Grid, cache: bool) -> Field:
    spec = preset.initial
    if spec.kind == "gaussian":
        return gaussian_data(grid, amplitude=spec.amplitude)
    Q = stationary_state_for(grid, preset.params, cache=cache)
    return perturbed_state_data(Q, grid, spec.sign, spec.amplitude)


def run_preset(name: str, reduced: bool = False, cache: bool = True) -> PresetResult:
    """Execute a catalog entry end to end and grade the outcome.

    `reduced` halves the grid and applies the preset's retuned integrator
    settings; qualitative expectations stay in force with doubled
    quantitative windows. `cache` controls the stationary-state disk cache.
    """
    preset = get_preset(name)
    if reduced:
        grid, integrator = preset.reduced_setup()
    else:
        grid, integrator = preset.grid, preset.integrator
    # Snapshot times beyond a retuned reduced horizon would silently drop,
    # so clamp the request to the actual run window.
    snaps = tuple(t for t in preset.monitors.snapshot_times if t <= integrator.t_end + 1e-12)
    monitors = replace(preset.monitors, snapshot_times=snaps)
    start = time.time()
    u0 = _initial_field(preset, grid, cache)
    record = evolve(u0, integrator, grid, preset.params, monitors=monitors, frame=preset.frame)
    verdict, details = evaluate_record(preset, record, reduced)
    return PresetResult(
        preset=preset,
        record=record,
        reduced=reduced,
        verdict=verdict,
        details=details,
        elapsed=time.time() - start,
    )
