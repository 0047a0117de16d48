"""Brute-force verification oracles, independent of the closed forms.

Three searches run over pure-state manifolds using only the channel's
superoperator matrix:

* ``extremize_self_fidelity``: random-restart pattern search of
  Tr(P Lambda[P]) over unit vectors (coordinate-wise steps on the 2*dim
  real parameters with geometric step decay, renormalizing after every
  move; no gradients).
* ``maximize_output_2norm``: the same restart scheme on sqrt(Tr(Lambda[P]^2)).
* ``maximize_output_inf_norm``: alternating ascent of Tr(Q Lambda[P]); for
  a fixed input the optimal measurement is the top eigenvector of the
  output, and (the channels here being self-adjoint) the roles swap
  symmetrically.  The objective is nondecreasing across half-steps.

Restart seeding always includes the supplied candidate states (basis
vectors, or their tensor products for tensor-power probes) ahead of Haar
draws, so conjectured optima are starting points and the search's job is
to confirm nothing beats them.  Each Haar restart draws from a generator
spawned from the master seed and the restart's global index, making
results independent of batching or worker count.  On ties within the
value tolerance the earliest restart wins, so seeded optima are reported
verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import (
    GeneralizedPauliChannel,
    Spectrum,
    apply_channel,
    choi_from_spectrum,
    fujiwara_algoet_check,
    spectrum_of,
    tensor_power,
)
from .errors import TooLargeError
from .metrics import fidelity_extremes, multiplicativity_flags
from .mub import MubFamily, build_mub_family

#: default restart counts (single-copy searches, tensor-power probes)
SINGLE_RESTARTS = 256
TENSOR_RESTARTS = 2048
#: hard cap on the state dimension an oracle will search over
MAX_ORACLE_DIM = 64
#: hard cap on spectra per equivalence scan
MAX_SCAN_POINTS = 100_000

DEFAULT_SEED = 2026


@dataclass(frozen=True)
class OracleConfig:
    """Search budget and reproducibility stamp for one oracle run."""

    restarts: int = SINGLE_RESTARTS
    max_iters: int = 500
    step_tol: float = 1e-9
    value_tol: float = 1e-10
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.step_tol <= 0 or self.value_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class OracleResult:
    """Best value found, the state(s) attaining it, and per-restart summaries.

    ``value`` is the extremal value over all restarts; ``state`` comes from
    the earliest restart within ``value_tol`` of it (seeded candidates come
    first).  ``history`` records the objective after every sweep (or
    alternating half-step) for each restart; rows only improve.  The
    (seed, restarts) stamp plus the same inputs replays the result
    bit-identically regardless of how restarts are scheduled.
    """

    value: float
    state: np.ndarray
    dual_state: np.ndarray | None
    restart_values: np.ndarray
    restart_iterations: np.ndarray
    history: np.ndarray
    best_restart: int
    seed: int
    restarts: int
    n_seed_states: int

    def __post_init__(self):
        for name in ("state", "restart_values", "restart_iterations", "history"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.dual_state is not None:
            dual = np.asarray(self.dual_state)
            dual.setflags(write=False)
            object.__setattr__(self, "dual_state", dual)


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unit vector (normalized complex-normal components)."""
    if dim < 2:
        raise ValueError("dimension must be >= 2")
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def mub_seed_states(fam: MubFamily) -> np.ndarray:
    """All d*(d+1) basis vectors of the family, as restart candidates."""
    return fam.all_vectors().copy()


def product_seed_states(fam: MubFamily, n: int) -> np.ndarray:
    """All n-fold tensor products of the family's basis vectors."""
    single = fam.all_vectors()
    out = single
    for _ in range(n - 1):
        out = np.einsum("ai,bj->abij", out, single).reshape(-1, out.shape[1] * single.shape[1])
    return out


def _superop_dim(superop: np.ndarray) -> int:
    superop = np.asarray(superop)
    if superop.ndim != 2 or superop.shape[0] != superop.shape[1]:
        raise ValueError(f"superoperator must be square, got {superop.shape}")
    m = int(round(np.sqrt(superop.shape[0])))
    if m * m != superop.shape[0]:
        raise ValueError(f"superoperator side {superop.shape[0]} is not a perfect square")
    if m > MAX_ORACLE_DIM:
        raise TooLargeError(f"state dimension {m} exceeds oracle cap {MAX_ORACLE_DIM}")
    return m


def _start_states(dim: int, cfg: OracleConfig, seed_states) -> tuple[np.ndarray, int]:
    if seed_states is None:
        seeds = np.zeros((0, dim), dtype=complex)
    else:
        seeds = np.asarray(seed_states, dtype=complex).reshape(-1, dim).copy()
        seeds /= np.linalg.norm(seeds, axis=1, keepdims=True)
    n_haar = max(cfg.restarts - seeds.shape[0], 0)
    haar = np.empty((n_haar, dim), dtype=complex)
    for i in range(n_haar):
        # generator keyed by the global restart index: worker-count independent
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=cfg.seed, spawn_key=(seeds.shape[0] + i,))
        )
        haar[i] = random_pure_state(dim, rng)
    return np.concatenate([seeds, haar], axis=0), seeds.shape[0]


def _output_batch(superop_t: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Lambda[|psi><psi|] for a batch of unit vectors; returns (B, m, m)."""
    b, m = psi.shape
    v = np.einsum("bj,bi->bji", psi.conj(), psi).reshape(b, m * m)
    w = v @ superop_t
    return w.reshape(b, m, m).transpose(0, 2, 1)


def _pattern_search(objective, starts: np.ndarray, cfg: OracleConfig):
    """Batched coordinate-wise maximization over unit vectors.

    ``objective`` maps a (B, m) batch of unit vectors to (B,) values to
    maximize.  Per restart: cycle through the 2m real coordinates, try a
    +/- step, keep strict improvements, halve the step after a sweep with
    no accepted move, stop below the step tolerance.
    """
    r, m = starts.shape
    n_par = 2 * m
    z = np.concatenate([starts.real, starts.imag], axis=1)
    z /= np.linalg.norm(z, axis=1, keepdims=True)

    def eval_z(zb):
        return objective(zb[:, :m] + 1j * zb[:, m:])

    f = eval_z(z)
    step = np.full(r, 0.5)
    sweeps = np.zeros(r, dtype=np.int64)
    history = [f.copy()]
    for _ in range(cfg.max_iters):
        idx = np.nonzero(step >= cfg.step_tol)[0]
        if idx.size == 0:
            break
        improved = np.zeros(r, dtype=bool)
        for j in range(n_par):
            za = z[idx]
            a = idx.size
            cand = np.concatenate([za, za], axis=0)
            cand[:a, j] += step[idx]
            cand[a:, j] -= step[idx]
            cand /= np.linalg.norm(cand, axis=1, keepdims=True)
            fc = eval_z(cand)
            take_minus = fc[a:] > fc[:a]
            fbest = np.where(take_minus, fc[a:], fc[:a])
            better = fbest > f[idx]
            if better.any():
                rows = idx[better]
                chosen = np.where(take_minus[better, None], cand[a:][better], cand[:a][better])
                z[rows] = chosen
                f[rows] = fbest[better]
                improved[rows] = True
        stuck = np.zeros(r, dtype=bool)
        stuck[idx] = True
        stuck &= ~improved
        step[stuck] *= 0.5
        sweeps[idx] += 1
        history.append(f.copy())
    psi = z[:, :m] + 1j * z[:, m:]
    return psi, f, np.asarray(history), sweeps


def _select_best(values: np.ndarray, value_tol: float) -> int:
    """Earliest restart within tolerance of the best value."""
    vmax = float(np.max(values))
    return int(np.nonzero(values >= vmax - value_tol)[0][0])


def extremize_self_fidelity(
    superop: np.ndarray,
    sense: str,
    cfg: OracleConfig | None = None,
    seed_states: Sequence[np.ndarray] | np.ndarray | None = None,
) -> OracleResult:
    """Search the extremum of Tr(P Lambda[P]) over pure inputs.

    ``sense`` is ``"max"`` or ``"min"``.  The returned value is the best
    over all restarts; seeded candidates are searched first.
    """
    if sense not in ("max", "min"):
        raise ValueError(f"sense must be 'max' or 'min', got {sense!r}")
    cfg = cfg or OracleConfig()
    superop = np.asarray(superop, dtype=complex)
    m = _superop_dim(superop)
    superop_t = np.ascontiguousarray(superop.T)
    sgn = 1.0 if sense == "max" else -1.0

    def objective(psi):
        out = _output_batch(superop_t, psi)
        vals = np.einsum("bi,bij,bj->b", psi.conj(), out, psi).real
        return sgn * vals

    starts, n_seeds = _start_states(m, cfg, seed_states)
    psi, g, hist, sweeps = _pattern_search(objective, starts, cfg)
    best = _select_best(g, cfg.value_tol)
    return OracleResult(
        value=sgn * float(np.max(g)),
        state=psi[best],
        dual_state=None,
        restart_values=sgn * g,
        restart_iterations=sweeps,
        history=sgn * hist,
        best_restart=best,
        seed=cfg.seed,
        restarts=starts.shape[0],
        n_seed_states=n_seeds,
    )


def maximize_output_2norm(
    superop: np.ndarray,
    cfg: OracleConfig | None = None,
    seed_states: Sequence[np.ndarray] | np.ndarray | None = None,
) -> OracleResult:
    """Search the largest output 2-norm sqrt(Tr(Lambda[P]^2)) over pure inputs."""
    cfg = cfg or OracleConfig()
    superop = np.asarray(superop, dtype=complex)
    m = _superop_dim(superop)
    superop_t = np.ascontiguousarray(superop.T)

    def objective(psi):
        out = _output_batch(superop_t, psi)
        return np.sqrt(np.sum(np.abs(out) ** 2, axis=(1, 2)))

    starts, n_seeds = _start_states(m, cfg, seed_states)
    psi, g, hist, sweeps = _pattern_search(objective, starts, cfg)
    best = _select_best(g, cfg.value_tol)
    return OracleResult(
        value=float(np.max(g)),
        state=psi[best],
        dual_state=None,
        restart_values=g,
        restart_iterations=sweeps,
        history=hist,
        best_restart=best,
        seed=cfg.seed,
        restarts=starts.shape[0],
        n_seed_states=n_seeds,
    )


def maximize_output_inf_norm(
    superop: np.ndarray,
    cfg: OracleConfig | None = None,
    seed_states: Sequence[np.ndarray] | np.ndarray | None = None,
) -> OracleResult:
    """Alternating ascent of Tr(Q Lambda[P]) over pure input/measurement pairs.

    Fixing the input, the optimal measurement is the top eigenvector of the
    output; the self-adjointness of the channel lets the two roles swap.
    Every half-step is nondecreasing; each restart stops at a fixed point.
    The result's ``state`` is the input P and ``dual_state`` the
    measurement Q; on ties the earlier (seeded) pair is kept.
    """
    cfg = cfg or OracleConfig()
    superop = np.asarray(superop, dtype=complex)
    m = _superop_dim(superop)
    superop_t = np.ascontiguousarray(superop.T)

    p, n_seeds = _start_states(m, cfg, seed_states)
    r = p.shape[0]
    best_val = np.full(r, -np.inf)
    best_p = p.copy()
    best_q = p.copy()
    iters = np.zeros(r, dtype=np.int64)
    active = np.arange(r)
    history: list[np.ndarray] = []
    last = np.full(r, -np.inf)
    for _ in range(cfg.max_iters):
        if active.size == 0:
            break
        out = _output_batch(superop_t, p[active])
        w, v = np.linalg.eigh(out)
        val1 = w[:, -1]
        q = v[:, :, -1]
        out2 = _output_batch(superop_t, q)
        w2, v2 = np.linalg.eigh(out2)
        val2 = w2[:, -1]
        p2 = v2[:, :, -1]

        imp1 = val1 > best_val[active] + cfg.value_tol
        rows = active[imp1]
        best_val[rows] = val1[imp1]
        best_p[rows] = p[rows]
        best_q[rows] = q[imp1]
        imp2 = val2 > best_val[active] + cfg.value_tol
        rows2 = active[imp2]
        best_val[rows2] = val2[imp2]
        best_p[rows2] = p2[imp2]
        best_q[rows2] = q[imp2]

        last[active] = val2
        history.append(last.copy())
        iters[active] += 1
        progressed = imp1 | imp2
        p[active] = p2
        active = active[progressed]
    best = _select_best(best_val, cfg.value_tol)
    return OracleResult(
        value=float(np.max(best_val)),
        state=best_p[best],
        dual_state=best_q[best],
        restart_values=best_val,
        restart_iterations=iters,
        history=np.asarray(history) if history else np.zeros((0, r)),
        best_restart=best,
        seed=cfg.seed,
        restarts=r,
        n_seed_states=n_seeds,
    )


def eigenrelation_residual(ch: GeneralizedPauliChannel, lambdas=None) -> float:
    """max over (a, k) of ||Lambda[U(a, k)] - lambda_a U(a, k)||_F.

    Passing ``lambdas`` overrides the channel's own spectrum (fault
    injection and detection tests).
    """
    lam = spectrum_of(ch).lambdas if lambdas is None else np.asarray(lambdas, dtype=float)
    us = ch.fam.unitaries()
    worst = 0.0
    for a in range(ch.d + 1):
        for k in range(ch.d - 1):
            diff = apply_channel(ch, us[a, k]) - lam[a] * us[a, k]
            worst = max(worst, float(np.linalg.norm(diff)))
    return worst


# ---------------------------------------------------------------------------
# complete-positivity equivalence scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumGrid:
    """Sampling plan for the inequality-vs-Choi equivalence scan."""

    n_random: int = 10_000
    seed: int = DEFAULT_SEED
    include_boundary: bool = True
    include_violations: bool = True


@dataclass(frozen=True)
class ScanReport:
    d: int
    n_total: int
    n_cptp: int
    n_disagreements: int
    disagreements: tuple
    worst_boundary_choi_eig: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.n_disagreements == 0


def _grid_spectra(d: int, grid: SpectrumGrid) -> np.ndarray:
    rng = np.random.default_rng(grid.seed)
    blocks = [rng.uniform(-1.0, 1.0, size=(grid.n_random, d + 1))]
    if grid.include_boundary:
        lower_const = -1.0 / (d * d - 1)
        axis = np.zeros(d + 1)
        axis[0] = 1.0
        blocks.append(
            np.vstack(
                [
                    np.ones(d + 1),                      # identity: upper slack 0
                    np.full(d + 1, lower_const),         # lower slack 0
                    axis,                                # one preserved axis: upper slack 0
                    np.zeros(d + 1),                     # interior point
                ]
            )
        )
    if grid.include_violations:
        lower_const = -1.0 / (d * d - 1)
        over_axis = np.zeros(d + 1)
        over_axis[0] = 1.0 + 1e-3
        bumped = np.ones(d + 1)
        bumped[-1] = 1.0 + 1e-3
        rows = [
            np.full(d + 1, lower_const - 1e-3),          # just past the lower bound
            over_axis,                                   # just past the upper bound
            np.full(d + 1, -1.0),                        # gross lower violation
            bumped,                                      # gross upper violation
        ]
        if d == 3:
            rows.append(np.array([0.5, 0.2, -0.1, 0.3]))  # upper bound off by 0.2
        blocks.append(np.vstack(rows))
    spectra = np.vstack(blocks)
    if spectra.shape[0] > MAX_SCAN_POINTS:
        raise TooLargeError(f"scan grid of {spectra.shape[0]} points exceeds {MAX_SCAN_POINTS}")
    return spectra


def cptp_equivalence_scan(
    d: int,
    grid: SpectrumGrid | None = None,
    fam: MubFamily | None = None,
    tol: float = 1e-10,
) -> ScanReport:
    """Compare the spectrum inequalities against the Choi positivity test.

    For every sampled spectrum both routes are evaluated at the same
    tolerance; the report lists any disagreements (expected: none) and the
    worst Choi eigenvalue magnitude among points sitting on the inequality
    boundary.
    """
    grid = grid or SpectrumGrid()
    fam = fam or build_mub_family(d)
    spectra = _grid_spectra(d, grid)
    n = spectra.shape[0]

    totals = spectra.sum(axis=1)
    mins = spectra.min(axis=1)
    lower = totals + 1.0 / (d - 1)
    upper = 1.0 + d * mins - totals
    fa_pass = (lower >= -tol) & (upper >= -tol)

    min_eigs = np.empty(n)
    eye = np.eye(d * d, dtype=complex) / d**2
    from .channel import _spectral_parts  # shared cached basis components

    _, choi_parts = _spectral_parts(fam)
    chunk = max(1, min(2048, (1 << 22) // (d**4)))
    for start in range(0, n, chunk):
        lam = spectra[start : start + chunk]
        js = np.einsum("na,aij->nij", lam, choi_parts) + eye
        min_eigs[start : start + chunk] = np.linalg.eigvalsh(js)[:, 0]
    psd_pass = min_eigs >= -tol

    disagree = fa_pass != psd_pass
    boundary = np.minimum(np.abs(lower), np.abs(upper)) <= tol
    worst_boundary = float(np.max(np.abs(min_eigs[boundary]))) if boundary.any() else 0.0
    offending = tuple(tuple(row) for row in spectra[disagree][:20])
    return ScanReport(
        d=d,
        n_total=n,
        n_cptp=int(np.count_nonzero(fa_pass)),
        n_disagreements=int(np.count_nonzero(disagree)),
        disagreements=offending,
        worst_boundary_choi_eig=worst_boundary,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# tensor-power multiplicativity probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    """Tensor-power fidelity search against the product-state baseline.

    ``estimate`` is a valid lower bound on the tensor power's maximal
    fidelity (product candidates are seeded, so it is also
    >= baseline up to search noise).  ``excess`` > 0 would mean entangled
    inputs beat products; in the open regime this is recorded, never
    judged.
    """

    d: int
    n: int
    estimate: float
    baseline: float
    excess: float
    regime: str  # "factorizing" or "open"
    result: OracleResult


def tensor_fidelity_probe(
    ch: GeneralizedPauliChannel,
    n: int,
    cfg: OracleConfig | None = None,
) -> ProbeReport:
    """Search f_max of the n-fold tensor power and compare to f_max^n."""
    cfg = cfg or OracleConfig(restarts=TENSOR_RESTARTS)
    superop_n = tensor_power(ch, n)
    seeds = product_seed_states(ch.fam, n)
    result = extremize_self_fidelity(superop_n, "max", cfg, seed_states=seeds)
    baseline = fidelity_extremes(ch).f_max ** n
    regime = "factorizing" if multiplicativity_flags(ch).fmax_multiplicative else "open"
    return ProbeReport(
        d=ch.d,
        n=n,
        estimate=result.value,
        baseline=baseline,
        excess=result.value - baseline,
        regime=regime,
        result=result,
    )


def choi_min_eigenvalue(fam: MubFamily, lambdas) -> float:
    """Smallest Choi eigenvalue of the map with the given spectrum."""
    j = choi_from_spectrum(fam, lambdas)
    return float(np.linalg.eigvalsh(j)[0])


def spectrum_is_cptp(d: int, lambdas, tol: float = 1e-10) -> bool:
    """Inequality route only; see :func:`cptp_equivalence_scan` for the dual check."""
    return fujiwara_algoet_check(Spectrum(d, np.asarray(lambdas, dtype=float)), tol=tol).passed
