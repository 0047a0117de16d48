"""Closed-form channel figures of merit.

For a channel with eigenvalues lambda_1..lambda_{d+1} the extremal
input-output fidelities over pure states are

    f_min = [1 + (d-1)*min(lambda)] / d,
    f_max = [1 + (d-1)*max(lambda)] / d,

equivalently p_0 + min_a p_a and p_0 + max_a p_a in probability form.  The
maximal output Schatten norms over pure inputs are

    nu_2   = sqrt([1 + (d-1)*max_a lambda_a^2] / d),
    nu_inf = max(1 + (d-1)*max(lambda), 1 - min(lambda)) / d,

and f_max of the self-composed channel equals nu_2^2 (the channel is
self-adjoint in the Hilbert-Schmidt inner product).

Multiplicativity classification: f_max of a tensor power factorizes into
the single-copy power whenever max(lambda) >= |min(lambda)|, in which case
the n-th regularized maximal fidelity equals f_max for every n and also
equals nu_inf.  Outside that regime only the bracket
[f_max, nu_inf] is reported; whether tensor inputs can beat product
inputs there is probed numerically, never asserted.

Argmax/argmin ties break toward the lowest basis index everywhere, so
attainment indices are deterministic.  Comparisons carry 1e-12 slack
toward "true" on equalities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import GeneralizedPauliChannel, compose, spectrum_of
from .errors import DimensionMismatchError
from .mub import MubFamily

#: slack applied toward "true" when classifying non-strict inequalities
CLASSIFY_SLACK = 1e-12


@dataclass(frozen=True)
class FidelityExtremes:
    f_min: float
    f_max: float
    argmin_alpha: int
    argmax_alpha: int


@dataclass(frozen=True)
class MultiplicativityFlags:
    """Which factorization guarantees apply to the channel's spectrum."""

    fmax_multiplicative: bool
    fmin_multiplicative: bool
    nuinf_equals_fmax: bool
    nuinf_multiplicative: bool


@dataclass(frozen=True)
class RegularizedMaxFidelity:
    """Value (or bracket) for the n-th regularized maximal fidelity.

    When ``exact`` is set the value is f_max itself for every n.  Otherwise
    ``lower``/``upper`` bracket the quantity; ``oracle_estimate`` holds the
    tensor-power search value that refined the lower end, if one ran.
    """

    n: int
    exact: bool
    value: float | None
    lower: float
    upper: float
    oracle_estimate: float | None = None


@dataclass(frozen=True)
class FidelityReport:
    """Everything the analyzer knows about one channel, closed forms only."""

    f_min: float
    f_max: float
    nu2: float
    nu_inf: float
    argmin_alpha: int
    argmax_alpha: int
    nu2_alpha: int
    nu2_fmax_coincide: bool
    nu2_fmin_coincide: bool
    flags: MultiplicativityFlags
    regularized: RegularizedMaxFidelity


def fidelity_extremes(ch: GeneralizedPauliChannel) -> FidelityExtremes:
    """Extremal pure-state fidelities and the basis indices attaining them."""
    lam = spectrum_of(ch).lambdas
    d = ch.d
    amin = int(np.argmin(lam))
    amax = int(np.argmax(lam))
    return FidelityExtremes(
        f_min=float((1.0 + (d - 1) * lam[amin]) / d),
        f_max=float((1.0 + (d - 1) * lam[amax]) / d),
        argmin_alpha=amin,
        argmax_alpha=amax,
    )


def fidelity_extremes_probability_form(ch: GeneralizedPauliChannel) -> FidelityExtremes:
    """Same extremes computed as p_0 + min/max p_a; cross-check route."""
    p0 = float(ch.probs[0])
    rest = ch.probs[1:]
    amin = int(np.argmin(rest))
    amax = int(np.argmax(rest))
    return FidelityExtremes(
        f_min=p0 + float(rest[amin]),
        f_max=p0 + float(rest[amax]),
        argmin_alpha=amin,
        argmax_alpha=amax,
    )


def unitary_coefficients(fam: MubFamily, psi: np.ndarray) -> np.ndarray:
    """Expansion coefficients x[a, k-1] of |psi><psi| over the basis unitaries.

    |psi><psi| = (I + sum_{a,k} x[a,k] U(a,k)) / d; for any unit vector the
    total weight sum |x|^2 equals d-1.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (fam.d,):
        raise DimensionMismatchError(f"expected a length-{fam.d} vector, got {psi.shape}")
    q = np.einsum("i,akij,j->ak", psi.conj(), fam.unitaries(), psi)
    return q.conj()


def channel_fidelity(ch: GeneralizedPauliChannel, psi: np.ndarray) -> float:
    """Input-output fidelity Tr(P Lambda[P]) for the pure input P = |psi><psi|."""
    x = unitary_coefficients(ch.fam, psi)
    lam = spectrum_of(ch).lambdas
    weights = np.sum(np.abs(x) ** 2, axis=1)
    return float((1.0 + np.dot(lam, weights)) / ch.d)


def max_output_2norm(ch: GeneralizedPauliChannel) -> float:
    """Largest Schatten 2-norm of any output from a pure input."""
    lam = spectrum_of(ch).lambdas
    d = ch.d
    return float(np.sqrt((1.0 + (d - 1) * np.max(lam**2)) / d))


def max_output_2norm_alpha(ch: GeneralizedPauliChannel) -> int:
    """Basis index attaining the 2-norm maximum (lowest index on ties)."""
    lam = spectrum_of(ch).lambdas
    return int(np.argmax(lam**2))


def max_output_inf_norm(ch: GeneralizedPauliChannel) -> float:
    """Closed form max(1 + (d-1)*max(lambda), 1 - min(lambda)) / d.

    This is the best value over basis-projector inputs: the first branch is
    attained with equal input and measurement projectors on a vector of the
    maximizing basis, the second with two orthogonal vectors of the
    minimizing basis.  It equals the true maximal output eigenvalue for
    d = 2, and for any d when max(lambda) >= |min(lambda)|.  When
    max(lambda) < |min(lambda)| at d >= 3, inputs superposed across several
    negative-eigenvalue bases can beat it (brute-force search confirms
    excesses up to a few percent), so there it is a lower bound only; see
    :func:`gpchannels.oracle.maximize_output_inf_norm`.
    """
    lam = spectrum_of(ch).lambdas
    d = ch.d
    return float(max(1.0 + (d - 1) * np.max(lam), 1.0 - np.min(lam)) / d)


def inf_norm_formula_is_exact(ch: GeneralizedPauliChannel, slack: float = CLASSIFY_SLACK) -> bool:
    """Whether the closed-form output inf-norm is the verified true maximum."""
    lam = spectrum_of(ch).lambdas
    return ch.d == 2 or float(np.max(lam)) >= abs(float(np.min(lam))) - slack


def composition_two_norm_residual(ch: GeneralizedPauliChannel) -> float:
    """|f_max(Lambda o Lambda) - nu_2(Lambda)^2|; contractually <= 1e-12."""
    squared = compose(ch, ch)
    return abs(fidelity_extremes(squared).f_max - max_output_2norm(ch) ** 2)


def multiplicativity_flags(
    ch: GeneralizedPauliChannel, slack: float = CLASSIFY_SLACK
) -> MultiplicativityFlags:
    """Classify which factorization guarantees hold for this spectrum.

    f_max factorizes when max(lambda) >= |min(lambda)| (so the dominant
    eigenvalue is the nonnegative one); f_min factorizes when
    |max(lambda)| <= |min(lambda)|; nu_inf collapses onto f_max when
    max(lambda) >= -min(lambda)/(d-1); and nu_inf factorizes when both the
    f_max and the collapse conditions hold.
    """
    lam = spectrum_of(ch).lambdas
    d = ch.d
    lmax = float(np.max(lam))
    lmin = float(np.min(lam))
    fmax_mult = lmax >= abs(lmin) - slack
    fmin_mult = abs(lmax) <= abs(lmin) + slack
    nuinf_eq = lmax >= -lmin / (d - 1) - slack
    return MultiplicativityFlags(
        fmax_multiplicative=fmax_mult,
        fmin_multiplicative=fmin_mult,
        nuinf_equals_fmax=nuinf_eq,
        nuinf_multiplicative=fmax_mult and nuinf_eq,
    )


def attainment_coincidences(
    ch: GeneralizedPauliChannel, slack: float = CLASSIFY_SLACK
) -> tuple[bool, bool]:
    """(nu2 and f_max share a maximizer, nu2 and f_min share one).

    The first holds iff |max(lambda)| >= |min(lambda)|, the second iff
    max(lambda)^2 <= min(lambda)^2.
    """
    lam = spectrum_of(ch).lambdas
    lmax = float(np.max(lam))
    lmin = float(np.min(lam))
    return (abs(lmax) >= abs(lmin) - slack, lmax**2 <= lmin**2 + slack)


def regularized_max_fidelity(
    ch: GeneralizedPauliChannel,
    n: int,
    mode: str = "closed",
    cfg=None,
) -> RegularizedMaxFidelity:
    """n-th regularized maximal fidelity: exact value or bracket.

    In the factorizing regime (max(lambda) >= |min(lambda)|) the value is
    f_max exactly for every n, and coincides with nu_inf.  Otherwise the
    result brackets the quantity by [f_max, nu_inf]; ``mode="oracle"``
    additionally runs the tensor-power searches up to order n and refines
    the lower end with the best m-th root over m <= n.  Every m-th root of
    a tensor search value lower-bounds the asymptotic regularization, so
    the refined lower bound only improves with n; ``oracle_estimate``
    carries the order-n search value itself.
    """
    if mode not in ("closed", "oracle"):
        raise ValueError(f"mode must be 'closed' or 'oracle', got {mode!r}")
    if n < 1:
        raise ValueError("regularization order must be >= 1")
    ext = fidelity_extremes(ch)
    if multiplicativity_flags(ch).fmax_multiplicative:
        return RegularizedMaxFidelity(
            n=n, exact=True, value=ext.f_max, lower=ext.f_max, upper=ext.f_max
        )
    upper = max_output_inf_norm(ch)
    lower = ext.f_max
    estimate = None
    if mode == "oracle" and n >= 2:
        from .oracle import tensor_fidelity_probe  # local import, avoids cycle

        for m in range(2, n + 1):
            probe = tensor_fidelity_probe(ch, m, cfg)
            lower = max(lower, probe.estimate ** (1.0 / m))
            if m == n:
                estimate = probe.estimate
    return RegularizedMaxFidelity(
        n=n, exact=False, value=None, lower=lower, upper=upper, oracle_estimate=estimate
    )


def fidelity_report(ch: GeneralizedPauliChannel, n_reg: int = 1) -> FidelityReport:
    """Assemble all closed-form quantities for one channel."""
    ext = fidelity_extremes(ch)
    co_fmax, co_fmin = attainment_coincidences(ch)
    return FidelityReport(
        f_min=ext.f_min,
        f_max=ext.f_max,
        nu2=max_output_2norm(ch),
        nu_inf=max_output_inf_norm(ch),
        argmin_alpha=ext.argmin_alpha,
        argmax_alpha=ext.argmax_alpha,
        nu2_alpha=max_output_2norm_alpha(ch),
        nu2_fmax_coincide=co_fmax,
        nu2_fmin_coincide=co_fmin,
        flags=multiplicativity_flags(ch),
        regularized=regularized_max_fidelity(ch, n_reg, mode="closed"),
    )
