import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpchannels import (
    BadProbabilitiesError,
    DimensionMismatchError,
    FamilyMismatchError,
    MubFamily,
    NotCPTPError,
    Spectrum,
    TooLargeError,
    apply_channel,
    channel_from_eigenvalues,
    channel_from_probabilities,
    choi_of,
    compose,
    depolarizing_channel,
    fujiwara_algoet_check,
    identity_channel,
    load_channel_file,
    probabilities_of,
    save_mub_file,
    spectrum_of,
    superoperator_of,
    tensor_power,
)
from gpchannels.channel import choi_from_spectrum, superop_from_spectrum, validate_density_matrix
from gpchannels.linalg import unvec, vec
from helpers import random_cptp_channel, random_density, random_hermitian, two_qubit_mub_bases


def test_identity_channel_from_probabilities(fam2):
    ch = channel_from_probabilities(2, [1, 0, 0, 0], fam2)
    assert np.allclose(spectrum_of(ch).lambdas, [1, 1, 1])
    rho = np.array([[0.7, 0.2j], [-0.2j, 0.3]])
    assert np.max(np.abs(apply_channel(ch, rho) - rho)) <= 1e-14


def test_depolarizing_d3_spectrum_zero(fam3):
    ch = channel_from_probabilities(3, [1 / 9, 2 / 9, 2 / 9, 2 / 9, 2 / 9], fam3)
    assert np.max(np.abs(spectrum_of(ch).lambdas)) <= 1e-15
    assert np.allclose(depolarizing_channel(3, fam3).probs, ch.probs)


def test_spectrum_hand_values(fam2):
    ch = channel_from_probabilities(2, [0.7, 0.1, 0.1, 0.1], fam2)
    assert np.allclose(spectrum_of(ch).lambdas, [0.6, 0.6, 0.6], atol=1e-15)
    ch_pd = channel_from_probabilities(2, [0.5, 0.5, 0.0, 0.0], fam2)
    lam = spectrum_of(ch_pd).lambdas
    assert np.allclose(lam, [1.0, 0.0, 0.0], atol=1e-15)
    # phase-damping-like point sits on the CPTP boundary
    assert fujiwara_algoet_check(Spectrum(2, lam)).upper_slack == pytest.approx(0.0, abs=1e-15)


def test_bad_probabilities_rejected(fam2):
    with pytest.raises(BadProbabilitiesError):
        channel_from_probabilities(2, [0.5, 0.5, 0.1, -0.1], fam2)
    with pytest.raises(BadProbabilitiesError):
        channel_from_probabilities(2, [0.5, 0.2, 0.2, 0.2], fam2)
    with pytest.raises(BadProbabilitiesError):
        channel_from_probabilities(2, [1, 0, 0], fam2)
    with pytest.raises(DimensionMismatchError):
        channel_from_probabilities(3, [1, 0, 0, 0, 0], fam2)


def test_from_eigenvalues_boundary_point(fam2):
    ch = channel_from_eigenvalues(2, [-1 / 3, -1 / 3, -1 / 3], fam2)
    assert np.allclose(ch.probs, [0, 1 / 3, 1 / 3, 1 / 3], atol=1e-15)
    check = fujiwara_algoet_check(spectrum_of(ch))
    assert check.passed
    assert check.lower_slack == pytest.approx(0.0, abs=1e-15)


def test_from_eigenvalues_identity(fam2):
    ch = channel_from_eigenvalues(2, [1, 1, 1], fam2)
    assert np.allclose(ch.probs, [1, 0, 0, 0], atol=1e-15)


def test_from_eigenvalues_rejects_noncptp(fam3):
    with pytest.raises(NotCPTPError) as exc:
        channel_from_eigenvalues(3, [0.5, 0.2, -0.1, 0.3], fam3)
    assert exc.value.bound == "upper"
    assert exc.value.violation == pytest.approx(0.2, abs=1e-12)
    assert "upper" in str(exc.value)


def test_fujiwara_algoet_identity_boundary():
    check = fujiwara_algoet_check(Spectrum(2, np.array([1.0, 1.0, 1.0])))
    assert check.passed
    assert check.upper_slack == pytest.approx(0.0, abs=1e-15)
    bad = fujiwara_algoet_check(Spectrum(3, np.array([0.5, 0.2, -0.1, 0.3])))
    assert not bad.passed and bad.violated == "upper"
    assert bad.upper_slack == pytest.approx(-0.2, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 5]))
def test_probability_eigenvalue_round_trip(seed, d):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(d + 2))
    sp = Spectrum(d, (d * (p[0] + p[1:]) - 1.0) / (d - 1))
    assert np.max(np.abs(probabilities_of(sp) - p)) <= 1e-12
    # and spectra round-trip through probabilities
    back = (d * (probabilities_of(sp)[0] + probabilities_of(sp)[1:]) - 1.0) / (d - 1)
    assert np.max(np.abs(back - sp.lambdas)) <= 1e-12


def test_round_trip_bulk_1000(rng):
    worst = 0.0
    for _ in range(1000):
        d = int(rng.choice([2, 3, 5]))
        p = rng.dirichlet(np.ones(d + 2))
        sp = Spectrum(d, (d * (p[0] + p[1:]) - 1.0) / (d - 1))
        worst = max(worst, float(np.max(np.abs(probabilities_of(sp) - p))))
    assert worst <= 1e-12


def test_unitality_and_trace_preservation(fam3, rng):
    ch = random_cptp_channel(3, rng, fam3)
    out = apply_channel(ch, np.eye(3, dtype=complex))
    assert np.max(np.abs(out - np.eye(3))) <= 1e-12
    x = random_hermitian(3, rng)
    assert abs(np.trace(apply_channel(ch, x)) - np.trace(x)) <= 1e-12


def test_apply_channel_output_is_density(fam5, rng):
    ch = random_cptp_channel(5, rng, fam5)
    rho = random_density(5, rng)
    validate_density_matrix(apply_channel(ch, rho))


def test_fixed_point_of_unit_eigenvalue_axis(fam2):
    ch = channel_from_eigenvalues(2, [1.0, 0.0, 0.0], fam2)
    p = fam2.projector(0, 0)
    assert np.max(np.abs(apply_channel(ch, p) - p)) <= 1e-12


def test_apply_channel_dimension_mismatch(fam2):
    ch = identity_channel(2, fam2)
    with pytest.raises(DimensionMismatchError):
        apply_channel(ch, np.eye(3))


def test_eigenrelation_via_superoperator(fam3, rng):
    ch = random_cptp_channel(3, rng, fam3)
    s = superoperator_of(ch)
    lam = spectrum_of(ch).lambdas
    for a in range(4):
        for k in range(2):
            u = fam3.unitaries()[a, k]
            resid = np.max(np.abs(unvec(s @ vec(u), 3) - lam[a] * u))
            assert resid <= 1e-12


def test_superoperator_identity_and_depolarizing(fam2):
    assert np.max(np.abs(superoperator_of(identity_channel(2, fam2)) - np.eye(4))) <= 1e-12
    s = superoperator_of(depolarizing_channel(2, fam2))
    sz = np.diag([1.0, -1.0]).astype(complex)
    assert np.max(np.abs(s @ vec(sz))) <= 1e-14


def test_superoperator_matches_apply_on_20_random_inputs(fam5, rng):
    ch = random_cptp_channel(5, rng, fam5)
    s = superoperator_of(ch)
    for _ in range(20):
        x = random_hermitian(5, rng)
        assert np.max(np.abs(unvec(s @ vec(x), 5) - apply_channel(ch, x))) <= 1e-10


def test_superop_from_spectrum_matches_definition_route(fam3, rng):
    ch = random_cptp_channel(3, rng, fam3)
    s1 = superoperator_of(ch)
    s2 = superop_from_spectrum(fam3, spectrum_of(ch).lambdas)
    assert np.max(np.abs(s1 - s2)) <= 1e-12


def test_choi_identity_is_maximally_entangled_projector(fam3):
    j = choi_of(identity_channel(3, fam3))
    omega = np.zeros(9, dtype=complex)
    omega[[0, 4, 8]] = 1 / np.sqrt(3)
    assert np.max(np.abs(j - np.outer(omega, omega.conj()))) <= 1e-14


def test_choi_depolarizing_is_maximally_mixed(fam2):
    j = choi_of(depolarizing_channel(2, fam2))
    assert np.max(np.abs(j - np.eye(4) / 4)) <= 1e-14


def test_choi_boundary_min_eigenvalue_zero(fam2):
    ch = channel_from_eigenvalues(2, [-1 / 3, -1 / 3, -1 / 3], fam2)
    w = np.linalg.eigvalsh(choi_of(ch))
    assert abs(w[0]) <= 1e-10
    assert abs(np.trace(choi_of(ch)) - 1) <= 1e-12


def test_choi_routes_agree(fam5, rng):
    ch = random_cptp_channel(5, rng, fam5)
    j1 = choi_of(ch)
    j2 = choi_from_spectrum(fam5, spectrum_of(ch).lambdas)
    assert np.max(np.abs(j1 - j2)) <= 1e-12


def test_compose_identity_neutral(fam3, rng):
    ch = random_cptp_channel(3, rng, fam3)
    composed = compose(identity_channel(3, fam3), ch)
    assert np.max(np.abs(composed.probs - ch.probs)) <= 1e-12


def test_compose_squares_spectrum(fam2):
    ch = channel_from_eigenvalues(2, [0.6, 0.6, 0.6], fam2)
    sq = compose(ch, ch)
    assert np.allclose(spectrum_of(sq).lambdas, [0.36, 0.36, 0.36], atol=1e-14)


def test_compose_matches_superoperator_product(fam3, rng):
    a = random_cptp_channel(3, rng, fam3)
    b = random_cptp_channel(3, rng, fam3)
    lhs = superoperator_of(compose(a, b))
    rhs = superoperator_of(a) @ superoperator_of(b)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_compose_family_mismatch(fam2, fam3, rng):
    with pytest.raises(FamilyMismatchError):
        compose(identity_channel(2, fam2), identity_channel(3, fam3))
    rotated = MubFamily(d=2, bases=fam2.bases[[0, 2, 1]])
    with pytest.raises(FamilyMismatchError):
        compose(identity_channel(2, fam2), identity_channel(2, rotated))


def test_tensor_power_basics(fam2, rng):
    ch = random_cptp_channel(2, rng, fam2)
    assert np.array_equal(tensor_power(ch, 1), superoperator_of(ch))
    ident = identity_channel(2, fam2)
    assert np.max(np.abs(tensor_power(ident, 2) - np.eye(16))) <= 1e-12


def test_tensor_power_depolarizing_product_state(fam2, rng):
    s2 = tensor_power(depolarizing_channel(2, fam2), 2)
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    psi = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
    out = unvec(s2 @ vec(np.outer(psi, psi.conj())), 4)
    assert np.max(np.abs(out - np.eye(4) / 4)) <= 1e-12


def test_tensor_power_factorizes_on_products(fam3, rng):
    ch = random_cptp_channel(3, rng, fam3)
    s1 = superoperator_of(ch)
    s2 = tensor_power(ch, 2)
    x = random_hermitian(3, rng)
    y = random_hermitian(3, rng)
    lhs = unvec(s2 @ vec(np.kron(x, y)), 9)
    rhs = np.kron(unvec(s1 @ vec(x), 3), unvec(s1 @ vec(y), 3))
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_tensor_power_preserves_trace_and_identity(fam2, rng):
    ch = random_cptp_channel(2, rng, fam2)
    s2 = tensor_power(ch, 2)
    assert np.max(np.abs(unvec(s2 @ vec(np.eye(4, dtype=complex)), 4) - np.eye(4))) <= 1e-12
    x = random_hermitian(4, rng)
    out = unvec(s2 @ vec(x), 4)
    assert abs(np.trace(out) - np.trace(x)) <= 1e-10


def test_tensor_power_guard(fam5):
    ch = identity_channel(5, fam5)
    with pytest.raises(TooLargeError):
        tensor_power(ch, 3)  # 5^6 = 15625 > 4096


def test_cptp_spectra_have_contractive_eigenvalues(rng):
    for _ in range(200):
        d = int(rng.choice([2, 3, 5]))
        ch = random_cptp_channel(d, rng)
        assert np.max(np.abs(spectrum_of(ch).lambdas)) <= 1.0 + 1e-12


def test_values_are_frozen(fam3, rng):
    ch = random_cptp_channel(3, rng, fam3)
    with pytest.raises(ValueError):
        ch.probs[0] = 0.5
    with pytest.raises(ValueError):
        fam3.bases[0, 0, 0] = 2.0
    with pytest.raises(ValueError):
        spectrum_of(ch).lambdas[0] = 0.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 5]))
def test_fa_slacks_are_scaled_inverse_probabilities(seed, d):
    # the complete-positivity slacks are exactly the inverse-relation weights
    # rescaled by d^2/(d-1), so the simplex covers the CPTP set precisely
    rng = np.random.default_rng(seed)
    lam = rng.uniform(-1.0, 1.0, size=d + 1)  # arbitrary, CPTP or not
    sp = Spectrum(d, lam)
    check = fujiwara_algoet_check(sp)
    p = probabilities_of(sp)
    scale = d * d / (d - 1)
    assert check.lower_slack == pytest.approx(p[0] * scale, abs=1e-10)
    assert check.upper_slack == pytest.approx(np.min(p[1:]) * scale, abs=1e-10)


# ---------------------------------------------------------------------------
# spec files
# ---------------------------------------------------------------------------


def test_load_channel_probabilities_form(tmp_path):
    path = tmp_path / "ch.json"
    path.write_text(json.dumps({"d": 2, "probabilities": [0.7, 0.1, 0.1, 0.1]}))
    ch = load_channel_file(path)
    assert np.allclose(spectrum_of(ch).lambdas, [0.6, 0.6, 0.6])


def test_load_channel_eigenvalues_form(tmp_path):
    path = tmp_path / "ch.json"
    path.write_text(json.dumps({"d": 3, "eigenvalues": [0.4, 0.2, 0.1, 0.2]}))
    ch = load_channel_file(path)
    assert np.allclose(spectrum_of(ch).lambdas, [0.4, 0.2, 0.1, 0.2], atol=1e-12)


def test_load_channel_normalizes_small_drift(tmp_path):
    p = [0.7, 0.1, 0.1, 0.1 + 5e-10]
    path = tmp_path / "ch.json"
    path.write_text(json.dumps({"d": 2, "probabilities": p}))
    ch = load_channel_file(path)
    assert abs(np.sum(ch.probs) - 1.0) <= 1e-15


def test_load_channel_rejects_large_drift(tmp_path):
    path = tmp_path / "ch.json"
    path.write_text(json.dumps({"d": 2, "probabilities": [0.7, 0.1, 0.1, 0.2]}))
    with pytest.raises(BadProbabilitiesError):
        load_channel_file(path)
    path.write_text(json.dumps({"d": 2, "probabilities": [0.7, 0.1, 0.1, 0.1 + 5e-9]}))
    with pytest.raises(BadProbabilitiesError):
        load_channel_file(path)


def test_load_channel_with_mub_file(tmp_path, fam3):
    save_mub_file(fam3, tmp_path / "fam.json")
    path = tmp_path / "ch.json"
    path.write_text(
        json.dumps({"d": 3, "eigenvalues": [0.4, 0.2, 0.1, 0.2], "mub_file": "fam.json"})
    )
    ch = load_channel_file(path)
    assert np.max(np.abs(ch.fam.bases - fam3.bases)) <= 1e-15


def test_two_qubit_channel_via_mub_file(tmp_path):
    fam4 = MubFamily(d=4, bases=two_qubit_mub_bases())
    save_mub_file(fam4, tmp_path / "fam4.json")
    path = tmp_path / "ch.json"
    path.write_text(
        json.dumps({"d": 4, "eigenvalues": [0.5, 0.25, 0.1, 0.0, 0.05], "mub_file": "fam4.json"})
    )
    ch = load_channel_file(path)
    lam = spectrum_of(ch).lambdas
    # eigen-action still holds for a file-supplied prime-power family
    s = superoperator_of(ch)
    for a in range(5):
        for k in range(3):
            u = ch.fam.unitaries()[a, k]
            assert np.max(np.abs(unvec(s @ vec(u), 4) - lam[a] * u)) <= 1e-10
    # and the Choi test agrees with the inequality route
    assert np.linalg.eigvalsh(choi_of(ch))[0] >= -1e-10
