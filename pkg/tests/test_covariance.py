import numpy as np
import pytest

from mimo_asympt import (
    CorrelationPair,
    StepTooLarge,
    SystemConfig,
    build_exponential_correlation,
    iid_closed_forms,
    logdet_joint_cumulant,
    sinr_covariance,
)


def _iid(m, n, rho):
    return CorrelationPair.identity(n, m), SystemConfig(M=m, N=n, rho=rho)


def test_closed_forms_scalar_values():
    cfg = SystemConfig(M=4, N=4, rho=2.0)
    cf = iid_closed_forms(cfg)
    # beta = 1 reduction: g = (sqrt(1+4 rho) - 1)/2 = 1
    assert cf.g == pytest.approx(1.0, abs=1e-12)

    cfg = SystemConfig(M=4, N=8, rho=4.0)
    cf = iid_closed_forms(cfg)
    assert cf.g == pytest.approx(4.70156, abs=1e-5)
    assert cf.v_d == pytest.approx(0.5 * cf.g**2 / (1 - 0.5 * cf.g**2 / (1 + cf.g) ** 2))
    assert cf.v_d == pytest.approx(16.746, abs=2e-3)


def test_closed_forms_zero_snr_limit():
    cfg = SystemConfig(M=4, N=8, rho=1e-12)
    cf = iid_closed_forms(cfg)
    assert abs(cf.g) <= 1e-11
    assert abs(cf.v_d) <= 1e-11
    assert abs(cf.v_od) <= 1e-11


def test_joint_cumulant_undeformed_identity_value():
    # k = l, J = I, beta = 0.5, rho = 4: M_t = rho/(1+g)^2, M_r = (rho/beta)/(1+v)^2
    pair, cfg = _iid(8, 16, 4.0)
    got = logdet_joint_cumulant(pair, cfg, 0, 0, 1.0, 1.0)
    g = iid_closed_forms(cfg).g
    m_t = 4.0 / (1 + g) ** 2
    v = 4.0 / (1 + g)
    m_r = 8.0 / (1 + v) ** 2
    expect = -np.log1p(-m_t * m_r)
    assert got == pytest.approx(expect, rel=1e-10)
    assert m_t == pytest.approx(0.12305, abs=1e-5)
    assert m_r == pytest.approx(2.7631, abs=1e-4)
    assert got == pytest.approx(0.41552, abs=2e-5)


def test_joint_cumulant_zero_snr():
    pair, cfg = _iid(4, 8, 1e-12)
    assert logdet_joint_cumulant(pair, cfg, 0, 0, 1.0, 1.0) <= 1e-10


def test_joint_cumulant_swap_symmetry():
    pair = CorrelationPair(
        build_exponential_correlation(8, 0.5), build_exponential_correlation(4, 0.3)
    )
    cfg = SystemConfig(M=4, N=8, rho=5.0)
    a = logdet_joint_cumulant(pair, cfg, 1, 2, 0.3, 0.7)
    b = logdet_joint_cumulant(pair, cfg, 2, 1, 0.7, 0.3)
    assert a == pytest.approx(b, rel=1e-12)


def test_identity_broadcast_matches_full_loop():
    # the symmetry fast path must agree with the brute-force loop
    pair, cfg = _iid(3, 6, 4.0)
    fast = sinr_covariance(pair, cfg, exploit_symmetry=True).sigma
    full = sinr_covariance(pair, cfg, exploit_symmetry=False).sigma
    np.testing.assert_allclose(fast, full, rtol=1e-6, atol=1e-12)


def test_identity_permutation_symmetry_and_positivity():
    pair, cfg = _iid(4, 8, 4.0)
    s = sinr_covariance(pair, cfg).sigma
    assert np.ptp(np.diagonal(s)) <= 1e-12
    off = s[~np.eye(4, dtype=bool)]
    assert np.ptp(off) <= 1e-12
    assert np.all(np.diagonal(s) > 0)


def test_covariance_symmetric_psd_correlated():
    pair = CorrelationPair(
        build_exponential_correlation(8, 0.5), build_exponential_correlation(4, 0.3)
    )
    cfg = SystemConfig(M=4, N=8, rho=4.0)
    s = sinr_covariance(pair, cfg).sigma
    np.testing.assert_allclose(s, s.T, atol=1e-12)
    w = np.linalg.eigvalsh(s)
    assert w[0] >= -1e-6 * np.trace(s)


def test_scaling_law_identity():
    # M*Sigma_kk and M^2*Sigma_kl converge: successive drifts shrink
    rho = 4.0
    diag_seq, off_seq = [], []
    for m in (4, 8, 16, 32):
        pair, cfg = _iid(m, 2 * m, rho)
        s = sinr_covariance(pair, cfg).sigma
        diag_seq.append(m * s[0, 0])
        off_seq.append(m * m * s[0, 1])
    d_drifts = np.abs(np.diff(diag_seq))
    o_drifts = np.abs(np.diff(off_seq))
    assert d_drifts[1] < d_drifts[0] and d_drifts[2] < d_drifts[1]
    assert o_drifts[1] < o_drifts[0] and o_drifts[2] < o_drifts[1]
    # the limits are the closed-form coefficients
    cf = iid_closed_forms(SystemConfig(M=32, N=64, rho=rho))
    assert abs(diag_seq[-1] - cf.v_d) / cf.v_d < 0.05
    assert abs(off_seq[-1] - cf.v_od) / abs(cf.v_od) < 0.05


def test_step_too_large():
    pair, cfg = _iid(2, 4, 100.0)
    with pytest.raises(StepTooLarge):
        sinr_covariance(pair, cfg, step=2.0, richardson=False)


def test_finite_m_gap_to_closed_forms_shrinks():
    # The finite-M difference path carries an O(1/M) relative gap to the
    # closed forms; check the gap roughly halves per doubling of M.
    rho = 4.0
    gaps = []
    for m in (8, 16, 32):
        pair, cfg = _iid(m, 2 * m, rho)
        s = sinr_covariance(pair, cfg).sigma
        cf = iid_closed_forms(cfg)
        gaps.append(abs(s[0, 0] - cf.v_d / m) / (cf.v_d / m))
    assert gaps[0] / gaps[1] == pytest.approx(2.0, rel=0.2)
    assert gaps[1] / gaps[2] == pytest.approx(2.0, rel=0.2)
