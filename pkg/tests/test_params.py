from fractions import Fraction

import pytest

from cdss.params import (
    MsrDerivation,
    Regime,
    StorageClass,
    SystemConfig,
    derivation_check,
    min_storage_regime,
    msr_point_inv,
    msr_point_zero,
    quot_rem,
    sweep_configs,
)


def test_config_invariants():
    SystemConfig(6, 3, 2)
    with pytest.raises(ValueError):
        SystemConfig(6, 3, 1)       # single cluster
    with pytest.raises(ValueError):
        SystemConfig(6, 4, 4)       # L does not divide n
    with pytest.raises(ValueError):
        SystemConfig(6, 6, 2)       # k = n
    with pytest.raises(ValueError):
        SystemConfig(6, 0, 2)
    with pytest.raises(ValueError):
        SystemConfig(4, 2, 4)       # one node per cluster


def test_quot_rem():
    qr = quot_rem(SystemConfig(6, 3, 2))
    assert (qr.q, qr.m) == (1, 0)
    qr = quot_rem(SystemConfig(6, 4, 2))
    assert (qr.q, qr.m) == (1, 1)
    qr = quot_rem(SystemConfig(12, 7, 3))
    assert (qr.q, qr.m) == (1, 3)
    for cfg in sweep_configs(20):
        qr = quot_rem(cfg)
        assert cfg.k == qr.q * cfg.n_i + qr.m and 0 <= qr.m < cfg.n_i


def test_zero_point_worked_examples():
    pt = msr_point_zero(SystemConfig(6, 3, 2), 6)
    assert (pt.alpha, pt.beta_i, pt.beta_c, pt.gamma) == (3, 3, 0, 6)
    assert pt.regime is Regime.ZERO
    pt = msr_point_zero(SystemConfig(6, 4, 2), 3)
    assert (pt.alpha, pt.gamma) == (1, 2)
    pt = msr_point_zero(SystemConfig(4, 2, 2), 1)
    assert (pt.alpha, pt.gamma) == (1, 1)


def test_zero_point_is_exact_rational():
    pt = msr_point_zero(SystemConfig(6, 4, 2), 1)
    assert pt.alpha == Fraction(1, 3)
    assert isinstance(pt.alpha, Fraction) and isinstance(pt.gamma, Fraction)


def test_inv_point_worked_examples():
    pt = msr_point_inv(SystemConfig(4, 2, 2))
    assert (pt.alpha, pt.file_size, pt.beta_i, pt.beta_c, pt.gamma) == (2, 4, 2, 1, 4)
    assert pt.regime is Regime.INV_NK
    pt = msr_point_inv(SystemConfig(6, 3, 2))
    assert (pt.alpha, pt.file_size, pt.beta_i, pt.gamma) == (3, 9, 3, 9)


@pytest.mark.parametrize("k", range(2, 9))
def test_inv_point_two_cluster_shape(k):
    pt = msr_point_inv(SystemConfig(2 * k, k, 2))
    assert pt.alpha == pt.beta_i == k
    assert pt.file_size == k * k


def test_inv_point_scales_linearly():
    base = msr_point_inv(SystemConfig(8, 5, 2), 1)
    scaled = msr_point_inv(SystemConfig(8, 5, 2), Fraction(3, 2))
    for name in ("alpha", "beta_i", "beta_c", "gamma", "file_size"):
        assert getattr(scaled, name) == getattr(base, name) * Fraction(3, 2)


def test_regime_classification():
    cfg = SystemConfig(4, 2, 2)
    assert min_storage_regime(cfg, Fraction(1, 2)) is StorageClass.ACHIEVES_MIN_STORAGE
    assert min_storage_regime(cfg, 0) is StorageClass.EXCEEDS_MIN_STORAGE
    assert min_storage_regime(SystemConfig(6, 3, 2), Fraction(1, 3)) is StorageClass.ACHIEVES_MIN_STORAGE
    with pytest.raises(ValueError):
        min_storage_regime(cfg, -1)


def test_derivation_worked_examples():
    d = derivation_check(SystemConfig(6, 3, 2))
    assert d == MsrDerivation(Fraction(1, 2), Fraction(1), Fraction(2), Fraction(1, 3))
    d = derivation_check(SystemConfig(6, 5, 2))        # m = n_I - 1 branch
    assert (d.lambda_, d.delta_, d.zeta_) == (1, 2, 4)
    d = derivation_check(SystemConfig(4, 2, 2))
    assert d.s_last == Fraction(1, 2)
    assert msr_point_inv(SystemConfig(4, 2, 2)).gamma == Fraction(4, 2) / d.s_last == 4


def test_gamma_decomposition_matches_at_inv_point():
    # (n_I - 1) * beta_i + (n - n_I) * beta_c must reproduce gamma
    for cfg in sweep_configs(24):
        pt = msr_point_inv(cfg)
        assert pt.gamma == (cfg.n_i - 1) * pt.beta_i + (cfg.n - cfg.n_i) * pt.beta_c
        assert pt.file_size == cfg.k * (cfg.n - cfg.k)


def test_gamma_decomposition_matches_at_zero_point():
    for cfg in sweep_configs(24):
        pt = msr_point_zero(cfg, 5)
        assert pt.beta_c == 0 and pt.beta_i == pt.alpha
        assert pt.gamma == (cfg.n_i - 1) * pt.beta_i


def test_derivation_sweep_to_48():
    count = 0
    for cfg in sweep_configs(48):
        d = derivation_check(cfg)
        assert d.zeta_ - d.delta_ == (cfg.n_i - 1) * d.lambda_
        if d.lambda_ != 0:
            assert (d.zeta_ - d.delta_) / d.lambda_ == cfg.n_i - 1
        count += 1
    assert count > 1000


def test_derivation_values_on_nondivisible_config():
    d = derivation_check(SystemConfig(6, 4, 2))
    assert (d.lambda_, d.delta_, d.zeta_) == (Fraction(1, 2), 2, 3)
