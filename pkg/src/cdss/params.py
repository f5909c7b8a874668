"""Storage/bandwidth operating points for clustered systems, as exact rationals.

A deployment is an [n, k, L] layout: n nodes in L equal clusters of
n_I = n/L nodes, readable from any k nodes.  Repairing one node moves
beta_i symbols from each of its n_I - 1 cluster peers and beta_c symbols
from each of the n - n_I remote nodes, for a total of

    gamma = (n_I - 1) * beta_i + (n - n_I) * beta_c.

The two minimum-storage operating points implemented here are the
zero-cross-traffic point (beta_c = 0) and the minimum cross-traffic point
that still allows alpha = M/k (beta_c/beta_i = 1/(n-k)).  Everything is
computed with Fraction so the closed-form identities can be asserted
exactly; no floats appear anywhere in this module.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import DegenerateConfigError, IdentityViolationError


@dataclass(frozen=True)
class SystemConfig:
    """An [n, k, L] clustered layout; n_I = n/L nodes per cluster."""

    n: int
    k: int
    L: int

    def __post_init__(self) -> None:
        if self.L < 2:
            raise ValueError(f"need at least 2 clusters, got L={self.L}")
        if self.n % self.L != 0:
            raise ValueError(f"L={self.L} must divide n={self.n}")
        if not 0 < self.k < self.n:
            raise ValueError(f"need 0 < k < n, got k={self.k}, n={self.n}")
        if self.n // self.L < 2:
            raise ValueError(f"single-node clusters are not repairable (n_I={self.n // self.L})")

    @property
    def n_i(self) -> int:
        return self.n // self.L

    def nodes(self) -> Iterator[tuple[int, int]]:
        """All node addresses (cluster, index), both 1-based."""
        for l in range(1, self.L + 1):
            for j in range(1, self.n_i + 1):
                yield (l, j)


@dataclass(frozen=True)
class QuotRem:
    """Quotient and remainder of k by the cluster size."""

    q: int
    m: int


def quot_rem(cfg: SystemConfig) -> QuotRem:
    q, m = divmod(cfg.k, cfg.n_i)
    return QuotRem(q, m)


class Regime(enum.Enum):
    ZERO = "zero"       # beta_c = 0
    INV_NK = "inv_nk"   # beta_c / beta_i = 1 / (n - k)


@dataclass(frozen=True)
class MsrPoint:
    """Minimum-storage operating point for one regime."""

    alpha: Fraction
    beta_i: Fraction
    beta_c: Fraction
    gamma: Fraction
    file_size: Fraction
    regime: Regime


def msr_point_zero(cfg: SystemConfig, file_size: Fraction | int) -> MsrPoint:
    """Minimum-storage point with no cross-cluster repair traffic.

    alpha = M / (k - q) and gamma = (n_I - 1) * alpha; every helper ships
    its whole content (beta_i = alpha).
    """
    M = Fraction(file_size)
    q = quot_rem(cfg).q
    if cfg.k == q:
        raise DegenerateConfigError("k = floor(k/n_I) leaves no data dimensions")
    alpha = M / (cfg.k - q)
    gamma = alpha * (cfg.n_i - 1)
    return MsrPoint(alpha=alpha, beta_i=alpha, beta_c=Fraction(0),
                    gamma=gamma, file_size=M, regime=Regime.ZERO)


def msr_point_inv(cfg: SystemConfig, beta_c: Fraction | int = 1) -> MsrPoint:
    """Minimum-storage point at the smallest cross-traffic ratio 1/(n-k).

    Normalized to the given beta_c: beta_i = (n-k)*beta_c, the stored file
    is M = k(n-k)*beta_c and alpha = M/k.
    """
    bc = Fraction(beta_c)
    if bc <= 0:
        raise ValueError("beta_c must be positive")
    if cfg.n == cfg.k:
        raise DegenerateConfigError("n = k admits no repair redundancy")
    beta_i = (cfg.n - cfg.k) * bc
    M = cfg.k * (cfg.n - cfg.k) * bc
    alpha = M / cfg.k
    gamma = alpha * (cfg.n_i - 1 + Fraction(cfg.n - cfg.n_i, cfg.n - cfg.k))
    return MsrPoint(alpha=alpha, beta_i=beta_i, beta_c=bc,
                    gamma=gamma, file_size=M, regime=Regime.INV_NK)


class StorageClass(enum.Enum):
    ACHIEVES_MIN_STORAGE = "achieves-min-storage"   # alpha = M/k possible
    EXCEEDS_MIN_STORAGE = "exceeds-min-storage"     # alpha > M/k forced


def min_storage_regime(cfg: SystemConfig, epsilon: Fraction | int) -> StorageClass:
    """Classify a cross/intra bandwidth ratio against the 1/(n-k) threshold."""
    eps = Fraction(epsilon)
    if eps < 0:
        raise ValueError("epsilon must be nonnegative")
    if eps >= Fraction(1, cfg.n - cfg.k):
        return StorageClass.ACHIEVES_MIN_STORAGE
    return StorageClass.EXCEEDS_MIN_STORAGE


@dataclass(frozen=True)
class MsrDerivation:
    """Closed-form sequence values behind the two operating points."""

    lambda_: Fraction
    delta_: Fraction
    zeta_: Fraction
    s_last: Fraction


def derivation_check(cfg: SystemConfig) -> MsrDerivation:
    """Evaluate the closed forms and assert the identities tying them to
    the two operating points.

    Checks, all exact:
      * zeta - delta = (n_I - 1) * lambda   (cross-multiplied so the
        q = 0 corner, where both sides vanish, stays well defined);
      * zeta = k - q on both branches;
      * M / zeta reproduces msr_point_zero's alpha;
      * (M/k) / s_last reproduces msr_point_inv's gamma.
    """
    qr = quot_rem(cfg)
    q, m = qr.q, qr.m
    n_i = cfg.n_i
    if m == n_i - 1:
        lambda_ = Fraction(q + 1, n_i - 1)
        delta_ = Fraction((q + 1) * (n_i - 2))
    else:
        lambda_ = Fraction(q, n_i - 1)
        delta_ = Fraction(cfg.k - 2 * q)
    zeta_ = Fraction(cfg.k - q)
    s_last = 1 / (n_i - 1 + Fraction(cfg.n - cfg.n_i, cfg.n - cfg.k))

    if zeta_ - delta_ != (n_i - 1) * lambda_:
        raise IdentityViolationError(
            f"zeta - delta != (n_I - 1) * lambda for {cfg}: "
            f"{zeta_ - delta_} vs {(n_i - 1) * lambda_}"
        )
    if zeta_ != cfg.k - q:
        raise IdentityViolationError(f"zeta != k - q for {cfg}")
    if msr_point_zero(cfg, file_size=1).alpha != 1 / zeta_:
        raise IdentityViolationError(f"M/zeta does not reproduce alpha for {cfg}")
    inv_pt = msr_point_inv(cfg, beta_c=1)
    if (inv_pt.file_size / cfg.k) / s_last != inv_pt.gamma:
        raise IdentityViolationError(
            f"(M/k)/s_last != gamma for {cfg}: "
            f"{(inv_pt.file_size / cfg.k) / s_last} vs {inv_pt.gamma}"
        )
    return MsrDerivation(lambda_=lambda_, delta_=delta_, zeta_=zeta_, s_last=s_last)


def sweep_configs(max_n: int) -> Iterator[SystemConfig]:
    """Every valid [n, k, L] with n <= max_n; useful for exhaustive checks."""
    for n in range(4, max_n + 1):
        for L in range(2, n // 2 + 1):
            if n % L != 0 or n // L < 2:
                continue
            for k in range(1, n):
                yield SystemConfig(n=n, k=k, L=L)
