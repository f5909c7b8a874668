"""Exact-repair minimum-storage code for two equal clusters (n = 2k).

The k*k message symbols are arranged as k rows m_1 .. m_k; node (1, j)
stores m_j and node (2, j) stores p_j, where the stacked parity vector is
p = G m for a k^2 x k^2 encoding matrix G all of whose square submatrices
are invertible (a Cauchy matrix over a field of order >= 2k^2 by default).

Repairing any node moves k symbols from each of the k - 1 same-cluster
peers plus exactly one symbol from each of the k remote nodes, and the
remote nodes may ship *any* of their symbols: every choice leaves an
invertible solve because of the submatrix property.  Any k nodes decode
the full message the same way.

Flat indexing convention: message symbol s of row j has flat index
(j - 1) * k + (s - 1), and the same rule maps parity symbols to rows of G.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    FieldTooSmallError,
    IdentityViolationError,
    IncompletePlanError,
    LengthMismatchError,
    NotSuperRegularError,
)
from .gf import GF, Matrix, SquareSubmatrixCheck, all_square_submatrices_invertible, cauchy_matrix
from .lrc import NodeContent
from .params import SystemConfig, msr_point_inv

SYSTEMATIC = 1  # cluster of message rows
PARITY = 2      # cluster of parity rows


@dataclass(frozen=True)
class MsrHalfCode:
    """A built instance: half the nodes systematic, half parity."""

    k: int
    field: GF
    g: Matrix
    check: SquareSubmatrixCheck

    @property
    def config(self) -> SystemConfig:
        return SystemConfig(n=2 * self.k, k=self.k, L=2)

    @property
    def alpha(self) -> int:
        return self.k

    @property
    def message_size(self) -> int:
        return self.k * self.k


def build(k: int, field: GF,
          max_exhaustive: int = 1_000_000, samples: int = 10_000) -> MsrHalfCode:
    if k < 2:
        raise ValueError("k must be at least 2; k = 1 leaves no intra-cluster helpers")
    if field.order < 2 * k * k:
        raise FieldTooSmallError(
            f"encoding matrix needs field order >= {2 * k * k}, got {field.order}"
        )
    g = cauchy_matrix(k * k, k * k, field)
    return build_with_matrix(k, field, g, max_exhaustive=max_exhaustive, samples=samples)


def build_with_matrix(k: int, field: GF, g: Matrix,
                      max_exhaustive: int = 1_000_000,
                      samples: int = 10_000) -> MsrHalfCode:
    """Accept a caller-supplied encoding matrix after auditing it."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if (g.rows, g.cols) != (k * k, k * k):
        raise ValueError(f"encoding matrix must be {k * k}x{k * k}")
    check = all_square_submatrices_invertible(g, max_exhaustive=max_exhaustive, samples=samples)
    if not check.ok:
        raise NotSuperRegularError(
            f"singular square submatrix at rows {check.failure[0]}, cols {check.failure[1]}"
        )
    return MsrHalfCode(k=k, field=field, g=g, check=check)


def encode(code: MsrHalfCode, message: Sequence[int]) -> list[NodeContent]:
    M = code.message_size
    if len(message) == 0 or len(message) % M != 0:
        raise LengthMismatchError(f"message length must be a positive multiple of {M}")
    k = code.k
    stripes = len(message) // M
    per_node: dict[tuple[int, int], list[int]] = {
        (c, j): [] for c in (SYSTEMATIC, PARITY) for j in range(1, k + 1)
    }
    for s in range(stripes):
        stripe = list(message[s * M : (s + 1) * M])
        parity = code.g.mul_vec(stripe)
        for j in range(1, k + 1):
            per_node[(SYSTEMATIC, j)].extend(stripe[(j - 1) * k : j * k])
            per_node[(PARITY, j)].extend(parity[(j - 1) * k : j * k])
    return [NodeContent(c, j, tuple(vals)) for (c, j), vals in per_node.items()]


@dataclass(frozen=True)
class RepairPlan:
    """Which symbol each remote helper ships; local helpers always ship all.

    cross_indices[j - 1] is the 1-based symbol position that remote node j
    contributes (the projection onto that standard basis vector).
    """

    failed: tuple[int, int]
    cross_indices: tuple[int, ...]

    def __post_init__(self) -> None:
        c, j = self.failed
        if c not in (SYSTEMATIC, PARITY) or j < 1:
            raise ValueError(f"bad node address {self.failed}")


def default_plan(code: MsrHalfCode, failed: tuple[int, int]) -> RepairPlan:
    """Every remote helper ships its last symbol."""
    return RepairPlan(failed=failed, cross_indices=(code.k,) * code.k)


@dataclass(frozen=True)
class HelperSymbol:
    """One shipped symbol position, with its value in every stripe."""

    cluster: int
    node: int
    index: int                 # 1-based position within a stripe
    values: tuple[int, ...]    # one value per stripe


def gather_helper_data(code: MsrHalfCode, plan: RepairPlan,
                       contents: Mapping[tuple[int, int], NodeContent]) -> list[HelperSymbol]:
    """Pull the plan's symbols out of the surviving nodes' contents."""
    k = code.k
    fc, fj = plan.failed
    if len(plan.cross_indices) != k or any(not 1 <= t <= k for t in plan.cross_indices):
        raise IncompletePlanError("plan must name one in-range symbol per remote helper")
    out: list[HelperSymbol] = []
    try:
        for j in range(1, k + 1):
            if j != fj:
                out.extend(_take(contents[(fc, j)], idx, k) for idx in range(1, k + 1))
        other = PARITY if fc == SYSTEMATIC else SYSTEMATIC
        for j, idx in zip(range(1, k + 1), plan.cross_indices):
            out.append(_take(contents[(other, j)], idx, k))
    except KeyError as missing:
        raise IncompletePlanError(f"no content for surviving node {missing}") from None
    return out


def _take(content: NodeContent, index: int, alpha: int) -> HelperSymbol:
    stripes = len(content.symbols) // alpha
    values = tuple(content.symbols[s * alpha + index - 1] for s in range(stripes))
    return HelperSymbol(content.cluster, content.node, index, values)


def _index_helpers(code: MsrHalfCode, plan: RepairPlan,
                   helper_data: Iterable[HelperSymbol]) -> tuple[dict, int]:
    """Validate the helper set against the plan; returns (lookup, stripes)."""
    k = code.k
    fc, fj = plan.failed
    if not 1 <= fj <= k:
        raise IncompletePlanError(f"node index {fj} out of range")
    if len(plan.cross_indices) != k or any(not 1 <= t <= k for t in plan.cross_indices):
        raise IncompletePlanError("plan must name one in-range symbol per remote helper")
    other = PARITY if fc == SYSTEMATIC else SYSTEMATIC
    expected = {(fc, j, idx) for j in range(1, k + 1) if j != fj for idx in range(1, k + 1)}
    expected |= {(other, j, t) for j, t in zip(range(1, k + 1), plan.cross_indices)}
    lookup = {(h.cluster, h.node, h.index): h for h in helper_data}
    if set(lookup) != expected:
        missing = expected - set(lookup)
        extra = set(lookup) - expected
        raise IncompletePlanError(f"helper data mismatch: missing {missing}, extra {extra}")
    stripes = {len(h.values) for h in lookup.values()}
    if len(stripes) != 1:
        raise IncompletePlanError("helpers disagree on stripe count")
    return lookup, stripes.pop()


def systematic_solver(code: MsrHalfCode, failed_node: int,
                      cross_indices: Sequence[int]) -> Matrix:
    """The k x k system a newcomer inverts to rebuild systematic node j.

    Row j comes from remote node j's shipped parity position; the columns
    are the failed node's message positions.
    """
    k = code.k
    rows = [(j - 1) * k + (t - 1) for j, t in zip(range(1, k + 1), cross_indices)]
    cols = range((failed_node - 1) * k, failed_node * k)
    return code.g.submatrix(rows, cols)


def repair_systematic(code: MsrHalfCode, plan: RepairPlan,
                      helper_data: Iterable[HelperSymbol]) -> NodeContent:
    """Rebuild a systematic node from k-1 peer rows plus one parity symbol
    per remote node, subtracting known contributions and solving k x k."""
    fc, fi = plan.failed
    if fc != SYSTEMATIC:
        raise IncompletePlanError(f"plan targets cluster {fc}, expected {SYSTEMATIC}")
    k = code.k
    lookup, stripes = _index_helpers(code, plan, helper_data)
    solver = systematic_solver(code, fi, plan.cross_indices).inverse()
    mul = code.field.mul
    out: list[int] = []
    for s in range(stripes):
        rhs: list[int] = []
        for j, t in zip(range(1, k + 1), plan.cross_indices):
            grow = code.g.row((j - 1) * k + (t - 1))
            acc = lookup[(PARITY, j, t)].values[s]
            for jj in range(1, k + 1):
                if jj == fi:
                    continue
                for idx in range(1, k + 1):
                    coeff = grow[(jj - 1) * k + (idx - 1)]
                    v = lookup[(SYSTEMATIC, jj, idx)].values[s]
                    if coeff and v:
                        acc ^= mul(coeff, v)
            rhs.append(acc)
        out.extend(solver.mul_vec(rhs))
    return NodeContent(SYSTEMATIC, fi, tuple(out))


def repair_parity(code: MsrHalfCode, plan: RepairPlan,
                  helper_data: Iterable[HelperSymbol]) -> NodeContent:
    """Rebuild a parity node: recover the message symbols not shipped by
    the systematic cluster from the surviving parity rows, then re-encode."""
    fc, fi = plan.failed
    if fc != PARITY:
        raise IncompletePlanError(f"plan targets cluster {fc}, expected {PARITY}")
    k = code.k
    lookup, stripes = _index_helpers(code, plan, helper_data)
    surviving_rows = [r for r in range(k * k) if r // k != fi - 1]
    known_cols = [(j - 1) * k + (t - 1) for j, t in zip(range(1, k + 1), plan.cross_indices)]
    unknown_cols = [c for c in range(k * k) if c not in set(known_cols)]
    solver = code.g.submatrix(surviving_rows, unknown_cols).inverse()
    reducer = code.g.submatrix(surviving_rows, known_cols)
    own_rows = code.g.submatrix(range((fi - 1) * k, fi * k), range(k * k))
    out: list[int] = []
    for s in range(stripes):
        rhs = [lookup[(PARITY, r // k + 1, r % k + 1)].values[s] for r in surviving_rows]
        known_vals = [lookup[(SYSTEMATIC, j, t)].values[s]
                      for j, t in zip(range(1, k + 1), plan.cross_indices)]
        reduced = [a ^ b for a, b in zip(rhs, reducer.mul_vec(known_vals))]
        unknown_vals = solver.mul_vec(reduced)
        message = [0] * (k * k)
        for c, v in zip(known_cols, known_vals):
            message[c] = v
        for c, v in zip(unknown_cols, unknown_vals):
            message[c] = v
        out.extend(own_rows.mul_vec(message))
    return NodeContent(PARITY, fi, tuple(out))


def decode_solver(code: MsrHalfCode,
                  nodes: Iterable[tuple[int, int]]) -> Matrix | None:
    """The square system a reader inverts for the given k-node subset,
    or None when all contacted nodes are systematic (plain read-off)."""
    sys_nodes, par_nodes = _split_subset(code, nodes)
    if not par_nodes:
        return None
    k = code.k
    rows = [r for j in par_nodes for r in range((j - 1) * k, j * k)]
    known = {c for j in sys_nodes for c in range((j - 1) * k, j * k)}
    unknown_cols = [c for c in range(k * k) if c not in known]
    return code.g.submatrix(rows, unknown_cols)


def _split_subset(code: MsrHalfCode,
                  nodes: Iterable[tuple[int, int]]) -> tuple[list[int], list[int]]:
    addrs = list(nodes)
    if len(addrs) != code.k or len(set(addrs)) != code.k:
        raise ValueError(f"need exactly {code.k} distinct nodes")
    for (c, j) in addrs:
        if c not in (SYSTEMATIC, PARITY) or not 1 <= j <= code.k:
            raise ValueError(f"bad node address {(c, j)}")
    sys_nodes = sorted(j for c, j in addrs if c == SYSTEMATIC)
    par_nodes = sorted(j for c, j in addrs if c == PARITY)
    return sys_nodes, par_nodes


def decode(code: MsrHalfCode, contents: Sequence[NodeContent]) -> list[int]:
    """Recover all k^2 message symbols per stripe from any k nodes."""
    by_addr = {c.address: c for c in contents}
    sys_nodes, par_nodes = _split_subset(code, by_addr)
    k = code.k
    lengths = {len(c.symbols) for c in contents}
    if len(lengths) != 1:
        raise ValueError("contents disagree on stripe count")
    stripes = lengths.pop() // k
    known_cols = [c for j in sys_nodes for c in range((j - 1) * k, j * k)]
    unknown_cols = [c for c in range(k * k) if c not in set(known_cols)]
    message: list[int] = []
    if not par_nodes:
        for s in range(stripes):
            for j in sys_nodes:
                message.extend(by_addr[(SYSTEMATIC, j)].symbols[s * k : (s + 1) * k])
        return message
    rows = [r for j in par_nodes for r in range((j - 1) * k, j * k)]
    solver = decode_solver(code, by_addr).inverse()
    reducer = code.g.submatrix(rows, known_cols) if known_cols else None
    for s in range(stripes):
        rhs = [by_addr[(PARITY, r // k + 1)].symbols[s * k + r % k] for r in rows]
        if reducer is not None:
            known_vals = [by_addr[(SYSTEMATIC, c // k + 1)].symbols[s * k + c % k]
                          for c in known_cols]
            rhs = [a ^ b for a, b in zip(rhs, reducer.mul_vec(known_vals))]
            unknown_vals = solver.mul_vec(rhs)
        else:
            unknown_vals = solver.mul_vec(rhs)
        stripe = [0] * (k * k)
        for c in known_cols:
            stripe[c] = by_addr[(SYSTEMATIC, c // k + 1)].symbols[s * k + c % k]
        for c, v in zip(unknown_cols, unknown_vals):
            stripe[c] = v
        message.extend(stripe)
    return message


@dataclass(frozen=True)
class RepairTraffic:
    """Per-stripe symbol movement for one repair."""

    failed: tuple[int, int]
    intra_symbols: int
    cross_symbols: int
    per_helper: tuple[tuple[tuple[int, int], int], ...]   # (address, symbols)

    @property
    def gamma_observed(self) -> int:
        return self.intra_symbols + self.cross_symbols


def bandwidth_report(plan: RepairPlan, config: SystemConfig) -> RepairTraffic:
    """Expected per-stripe traffic for a plan, checked against the
    minimum-cross-traffic operating point."""
    k = config.k
    if len(plan.cross_indices) != config.n - config.n_i:
        raise IncompletePlanError(
            f"plan ships {len(plan.cross_indices)} cross symbols, expected {config.n - config.n_i}"
        )
    fc, fj = plan.failed
    other = PARITY if fc == SYSTEMATIC else SYSTEMATIC
    per_helper = tuple(
        ((fc, j), k) for j in range(1, config.n_i + 1) if j != fj
    ) + tuple(((other, j), 1) for j in range(1, config.n_i + 1))
    intra = (config.n_i - 1) * k
    cross = config.n - config.n_i
    point = msr_point_inv(config, beta_c=1)
    if point.gamma != intra + cross:
        raise IdentityViolationError(
            f"traffic {intra}+{cross} disagrees with operating point gamma {point.gamma}"
        )
    return RepairTraffic(failed=plan.failed, intra_symbols=intra,
                         cross_symbols=cross, per_helper=per_helper)
