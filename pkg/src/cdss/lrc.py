"""Erasure codes with zero cross-cluster repair traffic.

Two constructions, selected by whether the cluster size n_I divides k:

* ``XorLocalCode`` (n_I | k): each stripe carries r = n_I - 1 independent
  (n, k) MDS codewords; for every codeword position i the r coded symbols
  plus their XOR live on the n_I distinct nodes of one cluster, rotated
  cyclically across slots.  A failed node is rebuilt by XORing the full
  contents of its n_I - 1 cluster peers.

* ``RsLocalCode`` (n_I not | k): the k - q message symbols (q = k div n_I)
  are spread over T = L * (n_I - 1) symbols by an MDS precode, the T
  symbols are split into L groups of n_I - 1, and each group gains a
  single XOR parity, giving one symbol per node.  Repair reads the n_I - 1
  group peers; any k nodes decode, which is verified subset-by-subset when
  the code is built.

Both repairs read only the failed node's cluster, so every helper ships
exactly its stored content and no cross-cluster symbols move.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from .errors import (
    DistanceVerificationError,
    DivisibleError,
    FieldTooSmallError,
    IdentityViolationError,
    LengthMismatchError,
    NotDivisibleError,
    RankDeficientError,
    WrongHelperSetError,
)
from .gf import GF, Matrix, cauchy_matrix, vandermonde_matrix, _rank
from .params import SystemConfig, quot_rem

SUBSET_LIMIT = 1_000_000
SUBSET_SAMPLES = 10_000


@dataclass(frozen=True)
class NodeContent:
    """Symbols stored on one node, stripe-major."""

    cluster: int
    node: int
    symbols: tuple[int, ...]

    @property
    def address(self) -> tuple[int, int]:
        return (self.cluster, self.node)


def _check_subset_ranks(rows: list[Sequence[int]], k: int, need: int, field: GF,
                        seed: int = 0) -> tuple[str, int]:
    """Verify every k-subset of rows has rank `need`.

    Exhaustive up to SUBSET_LIMIT subsets, seeded sampling beyond that.
    Raises DistanceVerificationError on the first failing subset.
    """
    n = len(rows)
    total = comb(n, k)
    if total <= SUBSET_LIMIT:
        subsets: Iterable[tuple[int, ...]] = itertools.combinations(range(n), k)
        mode = "exhaustive"
        checked = total
    else:
        rng = random.Random(seed)
        subsets = (tuple(sorted(rng.sample(range(n), k))) for _ in range(SUBSET_SAMPLES))
        mode = "sampled"
        checked = SUBSET_SAMPLES
    for sel in subsets:
        sub = [list(rows[i]) for i in sel]
        if _rank(field, sub) != need:
            raise DistanceVerificationError(
                f"rows {sel} have rank < {need}; k-node recovery would fail"
            )
    return mode, checked


@dataclass(frozen=True)
class XorLocalCode:
    """Locality-(n_I - 1) code for n_I | k; alpha = n_I symbols per stripe."""

    config: SystemConfig
    field: GF
    generator: Matrix           # n x k, every k rows invertible
    generator_kind: str         # "cauchy" or "vandermonde"
    distance_mode: str
    distance_checked: int

    @property
    def r(self) -> int:
        return self.config.n_i - 1

    @property
    def alpha(self) -> int:
        return self.config.n_i

    @property
    def message_size(self) -> int:
        return self.r * self.config.k

    @property
    def mirrored(self) -> bool:
        """r = 1 degenerates to within-cluster mirroring."""
        return self.r == 1

    def codeword_index(self, cluster: int, node: int, slot: int) -> int:
        """Codeword position (1-based in [n]) stored at the given slot.

        Slots 1..r hold the r coded symbols, slot n_I the XOR parity;
        the cyclic rotation puts each position's group on distinct nodes.
        """
        n_i = self.config.n_i
        return (cluster - 1) * n_i + (node + slot - 2) % n_i + 1

    def slot_of(self, cluster: int, node: int, index: int) -> int:
        """Inverse of codeword_index for a node in the owning cluster."""
        n_i = self.config.n_i
        b = index - (cluster - 1) * n_i
        return (b - node) % n_i + 1

    def symbol_rows(self, cluster: int, node: int) -> list[tuple[int, ...]]:
        """Per-slot coefficient rows over the stripe message."""
        k = self.config.k
        rows = []
        for slot in range(1, self.alpha + 1):
            i = self.codeword_index(cluster, node, slot)
            grow = self.generator.row(i - 1)
            coeff = [0] * self.message_size
            if slot <= self.r:
                coeff[(slot - 1) * k : slot * k] = grow
            else:
                for t in range(self.r):
                    coeff[t * k : (t + 1) * k] = grow
            rows.append(tuple(coeff))
        return rows


def build_xor_code(config: SystemConfig, field: GF) -> XorLocalCode:
    q = quot_rem(config)
    if q.m != 0:
        raise NotDivisibleError(
            f"n_I={config.n_i} does not divide k={config.k}; use build_rs_code"
        )
    # Cauchy needs n + k distinct elements; Vandermonde only n, which
    # admits e.g. a 6-node code over GF(2^3).  Both are MDS and the
    # any-k-rows property is verified below either way.
    if field.order >= config.n + config.k:
        generator = cauchy_matrix(config.n, config.k, field)
        generator_kind = "cauchy"
    elif field.order >= config.n:
        generator = vandermonde_matrix(config.n, config.k, field)
        generator_kind = "vandermonde"
    else:
        raise FieldTooSmallError(f"need field order >= {config.n}, got {field.order}")
    mode, checked = _check_subset_ranks(
        [generator.row(i) for i in range(config.n)], config.k, config.k, field
    )
    code = XorLocalCode(config=config, field=field, generator=generator,
                        generator_kind=generator_kind,
                        distance_mode=mode, distance_checked=checked)
    _verify_placement(code)
    return code


def _verify_placement(code: XorLocalCode) -> None:
    """Each codeword position must occupy n_I distinct nodes of one cluster."""
    cfg = code.config
    for i in range(1, cfg.n + 1):
        holders = {
            (l, j)
            for (l, j) in cfg.nodes()
            for t in range(1, code.alpha + 1)
            if code.codeword_index(l, j, t) == i
        }
        cluster = (i - 1) // cfg.n_i + 1
        if len(holders) != cfg.n_i or any(l != cluster for l, _ in holders):
            raise IdentityViolationError(f"placement broken for codeword position {i}")


def encode_xor(code: XorLocalCode, message: Sequence[int]) -> list[NodeContent]:
    M = code.message_size
    if len(message) == 0 or len(message) % M != 0:
        raise LengthMismatchError(f"message length must be a positive multiple of {M}")
    cfg = code.config
    stripes = len(message) // M
    k, r, n_i = cfg.k, code.r, cfg.n_i
    per_node: dict[tuple[int, int], list[int]] = {nd: [] for nd in cfg.nodes()}
    for s in range(stripes):
        base = s * M
        coded = [code.generator.mul_vec(message[base + t * k : base + (t + 1) * k])
                 for t in range(r)]
        parity = [0] * cfg.n
        for y in coded:
            parity = [p ^ v for p, v in zip(parity, y)]
        for (l, j) in cfg.nodes():
            for t in range(1, n_i + 1):
                i = code.codeword_index(l, j, t)
                per_node[(l, j)].append(coded[t - 1][i - 1] if t <= r else parity[i - 1])
    return [NodeContent(l, j, tuple(vals)) for (l, j), vals in per_node.items()]


def repair_xor(code: XorLocalCode, failed: tuple[int, int],
               cluster_contents: Iterable[NodeContent]) -> NodeContent:
    """Rebuild a node by XORing, per codeword position, the peers' symbols."""
    l, j = failed
    peers = {c.address: c for c in cluster_contents}
    expected = {(l, jj) for jj in range(1, code.config.n_i + 1) if jj != j}
    if set(peers) != expected:
        raise WrongHelperSetError(f"need exactly the cluster peers {sorted(expected)}")
    alpha = code.alpha
    stripes = {len(c.symbols) // alpha for c in peers.values()}
    if len(stripes) != 1:
        raise WrongHelperSetError("helper contents disagree on stripe count")
    nstripes = stripes.pop()
    out: list[int] = []
    for s in range(nstripes):
        for t in range(1, alpha + 1):
            i = code.codeword_index(l, j, t)
            acc = 0
            for (_, jj), content in peers.items():
                slot = code.slot_of(l, jj, i)
                acc ^= content.symbols[s * alpha + slot - 1]
            out.append(acc)
    return NodeContent(l, j, tuple(out))


@dataclass(frozen=True)
class RsLocalCode:
    """Precode-plus-group-parity code for n_I not | k; alpha = 1 per stripe."""

    config: SystemConfig
    field: GF
    outer: Matrix               # T x (k - q) precode generator
    composite: Matrix           # n x (k - q), group parity rows appended
    point_shift: int            # y-point shift that passed verification
    distance_mode: str
    distance_checked: int

    @property
    def alpha(self) -> int:
        return 1

    @property
    def message_size(self) -> int:
        return self.composite.cols

    @property
    def group_width(self) -> int:
        return self.config.n_i - 1

    def composite_row_index(self, cluster: int, node: int) -> int:
        return (cluster - 1) * self.config.n_i + node - 1

    def symbol_rows(self, cluster: int, node: int) -> list[tuple[int, ...]]:
        return [self.composite.row(self.composite_row_index(cluster, node))]


def build_rs_code(config: SystemConfig, field: GF, max_point_shifts: int = 64) -> RsLocalCode:
    qr = quot_rem(config)
    if qr.m == 0:
        raise DivisibleError(
            f"n_I={config.n_i} divides k={config.k}; use build_xor_code"
        )
    k0 = config.k - qr.q
    T = config.L * (config.n_i - 1)
    if field.order < 2 * T:
        raise FieldTooSmallError(f"need field order >= {2 * T}, got {field.order}")
    last_err: DistanceVerificationError | None = None
    for shift in range(max_point_shifts):
        if T + shift + k0 > field.order:
            break
        outer = cauchy_matrix(T, k0, field,
                              x_points=list(range(T)),
                              y_points=[T + shift + c for c in range(k0)])
        composite = _composite_generator(config, outer)
        try:
            mode, checked = _check_subset_ranks(
                [composite.row(i) for i in range(config.n)], config.k, k0, field
            )
        except DistanceVerificationError as err:
            last_err = err
            continue
        return RsLocalCode(config=config, field=field, outer=outer,
                           composite=composite, point_shift=shift,
                           distance_mode=mode, distance_checked=checked)
    raise DistanceVerificationError(
        f"no admissible generator found for {config} over {field}"
    ) from last_err


def _composite_generator(config: SystemConfig, outer: Matrix) -> Matrix:
    """Stack each group's precode rows with their XOR parity row."""
    gw = config.n_i - 1
    rows: list[list[int]] = []
    for l in range(config.L):
        group = [list(outer.row(l * gw + j)) for j in range(gw)]
        parity = [0] * outer.cols
        for grow in group:
            parity = [p ^ v for p, v in zip(parity, grow)]
        rows.extend(group)
        rows.append(parity)
    return Matrix.from_rows(outer.field, rows)


def encode_rs(code: RsLocalCode, message: Sequence[int]) -> list[NodeContent]:
    M = code.message_size
    if len(message) == 0 or len(message) % M != 0:
        raise LengthMismatchError(f"message length must be a positive multiple of {M}")
    stripes = len(message) // M
    cfg = code.config
    per_node: dict[tuple[int, int], list[int]] = {nd: [] for nd in cfg.nodes()}
    for s in range(stripes):
        coded = code.composite.mul_vec(message[s * M : (s + 1) * M])
        for (l, j) in cfg.nodes():
            per_node[(l, j)].append(coded[code.composite_row_index(l, j)])
    return [NodeContent(l, j, tuple(vals)) for (l, j), vals in per_node.items()]


def repair_rs(code: RsLocalCode, failed: tuple[int, int],
              cluster_contents: Iterable[NodeContent]) -> NodeContent:
    """Single-parity group decode: the lost symbol is the XOR of its peers."""
    l, j = failed
    peers = {c.address: c for c in cluster_contents}
    expected = {(l, jj) for jj in range(1, code.config.n_i + 1) if jj != j}
    if set(peers) != expected:
        raise WrongHelperSetError(f"need exactly the cluster peers {sorted(expected)}")
    lengths = {len(c.symbols) for c in peers.values()}
    if len(lengths) != 1:
        raise WrongHelperSetError("helper contents disagree on stripe count")
    out = [0] * lengths.pop()
    for content in peers.values():
        out = [acc ^ v for acc, v in zip(out, content.symbols)]
    return NodeContent(l, j, tuple(out))


def decode_any_k(code: XorLocalCode | RsLocalCode,
                 contents: Sequence[NodeContent]) -> list[int]:
    """Recover the message from any k distinct nodes' contents.

    Stacks the coefficient rows of every provided symbol, picks a maximal
    independent subset once, and back-substitutes per stripe.
    """
    cfg = code.config
    addresses = [c.address for c in contents]
    if len(contents) != cfg.k or len(set(addresses)) != cfg.k:
        raise ValueError(f"need contents from exactly {cfg.k} distinct nodes")
    alpha = code.alpha
    M = code.message_size
    rows: list[tuple[int, ...]] = []
    origin: list[tuple[NodeContent, int]] = []   # (content, slot)
    for c in contents:
        for slot, coeff in enumerate(code.symbol_rows(c.cluster, c.node)):
            rows.append(coeff)
            origin.append((c, slot))
    sel = _independent_rows(code.field, rows, M)
    solver = Matrix.from_rows(code.field, [rows[i] for i in sel]).inverse()
    stripes = len(contents[0].symbols) // alpha
    message: list[int] = []
    for s in range(stripes):
        rhs = [origin[i][0].symbols[s * alpha + origin[i][1]] for i in sel]
        message.extend(solver.mul_vec(rhs))
    return message


def _independent_rows(field: GF, rows: Sequence[Sequence[int]], need: int) -> list[int]:
    """Indices of `need` linearly independent rows, in pivot order."""
    exp, log, om1 = field._exp, field._log, field.order - 1
    work = [(list(r), idx) for idx, r in enumerate(rows)]
    ncols = len(rows[0])
    sel: list[int] = []
    rank = 0
    for col in range(ncols):
        prow = -1
        for r in range(rank, len(work)):
            if work[r][0][col]:
                prow = r
                break
        if prow < 0:
            continue
        work[rank], work[prow] = work[prow], work[rank]
        pivot, pidx = work[rank]
        sel.append(pidx)
        pl = log[pivot[col]]
        for r in range(rank + 1, len(work)):
            rr = work[r][0]
            v = rr[col]
            if v:
                f = (log[v] - pl) % om1
                for c in range(col, ncols):
                    pv = pivot[c]
                    if pv:
                        rr[c] ^= exp[f + log[pv]]
        rank += 1
        if rank == need:
            return sel
    raise RankDeficientError(f"only {rank} independent symbol equations, need {need}")
