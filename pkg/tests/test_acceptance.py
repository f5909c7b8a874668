"""Acceptance suite: one test per exit criterion, each printing a PASS/FAIL
line and holding its stated time budget.  Run with `pytest -s` to see the
per-criterion lines inline."""

import itertools
import json
import random
import time
from contextlib import contextmanager

from click.testing import CliRunner

from conftest import EQ12_ROWS
from cdss import lrc, msr, sim
from cdss.cli import main
from cdss.gf import Matrix, all_square_submatrices_invertible, cauchy_matrix
from cdss.params import (
    SystemConfig,
    derivation_check,
    msr_point_inv,
    msr_point_zero,
    sweep_configs,
)


@contextmanager
def criterion(num, desc, budget_s):
    t0 = time.perf_counter()
    try:
        yield
    except Exception:
        print(f"[criterion {num}] FAIL {desc}")
        raise
    elapsed = time.perf_counter() - t0
    assert elapsed < budget_s, f"criterion {num} took {elapsed:.2f}s, budget {budget_s}s"
    print(f"[criterion {num}] PASS {desc} ({elapsed:.2f}s)")


# traffic observed while running criterion 3, consumed by criterion 4
_TRAFFIC: list[tuple[int, tuple[int, int], int, int]] = []


def _msr_repair_sweep(code, contents):
    """Repair every node with the default plan, recording traffic."""
    events = []
    for failed in sorted(contents):
        rebuilt, _, intra, cross = sim.repair_once(code, "msr-half", contents, failed)
        assert rebuilt.symbols == contents[failed].symbols, failed
        events.append((code.k, failed, intra, cross))
    return events


def test_criterion_1_golden_walkthrough(gf8, msr_k2):
    with criterion(1, "worked-example repair and read matrices match bit-exactly", 1.0):
        assert msr_k2.g.to_rows() == EQ12_ROWS
        solver = msr.systematic_solver(msr_k2, 1, (1, 2))
        assert solver.to_rows() == [[7, 2], [4, 3]]
        assert solver.inverse().to_rows() == [[3, 2], [4, 7]]
        reader = msr.decode_solver(msr_k2, [(1, 1), (2, 2)])
        assert reader.to_rows() == [[7, 2], [2, 7]]
        assert reader.inverse().to_rows() == [[1, 3], [3, 1]]
        # and the real operations built on them regenerate/recover exactly
        m = [random.Random(1).randrange(8) for _ in range(4)]
        contents = {c.address: c for c in msr.encode(msr_k2, m)}
        plan = msr.RepairPlan(failed=(1, 1), cross_indices=(1, 2))
        data = msr.gather_helper_data(msr_k2, plan, contents)
        assert msr.repair_systematic(msr_k2, plan, data).symbols == contents[(1, 1)].symbols
        assert msr.decode(msr_k2, [contents[(1, 1)], contents[(2, 2)]]) == m


def test_criterion_2_superregularity(gf8, gf32):
    with criterion(2, "exhaustive square-submatrix audits (69 and 48619 checks)", 10.0):
        worked = Matrix.from_rows(gf8, EQ12_ROWS)
        chk = all_square_submatrices_invertible(worked)
        assert chk.ok and chk.mode == "exhaustive" and chk.checked == 69
        big = cauchy_matrix(9, 9, gf32)
        chk = all_square_submatrices_invertible(big)
        assert chk.ok and chk.mode == "exhaustive"
        assert chk.checked >= 48_000


def test_criterion_3_msr_exhaustive_suite(msr_k2, msr_k3):
    with criterion(3, "all repairs and all DC subsets for k in {2, 3}", 30.0):
        _TRAFFIC.clear()
        for code in (msr_k2, msr_k3):
            k = code.k
            rng = random.Random(100 + k)
            m = [rng.randrange(code.field.order) for _ in range(k * k)]
            contents = {c.address: c for c in msr.encode(code, m)}
            _TRAFFIC.extend(_msr_repair_sweep(code, contents))
            if k == 2:
                for failed in sorted(contents):
                    for tup in itertools.product((1, 2), repeat=2):
                        plan = msr.RepairPlan(failed=failed, cross_indices=tup)
                        data = msr.gather_helper_data(code, plan, contents)
                        fn = (msr.repair_systematic if failed[0] == 1
                              else msr.repair_parity)
                        assert fn(code, plan, data).symbols == contents[failed].symbols
            subsets = list(itertools.combinations(sorted(contents), k))
            assert len(subsets) == (6 if k == 2 else 20)
            for trial in range(100):
                msg = [rng.randrange(code.field.order) for _ in range(k * k)]
                coded = {c.address: c for c in msr.encode(code, msg)}
                for sel in subsets:
                    assert msr.decode(code, [coded[a] for a in sel]) == msg


def test_criterion_4_traffic_matches_operating_point(msr_k2, msr_k3):
    with criterion(4, "every repair moved (k-1)k intra + k cross symbols", 5.0):
        if not _TRAFFIC:  # criterion 3 did not run first; rebuild its events
            for code in (msr_k2, msr_k3):
                m = list(range(code.k * code.k))
                contents = {c.address: c for c in msr.encode(code, m)}
                _TRAFFIC.extend(_msr_repair_sweep(code, contents))
        assert len(_TRAFFIC) >= 10   # 2k events per k
        for k, failed, intra, cross in _TRAFFIC:
            assert intra == (k - 1) * k
            assert cross == k
            gamma = msr_point_inv(SystemConfig(2 * k, k, 2), 1).gamma
            assert gamma == intra + cross == k * k


def test_criterion_5_xor_code_suite(gf8):
    with criterion(5, "6-node XOR-local code: local exact repairs, 20 reads", 10.0):
        cfg = SystemConfig(6, 3, 2)
        code = lrc.build_xor_code(cfg, gf8)
        assert code.alpha == 3
        assert msr_point_zero(cfg, code.message_size).alpha == 3
        rng = random.Random(55)
        m = [rng.randrange(8) for _ in range(6)]
        contents = {c.address: c for c in lrc.encode_xor(code, m)}
        for failed in sorted(contents):
            rebuilt, per_helper, intra, cross = sim.repair_once(
                code, "lrc-xor", contents, failed)
            assert cross == 0
            assert all(addr[0] == failed[0] for addr, _ in per_helper)
            assert rebuilt.symbols == contents[failed].symbols
        count = 0
        for sel in itertools.combinations(sorted(contents), 3):
            got = lrc.decode_any_k(code, [contents[a] for a in sel])
            assert got == m and len(got) == 6
            count += 1
        assert count == 20


def test_criterion_6_rs_code_suite(gf256):
    with criterion(6, "6-node precode+parity code: distance, repairs, 15 reads", 10.0):
        cfg = SystemConfig(6, 4, 2)
        code = lrc.build_rs_code(cfg, gf256)
        assert code.distance_mode == "exhaustive" and code.distance_checked == 15
        for sel in itertools.combinations(range(6), 4):
            assert code.composite.submatrix(sel, range(3)).rank() == 3
        rng = random.Random(66)
        m = [rng.randrange(256) for _ in range(3)]
        contents = {c.address: c for c in lrc.encode_rs(code, m)}
        for failed in sorted(contents):
            rebuilt, _, intra, cross = sim.repair_once(code, "lrc-rs", contents, failed)
            assert cross == 0
            assert rebuilt.symbols == contents[failed].symbols
        for sel in itertools.combinations(sorted(contents), 4):
            assert lrc.decode_any_k(code, [contents[a] for a in sel]) == m


def test_criterion_6_additional_943(gf256):
    with criterion("6 (9,4,3)", "9-node layout: all 126 subsets decode", 30.0):
        cfg = SystemConfig(9, 4, 3)
        code = lrc.build_rs_code(cfg, gf256)
        assert code.distance_checked == 126
        rng = random.Random(67)
        m = [rng.randrange(256) for _ in range(code.message_size)]
        contents = {c.address: c for c in lrc.encode_rs(code, m)}
        count = 0
        for sel in itertools.combinations(sorted(contents), 4):
            assert lrc.decode_any_k(code, [contents[a] for a in sel]) == m
            count += 1
        assert count == 126


def test_criterion_7_parameter_sweep():
    with criterion(7, "exact-rational identities over every layout to n=48", 10.0):
        count = 0
        for cfg in sweep_configs(48):
            d = derivation_check(cfg)          # raises on any identity violation
            assert d.zeta_ - d.delta_ == (cfg.n_i - 1) * d.lambda_
            zero = msr_point_zero(cfg, 7)
            assert zero.gamma == (cfg.n_i - 1) * zero.beta_i and zero.beta_c == 0
            inv = msr_point_inv(cfg, 1)
            assert inv.file_size == cfg.k * (cfg.n - cfg.k)
            assert inv.gamma == (cfg.n_i - 1) * inv.beta_i + (cfg.n - cfg.n_i) * inv.beta_c
            count += 1
        assert count > 1000


def test_criterion_8_cli_end_to_end(tmp_path):
    with criterion(8, "encode -> n repairs -> 5 random fetches, byte-identical", 60.0):
        runner = CliRunner()
        payload = tmp_path / "input.bin"
        payload.write_bytes(random.Random(88).randbytes(1024))
        rng = random.Random(99)
        for kind, n, k, L in [("lrc-xor", 6, 3, 2), ("lrc-rs", 6, 4, 2),
                              ("msr-half", 4, 2, 2)]:
            store = tmp_path / kind
            res = runner.invoke(main, ["encode", "--code", kind, "--n", str(n),
                                       "--k", str(k), "--l", str(L), "--width", "8",
                                       "--input", str(payload), "--outdir", str(store)])
            assert res.exit_code == 0, res.output
            nodes = [(l, j) for l in range(1, L + 1) for j in range(1, n // L + 1)]
            for (l, j) in nodes:
                res = runner.invoke(main, ["repair", "--outdir", str(store),
                                           "--node", f"{l},{j}"])
                assert res.exit_code == 0, res.output
            for trial in range(5):
                subset = rng.sample(nodes, k)
                arg = ";".join(f"{l},{j}" for l, j in subset)
                out = tmp_path / f"{kind}-{trial}.bin"
                res = runner.invoke(main, ["fetch", "--outdir", str(store),
                                           "--nodes", arg, "--output", str(out)])
                assert res.exit_code == 0, res.output
                assert out.read_bytes() == payload.read_bytes()


def test_criterion_9_simulate_determinism(tmp_path):
    with criterion(9, "identical scenario+seed produce byte-identical reports", 10.0):
        runner = CliRunner()
        scenario = tmp_path / "scenario.json"
        scenario.write_text(json.dumps({
            "config": {"n": 6, "k": 3, "L": 2},
            "code": "lrc-xor",
            "width": 8,
            "seed": 20240817,
            "failures": {"trials": 8},
            "dc_check": {"mode": "exhaustive"},
        }))
        outs = []
        for name in ("a.json", "b.json"):
            path = tmp_path / name
            res = runner.invoke(main, ["simulate", "--scenario", str(scenario),
                                       "--report", str(path)])
            assert res.exit_code == 0, res.output
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]
