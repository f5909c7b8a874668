"""Deterministic failure/repair simulator with traffic metering.

A scenario names a layout, a code construction, a seed and a failure
schedule.  Running it encodes a seeded random message, replays the
schedule one failure at a time (collect helpers, rebuild, overwrite,
compare bit-for-bit), meters every symbol that moved, then checks data
recovery over k-node subsets.  All randomness flows from the scenario
seed through named substreams of Python's Mersenne Twister, so two runs
of the same scenario produce identical reports.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping

from . import lrc, msr
from .errors import IncompatibleScenarioError
from .gf import GF
from .lrc import NodeContent
from .params import SystemConfig, msr_point_inv, msr_point_zero, quot_rem

CODE_KINDS = ("lrc-xor", "lrc-rs", "msr-half")
RNG_NAME = "mt19937"


@dataclass(frozen=True)
class FailureSchedule:
    """Either explicit (step, node) events or a count of random failures."""

    events: tuple[tuple[int, tuple[int, int]], ...] | None = None
    trials: int | None = None

    def __post_init__(self) -> None:
        if (self.events is None) == (self.trials is None):
            raise ValueError("specify exactly one of events/trials")
        if self.trials is not None and self.trials < 0:
            raise ValueError("trials must be nonnegative")


@dataclass(frozen=True)
class DcCheck:
    mode: str                  # "exhaustive" or "sampled"
    count: int = 0             # draws in sampled mode

    def __post_init__(self) -> None:
        if self.mode not in ("exhaustive", "sampled"):
            raise ValueError(f"unknown dc_check mode {self.mode!r}")
        if self.mode == "sampled" and self.count < 0:
            raise ValueError("sample count must be nonnegative")


@dataclass(frozen=True)
class Scenario:
    config: SystemConfig
    code_kind: str
    width: int
    seed: int
    schedule: FailureSchedule
    dc_check: DcCheck
    poly: int | None = None

    def __post_init__(self) -> None:
        check_compat(self.code_kind, self.config)


@dataclass(frozen=True)
class RepairEvent:
    step: int
    failed: tuple[int, int]
    per_helper: tuple[tuple[tuple[int, int], int], ...]
    intra_symbols: int
    cross_symbols: int
    exact: bool

    @property
    def gamma_observed(self) -> int:
        return self.intra_symbols + self.cross_symbols


@dataclass(frozen=True)
class SimReport:
    scenario: Scenario
    rng_name: str
    build_info: dict
    repairs: tuple[RepairEvent, ...]
    dc_tried: int
    dc_passed: int
    gamma_theoretical: Fraction
    timings_ms: dict = dc_field(compare=False)

    @property
    def repairs_exact(self) -> bool:
        return all(ev.exact for ev in self.repairs)

    @property
    def traffic_matches_theory(self) -> bool:
        return all(ev.gamma_observed == self.gamma_theoretical for ev in self.repairs)


def check_compat(kind: str, cfg: SystemConfig) -> None:
    """Raise IncompatibleScenarioError when a kind cannot serve a layout."""
    qr = quot_rem(cfg)
    if kind not in CODE_KINDS:
        raise IncompatibleScenarioError(f"unknown code kind {kind!r}")
    if kind == "lrc-xor" and qr.m != 0:
        raise IncompatibleScenarioError(f"lrc-xor needs n_I | k, got {cfg}")
    if kind == "lrc-rs" and qr.m == 0:
        raise IncompatibleScenarioError(f"lrc-rs needs n_I not dividing k, got {cfg}")
    if kind == "msr-half" and (cfg.L != 2 or cfg.n != 2 * cfg.k):
        raise IncompatibleScenarioError(f"msr-half needs n = 2k and L = 2, got {cfg}")


def build_code(kind: str, cfg: SystemConfig, field: GF):
    """Construct a code instance; returns (code, build details)."""
    check_compat(kind, cfg)
    if kind == "lrc-xor":
        code = lrc.build_xor_code(cfg, field)
        info = {"kind": kind, "generator": code.generator_kind,
                "distance_mode": code.distance_mode,
                "distance_checked": code.distance_checked, "mirrored": code.mirrored}
    elif kind == "lrc-rs":
        code = lrc.build_rs_code(cfg, field)
        info = {"kind": kind, "distance_mode": code.distance_mode,
                "distance_checked": code.distance_checked, "point_shift": code.point_shift}
    else:
        code = msr.build(cfg.k, field)
        info = {"kind": kind, "superregular_mode": code.check.mode,
                "superregular_checked": code.check.checked}
    return code, info


def encode_message(code, kind: str, message):
    if kind == "lrc-xor":
        return lrc.encode_xor(code, message)
    if kind == "lrc-rs":
        return lrc.encode_rs(code, message)
    return msr.encode(code, message)


def decode_message(code, kind: str, contents):
    if kind == "msr-half":
        return msr.decode(code, contents)
    return lrc.decode_any_k(code, contents)


def repair_once(code, kind: str, contents: Mapping[tuple[int, int], NodeContent],
                failed: tuple[int, int], cross_indices: tuple[int, ...] | None = None):
    """Collect helpers, rebuild `failed`, and meter the symbols that moved.

    Returns (rebuilt NodeContent, per-helper counts, intra, cross).
    """
    l, j = failed
    if kind == "msr-half":
        plan = (msr.RepairPlan(failed=failed, cross_indices=cross_indices)
                if cross_indices is not None else msr.default_plan(code, failed))
        data = msr.gather_helper_data(code, plan, contents)
        counts: dict[tuple[int, int], int] = {}
        for h in data:
            counts[(h.cluster, h.node)] = counts.get((h.cluster, h.node), 0) + len(h.values)
        intra = sum(len(h.values) for h in data if h.cluster == l)
        cross = sum(len(h.values) for h in data if h.cluster != l)
        if l == msr.SYSTEMATIC:
            rebuilt = msr.repair_systematic(code, plan, data)
        else:
            rebuilt = msr.repair_parity(code, plan, data)
    else:
        peers = [contents[(l, jj)] for jj in range(1, code.config.n_i + 1) if jj != j]
        counts = {p.address: len(p.symbols) for p in peers}
        intra = sum(len(p.symbols) for p in peers)
        cross = 0
        if kind == "lrc-xor":
            rebuilt = lrc.repair_xor(code, failed, peers)
        else:
            rebuilt = lrc.repair_rs(code, failed, peers)
    per_helper = tuple(sorted(counts.items()))
    return rebuilt, per_helper, intra, cross


def verify_dc(code, kind: str, contents: Mapping[tuple[int, int], NodeContent],
              message, check: DcCheck, seed: int = 0) -> tuple[int, int]:
    """Decode from k-node subsets and compare to the known message.

    Exhaustive mode walks every subset; sampled mode draws `check.count`
    seeded subsets.  Returns (tried, passed); failures are counted, not
    raised.
    """
    addresses = sorted(contents)
    k = code.config.k
    if check.mode == "exhaustive":
        subsets = itertools.combinations(addresses, k)
    else:
        rng = random.Random(f"{seed}/dc")
        subsets = (tuple(sorted(rng.sample(addresses, k))) for _ in range(check.count))
    tried = passed = 0
    want = list(message)
    for subset in subsets:
        tried += 1
        if decode_message(code, kind, [contents[a] for a in subset]) == want:
            passed += 1
    return tried, passed


def theoretical_gamma(scenario: Scenario, message_size: int) -> Fraction:
    if scenario.code_kind == "msr-half":
        return msr_point_inv(scenario.config, beta_c=1).gamma
    return msr_point_zero(scenario.config, file_size=message_size).gamma


def run_scenario(scenario: Scenario) -> SimReport:
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    field = GF(scenario.width, scenario.poly)
    code, build_info = build_code(scenario.code_kind, scenario.config, field)
    timings["build"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    rng = random.Random(f"{scenario.seed}/message")
    message = [rng.randrange(field.order) for _ in range(code.message_size)]
    contents = {c.address: c for c in encode_message(code, scenario.code_kind, message)}
    timings["encode"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    if scenario.schedule.events is not None:
        schedule = list(scenario.schedule.events)
    else:
        frng = random.Random(f"{scenario.seed}/failures")
        nodes = sorted(contents)
        schedule = [(step + 1, frng.choice(nodes)) for step in range(scenario.schedule.trials)]
    events: list[RepairEvent] = []
    for step, failed in schedule:
        failed = tuple(failed)
        if failed not in contents:
            raise IncompatibleScenarioError(f"schedule names unknown node {failed}")
        rebuilt, per_helper, intra, cross = repair_once(
            code, scenario.code_kind, contents, failed
        )
        exact = rebuilt.symbols == contents[failed].symbols
        contents[failed] = rebuilt
        events.append(RepairEvent(step=step, failed=failed, per_helper=per_helper,
                                  intra_symbols=intra, cross_symbols=cross, exact=exact))
    timings["repairs"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    tried, passed = verify_dc(code, scenario.code_kind, contents, message,
                              scenario.dc_check, seed=scenario.seed)
    timings["dc_check"] = (time.perf_counter() - t0) * 1e3

    return SimReport(
        scenario=scenario,
        rng_name=RNG_NAME,
        build_info=build_info,
        repairs=tuple(events),
        dc_tried=tried,
        dc_passed=passed,
        gamma_theoretical=theoretical_gamma(scenario, code.message_size),
        timings_ms=timings,
    )


# --- JSON mapping -----------------------------------------------------------
#
# Wall-clock timings are intentionally left out of the serialized form so
# that equal scenario + seed always yields byte-identical report files.

def scenario_to_dict(s: Scenario) -> dict:
    d: dict = {
        "config": {"n": s.config.n, "k": s.config.k, "L": s.config.L},
        "code": s.code_kind,
        "width": s.width,
        "seed": s.seed,
        "dc_check": {"mode": s.dc_check.mode},
    }
    if s.poly is not None:
        d["poly"] = s.poly
    if s.dc_check.mode == "sampled":
        d["dc_check"]["count"] = s.dc_check.count
    if s.schedule.events is not None:
        d["failures"] = {"events": [[step, list(node)] for step, node in s.schedule.events]}
    else:
        d["failures"] = {"trials": s.schedule.trials}
    return d


def scenario_from_dict(d: Mapping) -> Scenario:
    cfg = SystemConfig(n=d["config"]["n"], k=d["config"]["k"], L=d["config"]["L"])
    fails = d["failures"]
    if "events" in fails:
        schedule = FailureSchedule(events=tuple(
            (int(step), (int(node[0]), int(node[1]))) for step, node in fails["events"]
        ))
    else:
        schedule = FailureSchedule(trials=int(fails["trials"]))
    dc = d.get("dc_check", {"mode": "exhaustive"})
    return Scenario(
        config=cfg,
        code_kind=d["code"],
        width=int(d["width"]),
        seed=int(d["seed"]),
        schedule=schedule,
        dc_check=DcCheck(mode=dc["mode"], count=int(dc.get("count", 0))),
        poly=d.get("poly"),
    )


def report_to_dict(r: SimReport) -> dict:
    return {
        "scenario": scenario_to_dict(r.scenario),
        "rng": r.rng_name,
        "build": r.build_info,
        "repairs": [
            {
                "step": ev.step,
                "failed": list(ev.failed),
                "per_helper": [[list(addr), n] for addr, n in ev.per_helper],
                "intra_symbols": ev.intra_symbols,
                "cross_symbols": ev.cross_symbols,
                "gamma_observed": ev.gamma_observed,
                "exact": ev.exact,
            }
            for ev in r.repairs
        ],
        "repairs_exact": r.repairs_exact,
        "dc": {"mode": r.scenario.dc_check.mode, "tried": r.dc_tried, "passed": r.dc_passed},
        "gamma_theoretical": str(r.gamma_theoretical),
        "traffic_matches_theory": r.traffic_matches_theory,
    }
