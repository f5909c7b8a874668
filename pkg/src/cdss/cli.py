"""Command-line surface: params, encode, repair, fetch, verify, simulate, report.

Exit codes: 0 success, 2 usage error, 3 verification failure,
4 incompatible parameters.
"""

from __future__ import annotations

import functools
import itertools
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import blob, sim
from .errors import (
    DegenerateConfigError,
    DistanceVerificationError,
    DivisibleError,
    FieldTooSmallError,
    IncompatibleScenarioError,
    NotDivisibleError,
    NotSuperRegularError,
    UnsupportedDataWidthError,
)
from .gf import GF
from .lrc import NodeContent
from .params import SystemConfig, msr_point_inv, msr_point_zero, quot_rem
from .report import render_report

EXIT_VERIFY = 3
EXIT_INCOMPATIBLE = 4

_INCOMPATIBLE = (FieldTooSmallError, NotDivisibleError, DivisibleError,
                 IncompatibleScenarioError, DegenerateConfigError,
                 DistanceVerificationError, NotSuperRegularError,
                 UnsupportedDataWidthError)


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _INCOMPATIBLE as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(EXIT_INCOMPATIBLE)
        except FileNotFoundError as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(2)

    return wrapper


def _parse_node(text: str) -> tuple[int, int]:
    try:
        l, j = (int(part) for part in text.split(","))
    except ValueError:
        raise click.BadParameter(f"expected 'l,j', got {text!r}")
    if l < 1 or j < 1:
        raise click.BadParameter(f"node address must be 1-based, got {text!r}")
    return (l, j)


def _parse_nodes(text: str) -> list[tuple[int, int]]:
    return [_parse_node(part) for part in text.split(";") if part]


def _config(n: int, k: int, L: int) -> SystemConfig:
    try:
        return SystemConfig(n=n, k=k, L=L)
    except ValueError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_INCOMPATIBLE)


def _fraction(text: str, name: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"{name} must be a rational like 3 or 7/2, got {text!r}")


def _fmt(x: Fraction) -> str:
    return f"{x} ({float(x):g})"


@click.group()
def main() -> None:
    """Clustered-storage erasure coding toolkit."""


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--l", "--L", "L", type=int, required=True)
@click.option("--eps", type=click.Choice(["zero", "inv"]), required=True,
              help="Cross/intra bandwidth ratio: 0 or 1/(n-k).")
@click.option("--file-size", default=None,
              help="Stored file size in symbols (exact rational).")
@guarded
def params(n: int, k: int, L: int, eps: str, file_size: str | None) -> None:
    """Print the minimum-storage operating point for a layout."""
    cfg = _config(n, k, L)
    qr = quot_rem(cfg)
    if eps == "zero":
        M = _fraction(file_size, "--file-size") if file_size else Fraction(cfg.k - qr.q)
        point = msr_point_zero(cfg, M)
    else:
        if file_size:
            M = _fraction(file_size, "--file-size")
            beta_c = M / (cfg.k * (cfg.n - cfg.k))
            if beta_c <= 0:
                raise click.BadParameter("--file-size must be positive")
        else:
            beta_c = Fraction(1)
        point = msr_point_inv(cfg, beta_c)
    click.echo(f"layout      n={cfg.n} k={cfg.k} L={cfg.L} n_I={cfg.n_i} q={qr.q} m={qr.m}")
    click.echo(f"regime      {point.regime.value}")
    click.echo(f"file_size   {_fmt(point.file_size)}")
    click.echo(f"alpha       {_fmt(point.alpha)}")
    click.echo(f"beta_i      {_fmt(point.beta_i)}")
    click.echo(f"beta_c      {_fmt(point.beta_c)}")
    click.echo(f"gamma       {_fmt(point.gamma)}")


def _manifest_path(outdir: Path) -> Path:
    return outdir / "manifest.json"


def _read_manifest(outdir: Path) -> dict:
    path = _manifest_path(outdir)
    if not path.exists():
        click.echo(f"error: no manifest at {path}", err=True)
        sys.exit(2)
    return json.loads(path.read_text())


def _restore(outdir: Path):
    """Rebuild the code instance and layout described by a manifest."""
    manifest = _read_manifest(outdir)
    cfg = SystemConfig(**manifest["config"])
    field = GF(manifest["field"]["width"], manifest["field"]["poly"])
    code, _ = sim.build_code(manifest["code"], cfg, field)
    return manifest, cfg, field, code


def _read_contents(outdir: Path, cfg: SystemConfig,
                   skip: tuple[int, int] | None = None) -> dict[tuple[int, int], NodeContent]:
    contents = {}
    for (l, j) in cfg.nodes():
        if (l, j) == skip:
            continue
        _, symbols = blob.read_blob(outdir / blob.blob_filename(l, j))
        contents[(l, j)] = NodeContent(l, j, tuple(symbols))
    return contents


@main.command()
@click.option("--code", "kind", type=click.Choice(sorted(blob.CODE_IDS)), required=True)
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--l", "--L", "L", type=int, required=True)
@click.option("--width", type=click.Choice(["4", "8", "16"]), default="8",
              help="Field symbol width for the data path.")
@click.option("--poly", type=int, default=None, help="Primitive polynomial override.")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False,
                                                       path_type=Path), required=True)
@click.option("--outdir", type=click.Path(file_okay=False, path_type=Path), required=True)
@guarded
def encode(kind: str, n: int, k: int, L: int, width: str, poly: int | None,
           input_path: Path, outdir: Path) -> None:
    """Encode a file into one blob per storage node plus a manifest."""
    cfg = _config(n, k, L)
    w = int(width)
    field = GF(w, poly)
    code, build_info = sim.build_code(kind, cfg, field)
    data = input_path.read_bytes()
    symbols = blob.pack(data, w)
    if not symbols:
        symbols = [0]  # empty file still occupies one stripe
    symbols = blob.pad_to_multiple(symbols, code.message_size)
    stripe_count = len(symbols) // code.message_size
    contents = sim.encode_message(code, kind, symbols)
    outdir.mkdir(parents=True, exist_ok=True)
    blobs = {}
    for content in contents:
        header = blob.BlobHeader(
            code_kind=kind, width=w, poly=field.poly, n=cfg.n, k=cfg.k, L=cfg.L,
            cluster=content.cluster, node=content.node, alpha=code.alpha,
            stripe_count=stripe_count, original_length=len(data),
        )
        name = blob.blob_filename(content.cluster, content.node)
        blob.write_blob(outdir / name, header, content.symbols)
        blobs[name] = blob.sha256_hex((outdir / name).read_bytes())
    manifest = {
        "version": blob.VERSION,
        "code": kind,
        "config": {"n": cfg.n, "k": cfg.k, "L": cfg.L},
        "field": {"width": w, "poly": field.poly},
        "alpha": code.alpha,
        "message_symbols_per_stripe": code.message_size,
        "stripe_count": stripe_count,
        "original_length": len(data),
        "file_sha256": blob.sha256_hex(data),
        "blobs": blobs,
        "build": build_info,
    }
    _manifest_path(outdir).write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    click.echo(f"wrote {len(blobs)} blobs + manifest to {outdir} "
               f"({stripe_count} stripes, alpha={code.alpha})")


@main.command()
@click.option("--outdir", type=click.Path(exists=True, file_okay=False, path_type=Path),
              required=True)
@click.option("--node", required=True, help="Failed node as 'l,j'.")
@click.option("--cross-index", type=int, default=None,
              help="Symbol index every remote helper ships (msr-half only).")
@guarded
def repair(outdir: Path, node: str, cross_index: int | None) -> None:
    """Rebuild one node's blob from the survivors and verify it."""
    failed = _parse_node(node)
    manifest, cfg, field, code = _restore(outdir)
    kind = manifest["code"]
    if failed not in set(cfg.nodes()):
        raise click.BadParameter(f"node {failed} not in layout {cfg}")
    if cross_index is not None:
        if kind != "msr-half":
            raise click.UsageError("--cross-index only applies to msr-half")
        if not 1 <= cross_index <= code.k:
            raise click.BadParameter(f"--cross-index must be in [1, {code.k}]")
    target = outdir / blob.blob_filename(*failed)
    if target.exists():
        target.unlink()
    contents = _read_contents(outdir, cfg, skip=failed)
    cross = (cross_index,) * code.k if cross_index is not None else None
    rebuilt, per_helper, intra, cross_total = sim.repair_once(
        code, kind, contents, failed, cross_indices=cross
    )
    stripes = manifest["stripe_count"]
    header = blob.BlobHeader(
        code_kind=kind, width=manifest["field"]["width"], poly=manifest["field"]["poly"],
        n=cfg.n, k=cfg.k, L=cfg.L, cluster=failed[0], node=failed[1],
        alpha=code.alpha, stripe_count=stripes,
        original_length=manifest["original_length"],
    )
    blob.write_blob(target, header, rebuilt.symbols)
    digest = blob.sha256_hex(target.read_bytes())
    expected = manifest["blobs"][target.name]
    entry = {
        "failed": list(failed),
        "per_helper": [[list(addr), count] for addr, count in per_helper],
        "intra_symbols": intra,
        "cross_symbols": cross_total,
        "gamma_observed": intra + cross_total,
        "per_stripe": {"intra": intra // stripes, "cross": cross_total // stripes},
        "exact": digest == expected,
    }
    click.echo(json.dumps(entry, sort_keys=True))
    if digest != expected:
        click.echo("error: regenerated blob differs from the recorded checksum", err=True)
        sys.exit(EXIT_VERIFY)


@main.command()
@click.option("--outdir", type=click.Path(exists=True, file_okay=False, path_type=Path),
              required=True)
@click.option("--nodes", required=True, help="Semicolon-separated 'l,j' addresses.")
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), required=True)
@guarded
def fetch(outdir: Path, nodes: str, output: Path) -> None:
    """Decode the original file from exactly k node blobs."""
    manifest, cfg, field, code = _restore(outdir)
    addresses = _parse_nodes(nodes)
    if len(addresses) != cfg.k or len(set(addresses)) != cfg.k:
        raise click.UsageError(f"need exactly {cfg.k} distinct nodes, got {addresses}")
    contents = []
    for (l, j) in addresses:
        if (l, j) not in set(cfg.nodes()):
            raise click.BadParameter(f"node {(l, j)} not in layout {cfg}")
        _, symbols = blob.read_blob(outdir / blob.blob_filename(l, j))
        contents.append(NodeContent(l, j, tuple(symbols)))
    message = sim.decode_message(code, manifest["code"], contents)
    data = blob.unpack(message, manifest["field"]["width"], manifest["original_length"])
    output.write_bytes(data)
    if blob.sha256_hex(data) != manifest["file_sha256"]:
        click.echo("error: fetched bytes do not match the manifest checksum", err=True)
        sys.exit(EXIT_VERIFY)
    click.echo(f"restored {len(data)} bytes to {output}")


@main.command()
@click.option("--outdir", type=click.Path(exists=True, file_okay=False, path_type=Path),
              required=True)
@click.option("--exhaustive", "mode", flag_value="exhaustive", default=True)
@click.option("--sample", type=int, default=None, help="Number of random k-subsets.")
@click.option("--seed", type=int, default=0)
@guarded
def verify(outdir: Path, mode: str, sample: int | None, seed: int) -> None:
    """Decode from k-node subsets and compare against the manifest checksum."""
    manifest, cfg, field, code = _restore(outdir)
    kind = manifest["code"]
    contents = _read_contents(outdir, cfg)
    addresses = sorted(contents)
    if sample is not None:
        rng = random.Random(f"{seed}/dc")
        subsets = [tuple(sorted(rng.sample(addresses, cfg.k))) for _ in range(sample)]
        mode = "sampled"
    else:
        subsets = list(itertools.combinations(addresses, cfg.k))
    tried = passed = 0
    for subset in subsets:
        tried += 1
        message = sim.decode_message(code, kind, [contents[a] for a in subset])
        data = blob.unpack(message, manifest["field"]["width"], manifest["original_length"])
        if blob.sha256_hex(data) == manifest["file_sha256"]:
            passed += 1
    click.echo(f"dc subsets passed: {passed}/{tried} ({mode})")
    if passed != tried:
        sys.exit(EXIT_VERIFY)


@main.command()
@click.option("--scenario", "scenario_path",
              type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--report", "report_path", type=click.Path(dir_okay=False, path_type=Path),
              required=True)
@guarded
def simulate(scenario_path: Path, report_path: Path) -> None:
    """Run a failure scenario and write its JSON report."""
    try:
        scenario = sim.scenario_from_dict(json.loads(scenario_path.read_text()))
    except (KeyError, ValueError, TypeError) as err:
        raise click.UsageError(f"malformed scenario file: {err}")
    result = sim.run_scenario(scenario)
    doc = sim.report_to_dict(result)
    report_path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    ok = (result.repairs_exact and result.dc_passed == result.dc_tried
          and result.traffic_matches_theory)
    click.echo(f"report written to {report_path}")
    click.echo(f"repairs exact: {result.repairs_exact}; "
               f"dc: {result.dc_passed}/{result.dc_tried}; "
               f"traffic matches theory: {result.traffic_matches_theory}")
    if not ok:
        sys.exit(EXIT_VERIFY)


@main.command("report")
@click.option("--report", "report_path",
              type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--outdir", type=click.Path(file_okay=False, path_type=Path), required=True)
@guarded
def render(report_path: Path, outdir: Path) -> None:
    """Render a report to traffic.csv plus PNG figures."""
    doc = json.loads(report_path.read_text())
    try:
        paths = render_report(doc, outdir)
    except (KeyError, TypeError) as err:
        raise click.UsageError(f"malformed report file: {err}")
    for path in paths:
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
