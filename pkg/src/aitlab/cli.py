"""Experiment runner: every module as a subcommand with reproducible reports.

Reports are JSON (CSV where a command says so) and always embed the
resolved configuration and the machine version, so a report can be
reproduced from its own header.  Exit codes: 0 success, 1 validation or
precondition failure, 2 resource refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from . import codec, covering, depsets, extractor, independence
from .bits import all_strings, bin_numeral, check_bits, random_bits
from .complexity import (
    DEFAULT_BUDGET,
    DEFAULT_WORK_CEILING,
    SENTINEL,
    TableStore,
    build_table,
    condition_for_length,
    default_length_cap,
    soi_report,
)
from .errors import LabError, PreconditionError, ResourceRefusal
from .machine import C_LITERAL, VERSION_ID, RunStatus, run

CACHE_ENV_VAR = "AITLAB_CACHE"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "aitlab"


@dataclass
class ExperimentConfig:
    """Resolved run parameters; serialized into every report."""

    command: str
    n: Optional[int] = None
    alpha: Optional[int] = None
    s: Optional[int] = None
    t: int = DEFAULT_BUDGET
    length_cap: Optional[int] = None
    beta: Optional[int] = None
    k: Optional[int] = None
    T: Optional[int] = None
    seed: Optional[int] = None
    perm_cap: Optional[int] = None
    cache_dir: Optional[str] = None
    output: Optional[str] = None
    output_format: str = "json"
    workers: int = 1
    force: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def load_or_build_tables(config: ExperimentConfig) -> TableStore:
    """Table hub for a run: header-matched cache files are reused,
    mismatched or corrupt ones are rebuilt, never silently served."""
    return TableStore(
        cache_dir=config.cache_dir,
        budget=config.t,
        length_cap=config.length_cap,
        work_ceiling=None if config.force else DEFAULT_WORK_CEILING,
        workers=config.workers,
    )


def parse_condition(spec: str, n: int) -> str:
    """Condition flag: 'empty', 'len' (meaning bin(n)), or an explicit bit-literal."""
    if spec == "empty":
        return ""
    if spec == "len":
        return bin_numeral(n)
    return check_bits(spec, "condition")


def _report(cfg: ExperimentConfig, store: Optional[TableStore], payload: dict) -> dict:
    doc = {
        "command": cfg.command,
        "config": cfg.as_dict(),
        "machine_version": VERSION_ID,
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    if store is not None:
        doc["table_provenance"] = dict(store.stats)
    doc.update(payload)
    return doc


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        print(text)


def _emit_json(doc: dict, out: Optional[str]) -> None:
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", out)


def _csv_text(header: list, rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------- handlers


def _cmd_build_table(args, cfg: ExperimentConfig) -> int:
    cond = parse_condition(args.cond, args.n)
    cache_dir = args.out or cfg.cache_dir
    cfg.cache_dir = str(cache_dir) if cache_dir else None
    cfg.output = None  # the table file itself is the output
    store = load_or_build_tables(cfg)
    table = store.table(args.n, cond)
    vals = table.int_values()
    doc = _report(
        cfg,
        store,
        {
            "n": table.n,
            "condition": table.condition,
            "budget": table.budget,
            "length_cap": table.length_cap,
            "entries": int(vals.size),
            "sentinels": int((vals == SENTINEL).sum()),
            "min_value": int(vals.min()),
            "max_value": int(vals.max()),
        },
    )
    _emit_json(doc, None)
    return 0


def _cmd_depset(args, cfg: ExperimentConfig) -> int:
    x = check_bits(args.x, "center")
    cfg.n = len(x)
    store = load_or_build_tables(cfg)
    p = depsets.DepParams(n=len(x), alpha=args.alpha, t=cfg.t, s=args.s)
    if args.kind == "A":
        res = depsets.dep_set_A(x, p, store)
    elif args.kind == "B":
        res = depsets.dep_set_B(x, p, store)
    else:
        if args.s is None:
            raise PreconditionError("--kind A-restricted needs --s")
        res = depsets.dep_set_A_restricted(x, p, store)
    if cfg.output_format == "csv":
        _emit(_csv_text(depsets.CSV_COLUMNS, [res.as_csv_row()]), cfg.output)
    else:
        doc = _report(cfg, store, {"result": res.as_dict(include_members=args.members)})
        _emit_json(doc, cfg.output)
    return 0


def _cmd_degree(args, cfg: ExperimentConfig) -> int:
    u = check_bits(args.u, "u")
    cfg.n = len(u)
    store = load_or_build_tables(cfg)
    p = depsets.DepParams(n=len(u), alpha=args.alpha, t=cfg.t)
    conditions = None
    if args.sample is not None:
        rng = random.Random(args.seed)
        conditions = [random_bits(len(u), rng) for _ in range(args.sample)]
    res = depsets.dep_degree(u, p, store, conditions)
    doc = _report(cfg, store, {"result": res.as_dict(include_members=args.members)})
    _emit_json(doc, cfg.output)
    return 0


def _cmd_thm1_witness(args, cfg: ExperimentConfig) -> int:
    x = check_bits(args.x, "center")
    cfg.n = len(x)
    store = load_or_build_tables(cfg)
    fam = depsets.thm1_witnesses(x, args.alpha, cfg.t, store)
    doc = _report(cfg, store, {"family": fam.as_dict()})
    _emit_json(doc, cfg.output)
    return 0


def _cmd_graph(args, cfg: ExperimentConfig) -> int:
    store = load_or_build_tables(cfg)
    g = independence.build_dep_graph(
        args.n, args.beta, cfg.t, store, max_n=args.n if cfg.force else 10
    )
    if args.edges_out:
        rows = [[u, v] for u, v in g.edges()]
        Path(args.edges_out).write_text(_csv_text(["u", "v"], rows))
    degs = sorted(g.degrees.values())
    doc = _report(
        cfg,
        store,
        {
            "n": g.n,
            "beta": g.beta,
            "vertices": len(g.vertices),
            "edges": g.edge_count(),
            "max_degree": degs[-1] if degs else 0,
            "caro_wei_bound": independence.caro_wei_bound(g),
        },
    )
    _emit_json(doc, cfg.output)
    return 0


def _cmd_indep_set(args, cfg: ExperimentConfig) -> int:
    store = load_or_build_tables(cfg)
    g = independence.build_dep_graph(
        args.n, args.beta, cfg.t, store, max_n=args.n if cfg.force else 10
    )
    chosen = sorted(independence.caro_wei_independent_set(g))
    doc = _report(
        cfg,
        store,
        {
            "n": g.n,
            "beta": g.beta,
            "size": len(chosen),
            "caro_wei_bound": independence.caro_wei_bound(g),
            "members": chosen,
        },
    )
    _emit_json(doc, cfg.output)
    return 0


def _strings_arg(raw: str) -> list[str]:
    xs = [check_bits(s.strip(), "string") for s in raw.split(",") if s.strip()]
    if not xs:
        raise PreconditionError("no strings given")
    return xs


def _cmd_check_pairwise(args, cfg: ExperimentConfig) -> int:
    xs = _strings_arg(args.strings)
    cfg.n = len(xs[0])
    store = load_or_build_tables(cfg)
    rep = independence.check_pairwise_independent(xs, args.alpha, cfg.t, store)
    doc = _report(cfg, store, {"result": rep.as_dict()})
    _emit_json(doc, cfg.output)
    return 0


def _cmd_check_mutual(args, cfg: ExperimentConfig) -> int:
    xs = _strings_arg(args.strings)
    cfg.n = len(xs[0])
    cfg.k = len(xs)
    store = load_or_build_tables(cfg)
    rep = independence.check_mutual_independent(
        xs, args.alpha, cfg.t, store, perm_cap=args.perm_cap, seed=args.seed
    )
    doc = _report(cfg, store, {"result": rep.as_dict()})
    _emit_json(doc, cfg.output)
    return 0


def _cmd_intersect(args, cfg: ExperimentConfig) -> int:
    xs = _strings_arg(args.strings)
    cfg.n = len(xs[0])
    cfg.k = len(xs)
    store = load_or_build_tables(cfg)
    rep = independence.intersect_dep_sets(xs, args.alpha, cfg.t, store)
    doc = _report(cfg, store, {"result": rep.as_dict(include_members=args.members)})
    _emit_json(doc, cfg.output)
    return 0


def _cmd_cover(args, cfg: ExperimentConfig) -> int:
    store = load_or_build_tables(cfg)
    if args.mode == "random":
        cand = covering.random_covering(
            args.n, args.alpha, args.T, args.seed, cfg.t, store
        )
    elif args.mode == "greedy":
        cand = covering.greedy_covering(
            args.n, args.alpha, cfg.t, store, max_n=args.n if cfg.force else 10
        )
    else:  # verify
        if not args.infile:
            raise PreconditionError("cover verify needs --in")
        cand = covering.load_cover(args.infile)
        cfg.n, cfg.alpha = cand.n, cand.alpha
    verdict = covering.verify_covering(cand, cfg.t, store)
    if args.save and args.mode != "verify":
        covering.save_cover(cand, args.save)
    doc = _report(
        cfg,
        store,
        {
            "candidate": cand.as_dict(include_centers=args.members),
            "verdict": verdict.as_dict(),
            "size_lower_bound": covering.cover_size_lower_bound(cand.n, cand.alpha),
            "comparators": covering.thm6_size_comparators(cand.n, cand.alpha),
        },
    )
    _emit_json(doc, cfg.output)
    return 0


def _cmd_extract_count(args, cfg: ExperimentConfig) -> int:
    store = load_or_build_tables(cfg)
    if args.table:
        table = extractor.load_extractor(args.table)
    elif args.constant is not None:
        table = extractor.make_constant_extractor(args.n, args.m, args.constant)
    else:
        table = extractor.make_random_extractor(args.n, args.m, args.seed)
    x = check_bits(args.x, "x")
    if len(x) != table.n:
        raise PreconditionError(f"x must be {table.n} bits for this table")
    params = extractor.CountParams(s=args.s, alpha=args.alpha, t=cfg.t)
    part = extractor.bad_partition(table, x, params, store)
    cert = extractor.lower_bound_certificate(table, x, params, store)
    doc = _report(
        cfg,
        store,
        {
            "extractor": {"n": table.n, "m": table.m, "meta": table.meta},
            "partition": part.as_dict(include_members=args.members),
            "certificate": cert.as_dict(),
        },
    )
    _emit_json(doc, cfg.output)
    return 0


def _cmd_soi_report(args, cfg: ExperimentConfig) -> int:
    store = load_or_build_tables(cfg)
    sample = "all" if args.pairs == "all" else int(args.pairs)
    rep = soi_report(args.n, budget=cfg.t, sample=sample, seed=args.seed, store=store)
    doc = _report(cfg, store, {"report": rep.as_dict(include_values=args.values)})
    _emit_json(doc, cfg.output)
    return 0


# ---------------------------------------------------------------- selftest


def _selftest_checks(n: int, store: TableStore, t: int):
    """Yield (name, callable) pairs; each callable raises AssertionError on failure."""

    def codec_roundtrip():
        for length in range(9):
            for u in all_strings(length):
                assert codec.decode_self_delim(codec.encode_self_delim(u)) == u
        for l1 in range(4):
            for l2 in range(1, 4):
                for x1 in all_strings(l1):
                    for x2 in all_strings(l2):
                        assert codec.decode_pair(codec.encode_pair(x1, x2)) == (x1, x2)

    def machine_determinism():
        rng = random.Random(7)
        for _ in range(300):
            p = random_bits(rng.randrange(0, 12), rng)
            w = random_bits(rng.randrange(0, 6), rng)
            b = rng.randrange(0, 40)
            assert run(p, w, b) == run(p, w, b)

    def literal_bound():
        rng = random.Random(11)
        for x in all_strings(min(n, 6)):
            for _ in range(3):
                w = random_bits(rng.randrange(0, 8), rng)
                out = run("1" + x, w, len(x) + 1)
                assert out.status is RunStatus.HALTED and out.output == x

    def counting():
        rng = random.Random(13)
        conds = ["", condition_for_length(n)] + [random_bits(n, rng) for _ in range(2)]
        for w in conds:
            assert store.table(n, w, t).counting_violations() == []

    def budget_monotonicity():
        a = store.table(n, "", t).int_values()
        b = store.table(n, "", 2 * t).int_values()
        assert (b <= a).all()

    def cap_monotonicity():
        a = store.table(n, "", t, length_cap=n + 2).int_values()
        b = store.table(n, "", t, length_cap=n + 4).int_values()
        assert (b <= a).all()

    def witness_soundness():
        table = store.table(n, "", t)
        for x in all_strings(n):
            wit = table.witness(x)
            out = run(wit.program, wit.condition, t)
            assert out.halted and out.output == x and len(wit.program) == table.value(x)

    def a_size_bound_check():
        nn = min(n, 6)
        for x in all_strings(nn):
            for alpha in range(1, 5):
                p = depsets.DepParams(n=nn, alpha=alpha, t=t)
                res = depsets.dep_set_A(x, p, store)
                assert res.size <= res.hard_bound

    def transpose():
        nn = min(n, 4)
        for alpha in range(0, 6):
            p = depsets.DepParams(n=nn, alpha=alpha, t=t)
            a_sets = {x: set(depsets.dep_set_A(x, p, store).members) for x in all_strings(nn)}
            for u in all_strings(nn):
                deg = depsets.dep_degree(u, p, store)
                assert set(deg.members) == {x for x in all_strings(nn) if u in a_sets[x]}

    def caro_wei():
        for seed in range(10):
            g = independence.random_graph(64, [0.01, 0.1, 0.5][seed % 3], seed)
            s = independence.caro_wei_independent_set(g)
            assert independence.independent_in(g, s)
            assert len(s) >= independence.caro_wei_bound(g)
        for beta in (1, 2):
            g = independence.build_dep_graph(4, beta, t, store)
            s = independence.caro_wei_independent_set(g)
            assert independence.independent_in(g, s)
            assert len(s) >= independence.caro_wei_bound(g)

    def extractor_invariants():
        nn = min(n, 6)
        tables = [extractor.make_constant_extractor(nn, 2)] + [
            extractor.make_random_extractor(nn, 2, seed) for seed in range(5)
        ]
        rng = random.Random(17)
        for table in tables:
            x = random_bits(nn, rng)
            pop = extractor.most_popular_image(table, x)
            assert pop.count >= (1 << (nn - table.m))
            params = extractor.CountParams(s=3, alpha=1, t=t)
            part = extractor.bad_partition(table, x, params, store)
            pieces = set(part.low) | set(part.dependent) | set(part.neither)
            assert pieces == set(pop.preimages)
            assert len(part.low) + len(part.dependent) + len(part.neither) == pop.count
            cert = extractor.lower_bound_certificate(table, x, params, store)
            b = depsets.dep_set_B(
                x, depsets.DepParams(n=nn, alpha=1, t=t), store
            )
            assert cert.bound <= b.size

    def low_set_counting():
        table = store.table(n, condition_for_length(n), t)
        for s in range(table.length_cap + 1):
            assert int((table.int_values() < s).sum()) < (1 << s)

    def covering_check():
        nn = min(n, 6)
        cand = covering.greedy_covering(nn, 2, t, store)
        verdict = covering.verify_covering(cand, t, store)
        assert verdict.ok
        assert cand.size >= covering.cover_size_lower_bound(nn, 2)

    yield "codec-roundtrip", codec_roundtrip
    yield "machine-determinism", machine_determinism
    yield "literal-bound", literal_bound
    yield "counting-invariant", counting
    yield "budget-monotonicity", budget_monotonicity
    yield "cap-monotonicity", cap_monotonicity
    yield "witness-soundness", witness_soundness
    yield "dependency-size-bound", a_size_bound_check
    yield "transpose-identity", transpose
    yield "caro-wei", caro_wei
    yield "extractor-counting", extractor_invariants
    yield "low-set-counting", low_set_counting
    yield "greedy-covering", covering_check


def _cmd_selftest(args, cfg: ExperimentConfig) -> int:
    store = load_or_build_tables(cfg)
    failures = 0
    for name, check in _selftest_checks(args.n, store, cfg.t):
        try:
            check()
        except AssertionError as exc:
            failures += 1
            print(f"FAIL - {name}: {exc}")
        else:
            print(f"ok   - {name}")
    print(f"selftest: {'PASS' if failures == 0 else 'FAIL'} (machine {VERSION_ID})")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------- parser


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--t", type=int, default=DEFAULT_BUDGET, help="step budget")
    sp.add_argument("--length-cap", type=int, default=None, help="max program length")
    sp.add_argument("--cache-dir", default=None, help=f"table cache (default ${CACHE_ENV_VAR} or ~/.cache/aitlab)")
    sp.add_argument("--no-cache", action="store_true", help="keep tables in memory only")
    sp.add_argument("--workers", type=int, default=1, help="parallel table builds")
    sp.add_argument("--force", action="store_true", help="ignore the work ceiling")
    sp.add_argument("--out", default=None, help="write the report here instead of stdout")
    sp.add_argument("--members", action="store_true", help="include full member lists")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="aitlab",
        description="Exact time-bounded complexity lab over one fixed micro-machine",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("build-table", help="build or load one complexity table")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--cond", default="empty", help="empty | len | bit-literal")
    _add_common(sp)

    sp = sub.add_parser("depset", help="dependency set of one center")
    sp.add_argument("--kind", choices=["A", "B", "A-restricted"], default="A")
    sp.add_argument("--x", required=True, help="center, bit-literal")
    sp.add_argument("--alpha", type=int, required=True)
    sp.add_argument("--s", type=int, default=None, help="complexity floor (A-restricted)")
    sp.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
    _add_common(sp)

    sp = sub.add_parser("degree", help="how many centers reach a string")
    sp.add_argument("--u", required=True)
    sp.add_argument("--alpha", type=int, required=True)
    sp.add_argument("--sample", type=int, default=None, help="sampled conditions")
    sp.add_argument("--seed", type=int, default=0)
    _add_common(sp)

    sp = sub.add_parser("thm1-witness", help="prefix witness family of a center")
    sp.add_argument("--x", required=True)
    sp.add_argument("--alpha", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("graph", help="mutual-dependency graph summary")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--beta", type=int, required=True)
    sp.add_argument("--edges-out", default=None, help="write edge list CSV")
    _add_common(sp)

    sp = sub.add_parser("indep-set", help="greedy independent set of the graph")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--beta", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("check-pairwise", help="pairwise independence verdict")
    sp.add_argument("--strings", required=True, help="comma-separated bit-literals")
    sp.add_argument("--alpha", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("check-mutual", help="mutual independence verdict")
    sp.add_argument("--strings", required=True)
    sp.add_argument("--alpha", type=int, required=True)
    sp.add_argument("--perm-cap", type=int, default=independence.DEFAULT_PERM_CAP)
    sp.add_argument("--seed", type=int, default=0)
    _add_common(sp)

    sp = sub.add_parser("intersect", help="intersection of dependency sets")
    sp.add_argument("--strings", required=True)
    sp.add_argument("--alpha", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("cover", help="covering-set construction and verification")
    sp.add_argument("mode", choices=["random", "greedy", "verify"])
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--alpha", type=int, default=None)
    sp.add_argument("--T", type=int, default=None, help="random sample count")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--in", dest="infile", default=None, help="cover JSON to verify")
    sp.add_argument("--save", default=None, help="write the candidate as JSON")
    _add_common(sp)

    sp = sub.add_parser("extract-count", help="popular-preimage counting certificate")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--constant", type=int, default=None, help="use a constant table")
    sp.add_argument("--table", default=None, help="extractor JSON file")
    sp.add_argument("--x", required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--alpha", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("soi-report", help="information-symmetry slack distribution")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--pairs", default="all", help="'all' or a sample count")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--values", action="store_true", help="include raw slack values")
    _add_common(sp)

    sp = sub.add_parser("selftest", help="run every hard invariant")
    sp.add_argument("--n", type=int, default=6)
    _add_common(sp)

    return ap


_HANDLERS = {
    "build-table": _cmd_build_table,
    "depset": _cmd_depset,
    "degree": _cmd_degree,
    "thm1-witness": _cmd_thm1_witness,
    "graph": _cmd_graph,
    "indep-set": _cmd_indep_set,
    "check-pairwise": _cmd_check_pairwise,
    "check-mutual": _cmd_check_mutual,
    "intersect": _cmd_intersect,
    "cover": _cmd_cover,
    "extract-count": _cmd_extract_count,
    "soi-report": _cmd_soi_report,
    "selftest": _cmd_selftest,
}


def _config_from_args(args) -> ExperimentConfig:
    if getattr(args, "no_cache", False):
        cache = None
    elif args.cache_dir is not None:
        cache = str(args.cache_dir)
    else:
        cache = str(default_cache_dir())
    return ExperimentConfig(
        command=args.command,
        n=getattr(args, "n", None),
        alpha=getattr(args, "alpha", None),
        s=getattr(args, "s", None),
        t=args.t,
        length_cap=args.length_cap,
        beta=getattr(args, "beta", None),
        T=getattr(args, "T", None),
        seed=getattr(args, "seed", None),
        perm_cap=getattr(args, "perm_cap", None),
        cache_dir=cache,
        output=args.out,
        output_format=getattr(args, "fmt", "json"),
        workers=args.workers,
        force=args.force,
    )


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints usage itself
        return 0 if exc.code in (0, None) else 1
    cfg = _config_from_args(args)
    try:
        return _HANDLERS[args.command](args, cfg)
    except ResourceRefusal as exc:
        print(f"resource refusal: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, LabError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
