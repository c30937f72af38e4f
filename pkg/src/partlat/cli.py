"""Command line front end: ``partlat <command> [options]``.

Exit codes: 0 success, 1 a checked property failed, 2 usage error,
3 capacity or integrity error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .errors import CapacityError, DimensionError, IntegrityError

EXIT_OK, EXIT_REFUTED, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


class _Usage(Exception):
    pass


def _config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _emit(args, result: dict, text: str | None = None) -> None:
    if args.format == "json":
        payload = {"version": __version__, "config": _config(args), "result": result}
        print(json.dumps(payload, indent=2, default=str))
    else:
        print(text if text is not None else json.dumps(result, default=str))


class Heartbeat:
    """Progress lines on stderr, at most one per ``interval`` seconds."""

    def __init__(self, interval: float, start_rank: int = 0):
        self.interval = interval
        self.start = time.perf_counter()
        self.last = -float("inf")
        self.start_rank = start_rank

    def __call__(self, rank: int, count: int) -> None:
        now = time.perf_counter()
        if self.interval < 0 or now - self.last < self.interval:
            return
        self.last = now
        rate = (rank - self.start_rank) / max(now - self.start, 1e-9)
        print(f"HEARTBEAT rank={rank} rate={rate:.0f}/s count={count}", file=sys.stderr, flush=True)


# ---------------------------------------------------------------------------
# commands


def cmd_count(args) -> int:
    from .enumeration import count_generating_quadruples

    res = count_generating_quadruples(
        args.n, args.parallelism, args.checkpoint, lo=args.lo, hi=args.hi,
        prune=not args.no_prune, orbit_mode=args.orbit, chunk_size=args.chunk,
        progress=Heartbeat(args.heartbeat, args.lo))
    _emit(args, {"n": res.n, "count": res.count, "lo": res.lo, "hi": res.hi,
                 "complete": res.complete, "elapsed": res.elapsed}, str(res.count))
    return EXIT_OK


def cmd_list(args) -> int:
    from .enumeration import list_generating_quadruples

    out = args.out or sys.stdout
    written = list_generating_quadruples(args.n, out)
    print(f"wrote {written} sets", file=sys.stderr)
    return EXIT_OK


def cmd_antichain_audit(args) -> int:
    from .core import encode_canonical, format_vector
    from .enumeration import verify_all_antichain

    ok, bad = verify_all_antichain(args.n)
    shown = [{"set": [format_vector(encode_canonical(p)) for p in quad], "order_type": kind.value}
             for quad, kind in bad[:20]]
    _emit(args, {"n": args.n, "all_antichains": ok, "violations": len(bad), "examples": shown},
          "all antichains" if ok else f"{len(bad)} non-antichain generating sets")
    return EXIT_OK if ok else EXIT_REFUTED


def cmd_sample(args) -> int:
    from .montecarlo import CSV_HEADER, estimate_rho

    def progress(done, total, s):
        print(f"HEARTBEAT chunk={done}/{total} successes={s}", file=sys.stderr, flush=True)

    rep = estimate_rho(args.n, args.k, args.seed, args.parallelism,
                       progress=progress if args.verbose else None)
    if args.format == "csv":
        print(CSV_HEADER)
        print(rep.csv_row())
    elif args.format == "json":
        d = rep.to_dict()
        d["config"] = _config(args)
        print(json.dumps(d, indent=2))
    else:
        print(f"n={rep.n} k={rep.k} s={rep.s} p={100 * rep.p_bar:.5f}%")
        for lv, (lo, hi) in rep.intervals.items():
            print(f"  {lv:.3f}: [{100 * lo:.5f}, {100 * hi:.5f}]")
    return EXIT_OK


def cmd_ci(args) -> int:
    from .montecarlo import confidence_interval

    rows = {}
    lines = []
    for lv in args.level:
        lo, hi = confidence_interval(args.s, args.k, lv)
        rows[f"{lv:.3f}"] = [100 * lo, 100 * hi]
        lines.append(f"{100 * lo:.5f} {100 * hi:.5f}")
    _emit(args, {"s": args.s, "k": args.k, "percent_intervals": rows}, "\n".join(lines))
    return EXIT_OK


def cmd_verify_one_one_two(args) -> int:
    from .zadori import one_one_two_fixture, verify_one_one_two_generates, verify_one_one_two_order
    from .closure import closure_size
    from .core import FullEquivalence

    f = one_one_two_fixture()
    size = closure_size([f["alpha"], f["beta"], f["gamma"], f["delta"]], FullEquivalence(6))
    gen, kind = verify_one_one_two_generates(), verify_one_one_two_order()
    ok = gen and kind
    _emit(args, {"closure_size": size, "generates": gen, "one_one_two": kind},
          f"closure size {size}, generates={gen}, one_one_two={kind}")
    return EXIT_OK if ok else EXIT_REFUTED


def _phis_from_args(args):
    from .zadori import IdQuadruple, all_id_quadruples

    if args.phi:
        return [IdQuadruple.parse(p) for p in args.phi]
    return [phi for m in args.m for phi in all_id_quadruples(m)]


def cmd_zadori_verify(args) -> int:
    from .zadori import closure_generates, verify_generation_via_terms

    rows = []
    for phi in _phis_from_args(args):
        row = verify_generation_via_terms(phi, report=True)
        if args.closure:
            row["closure_generates"] = closure_generates(phi)
            row["ok"] = row["ok"] and row["closure_generates"]
        rows.append(row)
    bad = [r for r in rows if not r["ok"]]
    _emit(args, {"checked": len(rows), "failed": bad},
          f"{len(rows)} configurations, {len(bad)} failed")
    return EXIT_OK if not bad else EXIT_REFUTED


def cmd_get_through(args) -> int:
    from .zadori import IdQuadruple, gets_through

    key, target = IdQuadruple.parse(args.key), IdQuadruple.parse(args.target)
    ans = gets_through(key, target)
    _emit(args, {"key": str(key), "target": str(target), "gets_through": ans}, str(ans).lower())
    return EXIT_OK


def cmd_lower_bound(args) -> int:
    from .zadori import lower_bound

    ns = range(args.n, (args.to or args.n) + 1)
    vals = {n: lower_bound(n) for n in ns}
    _emit(args, {str(n): str(v) for n, v in vals.items()},
          "\n".join(str(v) if len(vals) == 1 else f"{n} {v}" for n, v in vals.items()))
    return EXIT_OK


def cmd_family_g(args) -> int:
    from .zadori import enumerate_family, family_sample_generates, lower_bound, orbit_count

    fam = list(enumerate_family(args.n))
    result = {"n": args.n, "base_quadruples": len(fam), "lower_bound": str(lower_bound(args.n))}
    ok = True
    if args.orbit:
        result["orbit_sets"] = orbit_count(args.n, fam)
        ok = result["orbit_sets"] >= lower_bound(args.n)
    if args.sample:
        result["sample_generates"] = family_sample_generates(args.n, args.sample, args.seed)
        ok = ok and result["sample_generates"]
    _emit(args, result)
    return EXIT_OK if ok else EXIT_REFUTED


def cmd_product_verify(args) -> int:
    from .products import PhiFamily, two_factor_family, verify_product_generation
    from .zadori import IdQuadruple

    if args.pair:
        case, phis = two_factor_family(*args.pair)
    elif args.family:
        with open(args.family) as fh:
            phis, case = PhiFamily.from_json(fh.read()).phis, "file"
    elif args.phi:
        phis, case = [IdQuadruple.parse(p) for p in args.phi], "explicit"
    else:
        raise _Usage("give --pair, --family or --phi")
    reports = [verify_product_generation(phis, mode, args.cap, report=True) for mode in args.mode]
    ok = all(r["ok"] for r in reports)
    _emit(args, {"case": case, "phis": [str(p) for p in phis], "reports": reports, "ok": ok},
          f"{'verified' if ok else 'NOT verified'}: " + " ".join(str(p) for p in phis))
    return EXIT_OK if ok else EXIT_REFUTED


def cmd_plan_product(args) -> int:
    from .products import consecutive_product_plan, power_product_plan

    if args.n is not None:
        plan = consecutive_product_plan(args.n)
        plan["family"] = plan["family"].to_dict()
        ok = plan["covers_target"]
    elif args.power is not None:
        plan = power_product_plan(args.power)
        ok = plan["ok"]
    else:
        raise _Usage("give --n or --power")
    _emit(args, plan)
    return EXIT_OK if ok else EXIT_REFUTED


def cmd_large_power(args) -> int:
    from .products import large_power_certificate

    rep = large_power_certificate()
    rep["min_p"] = str(rep["min_p"])
    _emit(args, rep, f"ok={rep['ok']} smallest p has {rep['min_p_digits']} digits")
    return EXIT_OK if rep["ok"] else EXIT_REFUTED


def cmd_bell(args) -> int:
    from .core import bell

    _emit(args, {"n": args.n, "bell": str(bell(args.n))}, str(bell(args.n)))
    return EXIT_OK


def cmd_encode(args) -> int:
    from .core import Partition, decode_canonical, encode_canonical, format_vector, parse_vector

    if args.decode:
        p = decode_canonical(parse_vector(args.decode))
    elif args.rgs:
        p = Partition.from_rgs(args.rgs)
    elif args.blocks:
        blocks = [[int(x) - 1 for x in blk.split(",") if x.strip()] for blk in args.blocks.split("|")]
        n = args.n or sum(len(b) for b in blocks)
        p = Partition.from_blocks(n, blocks)
    else:
        raise _Usage("give --blocks, --rgs or --decode")
    vec = format_vector(encode_canonical(p, args.pad))
    _emit(args, {"vector": vec, "rgs": p.to_rgs()}, vec)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _levels(text: str) -> float:
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="partlat", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("--format", choices=("table", "json", "csv"), default="table")
        p.set_defaults(func=func)
        return p

    p = add("count", cmd_count, "exact number of four-element generating sets of Part(n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--checkpoint")
    p.add_argument("--lo", type=int, default=0)
    p.add_argument("--hi", type=int)
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--orbit", action="store_true", help="count one representative per relabeling orbit")
    p.add_argument("--chunk", type=int, default=1 << 20)
    p.add_argument("--heartbeat", type=float, default=10.0, help="seconds between progress lines (<0: off)")

    p = add("list", cmd_list, "write every generating four-set of Part(n), one per line")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")

    p = add("antichain-audit", cmd_antichain_audit, "check that all generating four-sets are antichains")
    p.add_argument("--n", type=int, required=True)

    p = add("sample", cmd_sample, "Monte Carlo estimate of the proportion of generating four-sets")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=20200)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--verbose", action="store_true")

    p = add("ci", cmd_ci, "confidence interval (percent) for s successes out of k")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--level", type=_levels, nargs="+", default=[0.999])

    add("verify-prop1", cmd_verify_one_one_two, "check the six-point (1+1+2) generating set")

    p = add("zadori-verify", cmd_zadori_verify, "check the atom terms of configurations")
    p.add_argument("--phi", nargs="+", help="id-quadruples as m:s:t:bits")
    p.add_argument("--m", type=int, nargs="+", default=[1, 3], help="all id-quadruples of these lengths")
    p.add_argument("--closure", action="store_true", help="also compare with a closure computation")

    p = add("get-through", cmd_get_through, "does the key of one id-quadruple get through another")
    p.add_argument("--key", required=True)
    p.add_argument("--target", required=True)

    p = add("lower-bound", cmd_lower_bound, "explicit lower bound on the number of generating four-sets")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--to", type=int)

    p = add("family-g", cmd_family_g, "explicit family behind the lower bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--orbit", action="store_true", help="count distinct sets over all relabelings")
    p.add_argument("--sample", type=int, default=0, help="test this many random relabeled members")
    p.add_argument("--seed", type=int, default=0)

    p = add("product-verify", cmd_product_verify, "check that a product of partition lattices is four-generated")
    p.add_argument("--pair", type=int, nargs=2, metavar=("N", "N2"))
    p.add_argument("--family", help="JSON file with a family of id-quadruples")
    p.add_argument("--phi", nargs="+")
    p.add_argument("--mode", nargs="+", choices=("structural", "full_closure"), default=["structural"])
    p.add_argument("--cap", type=int, default=200_000)

    p = add("plan-corollary", cmd_plan_product, "parameter plans for long products")
    p.add_argument("--n", type=int)
    p.add_argument("--power", type=int)

    add("example2020", cmd_large_power, "binomial certificate for the 505-index example")

    p = add("bell", cmd_bell, "Bell number")
    p.add_argument("--n", type=int, required=True)

    p = add("encode", cmd_encode, "padded block vector of a partition")
    p.add_argument("--blocks", help='1-indexed blocks, e.g. "4,6|1,5,3,7|2,8"')
    p.add_argument("--rgs")
    p.add_argument("--decode")
    p.add_argument("--n", type=int)
    p.add_argument("--pad", type=int)
    return ap


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (CapacityError, IntegrityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (_Usage, DimensionError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
