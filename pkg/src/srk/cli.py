"""Command-line front door.

Subcommands: classify, search, orbit-stats, verify, replay.  Inputs are the
JSON coordinate records {"eps": [...], "a": [...], "t": [...]}; outputs are
JSON or CSV with full-precision floats so that replays are bit-faithful.
Exit codes: 0 success, 1 verifier failure, 2 search stalled, 3 out-of-scope
input, 64 usage errors.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import genus2, hyptrig, inequalities, pants, search

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_STALLED = 2
EXIT_OUT_OF_SCOPE = 3
EXIT_USAGE = 64


@dataclass
class RunConfig:
    seed: int = 0
    count: int = 100
    out: Optional[str] = None
    fmt: str = "json"
    max_rounds: int = search.MAX_ROUNDS_DEFAULT
    mu_min: float = search.MU_MIN_DEFAULT
    tol: float = 1e-9


def _fl(x: float) -> str:
    return format(float(x), ".17g")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _load_rep(path: str) -> genus2.GluedRep:
    with open(path) as fh:
        return genus2.GluedRep.from_json(fh.read())


def _threads() -> int:
    env = os.environ.get("SRK_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_classify(args) -> int:
    try:
        rep = _load_rep(args.rep)
    except (OSError, ValueError, KeyError, pants.PantsError) as exc:
        sys.stderr.write(f"classify: bad input: {exc}\n")
        return EXIT_USAGE
    table = {}
    worst = 0.0
    for tag in genus2.CURVE_TAGS:
        tm = genus2.trace_curve_matrix(rep, tag)
        tc, covered = genus2.trace_curve_closed_form(rep, tag)
        if covered:
            worst = max(worst, abs(tm - tc))
        table[tag] = {"matrix": tm, "closed_form": tc if covered else None,
                      "agreement": abs(tm - tc) if covered else None}
    report = {
        "euler": genus2.euler_class(rep),
        "euler_nominal": rep.euler_nominal,
        "sign": str(genus2.sign_invariant(rep)) if rep.euler_nominal == 0 else None,
        "traces": table,
        "worst_agreement": worst,
    }
    _emit(json.dumps(report, indent=2, default=float), args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    try:
        rep = _load_rep(args.rep)
    except (OSError, ValueError, KeyError, pants.PantsError) as exc:
        sys.stderr.write(f"search: bad input: {exc}\n")
        return EXIT_USAGE
    try:
        out = search.search_nonhyperbolic(rep, max_rounds=args.max_rounds,
                                          mu_min=args.mu_min)
    except search.OutOfScopeError as exc:
        sys.stderr.write(f"search: out of scope: {exc}\n")
        return EXIT_OUT_OF_SCOPE
    if isinstance(out, search.Stalled):
        sys.stderr.write(f"search: stalled: {out.diagnostic}\n")
        _emit(out.certificate.to_json(), args.out)
        return EXIT_STALLED
    replay = search.replay_certificate(out.certificate, tol=args.tol)
    payload = json.loads(out.certificate.to_json())
    payload["replay"] = replay
    _emit(json.dumps(payload, default=float), args.out)
    return EXIT_OK if replay["ok"] else EXIT_VERIFY_FAIL


def cmd_replay(args) -> int:
    try:
        with open(args.certificate) as fh:
            cert = search.Certificate.from_json(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        sys.stderr.write(f"replay: bad certificate: {exc}\n")
        return EXIT_USAGE
    report = search.replay_certificate(cert, tol=args.tol)
    _emit(json.dumps(report, default=float), args.out)
    return EXIT_OK if report.get("ok") else EXIT_VERIFY_FAIL


def _orbit_rows(seed: int, index: int, length: int) -> List[str]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    eps1, eps2 = pants.EU_PLUS1, pants.EU_MINUS1
    if index % 3 == 1:
        eps1, eps2 = (pants.PantsCase("tri", 1), pants.PantsCase("tri", -1))
    if index % 3 == 2:
        eps1 = eps2 = pants.PantsCase("selfhex", 1)
    while True:
        if eps1.kind == "selfhex":
            small = np.sort(rng.uniform(0.2, 0.8, 2))
            a = (small[0], small[1],
                 small.sum() + rng.uniform(0.1, 0.5))
        else:
            a = tuple(rng.uniform(0.3, 1.8, 3))
            if eps1.kind == "tri" and hyptrig.delta_invariant(*a) <= 0.05:
                continue
        break
    t = rng.uniform(-1.5, 1.5, 3)
    rep = genus2.build_glued(eps1, eps2, a, t)
    rows = []
    for step in range(length + 1):
        tr = [genus2.trace_curve_matrix(rep, f"delta{k}") for k in (1, 2, 3)]
        sign = str(genus2.sign_invariant(rep))
        rows.append(",".join(
            [str(seed), str(index), str(step), str(rep.eps1), str(rep.eps2)]
            + [_fl(v) for v in rep.a] + [_fl(v) for v in rep.t]
            + [_fl(v) for v in tr] + [sign]))
        i = int(rng.integers(1, 4))
        k = int(rng.integers(-2, 3))
        rep = genus2.dehn_twist_gamma(rep, i, k)
    return rows


def cmd_orbit_stats(args) -> int:
    header = ("seed,index,step,eps1,eps2,a1,a2,a3,t1,t2,t3,"
              "tr_d1,tr_d2,tr_d3,sign")
    lines = [header]
    with concurrent.futures.ThreadPoolExecutor(max_workers=_threads()) as ex:
        futures = [ex.submit(_orbit_rows, args.seed, i, args.length)
                   for i in range(args.n)]
        for fut in futures:                    # task order, deterministic
            lines.extend(fut.result())
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = inequalities.verify_paper_inequalities(scale=args.scale)
    rows = []
    ok = True
    for r in reports:
        ok &= r.ok
        rows.append({"claim": r.claim_id, "margin": r.margin,
                     "raw_min": r.raw_min, "lipschitz_pad": r.lipschitz_pad,
                     "grid_points": r.grid_points, "ok": r.ok})
    if args.format == "csv":
        lines = ["claim,margin,raw_min,lipschitz_pad,grid_points,ok"]
        for row in rows:
            lines.append(",".join([row["claim"], _fl(row["margin"]),
                                   _fl(row["raw_min"]),
                                   _fl(row["lipschitz_pad"]),
                                   str(row["grid_points"]), str(row["ok"])]))
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(json.dumps(rows, indent=2, default=float), args.out)
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="srk",
        description="Genus-2 surface group representations: coordinates, "
                    "trace formulas, twist orbits, and the curve search.")
    sub = p.add_subparsers(dest="command")

    c = sub.add_parser("classify", help="Euler class, sign, trace table")
    c.add_argument("rep", help="path to a coordinate JSON file")
    c.add_argument("--out")
    c.set_defaults(fn=cmd_classify)

    s = sub.add_parser("search", help="find a non-hyperbolic simple curve")
    s.add_argument("rep")
    s.add_argument("--out")
    s.add_argument("--max-rounds", type=int,
                   default=search.MAX_ROUNDS_DEFAULT)
    s.add_argument("--mu-min", type=float, default=search.MU_MIN_DEFAULT)
    s.add_argument("--tol", type=float, default=1e-6,
                   help="certificate link tolerance for the replay check")
    s.set_defaults(fn=cmd_search)

    r = sub.add_parser("replay", help="re-verify a search certificate")
    r.add_argument("certificate")
    r.add_argument("--out")
    r.add_argument("--tol", type=float, default=1e-6,
                   help="certificate link tolerance")
    r.set_defaults(fn=cmd_replay)

    o = sub.add_parser("orbit-stats", help="twist-orbit trace table (CSV)")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--n", type=int, default=100)
    o.add_argument("--length", type=int, default=50)
    o.add_argument("--out")
    o.set_defaults(fn=cmd_orbit_stats)

    v = sub.add_parser("verify", help="re-check the grid inequalities")
    v.add_argument("--scale", type=float, default=1.0,
                   help="grid refinement multiplier")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--out")
    v.set_defaults(fn=cmd_verify)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "fn", None):
        parser.print_help()
        return EXIT_USAGE
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
