"""Batch verification and computation interface.

``qberez verify <suite> --m M --n N [options]`` runs a named family of
identity checks and emits a deterministic report (JSON by default, one
line per check in text mode).  ``qberez compute {berezinian|zeta|hc-image}``
prints symbolic objects in the canonical rendering.  Exit status: 0 when
no check failed, 1 on failures, 2 on usage errors, 3 on internal
arithmetic errors.  Identical configurations produce byte-identical
reports apart from the duration fields.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import berezinian as bz
from . import rmatrix as rm
from . import rtt
from .report import CheckReport, FAIL, SKIPPED, failing
from .reps import EvalRep, RepConstructionError, TensorRep, draw_points
from .scalars import Rat, ScalarError, render
from .tensor import GradedDim

SUITES = (
    "rmatrix",
    "hecke",
    "relations",
    "berezinian",
    "zeta",
    "liouville",
    "minors",
    "sylvester",
    "macmahon",
    "hc",
    "morphisms",
    "all",
)


@dataclass
class SuiteConfig:
    m: int
    n: int
    order: int = 6
    kcap: int = 3
    symcap: int = 4
    seed: int = 0
    points: int = 3
    mode: str = "auto"
    fmt: str = "json"
    jobs: int = 1
    a: str = "2"
    rep: str = "eval"

    def resolved_mode(self):
        if self.mode != "auto":
            return self.mode
        return "symbolic" if self.m + self.n <= 3 else "points"

    def as_dict(self):
        return dict(self.__dict__)


def _parse_param(text):
    if "/" in text:
        num, den = text.split("/", 1)
        return Rat.from_int(int(num)) / Rat.from_int(int(den))
    try:
        return Rat.from_int(int(text))
    except ValueError:
        return Rat.sym(text)


_REP_CACHE = {}


def _eval_rep(cfg, shift=0):
    key = (cfg.m, cfg.n, cfg.a, shift)
    if key not in _REP_CACHE:
        a = _parse_param(cfg.a)
        if shift:
            a = a + Rat.from_int(shift)
        _REP_CACHE[key] = EvalRep(GradedDim(cfg.m, cfg.n), a)
    return _REP_CACHE[key]


def _tensor_rep(cfg):
    key = (cfg.m, cfg.n, cfg.a, "tensor")
    if key not in _REP_CACHE:
        a = _parse_param(cfg.a)
        dim = GradedDim(cfg.m, cfg.n)
        _REP_CACHE[key] = TensorRep(
            [EvalRep(dim, a), EvalRep(dim, a + Rat.from_int(1))]
        )
    return _REP_CACHE[key]


def _main_rep(cfg):
    return _tensor_rep(cfg) if cfg.rep == "tensor" else _eval_rep(cfg)


# -- individual tasks; each returns one CheckReport ------------------------


def task_qybe(cfg):
    return rm.check_qybe(GradedDim(cfg.m, cfg.n))


def task_structure(cfg):
    return rm.check_r_structure(GradedDim(cfg.m, cfg.n))


def task_unitarity(cfg):
    return rm.check_unitarity_and_qflip(GradedDim(cfg.m, cfg.n))


def task_crossing(cfg):
    return rm.check_crossing(GradedDim(cfg.m, cfg.n), order=cfg.order)


def task_hecke(cfg):
    return rm.check_hecke(GradedDim(cfg.m, cfg.n))


def task_symmetrizers(cfg):
    return rm.check_symmetrizers(GradedDim(cfg.m, cfg.n), mmax=cfg.symcap)


def task_symmetrizers_qinv(cfg):
    return rm.check_symmetrizers(
        GradedDim(cfg.m, cfg.n), mmax=min(cfg.symcap, 3), base=-1
    )


def task_fusion_relation(cfg):
    rep = _main_rep(cfg)
    mode = cfg.resolved_mode()
    points = draw_points(cfg.seed, "fusion-relation", cfg.points) if mode == "points" else None
    return rm.check_fusion(rep, min(cfg.kcap, 3), points=points)


def task_relations_eval(cfg):
    return rtt.check_relations(
        _eval_rep(cfg), mode=cfg.resolved_mode(), points=cfg.points, seed=cfg.seed
    )


def task_relations_tensor(cfg):
    try:
        rep = _tensor_rep(cfg)
    except RepConstructionError as e:
        return failing(
            CheckReport("relations.components", {"rep": "tensor"}), reason=str(e)
        )
    return rtt.check_relations(rep, mode="points", points=cfg.points, seed=cfg.seed)


def task_sum_fusion(cfg):
    return bz.sum_fusion_check(_main_rep(cfg), mode=cfg.resolved_mode(), seed=cfg.seed)


def task_centrality(cfg):
    return bz.centrality_check(_main_rep(cfg), mode=cfg.resolved_mode())


def task_zeta(cfg):
    return bz.zeta_check(_main_rep(cfg), mode=cfg.resolved_mode())


def task_liouville(cfg):
    return bz.liouville_check(_main_rep(cfg), mode=cfg.resolved_mode(), seed=cfg.seed)


def task_decomposition(cfg):
    return bz.decomposition_check(_main_rep(cfg), mode=cfg.resolved_mode(), seed=cfg.seed)


def task_jacobi(cfg, subset):
    return bz.jacobi_check(_main_rep(cfg), subset, mode=cfg.resolved_mode(), seed=cfg.seed)


def task_schur(cfg, k):
    return bz.schur_check(_main_rep(cfg), k, mode=cfg.resolved_mode(), seed=cfg.seed)


def task_sylvester(cfg, k):
    dim_big = GradedDim(cfg.m + k, cfg.n)
    key = ("syl", cfg.m + k, cfg.n, cfg.a)
    if key not in _REP_CACHE:
        _REP_CACHE[key] = EvalRep(dim_big, _parse_param(cfg.a))
    rep_big = _REP_CACHE[key]
    mode = "symbolic" if dim_big.size <= 3 else "points"
    return bz.sylvester_check(rep_big, k, (cfg.m, cfg.n), mode=mode, seed=cfg.seed)


def task_macmahon(cfg, k):
    return bz.macmahon_check(_main_rep(cfg), k, mode=cfg.resolved_mode(), seed=cfg.seed)


def task_hc(cfg):
    order = 2 if cfg.m + cfg.n <= 2 else 1
    return bz.hc_image_check(cfg.m, cfg.n, order)


def task_omega(cfg):
    return rtt.omega_check(_main_rep(cfg), mode=cfg.resolved_mode(), seed=cfg.seed)


def task_rho(cfg):
    return rtt.rho_check(_main_rep(cfg), mode=cfg.resolved_mode(), seed=cfg.seed)


def build_tasks(suite, cfg):
    """Ordered (key, thunk) pairs for a suite at one configuration."""
    tasks = []

    def add(key, fn, *args):
        tasks.append((key, fn, args))

    wants = lambda s: suite in (s, "all")
    if wants("rmatrix"):
        add("rmatrix.structure", task_structure)
        add("rmatrix.qybe", task_qybe)
        add("rmatrix.unitarity", task_unitarity)
        add("rmatrix.crossing", task_crossing)
    if wants("hecke"):
        add("hecke.braid_quadratic", task_hecke)
        add("hecke.symmetrizers", task_symmetrizers)
        add("hecke.symmetrizers_qinv", task_symmetrizers_qinv)
        add("hecke.fusion", task_fusion_relation)
    if wants("relations"):
        add("relations.eval", task_relations_eval)
        add("relations.tensor", task_relations_tensor)
    if wants("berezinian"):
        add("berezinian.sum_vs_fusion", task_sum_fusion)
        add("berezinian.centrality", task_centrality)
    if wants("zeta"):
        add("zeta.provenances", task_zeta)
    if wants("liouville"):
        add("liouville.identity", task_liouville)
    if wants("minors"):
        add("minors.decomposition", task_decomposition)
        dim = GradedDim(cfg.m, cfg.n)
        for subset in bz.admissible_subsets(dim):
            add(f"minors.jacobi[I={','.join(map(str, subset)) or '-'}]", task_jacobi, subset)
        for k in range(1, dim.size):
            add(f"minors.schur[k={k}]", task_schur, k)
    if wants("sylvester"):
        for k in (1, 2):
            add(f"minors.sylvester[k={k}]", task_sylvester, k)
    if wants("macmahon"):
        for k in range(1, cfg.kcap + 1):
            add(f"macmahon.sums[k={k}]", task_macmahon, k)
    if wants("hc"):
        add("hc.image", task_hc)
    if wants("morphisms"):
        add("morphisms.omega", task_omega)
        add("morphisms.rho", task_rho)
    return tasks


def _run_one(args):
    suite, key, cfg_dict = args
    cfg = SuiteConfig(**cfg_dict)
    table = {k: (fn, a) for k, fn, a in build_tasks(suite, cfg)}
    fn, extra = table[key]
    try:
        return fn(cfg, *extra).as_dict()
    except (ScalarError, ArithmeticError) as e:
        rep = CheckReport(key, {"m": cfg.m, "n": cfg.n})
        return failing(rep, reason=f"internal arithmetic error: {e}").as_dict()


def run_suite(suite, cfg):
    tasks = build_tasks(suite, cfg)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(
                pool.map(
                    _run_one, [(suite, key, cfg.as_dict()) for key, _, _ in tasks]
                )
            )
    else:
        results = [_run_one((suite, key, cfg.as_dict())) for key, _, _ in tasks]
    results.sort(key=lambda r: (r["name"], json.dumps(r["params"], sort_keys=True)))
    summary = {"pass": 0, "fail": 0, "skipped": 0}
    for r in results:
        summary[r["status"]] += 1
    return {
        "suite": suite,
        "m": cfg.m,
        "n": cfg.n,
        "seed": cfg.seed,
        "mode": cfg.resolved_mode(),
        "checks": results,
        "summary": summary,
    }


def emit_report(report, fmt, out):
    if fmt == "json":
        json.dump(report, out, sort_keys=True, indent=1)
        out.write("\n")
        return
    for r in report["checks"]:
        line = f"{r['status'].upper():7s} {r['name']}"
        params = {
            k: v for k, v in r["params"].items() if k not in ("m", "n", "mode")
        }
        if params:
            line += f" {json.dumps(params, sort_keys=True)}"
        if r.get("reason"):
            line += f"  [{r['reason']}]"
        line += f"  ({r['duration_ms']:.0f} ms)"
        out.write(line + "\n")
    s = report["summary"]
    out.write(
        f"suite={report['suite']} m={report['m']} n={report['n']} "
        f"pass={s['pass']} fail={s['fail']} skipped={s['skipped']}\n"
    )


# -- compute subcommands ----------------------------------------------------


def compute_berezinian(cfg, out):
    rep = _main_rep(cfg)
    b = bz.berezinian_sum(rep)
    lam = bz._scalar_of(b, rep)
    if lam is not None:
        out.write(render(lam) + "\n")
        return
    for (r, c), v in sorted(b.entries.items()):
        out.write(f"[{r},{c}] {render(v)}\n")


def compute_zeta(cfg, out):
    rep = _main_rep(cfg)
    zeta = bz.zeta_compute(rep, "extraction")
    lam = bz._scalar_of(zeta, rep)
    if lam is not None:
        out.write(render(lam) + "\n")
        return
    for (r, c), v in sorted(zeta.entries.items()):
        out.write(f"[{r},{c}] {render(v)}\n")


def compute_hc_image(cfg, out):
    order = min(cfg.order, 2)
    dim = GradedDim(cfg.m, cfg.n)
    for sign in (1, -1):
        series = bz.abstract_berezinian(dim, sign, order)
        fam = "+" if sign > 0 else "-"
        for r in range(order + 1):
            coeff = rtt.hc_project(series.at(r))
            out.write(f"B{fam}[{r}] {coeff.render()}\n")


# -- entry point -------------------------------------------------------------


def make_parser():
    p = argparse.ArgumentParser(
        prog="qberez",
        description="exact verification of super R-matrix and Berezinian identities",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--order", type=int, default=6, help="series truncation order")
        sp.add_argument("--k-cap", dest="kcap", type=int, default=3)
        sp.add_argument("--sym-cap", dest="symcap", type=int, default=4)
        sp.add_argument(
            "--seed",
            type=int,
            default=int(os.environ.get("QBEREZ_SEED", "0")),
        )
        sp.add_argument("--points", type=int, default=3)
        sp.add_argument("--mode", choices=("symbolic", "points", "auto"), default="auto")
        sp.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--a", default="2", help="evaluation parameter (integer, p/q, or symbol)")
        sp.add_argument("--rep", choices=("eval", "tensor"), default="eval")

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("suite", choices=SUITES)
    common(pv)
    pc = sub.add_parser("compute", help="print symbolic objects")
    pc.add_argument("object", choices=("berezinian", "zeta", "hc-image"))
    common(pc)
    return p


def make_config(args):
    if args.m + args.n < 1 or args.m < 0 or args.n < 0:
        raise SystemExit(2)
    return SuiteConfig(
        m=args.m,
        n=args.n,
        order=args.order,
        kcap=args.kcap,
        symcap=args.symcap,
        seed=args.seed,
        points=args.points,
        mode=args.mode,
        fmt=args.fmt,
        jobs=args.jobs,
        a=args.a,
        rep=args.rep,
    )


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.m + args.n < 1 or args.m < 0 or args.n < 0:
        parser.error("need M >= 0, N >= 0 and M + N >= 1")
    cfg = make_config(args)
    try:
        if args.command == "verify":
            report = run_suite(args.suite, cfg)
            emit_report(report, cfg.fmt, out)
            return 0 if report["summary"]["fail"] == 0 else 1
        if args.object == "berezinian":
            compute_berezinian(cfg, out)
        elif args.object == "zeta":
            compute_zeta(cfg, out)
        else:
            compute_hc_image(cfg, out)
        return 0
    except (ScalarError, ArithmeticError, RepConstructionError) as e:
        print(f"internal arithmetic error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
