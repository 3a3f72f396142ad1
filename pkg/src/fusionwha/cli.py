"""Command-line front end: ``fusionwha <command> --r R [options]``.

Every command prints a text report (or JSON with ``--format json``) and
exits 0 exactly when all certificates it computed pass.  Output files land
in ``$FUSIONWHA_OUT_DIR`` when that variable is set and ``--out`` is a
relative path.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from dataclasses import dataclass
from math import gcd
from pathlib import Path as FsPath
from typing import Callable

from .cyclo import CycloNumber
from .graph import DimensionGraph, graph_from_pairs, sl2_dimension_graph
from .path_wba import PathWba

OUT_DIR_ENV = "FUSIONWHA_OUT_DIR"
COMMANDS = ("graph", "rmatrix", "check", "quotient", "grouplike", "assemble", "export")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    r: int
    command: str
    root_exponent: int = 1
    max_degree: int | None = None
    format: str = "text"
    out: str | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.r < 3:
            raise ConfigError(f"level r must be at least 3, got {self.r}")
        if gcd(self.root_exponent, 4 * self.r) != 1:
            raise ConfigError(f"root exponent {self.root_exponent} is not coprime to {4 * self.r}")
        if self.max_degree is None:
            self.max_degree = 2 * (self.r - 2) + 2
        if self.max_degree < 0:
            raise ConfigError("max degree must be nonnegative")
        if self.format not in ("text", "json"):
            raise ConfigError(f"unknown format {self.format!r}")

    def out_path(self) -> FsPath | None:
        if self.out is None:
            return None
        p = FsPath(self.out)
        base = os.environ.get(OUT_DIR_ENV)
        if base and not p.is_absolute():
            p = FsPath(base) / p
        return p


@dataclass
class Outcome:
    ok: bool
    data: dict
    text: list[str]


def fmt_number(c) -> str:
    """Exact coefficient vector followed by a 30-digit decimal value."""
    if not isinstance(c, CycloNumber):
        return str(c)
    coeffs = ",".join(str(x) for x in c.coefficients())
    return f"[{coeffs}] ~ {c.to_decimal(30)}"


def _r_matrix(cfg: RunConfig, closed: bool = False):
    from .temperley_lieb import closed_form_r, derive_r_matrix

    return closed_form_r(cfg.r, cfg.root_exponent) if closed else derive_r_matrix(cfg.r, cfg.root_exponent)


def _quotient(cfg: RunConfig, R=None):
    from .frt_quotient import frt_quotient

    R = R or _r_matrix(cfg)
    return frt_quotient(sl2_dimension_graph(cfg.r), R), R


# -- commands ----------------------------------------------------------


def cmd_graph(cfg: RunConfig, args) -> Outcome:
    g = sl2_dimension_graph(cfg.r)
    data = g.to_json()
    text = [f"dimension graph at r={cfg.r}: {g.num_vertices} vertices, {len(g.edges)} edges"]
    text += [f"  edge {e.id}: {e.source} -> {e.target}" for e in g.edges]
    return Outcome(True, data, text)


def cmd_rmatrix(cfg: RunConfig, args) -> Outcome:
    from .temperley_lieb import compare_r_matrices

    mode = args.mode or "compare"
    if mode in ("derive", "closed-form"):
        R = _r_matrix(cfg, closed=mode == "closed-form")
        text = [f"{mode} R-matrix at r={cfg.r}: {len(R.nonzero())} nonzero entries"]
        text += [f"  R[{p};{q}] = {fmt_number(c)}" for (p, q), c in sorted(R.nonzero().items())]
        return Outcome(True, R.to_json(), text)
    derived, closed = _r_matrix(cfg), _r_matrix(cfg, closed=True)
    cmp = compare_r_matrices(derived, closed)
    data = {
        "r": cfg.r,
        "equal": cmp.equal,
        "scalar": cmp.scalar.to_json() if cmp.scalar is not None else None,
        "mismatches": [[list(p.vertices), list(q.vertices)] for p, q in cmp.mismatches],
    }
    if cmp.equal:
        text = ["EXACT MATCH"]
    else:
        text = [f"MISMATCH at {len(cmp.mismatches)} entries"]
        if cmp.scalar is not None:
            text.append(f"  derived = scalar * closed form, scalar = {fmt_number(cmp.scalar)}")
        text += [f"  R[{p};{q}]" for p, q in cmp.mismatches[:10]]
    return Outcome(cmp.equal, data, text)


def random_digraph(n: int, seed: int) -> DimensionGraph:
    rng = random.Random(seed)
    pairs = [(s, t) for s in range(n) for t in range(n) if rng.random() < 0.5]
    return graph_from_pairs(n, pairs)


def perturbed(R):
    """R with its first nonzero entry increased by one."""
    from .temperley_lieb import RMatrix

    entries = dict(R.entries)
    k = min(R.nonzero())
    entries[k] = entries[k] + 1
    return RMatrix(R.r, R.field, R.graph, entries), k


def cmd_check(cfg: RunConfig, args) -> Outcome:
    which = args.which
    if args.perturb and which != "ybe":
        raise ConfigError("--perturb only applies to the ybe check")
    if which == "wba-axioms":
        from .axioms import check_wba_axioms

        if cfg.seed is not None:
            g = random_digraph(3, cfg.seed)
            desc = f"random 3-vertex digraph (seed {cfg.seed}, edges {[(e.source, e.target) for e in g.edges]})"
            cap = min(cfg.max_degree, 3) if args.max_degree is None else cfg.max_degree
        else:
            g = sl2_dimension_graph(cfg.r)
            desc = f"sl2 dimension graph r={cfg.r}"
            cap = 4 if args.max_degree is None else cfg.max_degree
        alg = PathWba(g)
        rep = check_wba_axioms(alg, alg.basis_up_to(cap), cap)
        text = [f"weak bialgebra axioms on {desc}, degree cap {cap}", rep.summary()]
        data = {
            "passed": rep.passed,
            "checked": rep.checked,
            "failures": [{"identity": f.identity, "witness": f.witness} for f in rep.failures],
        }
        return Outcome(rep.passed, data, text)
    if which == "ybe":
        from .frt_quotient import check_star_triangular

        R = _r_matrix(cfg)
        note = ""
        if args.perturb:
            R, k = perturbed(R)
            note = f" (entry R[{k[0]};{k[1]}] perturbed by +1)"
        rep = check_star_triangular(R)
        text = [f"star-triangularity R1R2R1 = R2R1R2 at r={cfg.r}{note}: {'pass' if rep.holds else 'FAIL'}"]
        witnesses = sorted(rep.residual)[:5]
        text += [f"  witness triple {q} -> {p}: residual {fmt_number(rep.residual[(p, q)])}" for p, q in witnesses]
        data = {"passed": rep.holds, "witnesses": [[list(p.vertices), list(q.vertices)] for p, q in witnesses]}
        return Outcome(rep.holds, data, text)
    if which == "coideal":
        from .frt_quotient import coideal_residuals

        Q, _ = _quotient(cfg)
        res = coideal_residuals(Q)
        ok = not res
        text = [f"coideal check at r={cfg.r}: {len(Q.relations.generators)} generators, "
                f"{len(res)} with nonzero residual: {'pass' if ok else 'FAIL'}"]
        return Outcome(ok, {"passed": ok, "generators": len(Q.relations.generators), "failures": len(res)}, text)
    if which == "rform":
        from .frt_quotient import check_r_form

        Q, R = _quotient(cfg)
        cap = 2 if args.max_degree is None else cfg.max_degree
        rep = check_r_form(Q, R, cap)
        counts = {
            "exchange": len(rep.exchange_failures),
            "weak_inverse": len(rep.inverse_failures),
            "counit": len(rep.counit_failures),
            "vanishing": len(rep.vanishing_failures),
        }
        text = [f"r-form laws at r={cfg.r} on {rep.checked_pairs} basis pairs up to degree {cap}: "
                f"{'pass' if rep.passed else 'FAIL'}"]
        text += [f"  {k} failures: {v}" for k, v in counts.items()]
        return Outcome(rep.passed, {"passed": rep.passed, "pairs": rep.checked_pairs, "failures": counts}, text)
    raise ConfigError(f"unknown check {which!r}")


def quotient_rows(cfg: RunConfig) -> list[dict]:
    from .wha_assembly import fusion_oracle

    Q, _ = _quotient(cfg)
    oracle = fusion_oracle(cfg.r)
    rows = []
    for m in range(cfg.max_degree + 1):
        mm, ambient, rank, dim = Q.degree(m).row()
        pred = oracle.predicted_degree_dimension(m)
        rows.append({"m": mm, "ambient": ambient, "ideal_rank": rank, "dimension": dim,
                     "prediction": pred, "match": dim == pred})
    return rows


def cmd_quotient(cfg: RunConfig, args) -> Outcome:
    rows = quotient_rows(cfg)
    ok = all(row["match"] for row in rows)
    text = [f"FRT quotient at r={cfg.r}", f"{'m':>3} {'ambient':>8} {'ideal':>6} {'dim':>5} {'fusion':>6}  match"]
    text += [f"{x['m']:>3} {x['ambient']:>8} {x['ideal_rank']:>6} {x['dimension']:>5} {x['prediction']:>6}  "
             f"{'yes' if x['match'] else 'NO'}" for x in rows]
    return Outcome(ok, {"r": cfg.r, "rows": rows}, text)


def _certificate_lines(cert) -> list[str]:
    sizes = cert.residual_sizes()
    return [f"  residual {k}: {v} nonzero coordinates" for k, v in sizes.items()]


def cmd_grouplike(cfg: RunConfig, args) -> Outcome:
    from .serialize import terms_to_json
    from .wha_assembly import grouplike_g2, grouplike_solve, verify_grouplike

    Q, R = _quotient(cfg)
    alg = Q.algebra
    if args.solve:
        m = 2 if args.degree is None else args.degree
        sol = grouplike_solve(Q, m, R, seed=cfg.seed or 0)
        certs = [verify_grouplike(h, Q) for h in sol.normalized or []]
        ok = all(c.valid for c in certs)
        ref = Q.reduce_terms(grouplike_g2(cfg.r, alg, cfg.root_exponent, args.weights).terms)
        text = [f"degree-{m} group-likes at r={cfg.r}: {len(sol.families)} torus families, "
                f"{len(sol.normalized or [])} r-form normalized"]
        for i, h in enumerate(sol.normalized or []):
            same = h == ref if m == 2 else None
            text.append(f"  solution {i}: {len(h)} terms, valid={certs[i].valid}, central={certs[i].central}"
                        + (f", equals {args.weights} g2: {same}" if same is not None else ""))
        text += [f"  note: {n}" for n in sol.notes]
        data = {
            "r": cfg.r,
            "degree": m,
            "families": len(sol.families),
            "solutions": [terms_to_json(alg, h) for h in sol.normalized or []],
            "valid": [c.valid for c in certs],
            "notes": sol.notes,
        }
        return Outcome(ok, data, text)
    g = grouplike_g2(cfg.r, alg, cfg.root_exponent, args.weights)
    if args.degree not in (None, 2):
        k, odd = divmod(args.degree, 2)
        if odd:
            raise ConfigError("closed-form group-likes live in even degrees")
        power = alg.unit()
        for _ in range(k):
            power = power * g
        g = power
    cert = verify_grouplike(g, Q)
    ok = cert.valid and cert.central and cert.x_fixed_ok
    text = [f"{args.weights} group-like of degree {cert.degree} at r={cfg.r}: "
            f"valid={cert.valid}, central={cert.central}, loop-fixed={cert.x_fixed_ok}"]
    text += _certificate_lines(cert)
    data = {"r": cfg.r, "degree": cert.degree, "weights": args.weights, "passed": ok,
            "residuals": cert.residual_sizes(), "element": terms_to_json(alg, cert.element.terms)}
    return Outcome(ok, data, text)


def assemble(cfg: RunConfig, grouplike: str = "normalized"):
    from .wha_assembly import AntipodeError, assemble_wha, solve_antipode

    h = assemble_wha(cfg.r, cfg.max_degree, grouplike, cfg.root_exponent)
    try:
        solve_antipode(h)
    except AntipodeError:
        pass
    return h


def _assembly_ok(h) -> bool:
    rep = h.antipode_report or {}
    axioms = all(rep.get(k) == 0 for k in ("axiom_id_S", "axiom_S_id", "axiom_S_id_S"))
    return bool(h.axioms and h.axioms.passed and not h.representative_failures and rep.get("unique") and axioms)


def cmd_assemble(cfg: RunConfig, args) -> Outcome:
    from .serialize import assembled_to_json

    h = assemble(cfg, args.grouplike)
    rep = h.antipode_report or {}
    ok = _assembly_ok(h)
    text = [
        f"assembled weak Hopf algebra at r={cfg.r} ({args.grouplike} group-like)",
        f"  dimension {h.dimension} (even {h.even_dimension} + odd {h.odd_dimension})",
        f"  stabilization degree {h.stabilization_degree} below cap {cfg.max_degree}",
        f"  representative failures: {len(h.representative_failures)}",
        f"  weak bialgebra axioms: {'pass' if h.axioms and h.axioms.passed else 'FAIL'}",
        f"  antipode: exists={rep.get('exists')}, unique={rep.get('unique')}",
    ]
    for k in ("axiom_id_S", "axiom_S_id", "axiom_S_id_S", "anti_multiplicative_failures",
              "anti_comultiplicative_failures", "unit_fixed"):
        if k in rep:
            text.append(f"    {k}: {rep[k]}")
    return Outcome(ok, assembled_to_json(h), text)


def cmd_export(cfg: RunConfig, args) -> Outcome:
    """Write every JSON report for this level into a directory."""
    from .serialize import dumps

    target = cfg.out_path() or FsPath(os.environ.get(OUT_DIR_ENV, ".")) / f"fusionwha-r{cfg.r}"
    target.mkdir(parents=True, exist_ok=True)
    ok = True
    written = []
    jobs: list[tuple[str, Callable[[], Outcome]]] = [
        ("graph", lambda: cmd_graph(cfg, args)),
        ("rmatrix", lambda: cmd_rmatrix(cfg, argparse.Namespace(mode="derive"))),
        ("quotient", lambda: cmd_quotient(cfg, args)),
        ("grouplike", lambda: cmd_grouplike(cfg, argparse.Namespace(solve=True, degree=2, weights="normalized"))),
        ("assembled", lambda: cmd_assemble(cfg, argparse.Namespace(grouplike="normalized"))),
    ]
    for name, job in jobs:
        res = job()
        ok = ok and res.ok
        path = target / f"{name}.json"
        path.write_text(dumps(res.data))
        written.append(str(path))
    return Outcome(ok, {"directory": str(target), "files": written}, [f"wrote {p}" for p in written])


HANDLERS = {
    "graph": cmd_graph,
    "rmatrix": cmd_rmatrix,
    "check": cmd_check,
    "quotient": cmd_quotient,
    "grouplike": cmd_grouplike,
    "assemble": cmd_assemble,
    "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r", type=int, required=True, help="level (r >= 3)")
    common.add_argument("--root-exponent", type=int, default=1, help="A = exp(2 pi i k / 4r) with this k")
    common.add_argument("--max-degree", type=int, default=None)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=None)

    parser = argparse.ArgumentParser(prog="fusionwha", description="Exact weak Hopf algebra reconstruction for sl2 at level r.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("graph", parents=[common], help="dimension graph")
    p = sub.add_parser("rmatrix", parents=[common], help="R-matrix by derivation or closed form")
    g = p.add_mutually_exclusive_group()
    for flag in ("derive", "closed-form", "compare"):
        g.add_argument(f"--{flag}", dest="mode", action="store_const", const=flag)
    p = sub.add_parser("check", parents=[common], help="axiom and identity checks")
    p.add_argument("which", choices=("wba-axioms", "ybe", "coideal", "rform"))
    p.add_argument("--perturb", action="store_true", help="add 1 to one R-matrix entry first")
    sub.add_parser("quotient", parents=[common], help="per-degree quotient dimensions")
    p = sub.add_parser("grouplike", parents=[common], help="group-like certificates")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--solve", action="store_true")
    p.add_argument("--verify-closed-form", action="store_true", help="certify the closed-form element (default)")
    p.add_argument("--weights", choices=("closed-form", "normalized"), default="closed-form")
    p = sub.add_parser("assemble", parents=[common], help="stabilized quotient and its antipode")
    p.add_argument("--grouplike", choices=("normalized", "closed-form"), default="normalized")
    p = sub.add_parser("export", parents=[common], help="write all JSON reports to a directory")
    return parser


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.r, args.command, args.root_exponent, args.max_degree, args.format, args.out, args.seed)
        res = HANDLERS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.command == "export":
        body = "\n".join(res.text) + "\n"
    elif cfg.format == "json":
        from .serialize import dumps

        body = dumps(res.data)
    else:
        body = "\n".join(res.text) + "\n"
    dest = cfg.out_path() if args.command != "export" else None
    if dest is not None:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(body)
    else:
        stdout.write(body)
    return 0 if res.ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
