"""Command-line front end: generation, rank computation, certification,
witness oracles, spanoid checks, and CSV experiment sweeps.

Exit codes: 0 on success, 1 on a violated verification, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import engine, families, gf, spanoid, stencil, tensor
from .families import Family, FamilyParams
from .stencil import Stencil

CSV_COLUMNS = [
    "family",
    "n",
    "param",
    "delta",
    "seed",
    "trial",
    "vrk_lb",
    "vrk_ub",
    "exact",
    "tensor_cert",
    "minrank_p",
    "minrank_val",
    "ms",
]


@dataclass
class ExperimentSpec:
    """A sweep over family parameters with per-point trial counts."""

    family: Family
    n_values: list[int]
    param_values: list[int]
    delta: float | None = None
    trials: int = 1
    seed: int = 0
    budget_ms: int = 5000
    field_p: int | None = None
    csv_path: str | None = None

    def __post_init__(self) -> None:
        if not self.n_values or not self.param_values:
            raise ValueError("empty sweep")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    @staticmethod
    def from_json(doc: dict) -> "ExperimentSpec":
        return ExperimentSpec(
            family=Family(doc["family"]),
            n_values=[int(x) for x in doc["n"]],
            param_values=[int(x) for x in doc["param"]],
            delta=doc.get("delta"),
            trials=int(doc.get("trials", 1)),
            seed=int(doc.get("seed", 0)),
            budget_ms=int(doc.get("budget_ms", 5000)),
            field_p=doc.get("field"),
            csv_path=doc.get("csv"),
        )


def _trial_seed(base: int, point: int, trial: int) -> int:
    return int(np.random.SeedSequence([base, point, trial]).generate_state(1)[0])


def run_experiment(spec: ExperimentSpec) -> list[dict]:
    """One CSV row per (sweep point, trial), in deterministic order.

    Infeasible parameter combinations are reported in the row and the run
    continues.
    """
    rows: list[dict] = []
    point = 0
    for n in spec.n_values:
        for param in spec.param_values:
            for trial in range(spec.trials):
                seed = _trial_seed(spec.seed, point, trial)
                row = {c: "" for c in CSV_COLUMNS}
                row.update(
                    family=spec.family.value,
                    n=n,
                    param=param,
                    delta="" if spec.delta is None else spec.delta,
                    seed=seed,
                    trial=trial,
                )
                t0 = time.monotonic()
                try:
                    params = FamilyParams(
                        spec.family, n, param, delta=spec.delta, seed=seed
                    )
                    H = families.generate(params)
                except families.FamilyParamError as exc:
                    row["vrk_lb"] = f"error: {exc}"
                    rows.append(row)
                    continue
                res = engine.visible_rank_exact(
                    H, time_budget=spec.budget_ms / 1000.0
                )
                row["vrk_lb"] = res.lower_bound
                row["vrk_ub"] = res.upper_bound
                row["exact"] = str(res.exact).lower()
                if spec.family in (Family.DRGP, Family.TENSOR_GAP):
                    _, identity = tensor.diagonal_tensor_certificate(H, param)
                    row["tensor_cert"] = str(identity).lower()
                if spec.field_p is not None:
                    p = spec.field_p
                    n_stars = H.star_count()
                    if (p - 1) ** n_stars <= 100_000:
                        mres = gf.minrank_bruteforce(H, p)
                        row["minrank_p"] = p
                        row["minrank_val"] = mres.value
                row["ms"] = round((time.monotonic() - t0) * 1000, 1)
                rows.append(row)
            point += 1
    if spec.csv_path:
        with open(spec.csv_path, "w", newline="", encoding="ascii") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)
    return rows


# ---------------------------------------------------------------------------
# Subcommands


def _family_params_from_args(args) -> FamilyParams:
    fam = Family(args.family)
    if fam is Family.LRC:
        if args.ell is None:
            raise SystemExit(_usage_error("lrc requires --ell"))
        param = args.ell
    elif fam is Family.LCC:
        if args.q is None:
            raise SystemExit(_usage_error("lcc requires --q"))
        param = args.q
    else:
        if args.t is None:
            raise SystemExit(_usage_error(f"{fam.value} requires --t"))
        param = args.t
    return FamilyParams(fam, args.n, param, delta=args.delta, seed=args.seed)


def _usage_error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _load(path: str) -> Stencil:
    return stencil.read_stencil(path)


def cmd_gen(args) -> int:
    try:
        params = _family_params_from_args(args)
        H = families.generate(params)
    except families.FamilyParamError as exc:
        return _usage_error(str(exc))
    report = families.validate_family(H, params)
    if not report:
        print(str(report), file=sys.stderr)
        return 1
    meta = {"family": params.family.value, "n": params.n, "param": params.param,
            "seed": params.seed}
    if args.output:
        stencil.write_stencil(H, args.output)
        print(json.dumps({"written": args.output, **meta}))
    else:
        sys.stdout.write(stencil.to_grid(H))
    return 0


def cmd_vrank(args) -> int:
    H = _load(args.file)
    res = engine.visible_rank_exact(H, time_budget=args.budget_ms / 1000.0)
    print(res.to_json_str())
    return 0


def cmd_tensor(args) -> int:
    H = _load(args.file)
    if args.output:
        Hk = tensor.tensor_power(H, args.power)
        stencil.write_stencil(Hk, args.output)
        print(json.dumps({"written": args.output, "rows": Hk.m, "cols": Hk.n}))
        return 0
    est = tensor.capacity_lower_bound(
        H, args.power, time_budget=args.budget_ms / 1000.0
    )
    print(json.dumps(est.to_json()))
    return 0


def cmd_certify(args) -> int:
    H = _load(args.file)
    sub, identity = tensor.diagonal_tensor_certificate(H, args.power)
    print(
        json.dumps(
            {
                "power": args.power,
                "identity": identity,
                "certified_vrk_power_lower_bound": H.n if identity else None,
            }
        )
    )
    return 0 if identity else 1


def cmd_minrank(args) -> int:
    H = _load(args.file)
    res = gf.minrank_bruteforce(H, args.field, budget=args.budget)
    print(
        json.dumps(
            {
                "p": res.p,
                "minrank": res.value,
                "exhaustive": res.exhaustive,
                "witness": res.witness.to_json(),
            }
        )
    )
    return 0


def cmd_witness(args) -> int:
    H = _load(args.file)
    if args.construct != "low-rank":
        return _usage_error(f"unknown construction {args.construct!r}")
    W = gf.low_rank_witness(H, args.field)
    ok, _ = gf.validate_witness(W)
    d = max((((1 << H.n) - 1) & ~mask).bit_count() for mask in H.rows) if H.m else 0
    print(json.dumps({**W.to_json(), "rank": gf.gf_rank(W), "max_row_zeros": d}))
    return 0 if ok else 1


def cmd_spanoid(args) -> int:
    with open(args.file, "r", encoding="ascii") as fh:
        S = spanoid.SymmetricSpanoid.from_json_str(fh.read())
    if args.action == "rank":
        res = spanoid.spanoid_rank(S)
        print(
            json.dumps(
                {
                    "rank": res.value,
                    "basis": sorted(res.basis),
                    "exhaustive": res.exhaustive,
                }
            )
        )
        return 0
    report = spanoid.rank_nullity_check(S, check_columns=args.columns)
    print(json.dumps(report.to_json()))
    ok = report.identity_holds and report.column_equivalence_holds in (None, True)
    return 0 if ok else 1


def cmd_verify(args) -> int:
    H = _load(args.file)
    if args.certificate:
        with open(args.certificate, "r", encoding="ascii") as fh:
            doc = json.load(fh)
        cert = engine.DiagonalCertificate.from_json(
            doc["certificate"] if "certificate" in doc else doc
        )
        ok = cert.verify(H)
        print(json.dumps({"certificate_valid": ok, "size": cert.size}))
        return 0 if ok else 1
    if args.family:
        try:
            params = _family_params_from_args(args)
        except families.FamilyParamError as exc:
            return _usage_error(str(exc))
        report = families.validate_family(H, params)
        print(json.dumps({"valid": bool(report), "detail": str(report)}))
        return 0 if report else 1
    return _usage_error("verify needs --certificate or --family")


def cmd_experiment(args) -> int:
    if args.spec:
        with open(args.spec, "r", encoding="ascii") as fh:
            spec = ExperimentSpec.from_json(json.load(fh))
        if args.csv:
            spec.csv_path = args.csv
    else:
        if not args.family or not args.n:
            return _usage_error("experiment needs --spec or --family/--n")
        fam = Family(args.family)
        if fam is Family.LRC:
            param_values = args.ell
        elif fam is Family.LCC:
            param_values = args.q
        else:
            param_values = args.t
        if not param_values:
            return _usage_error(f"experiment over {fam.value} needs its parameter list")
        try:
            spec = ExperimentSpec(
                family=fam,
                n_values=args.n,
                param_values=param_values,
                delta=args.delta,
                trials=args.trials,
                seed=args.seed,
                budget_ms=args.budget_ms,
                field_p=args.field,
                csv_path=args.csv,
            )
        except ValueError as exc:
            return _usage_error(str(exc))
    rows = run_experiment(spec)
    if not spec.csv_path:
        writer = csv.DictWriter(sys.stdout, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    else:
        print(json.dumps({"rows": len(rows), "csv": spec.csv_path}))
    return 0


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vrank", description="Visible rank toolkit for 0/star stencils."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_family_flags(p, list_valued=False):
        conv = _int_list if list_valued else int
        p.add_argument("--family", choices=[f.value for f in Family])
        p.add_argument("--n", type=conv)
        p.add_argument("--ell", type=conv)
        p.add_argument("--q", type=conv)
        p.add_argument("--t", type=conv)
        p.add_argument("--delta", type=float)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gen", help="generate a family stencil")
    add_family_flags(p)
    p.add_argument("-o", "--output", help="output .stn or .json path")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("vrank", help="visible rank of a stencil file")
    p.add_argument("file")
    p.add_argument("--budget-ms", type=int, default=10_000)
    p.set_defaults(func=cmd_vrank)

    p = sub.add_parser("tensor", help="tensor powers: materialize or bound")
    p.add_argument("file")
    p.add_argument("--power", type=int, required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--budget-ms", type=int, default=10_000)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("certify", help="implicit diagonal tensor certificate")
    p.add_argument("file")
    p.add_argument("--power", type=int, required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("minrank", help="brute-force min-rank over GF(p)")
    p.add_argument("file")
    p.add_argument("--field", type=int, required=True)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.set_defaults(func=cmd_minrank)

    p = sub.add_parser("witness", help="construct an explicit witness")
    p.add_argument("file")
    p.add_argument("--field", type=int, required=True)
    p.add_argument("--construct", default="low-rank")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("spanoid", help="symmetric spanoid rank / checks")
    p.add_argument("action", choices=["rank", "check"])
    p.add_argument("file")
    p.add_argument("--columns", action="store_true", help="check column equivalence")
    p.set_defaults(func=cmd_spanoid)

    p = sub.add_parser("verify", help="verify a certificate or family membership")
    p.add_argument("file")
    p.add_argument("--certificate")
    add_family_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="run a sweep, emit CSV")
    p.add_argument("--spec", help="JSON experiment spec file")
    add_family_flags(p, list_valued=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--budget-ms", type=int, default=5000)
    p.add_argument("--field", type=int)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (stencil.StencilError, gf.FieldError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
