"""Command line interface: ``higher-ar <command> ...``.

Subcommands: check, classify, preproj, preinj, preproj-algebra, tensor,
apr-tilt, atilde.

Exit codes: 0 success, 1 parse or admissibility error, 2 not n-hereditary
(or a construction precondition failed), 3 global dimension exceeds n,
4 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from .atilde import (
    DimensionTooLarge,
    InvalidRestrictedCut,
    NotBounding,
    RestrictedCut,
    SubgroupBasis,
    cut_from_json,
    cut_from_omega,
    cut_to_json,
    degree_zero_algebra,
    idempotent_quotient_check,
    is_bounding,
    restricted_cut_extend,
    to_dot,
    validate_cut,
)
from .classify import (
    GLDIM_EXCEEDED,
    NOT_HEREDITARY,
    BudgetExceeded,
    StoppedEarly,
    classify,
    preinjective_family,
    preprojective_family,
)
from .constructions import PreconditionFailed, n_apr_tilt, preprojective_algebra_dims, tensor_product
from .homological import CapExceeded
from .quiver_core import (
    DEFAULT_LENGTH_CAP,
    PresentationError,
    cartan_matrix,
    compute_basis,
    format_algebra,
    load_algebra,
)

EXIT_OK, EXIT_PARSE, EXIT_NOT_HEREDITARY, EXIT_GLDIM, EXIT_BUDGET = 0, 1, 2, 3, 4


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _matrix_lines(rows) -> list[str]:
    return ["  [" + ", ".join(str(x) for x in row) + "]" for row in rows]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    p = load_algebra(args.file)
    b = compute_basis(p, args.length_cap)
    C = cartan_matrix(b)
    rows = [[int(C[i, j]) for j in range(C.cols)] for i in range(C.rows)]
    if args.json:
        print(json.dumps({"algebra": p.name, "vertices": list(p.quiver.vertices),
                          "arrows": len(p.quiver.arrows), "relations": len(p.relations),
                          "dim": b.total_dim, "cartan": rows}))
        return EXIT_OK
    print(f"algebra {p.name}")
    print(f"vertices {len(p.quiver.vertices)}, arrows {len(p.quiver.arrows)}, "
          f"relations {len(p.relations)}")
    print(f"dim {b.total_dim}")
    print("cartan")
    print("\n".join(_matrix_lines(rows)))
    return EXIT_OK


def _classify_file(path: str, n: int, depth: int, length_cap: int, budget: int | None):
    b = compute_basis(load_algebra(path), length_cap)
    return classify(b, n, depth, budget).to_dict()


def _verdict_text(v: dict) -> str:
    lines = [f"algebra {v['algebra']}: {v['overall']} (n={v['n']}, depth={v['depth']})"]
    for t in v["trajectories"]:
        o = t["outcome"]
        detail = ", ".join(f"{k}={val}" for k, val in o.items() if k != "kind")
        dims = " ".join("(" + ",".join(map(str, d)) + ")" for d in t["dim_vectors"])
        lines.append(f"  vertex {t['vertex']}: {o['kind']} {detail}  {dims}")
    if "witness" in v:
        lines.append(f"  witness {json.dumps(v['witness'], sort_keys=True)}")
    return "\n".join(lines)


def cmd_classify(args) -> int:
    files = args.files
    jobs = max(1, args.jobs)
    work = [(f, args.n, args.depth, args.length_cap, args.budget) for f in files]
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_classify_file, *zip(*work)))
    else:
        results = [_classify_file(*w) for w in work]
    if args.json:
        out = results[0] if len(results) == 1 else results
        print(json.dumps(out))
    else:
        print("\n".join(_verdict_text(v) for v in results))
    code = EXIT_OK
    for v in results:
        if v["overall"] == GLDIM_EXCEEDED:
            code = max(code, EXIT_GLDIM)
        elif v["overall"] == NOT_HEREDITARY:
            code = max(code, EXIT_NOT_HEREDITARY)
    return code


def _family_command(args, family) -> int:
    b = compute_basis(load_algebra(args.file), args.length_cap)
    fam = family(b, args.n, args.depth)
    names = b.quiver.vertices
    if args.json:
        print(json.dumps([{"step": i, "vertex": names[v], "dims": list(m.dims),
                           "module": m.to_dict()} for i, v, m in fam]))
        return EXIT_OK
    for i, v, m in fam:
        print(f"{i}\t{names[v]}\t(" + ",".join(map(str, m.dims)) + ")")
    return EXIT_OK


def cmd_preproj(args) -> int:
    return _family_command(args, preprojective_family)


def cmd_preinj(args) -> int:
    return _family_command(args, preinjective_family)


def cmd_preproj_algebra(args) -> int:
    b = compute_basis(load_algebra(args.file), args.length_cap)
    g = preprojective_algebra_dims(b, args.n, args.maxdeg)
    if args.json:
        print(json.dumps({"algebra": b.presentation.name, "n": args.n, "tables": g.tables,
                          "totals": [g.total(i) for i in range(len(g.tables))],
                          "new_arrows": g.new_arrows}))
        return EXIT_OK
    for i, table in enumerate(g.tables):
        print(f"degree {i}: total {g.total(i)}")
        print("\n".join(_matrix_lines(table)))
    print("degree 1 generators")
    print("\n".join(_matrix_lines(g.new_arrows)))
    return EXIT_OK


def cmd_tensor(args) -> int:
    a = load_algebra(args.file_a)
    b = load_algebra(args.file_b)
    sys.stdout.write(format_algebra(tensor_product(a, b)))
    return EXIT_OK


def cmd_apr_tilt(args) -> int:
    p = load_algebra(args.file)
    b = compute_basis(p, args.length_cap)
    _, data, pres = n_apr_tilt(b, args.n, args.vertex)
    sys.stdout.write(format_algebra(pres))
    print(f"hom dimensions {data.hom_dims}; total {data.dim}", file=sys.stderr)
    return EXIT_OK


def cmd_atilde(args) -> int:
    n = args.n
    budget = args.budget
    name = None
    rc = None
    if args.extend_restricted:
        with open(args.extend_restricted) as fh:
            rc = RestrictedCut.from_json(fh.read())
        n = rc.n
        q = restricted_cut_extend(rc, budget) if budget else restricted_cut_extend(rc)
    else:
        if not args.cut:
            _err("atilde needs --cut or --extend-restricted")
            return EXIT_PARSE
        B = SubgroupBasis.parse(n, args.subgroup)
        if args.cut.startswith("omega:"):
            k = int(args.cut.split(":", 1)[1])
            q = cut_from_omega(n, B, k)
            if args.subgroup.strip() == "ker-omega":
                name = f"beilinson{n}"
        else:
            with open(args.cut) as fh:
                q = cut_from_json(fh.read(), n, B)
    check = validate_cut(q, budget) if budget else validate_cut(q)
    bounding, longest = is_bounding(q)
    report = {"n": n, "vertices": q.n_vertices, "cut_size": len(q.cut), "valid": check.valid,
              "bounding": bounding, "longest_path": longest}
    if not check.valid:
        c, order, hits = check.witness
        report["witness"] = {"coset": c, "order": list(order), "cut_arrows": hits}
    if rc is not None:
        report["idempotent_quotient"] = idempotent_quotient_check(q, rc)
    text = None
    if check.valid and bounding:
        text = format_algebra(degree_zero_algebra(q, name))
    if args.json:
        report["cut"] = json.loads(cut_to_json(q))["cut"]
        report["presentation"] = text
        print(json.dumps(report))
    elif args.dot:
        sys.stdout.write(to_dot(q))
    elif text is not None:
        sys.stdout.write(text)
    for key in ("valid", "bounding", "longest_path", "idempotent_quotient"):
        if key in report:
            print(f"{key}: {report[key]}", file=sys.stderr)
    if not check.valid or not bounding:
        return EXIT_NOT_HEREDITARY
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="higher-ar",
                                     description="Exact computations in higher Auslander-Reiten theory.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default=None, depth=True):
        p.add_argument("--n", type=int, default=n_default, required=n_default is None)
        if depth:
            p.add_argument("--depth", type=int, default=5)
        p.add_argument("--length-cap", type=int, default=DEFAULT_LENGTH_CAP)
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("check", help="parse, certify admissibility, print the Cartan matrix")
    p.add_argument("file")
    p.add_argument("--length-cap", type=int, default=DEFAULT_LENGTH_CAP)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("classify", help="n-representation finite / infinite / neither")
    p.add_argument("files", nargs="+")
    common(p)
    p.add_argument("--budget", type=int, default=None,
                   help="largest total dimension allowed along a trajectory")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_classify)

    for name, func in (("preproj", cmd_preproj), ("preinj", cmd_preinj)):
        p = sub.add_parser(name, help=f"dimension vectors of the {name} family")
        p.add_argument("file")
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("preproj-algebra",
                       help="graded dimensions of the (n+1)-preprojective algebra")
    p.add_argument("file")
    common(p, depth=False)
    p.add_argument("--maxdeg", type=int, default=2)
    p.set_defaults(func=cmd_preproj_algebra)

    p = sub.add_parser("tensor", help="presentation of the tensor product")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("apr-tilt", help="n-APR tilt at a simple projective vertex")
    p.add_argument("file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--vertex", required=True)
    p.add_argument("--length-cap", type=int, default=DEFAULT_LENGTH_CAP)
    p.set_defaults(func=cmd_apr_tilt)

    p = sub.add_parser("atilde", help="degree-zero algebras of type A-tilde orbit quivers")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--subgroup", default="ker-omega")
    p.add_argument("--cut", default=None, help="omega:k or a JSON cut file")
    p.add_argument("--extend-restricted", default=None, help="JSON restricted cut file")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--dot", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_atilde)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for attr in ("n", "depth"):
        val = getattr(args, attr, None)
        if val is not None and val < 1:
            _err(f"--{attr} must be at least 1")
            return EXIT_PARSE
    if getattr(args, "maxdeg", 0) < 0:
        _err("--maxdeg must be non-negative")
        return EXIT_PARSE
    try:
        return args.func(args)
    except (PresentationError, OSError, json.JSONDecodeError) as exc:
        _err(str(exc))
        return EXIT_PARSE
    except PreconditionFailed as exc:
        _err(str(exc))
        return EXIT_GLDIM if exc.condition == "GlobalDimension" else EXIT_NOT_HEREDITARY
    except StoppedEarly as exc:
        _err(str(exc))
        return EXIT_NOT_HEREDITARY
    except (BudgetExceeded, DimensionTooLarge, CapExceeded) as exc:
        _err(str(exc))
        return EXIT_BUDGET
    except (NotBounding, InvalidRestrictedCut) as exc:
        _err(str(exc))
        return EXIT_NOT_HEREDITARY
    except ValueError as exc:
        _err(str(exc))
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
