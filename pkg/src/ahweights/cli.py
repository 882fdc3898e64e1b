"""Command-line front end: JSON in, JSON out.

Exit codes: 0 pass, 1 mismatch, 2 usage or schema error, 3 precision failure.
Fixture files are looked up as given, then in $AHWEIGHTS_FIXTURES, then in
the fixtures shipped with the package.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction
from importlib import resources
from itertools import product
from pathlib import Path

from . import hecke_match
from .cohomology import CohomologyError, fixture_norm_subgroup, fixture_pipeline
from .finite_field import field_create
from .local_field import LocalFieldError, PrecisionExceeded, ah_unit
from .norm_group import NormGroupError, contains
from .padic import PadicError, PrecisionLoss, verify_ah_multiplicativity, verify_ah_scaling, teichmuller, witt_ring
from .serre_combinatorics import (
    QP_KINDS,
    BadSignature,
    CombinatoricsError,
    GaloisCharData,
    SupportClass,
    TameSignature,
    all_subsets,
    delta,
    dependent_pairs,
    filtration_dims,
    is_admissible,
    mu_candidates,
    mu_shift,
    oracle_from_name,
    qp_kind_support,
    subspace_dims,
    twist_weight,
    weight_pairs,
    weights_irreducible,
    weights_qp,
    weights_reducible,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3
FIXTURE_ENV = "AHWEIGHTS_FIXTURES"
COMMANDS = (
    "weights", "filtration", "admissible", "mu", "verify-lemmas", "class-from-norms",
    "norm-membership", "match-hecke", "replay-tables",
)
TABLES = ("qp", "eq9", "case2", "case3", "irreducible", "table1", "table3")


class SchemaError(ValueError):
    pass


class FixtureError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    p: int | None = None
    f: int | None = None
    sig: str | None = None
    unramified: str | None = None
    cls: str | None = None
    twist: int = 0
    J: str | None = None
    exponent: int | None = None
    N: int | None = None
    M: int | None = None
    fixture: str | None = None
    level: int | None = None
    element: str | None = None
    input: str | None = None
    example: str | None = None
    table: str | None = None
    update: bool = False
    output: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise SchemaError(f"unknown keys: {sorted(unknown)}")
        if data.get("command") not in COMMANDS:
            raise SchemaError(f"command must be one of {COMMANDS}")
        return cls(**data)


# ---------------------------------------------------------------------------
# helpers


def _need(cfg, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise SchemaError(f"{cfg.command} needs --{', --'.join(missing)}")


def _character(cfg) -> GaloisCharData:
    _need(cfg, "p", "sig")
    digits = tuple(int(x) for x in cfg.sig.split(","))
    f = cfg.f or len(digits)
    if len(digits) != f:
        raise SchemaError(f"signature has {len(digits)} entries, f = {f}")
    mu = field_create(cfg.p, f).parse(cfg.unramified) if cfg.unramified else None
    return GaloisCharData.of(cfg.p, digits, mu)


def _subset(text):
    if text is None or text.strip() in ("", "-", "{}"):
        return frozenset()
    return frozenset(int(x) for x in text.split(","))


def _labels(ws):
    return [w.label() for w in ws]


def _load_fixture(name: str) -> dict:
    candidates = [Path(name)]
    env = os.environ.get(FIXTURE_ENV)
    if env:
        candidates.append(Path(env) / name)
    for c in candidates:
        if c.is_file():
            return json.loads(c.read_text())
    pkg = resources.files("ahweights") / "fixtures" / name
    if pkg.is_file():
        return json.loads(pkg.read_text())
    raise FixtureError(f"fixture {name!r} not found")


def fixture_names():
    return sorted(p.name for p in (resources.files("ahweights") / "fixtures").iterdir() if p.name.endswith(".json"))


def _golden_path(table: str) -> Path:
    return Path(str(resources.files("ahweights") / "goldens" / f"{table}.json"))


# ---------------------------------------------------------------------------
# commands


def cmd_weights(cfg):
    if cfg.exponent is not None:
        _need(cfg, "p", "f")
        return EXIT_OK, {"weights": _labels(weights_irreducible(cfg.p, cfg.f, cfg.exponent))}
    chi = _character(cfg)
    one = GaloisCharData.trivial(chi.p, chi.f)
    kind = cfg.cls or "generic"
    if kind in QP_KINDS:
        oracle = SupportClass(qp_kind_support(kind, chi))
    else:
        oracle = oracle_from_name(kind, chi)
    ws = weights_reducible(chi, one, oracle)
    if cfg.twist:
        ws = sorted(twist_weight(w, chi.p, cfg.twist) for w in ws)
    return EXIT_OK, {"weights": _labels(ws)}


def cmd_filtration(cfg):
    chi = _character(cfg)
    return EXIT_OK, {"filtration": filtration_dims(chi).to_json(), "subspaces": subspace_dims(chi)}


def cmd_admissible(cfg):
    chi = _character(cfg)
    sig = chi.signature
    subsets = [sorted(J) for J in all_subsets(sig.f) if is_admissible(sig, J)]
    return EXIT_OK, {
        "dependent_pairs": sorted([list(x) for x in dependent_pairs(sig)]),
        "admissible": sorted(subsets),
    }


def cmd_mu(cfg):
    chi = _character(cfg)
    sig = chi.signature
    J = _subset(cfg.J)
    return EXIT_OK, {
        "J": sorted(J),
        "delta": [delta(sig, j) for j in range(sig.f)],
        "mu": sorted(mu_shift(sig, J)),
        "candidates": [sorted(c) for c in mu_candidates(sig, J)],
    }


def cmd_verify_lemmas(cfg):
    _need(cfg, "p")
    N, M = cfg.N or 3, cfg.M or 15
    degrees = [cfg.f] if cfg.f else [1, 2]
    report = []
    ok = True
    for m in degrees:
        F = field_create(cfg.p, m)
        elems = list(F.elements())
        mult = [verify_ah_multiplicativity(a, b, N, M, strict=False) for a, b in product(elems, repeat=2)]
        R = witt_ring(F, N)
        scal = [verify_ah_scaling(teichmuller(a, R), N, M, strict=False) for a in elems]
        passed_m = sum(w.passed for w in mult)
        passed_s = sum(w.passed for w in scal)
        ok = ok and passed_m == len(mult) and passed_s == len(scal)
        report.append({
            "field": f"F_{cfg.p}^{m}",
            "multiplicativity": {"passed": passed_m, "total": len(mult)},
            "scaling": {"passed": passed_s, "total": len(scal)},
        })
    return (EXIT_OK if ok else EXIT_MISMATCH), {"N": N, "M": M, "report": report, "all_pass": ok}


def cmd_class_from_norms(cfg):
    _need(cfg, "fixture")
    data = _load_fixture(cfg.fixture)
    if data.get("expected") == "open":
        return EXIT_OK, {"label": data.get("label"), "status": "open"}
    res = fixture_pipeline(data, cfg.N)
    return (EXIT_OK if res.passed else EXIT_MISMATCH), res.to_json()


def cmd_norm_membership(cfg):
    _need(cfg, "fixture", "level")
    data = _load_fixture(cfg.fixture)
    T, ns = fixture_norm_subgroup(data, cfg.N)
    elems = [T.l.parse(cfg.element)] if cfg.element else [a for a in T.l.elements() if not a.is_zero()]
    rows = [{"a": a.power_string(), "in_norm_group": contains(ns, ah_unit(a, cfg.level, T))} for a in elems]
    return EXIT_OK, {
        "label": data.get("label"),
        "index": ns.index,
        "level": cfg.level,
        "all": all(r["in_norm_group"] for r in rows),
        "rows": rows,
    }


def cmd_match_hecke(cfg):
    if cfg.input:
        rows = json.loads(Path(cfg.input).read_text())
        if isinstance(rows, dict):
            rows = rows.get("rows", [])
        records = [hecke_match.EigenRecord.from_json(r) for r in rows]
    else:
        records = hecke_match.table3_records(cfg.example)
    report = hecke_match.check_table(records)
    return (EXIT_OK if report.ok else EXIT_MISMATCH), report.to_json()


# -- replay -------------------------------------------------------------------


def _qp_rows():
    rows = []
    for p in (3, 5, 7):
        one = GaloisCharData.trivial(p, 1)
        Fp = field_create(p, 1)
        for a in range(1, p):
            for mu in (None, Fp(2)):
                chi = GaloisCharData.of(p, (a,), mu)
                kinds = ("peu-ramifiee", "not-peu-ramifiee", "split") if chi.is_cyclotomic else ("nonsplit", "split")
                for kind in kinds:
                    got = weights_reducible(chi, one, SupportClass(qp_kind_support(kind, chi)))
                    rows.append({
                        "p": p, "a": a, "unramified": mu is not None, "kind": kind,
                        "weights": _labels(got),
                        "table": _labels(weights_qp(p, a, kind, chi.is_cyclotomic, chi.is_trivial)),
                    })
    return rows


def _eq9_rows():
    rows = []
    for p in (3, 5):
        one = GaloisCharData.trivial(p, 2)
        for a0, a1 in product(range(1, p + 1), repeat=2):
            if a0 == a1 == p:
                continue
            chi = GaloisCharData.of(p, (a0, a1))
            pairs = sorted((V.label(), sorted(J)) for V, J in weight_pairs(chi, one))
            rows.append({"p": p, "sig": [a0, a1], "pairs": pairs})
    return rows


def _membership_rows(sigs, p, kinds):
    rows = []
    one = GaloisCharData.trivial(p, 2)
    for sig in sigs:
        chi = GaloisCharData.of(p, sig)
        for kind in kinds:
            rows.append({
                "p": p, "sig": list(sig), "class": kind,
                "weights": _labels(weights_reducible(chi, one, oracle_from_name(kind, chi))),
            })
    return rows


def _case2_rows():
    rows = []
    for p in (3, 5):
        sigs = [(a, a) for a in range(1, p)]
        rows += _membership_rows(sigs, p, ("zero", "0", "1", "generic"))
    return rows


def _case3_rows():
    rows = []
    for p in (3, 5):
        sigs = [(a, p) for a in range(1, p)]
        rows += _membership_rows(sigs, p, ("zero", "0", "generic"))
    return rows


def _irreducible_rows():
    rows = []
    for p in (3, 5):
        for a0 in range(1, p):
            for a1 in range(0, p - 1):
                a = a0 + a1 * p
                if a1 == 0 or a0 >= 2:
                    rows.append({"p": p, "a": [a0, a1], "weights": _labels(weights_irreducible(p, 2, a))})
    return rows


# Case II examples without a norm fixture: class membership as recorded for them
_RECORDED_CLASSES = {
    "IIb1": {"sig": (1, 1), "unramified": "a^2", "class": "1", "twist": 0},
    "IIb2": {"sig": (1, 1), "unramified": "a^2", "class": "0", "twist": 0},
}


def _table1_rows():
    rows = []
    for name in fixture_names():
        data = _load_fixture(name)
        res = fixture_pipeline(data)
        rows.append({"example": data["label"], "source": "norm fixture", "weights": res.weights,
                     "filtration_degree": str(res.filtration) if res.filtration is not None else None})
    F9 = field_create(3, 2)
    one = GaloisCharData.trivial(3, 2)
    for name, rec in _RECORDED_CLASSES.items():
        chi = GaloisCharData.of(3, rec["sig"], F9.parse(rec["unramified"]))
        ws = weights_reducible(chi, one, oracle_from_name(rec["class"], chi))
        rows.append({"example": name, "source": "recorded class", "weights": _labels(ws), "filtration_degree": None})
    return sorted(rows, key=lambda r: r["example"])


def _table3_rows():
    report = hecke_match.check_table(hecke_match.table3_records())
    return report.to_json()["rows"]


_TABLE_BUILDERS = {
    "qp": _qp_rows,
    "eq9": _eq9_rows,
    "case2": _case2_rows,
    "case3": _case3_rows,
    "irreducible": _irreducible_rows,
    "table1": _table1_rows,
    "table3": _table3_rows,
}


def build_table(name: str):
    # round-trip so tuples compare equal to the lists read back from disk
    return json.loads(json.dumps(_TABLE_BUILDERS[name]()))


def _diff(old, new):
    out = []
    for i in range(max(len(old), len(new))):
        a = old[i] if i < len(old) else None
        b = new[i] if i < len(new) else None
        if a != b:
            out.append({"row": i, "golden": a, "computed": b})
    return out


def cmd_replay_tables(cfg):
    names = TABLES if cfg.table in (None, "all") else (cfg.table,)
    for n in names:
        if n not in TABLES:
            raise SchemaError(f"unknown table {n!r}; choose from {TABLES}")
    result = {}
    status = EXIT_OK
    for n in names:
        rows = build_table(n)
        path = _golden_path(n)
        if cfg.update:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(rows, indent=1) + "\n")
            result[n] = {"rows": len(rows), "written": True}
            continue
        if not path.is_file():
            result[n] = {"rows": len(rows), "error": "golden missing"}
            status = EXIT_MISMATCH
            continue
        diff = _diff(json.loads(path.read_text()), rows)
        consistency = _internal_check(n, rows)
        result[n] = {"rows": len(rows), "diff": diff, "internal_failures": consistency}
        if diff or consistency:
            status = EXIT_MISMATCH
    return status, result


def _internal_check(name, rows):
    """Cross-checks carried inside a table: recipe vs literal table, Hecke matches."""
    if name == "qp":
        return [r for r in rows if r["weights"] != r["table"]]
    if name == "table3":
        return [r for r in rows if not r["pass"]]
    return []


HANDLERS = {
    "weights": cmd_weights,
    "filtration": cmd_filtration,
    "admissible": cmd_admissible,
    "mu": cmd_mu,
    "verify-lemmas": cmd_verify_lemmas,
    "class-from-norms": cmd_class_from_norms,
    "norm-membership": cmd_norm_membership,
    "match-hecke": cmd_match_hecke,
    "replay-tables": cmd_replay_tables,
}


def run(cfg: RunConfig):
    """Dispatch a configuration; returns (exit status, JSON document)."""
    try:
        return HANDLERS[cfg.command](cfg)
    except (SchemaError, FixtureError, BadSignature) as err:
        return EXIT_USAGE, {"error": type(err).__name__, "message": str(err)}
    except (PrecisionExceeded, PrecisionLoss) as err:
        return EXIT_PRECISION, {"error": type(err).__name__, "module": type(err).__module__, "message": str(err)}
    except (CombinatoricsError, CohomologyError, NormGroupError, LocalFieldError, PadicError,
            hecke_match.HeckeMatchError, ValueError) as err:
        return EXIT_MISMATCH, {"error": type(err).__name__, "module": type(err).__module__, "message": str(err)}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ahweights", description="Serre weights via Artin-Hasse units")
    ap.add_argument("--config", help="JSON file with a full run configuration")
    sub = ap.add_subparsers(dest="command")

    def add(name, *opts, help_text=""):
        sp = sub.add_parser(name, help=help_text)
        for opt in opts:
            sp.add_argument(*opt[0], **opt[1])
        sp.add_argument("--output", help="write JSON here instead of stdout")
        return sp

    p_opt = (["--p"], {"type": int})
    f_opt = (["--f"], {"type": int})
    sig_opt = (["--sig"], {"help": "tame signature, e.g. 1,3"})
    un_opt = (["--unramified"], {"help": "unramified part on Frobenius, e.g. a^2"})
    n_opt = (["--N"], {"type": int, "help": "p-adic precision override"})
    add("weights", p_opt, f_opt, sig_opt, un_opt,
        (["--class"], {"dest": "cls", "help": "zero, generic, a label list like 0,un, or an f=1 kind"}),
        (["--twist"], {"type": int, "default": 0}),
        (["--exponent"], {"type": int, "help": "irreducible case: inertial exponent a"}),
        help_text="weight set of a reducible or irreducible representation")
    add("filtration", p_opt, f_opt, sig_opt, un_opt, help_text="ramification filtration dimensions")
    add("admissible", p_opt, f_opt, sig_opt, help_text="dependent pairs and admissible subsets")
    add("mu", p_opt, f_opt, sig_opt, (["--J"], {"help": "subset, e.g. 0,1"}), help_text="shift functions delta and mu")
    add("verify-lemmas", p_opt, f_opt, n_opt, (["--M"], {"type": int, "help": "series truncation"}),
        help_text="Artin-Hasse multiplicativity and scaling identities")
    add("class-from-norms", (["--fixture"], {}), n_opt, help_text="extension class from a norm fixture")
    add("norm-membership", (["--fixture"], {}), n_opt, (["--level"], {"type": int}),
        (["--a"], {"dest": "element", "help": "residue a; default all nonzero a"}),
        help_text="is E([a] pi^level) a norm?")
    add("match-hecke", (["--input"], {}), (["--example"], {}), help_text="check eigenvalue rows against the class table")
    add("replay-tables", (["--table"], {"choices": TABLES + ("all",)}),
        (["--update"], {"action": "store_true", "help": "rewrite the goldens"}),
        help_text="regenerate tables and diff against goldens")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
            cfg = RunConfig.from_dict(raw)
        except (SchemaError, TypeError, json.JSONDecodeError, OSError) as err:
            print(json.dumps({"error": "SchemaError", "message": str(err)}))
            return EXIT_USAGE
    elif args.command is None:
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    else:
        data = {k: v for k, v in vars(args).items() if k != "config" and v is not None}
        try:
            cfg = RunConfig.from_dict(data)
        except SchemaError as err:
            print(json.dumps({"error": "SchemaError", "message": str(err)}))
            return EXIT_USAGE
    status, doc = run(cfg)
    text = json.dumps(doc, indent=1, sort_keys=True)
    if cfg.output:
        Path(cfg.output).write_text(text + "\n")
    else:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
