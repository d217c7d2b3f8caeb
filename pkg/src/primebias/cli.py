"""Command-line front end.

Subcommands run the experiments and print aligned tables (one row per
x), CSV, or JSON. Exit codes: 0 success, 1 usage error, 2 computation or
resource error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import __version__, analytic, counting
from .characters import ResidueClassPredicate, make_character
from .errors import ComputationError, UsageError
from .sieve import build_primes, cache_file_for, classified_counts

CACHE_DIR_ENV = "PRIMEBIAS_CACHE_DIR"


@dataclass
class RunConfig:
    subcommand: str
    x_values: list = field(default_factory=list)
    disc: int = -4
    disc2: Optional[int] = None
    eta: int = -1
    k: int = 2
    specs: list = field(default_factory=list)  # (disc, eta) pairs for `mixed`
    mod_a: int = 4
    classes_a: list = field(default_factory=list)
    mod_b: int = 4
    classes_b: list = field(default_factory=list)
    strict: bool = False  # convention: p < q instead of p <= q
    fmt: str = "pretty"
    workers: int = 1
    tol: float = 1e-9
    cache_dir: Optional[str] = None

    def __post_init__(self):
        if self.workers < 1:
            raise UsageError(f"worker count must be >= 1, got {self.workers}")
        if any(x <= 0 for x in self.x_values):
            raise UsageError("x values must be positive")
        if any(a > b for a, b in zip(self.x_values, self.x_values[1:])):
            raise UsageError("x values must be nondecreasing")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; usage errors are 1
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _parse_int_list(text: str) -> list:
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def _parse_specs(text: str) -> list:
    # "−4:-1,5:+1" -> [(-4, -1), (5, 1)]
    out = []
    for tok in text.split(","):
        if not tok:
            continue
        try:
            d, e = tok.split(":")
            out.append((int(d), int(e)))
        except ValueError as exc:
            raise UsageError(f"bad spec {tok!r}; expected disc:eta") from exc
    return out


def build_parser() -> _Parser:
    p = _Parser(prog="primebias", description=__doc__)
    p.add_argument("--version", action="version", version=f"primebias {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, with_x=True):
        if with_x:
            sp.add_argument("--x", default="1000", help="comma-separated x values")
        sp.add_argument("--format", choices=("pretty", "csv", "json"), default="pretty")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--cache-dir", default=None, help="prime cache directory")

    sp = sub.add_parser("ratio", help="same-class semiprime ratio r(x) with predictions")
    sp.add_argument("--disc", type=int, default=-4)
    sp.add_argument("--eta", type=int, choices=(-1, 1), default=-1)
    sp.add_argument("--convention", choices=("leq", "lt"), default="leq",
                    help="count squares p=q (leq) or require p<q (lt)")
    common(sp)

    sp = sub.add_parser("lchi", help="the bias constant L_chi with L(1,chi) and E(chi)")
    sp.add_argument("--disc", type=int, default=-4)
    common(sp, with_x=False)

    sp = sub.add_parser("kfactor", help="k-prime-factor ratio")
    sp.add_argument("--disc", type=int, default=-4)
    sp.add_argument("--eta", type=int, choices=(-1, 1), default=-1)
    sp.add_argument("--k", type=int, default=3)
    common(sp)

    sp = sub.add_parser("mixed", help="per-position character/class tuple counts")
    sp.add_argument("--specs", required=True, help="comma list of disc:eta, e.g. -4:-1,5:1")
    common(sp)

    sp = sub.add_parser("race", help="reciprocal-weighted prime race")
    sp.add_argument("--disc", type=int, default=-4)
    common(sp)

    sp = sub.add_parser("pairs", help="progression pair bias estimate")
    sp.add_argument("--mod-a", type=int, required=True)
    sp.add_argument("--classes-a", required=True, help="comma list of residues mod a")
    sp.add_argument("--mod-b", type=int, required=True)
    sp.add_argument("--classes-b", required=True, help="comma list of residues mod b")
    common(sp)

    sp = sub.add_parser("constants", help="all-prime E-bound constants")
    common(sp, with_x=False)

    sp = sub.add_parser("selftest", help="oracle and invariant suite")
    common(sp, with_x=False)
    return p


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(
        subcommand=ns.subcommand,
        x_values=_parse_int_list(getattr(ns, "x", "") or "") or [],
        disc=getattr(ns, "disc", -4),
        eta=getattr(ns, "eta", -1),
        k=getattr(ns, "k", 2),
        specs=_parse_specs(ns.specs) if getattr(ns, "specs", None) else [],
        mod_a=getattr(ns, "mod_a", 4),
        classes_a=_parse_int_list(ns.classes_a) if getattr(ns, "classes_a", None) else [],
        mod_b=getattr(ns, "mod_b", 4),
        classes_b=_parse_int_list(ns.classes_b) if getattr(ns, "classes_b", None) else [],
        strict=(getattr(ns, "convention", "leq") == "lt"),
        fmt=ns.format,
        workers=ns.workers,
        tol=ns.tol,
        cache_dir=ns.cache_dir or os.environ.get(CACHE_DIR_ENV),
    )
    if cfg.subcommand in ("ratio", "kfactor", "mixed", "race", "pairs") and not cfg.x_values:
        raise UsageError(f"{cfg.subcommand} needs at least one --x value")
    return cfg


def _store_for(cfg: RunConfig, limit: int):
    cache_path = cache_file_for(limit, cfg.cache_dir) if cfg.cache_dir else None
    return build_primes(limit, workers=cfg.workers, cache_path=cache_path)


def _emit(cfg: RunConfig, header: list, rows: list, out) -> None:
    """Rows are dicts; reals are printed with 6 decimals in pretty/csv."""

    def fmt_val(v):
        if isinstance(v, float):
            return f"{v:.6e}" if v != 0.0 and abs(v) < 1e-4 else f"{v:.6f}"
        return "" if v is None else str(v)

    if cfg.fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt_val(row.get(h)) for h in header])
    elif cfg.fmt == "json":
        doc = {
            "tool": "primebias",
            "version": __version__,
            "config": {
                "subcommand": cfg.subcommand,
                "convention": "lt" if cfg.strict else "leq",
                "tolerance": cfg.tol,
                "workers": cfg.workers,
            },
            "rows": rows,
        }
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        widths = [max(len(h), *(len(fmt_val(r.get(h))) for r in rows)) if rows else len(h) for h in header]
        out.write("  ".join(h.rjust(w) for h, w in zip(header, widths)) + "\n")
        for row in rows:
            out.write("  ".join(fmt_val(row.get(h)).rjust(w) for h, w in zip(header, widths)) + "\n")


RATIO_HEADER = ["x", "disc", "eta", "count", "total", "ratio", "predicted", "s_of_x", "lchi"]


def cmd_ratio(cfg: RunConfig, out) -> int:
    chi = make_character(cfg.disc)
    est = analytic.lchi_cached(chi, cfg.tol)
    store = _store_for(cfg, max(cfg.x_values))
    cc = classified_counts(store, chi)
    rows = []
    for x in cfg.x_values:
        rep = counting.ratio_r(x, chi, cfg.eta, counts=cc, strict=cfg.strict, lchi_value=est.value)
        s_of_x = analytic.predict("s", x).ratio if x >= 16 else None
        rows.append(
            {
                "x": x,
                "disc": cfg.disc,
                "eta": cfg.eta,
                "count": rep.count,
                "total": rep.total,
                "ratio": rep.ratio,
                "predicted": rep.predicted,
                "s_of_x": s_of_x,
                "lchi": est.value,
                "convention": "lt" if cfg.strict else "leq",
                "tolerance": cfg.tol,
            }
        )
    _emit(cfg, RATIO_HEADER, rows, out)
    return 0


def cmd_lchi(cfg: RunConfig, out) -> int:
    chi = make_character(cfg.disc)
    est = analytic.lchi(chi, cfg.tol)
    rows = [
        {
            "disc": cfg.disc,
            "lchi": est.value,
            "L1": est.L1,
            "E": est.E,
            "truncation_bound": est.truncation_bound,
            "terms_used": est.terms_used,
        }
    ]
    _emit(cfg, ["disc", "lchi", "L1", "E", "truncation_bound", "terms_used"], rows, out)
    return 0


def cmd_kfactor(cfg: RunConfig, out) -> int:
    chi = make_character(cfg.disc)
    est = analytic.lchi_cached(chi, cfg.tol)
    store = _store_for(cfg, max(cfg.x_values))
    cc = classified_counts(store, chi)
    rows = []
    for x in cfg.x_values:
        rep = counting.count_k_almost(x, cfg.k, chi, cfg.eta, counts=cc, lchi_value=est.value)
        rows.append(
            {
                "x": x,
                "disc": cfg.disc,
                "eta": cfg.eta,
                "k": cfg.k,
                "count": rep.count,
                "total": rep.total,
                "ratio": rep.ratio,
                "predicted": rep.predicted,
                "lchi": est.value,
            }
        )
    _emit(cfg, ["x", "disc", "eta", "k", "count", "total", "ratio", "predicted", "lchi"], rows, out)
    return 0


def cmd_mixed(cfg: RunConfig, out) -> int:
    if not cfg.specs:
        raise UsageError("mixed needs --specs")
    specs = [(make_character(d), e) for d, e in cfg.specs]
    store = _store_for(cfg, max(cfg.x_values))
    rows = []
    for x in cfg.x_values:
        rep = counting.count_mixed(x, specs, store=store, tol=cfg.tol)
        rows.append(
            {
                "x": x,
                "specs": rep.label,
                "count": rep.count,
                "total": rep.total,
                "ratio": rep.ratio,
                "predicted": rep.predicted,
                "c": rep.lchi,
            }
        )
    _emit(cfg, ["x", "specs", "count", "total", "ratio", "predicted", "c"], rows, out)
    return 0


def cmd_race(cfg: RunConfig, out) -> int:
    chi = make_character(cfg.disc)
    est = analytic.lchi_cached(chi, cfg.tol)
    store = _store_for(cfg, max(cfg.x_values))
    cc = classified_counts(store, chi)
    rows = []
    for x in cfg.x_values:
        res = counting.weighted_race(x, chi, counts=cc, lchi_value=est.value)
        rows.append(
            {
                "x": x,
                "disc": cfg.disc,
                "s_plus": res.s_plus,
                "s_minus": res.s_minus,
                "ratio": res.ratio,
                "predicted": res.predicted,
                "lchi": est.value,
            }
        )
    _emit(cfg, ["x", "disc", "s_plus", "s_minus", "ratio", "predicted", "lchi"], rows, out)
    return 0


def cmd_pairs(cfg: RunConfig, out) -> int:
    if not cfg.classes_a or not cfg.classes_b:
        raise UsageError("pairs needs --classes-a and --classes-b")
    a_set = [ResidueClassPredicate(cfg.mod_a, r) for r in cfg.classes_a]
    b_set = [ResidueClassPredicate(cfg.mod_b, r) for r in cfg.classes_b]
    store = _store_for(cfg, max(cfg.x_values))
    rows = []
    for x in cfg.x_values:
        rep = counting.progression_pair_ratio(x, a_set, b_set, store=store)
        rows.append(
            {
                "x": x,
                "classes": rep.label,
                "count": rep.count,
                "total": rep.total,
                "ratio": rep.ratio,
                "beta": rep.beta,
            }
        )
    _emit(cfg, ["x", "classes", "count", "total", "ratio", "beta"], rows, out)
    return 0


def cmd_constants(cfg: RunConfig, out) -> int:
    lower, upper = analytic.e_bound_constants()
    rows = [{"bound": "lower", "value": lower}, {"bound": "upper", "value": upper}]
    _emit(cfg, ["bound", "value"], rows, out)
    return 0


def cmd_selftest(cfg: RunConfig, out) -> int:
    from . import selftest

    ok = selftest.run(out, workers=cfg.workers)
    return 0 if ok else 2


_COMMANDS = {
    "ratio": cmd_ratio,
    "lchi": cmd_lchi,
    "kfactor": cmd_kfactor,
    "mixed": cmd_mixed,
    "race": cmd_race,
    "pairs": cmd_pairs,
    "constants": cmd_constants,
    "selftest": cmd_selftest,
}


def run(cfg: RunConfig, out=None) -> int:
    out = out if out is not None else sys.stdout
    return _COMMANDS[cfg.subcommand](cfg, out)


def main(argv=None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ComputationError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
