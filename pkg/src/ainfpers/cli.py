"""Command-line interface.

Exit codes: 0 success, 2 bad input, 3 internal invariant violated,
4 oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass

from .coalgebra import stasheff_check
from .linalg import Field
from .persistence import (AInftyFiltration, SchemaError, awake_events, delta_persistent_dim, from_filtered_complex,
                          load_abstract_filtration)
from .simplicial import FiltrationError, read_filtration
from .transfer import InvariantError, check_transfer_diagram
from .zigzag import bar_count, barcode, decompose, load_zigzag, validate_decomposition

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT, EXIT_MISMATCH = 0, 2, 3, 4


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    path: str
    field: Field
    n_max: int
    degrees: list[int] | None
    fmt: str
    strict: bool
    autoclose: bool
    verify: bool

    def __post_init__(self):
        if self.n_max < 1:
            raise InputError("--n-max must be at least 1")
        if self.degrees is not None and any(p < 0 for p in self.degrees):
            raise InputError("degrees must be non-negative")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def load_input(cfg: RunConfig) -> AInftyFiltration:
    if cfg.path.lower().endswith(".json"):
        with open(cfg.path, encoding="utf-8") as fh:
            af = load_abstract_filtration(fh.read(), n_max=cfg.n_max)
        if cfg.verify:
            _verify_structures(af, cfg.n_max)
        return af
    fc = read_filtration(cfg.path, autoclose=cfg.autoclose, strict=cfg.strict)
    af = from_filtered_complex(fc, cfg.field, cfg.n_max)
    if cfg.verify:
        _verify_structures(af, cfg.n_max)
    return af


def _verify_structures(af: AInftyFiltration, n_max: int) -> None:
    for i, ac in enumerate(af.steps):
        for n in range(2, n_max + 1):
            res = stasheff_check(ac, n)
            if not res:
                key, val = res.witness
                raise InvariantError(f"step {i}: coassociativity identity {n} fails on class {key}: {val}")


def _degrees(cfg: RunConfig, af: AInftyFiltration) -> list[int]:
    if cfg.degrees is not None:
        return cfg.degrees
    return sorted(set(af.degrees()) | {0})


def _atomic_write(path: str, data: str | bytes) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, mode) as fh:
        fh.write(data)
    os.replace(tmp, path)


def _emit(obj, fmt: str, text_lines: list[str]) -> None:
    if fmt == "json":
        print(json.dumps(obj, indent=2))
    else:
        print("\n".join(text_lines))


# ---------------------------------------------------------------------------
# commands


def cmd_homology(cfg: RunConfig, args) -> int:
    af = load_input(cfg)
    top = max(af.degrees(), default=0)
    degs = cfg.degrees if cfg.degrees is not None else list(range(top + 1))
    table = [[af.dim(i, p) for p in degs] for i in range(af.N + 1)]
    lines = ["step\t" + "\t".join(f"H{p}" for p in degs)]
    lines += [f"{i}\t" + "\t".join(map(str, row)) for i, row in enumerate(table)]
    _emit({"degrees": degs, "reduced_betti": table}, cfg.fmt, lines)
    return EXIT_OK


def cmd_barcode(cfg: RunConfig, args) -> int:
    af = load_input(cfg)
    ns = args.n or list(range(1, cfg.n_max + 1))
    if any(n < 1 or n > cfg.n_max for n in ns):
        raise InputError(f"--n values must lie in 1..{cfg.n_max}")
    out = []
    lines = []
    for n in ns:
        for p in _degrees(cfg, af):
            bc = barcode(af, n, p)
            js = bc.to_json()
            out.append(js)
            bars = " ".join(f"[{b.birth},{b.death}]" for b in bc.bars) or "(empty)"
            lines.append(f"n={n} degree={p}: {bars}")
            if args.out:
                stem = os.path.join(args.out, f"barcode_n{n}_p{p}")
                _atomic_write(stem + ".json", json.dumps(js, indent=2) + "\n")
                if cfg.fmt == "svg":
                    from .plotting import plot_barcode

                    tmp = stem + ".svg.part"
                    plot_barcode(bc, tmp)
                    os.replace(tmp, stem + ".svg")
    if cfg.fmt == "svg" and not args.out:
        raise InputError("--format svg needs --out DIR")
    _emit(out[0] if len(out) == 1 else out, "json" if cfg.fmt in ("json", "svg") else "text", lines)
    return EXIT_OK


def _parse_class(text: str, af: AInftyFiltration):
    """``STEP:LABEL`` or ``STEP:DEGREE:c0,c1,...``."""
    parts = text.split(":")
    try:
        step = int(parts[0])
    except ValueError:
        raise InputError(f"bad class text {text!r}") from None
    if not 0 <= step <= af.N:
        raise InputError(f"step {step} outside 0..{af.N}")
    ac = af.steps[step]
    if len(parts) == 2:
        for p, names in ac.labels.items():
            if parts[1] in names:
                vec = [0] * ac.dim(p)
                vec[names.index(parts[1])] = 1
                return step, p, vec, parts[1]
        raise InputError(f"unknown class {parts[1]!r} at step {step}")
    if len(parts) == 3:
        try:
            p = int(parts[1])
            vec = [af.field(x) for x in parts[2].split(",")]
        except ValueError:
            raise InputError(f"bad class text {text!r}") from None
        if len(vec) != ac.dim(p):
            raise InputError(f"class needs {ac.dim(p)} coordinates in degree {p} at step {step}")
        return step, p, vec, text
    raise InputError(f"bad class text {text!r}; use STEP:LABEL or STEP:DEGREE:c0,c1,...")


def cmd_events(cfg: RunConfig, args) -> int:
    af = load_input(cfg)
    step, p, vec, label = _parse_class(args.cls, af)
    if all(v == 0 for v in vec):
        raise InputError("the zero class has no events")
    n = args.n[0] if args.n else 1
    events = awake_events(af, n, p, vec, step, label)
    _emit([{"class": e.class_label, "step": e.step, "kind": e.kind} for e in events], cfg.fmt,
          [f"{e.class_label}: {e.kind}@{e.step}" for e in events])
    return EXIT_OK


def diagnostic_dump(af: AInftyFiltration) -> dict:
    fld = af.field
    steps = []
    for i, ac in enumerate(af.steps):
        entry: dict = {"dims": {str(p): k for p, k in sorted(ac.dims.items())}}
        if af.source is not None:
            td = af.source.diagrams[i]
            entry["splitting"] = {str(q): dict(zip(("A", "dA", "H"), td.splitting_dims(q))) for q in td.degrees}
        entry["delta"] = {
            str(n): {str(p): [[fld.to_json(v) for v in r] for r in m.to_lists()]
                     for p, m in sorted(ac.delta[n].items()) if not m.is_zero()}
            for n in sorted(ac.delta)}
        steps.append(entry)
    return {"field": fld.name, "provenance": af.provenance, "steps": steps}


def cmd_oracle_check(cfg: RunConfig, args) -> int:
    af = load_input(cfg)
    if af.source is not None:
        for i, td in enumerate(af.source.diagrams):
            bad = check_transfer_diagram(td)
            if bad:
                raise InvariantError(f"transfer diagram at step {i}: {bad[0]}")
    top = max(af.degrees(), default=0)
    degs = cfg.degrees if cfg.degrees is not None else list(range(top + 1))
    mismatches = []
    checked = 0
    for n in range(1, cfg.n_max + 1):
        for p in degs:
            bc = barcode(af, n, p)
            v = validate_decomposition(bc.zigzag, bc.decomposition)
            if not v:
                raise InvariantError(f"zigzag certificate for n={n}, p={p}: {v.message}")
            for i in range(af.N + 1):
                for j in range(i, af.N + 1):
                    a = bar_count(bc, i, j)
                    b = delta_persistent_dim(af, n, p, i, j).dim
                    checked += 1
                    if a != b:
                        mismatches.append({"n": n, "degree": p, "i": i, "j": j, "bars": a, "dim": b})
    if args.dump:
        _atomic_write(args.dump, json.dumps(diagnostic_dump(af), indent=2) + "\n")
    if mismatches:
        lines = [f"{len(mismatches)} of {checked} comparisons disagree", "n\tdeg\ti\tj\tbars\tdim"]
        lines += [f"{m['n']}\t{m['degree']}\t{m['i']}\t{m['j']}\t{m['bars']}\t{m['dim']}" for m in mismatches]
        _emit({"agree": False, "checked": checked, "mismatches": mismatches}, cfg.fmt, lines)
        return EXIT_MISMATCH
    _emit({"agree": True, "checked": checked}, cfg.fmt, [f"all agree ({checked} comparisons)"])
    return EXIT_OK


def cmd_validate(cfg: RunConfig, args) -> int:
    if cfg.path.lower().endswith(".json"):
        with open(cfg.path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if isinstance(doc, dict) and "arrows" in doc:
            z, expected = load_zigzag(doc)
            d = decompose(z)
            v = validate_decomposition(z, d)
            if not v:
                raise InvariantError(v.message)
            got = sorted(d.intervals)
            lines = ["intervals: " + " ".join(map(str, got))]
            if expected is not None and got != expected:
                lines.append("expected:  " + " ".join(map(str, expected)))
                _emit({"intervals": [[i.birth, i.death] for i in got], "ok": False}, cfg.fmt, lines)
                return EXIT_MISMATCH
            _emit({"intervals": [[i.birth, i.death] for i in got], "ok": True}, cfg.fmt, lines + ["ok"])
            return EXIT_OK
    cfg.verify = True
    af = load_input(cfg)
    if af.source is not None:
        for i, td in enumerate(af.source.diagrams):
            bad = check_transfer_diagram(td)
            if bad:
                raise InvariantError(f"transfer diagram at step {i}: {bad[0]}")
    _emit({"ok": True, "steps": af.N + 1}, cfg.fmt,
          [f"ok: {af.N + 1} steps, coassociativity verified up to n = {cfg.n_max}"])
    return EXIT_OK


COMMANDS = {
    "homology": cmd_homology,
    "barcode": cmd_barcode,
    "events": cmd_events,
    "oracle-check": cmd_oracle_check,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("path", help="filtration (.flt) or abstract filtration / zigzag (.json)")
    common.add_argument("--field", default="gf2", help="gf2 (default), gf<p> or q")
    common.add_argument("--n-max", type=int, default=4, help="highest Δ_n computed (default 4)")
    common.add_argument("--degree", type=_int_list, default=None, help="degrees, comma separated")
    common.add_argument("--format", choices=("text", "json", "svg"), default="text")
    common.add_argument("--strict", dest="strict", action="store_true", default=True,
                        help="require every step to be connected (default)")
    common.add_argument("--no-strict", dest="strict", action="store_false")
    common.add_argument("--autoclose", action="store_true", help="add missing faces at their cofacet's step")
    common.add_argument("--verify", action="store_true", help="check the coassociativity identities")

    parser = argparse.ArgumentParser(prog="ainfpers", description="A-infinity persistence of filtrations")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("homology", parents=[common], help="reduced Betti numbers per step")
    p = sub.add_parser("barcode", parents=[common], help="Δ_n barcodes")
    p.add_argument("--n", type=_int_list, default=None, help="values of n, comma separated (default 1..n-max)")
    p.add_argument("--out", default=None, help="directory for JSON (and SVG) files")
    p = sub.add_parser("events", parents=[common], help="wake-up / fall-asleep events of a class")
    p.add_argument("--n", type=_int_list, default=None)
    p.add_argument("--class", dest="cls", required=True, help="STEP:LABEL or STEP:DEGREE:c0,c1,...")
    p = sub.add_parser("oracle-check", parents=[common], help="compare bar counts with persistent group dims")
    p.add_argument("--dump", default=None, help="write the diagnostic JSON here")
    sub.add_parser("validate", parents=[common], help="check an input file and its structures")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.path, Field.parse(args.field), args.n_max, args.degree,
                        args.format, args.strict, args.autoclose, args.verify)
        return COMMANDS[args.command](cfg, args)
    except (InputError, FiltrationError, SchemaError, OSError, json.JSONDecodeError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvariantError, AssertionError) as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
