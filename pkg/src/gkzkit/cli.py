"""Command-line interface: ``gkzkit <command> <input-file> [options]``.

Input grammar (``#`` starts a comment, blank lines are ignored)::

    A r=<r> n=<n> blocks=<N1,...,Nr>
    <r+n rows of whitespace-separated integers>

or, in polytope mode, one ``DELTA <n>`` header per block followed by one
lattice point per line.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import __version__, polytope
from .gkz import (
    AConfig,
    InvalidConfigError,
    Verdict,
    beta_standard,
    box_operators,
    build_config,
    check_homogeneous,
    check_hypothesis,
    check_property_star,
    check_semi_nonresonant_sufficient,
    gkz_system,
    normalize_basis,
)
from .polytope import PointSet, Triangulation
from .rank import predicted_rank_generic, rank_one_point, verify_main
from .series import count_independent, gamma_family

COMMANDS = ("check", "normalize", "box-ops", "series", "rank", "verify-main")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

E_EMPTY = "E001"
E_INT = "E002"
E_ROW = "E003"
E_RANK = "E004"
E_HEADER = "E005"
E_POLYTOPE = "E006"


class ParseError(ValueError):
    def __init__(self, code: str, message: str, line: int = 0, col: int = 0):
        self.code, self.line, self.col = code, line, col
        super().__init__(f"{code} line {line} col {col}: {message}" if line else f"{code}: {message}")


_HEADER = re.compile(r"A\s+r=(\S+)\s+n=(\S+)\s+blocks=(\S+)\s*$")


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if body.strip():
            yield lineno, body


def _ints(body: str, lineno: int) -> list[int]:
    out = []
    for m in re.finditer(r"\S+", body):
        try:
            out.append(int(m.group()))
        except ValueError:
            raise ParseError(E_INT, f"not an integer: {m.group()!r}", lineno, m.start() + 1) from None
    return out


def _header_int(tok: str, lineno: int, body: str) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(E_INT, f"not an integer: {tok!r}", lineno, body.find(tok) + 1) from None
    if v < 0:
        raise ParseError(E_HEADER, f"negative value {v}", lineno, body.find(tok) + 1)
    return v


def _config_error(e: InvalidConfigError, lineno: int) -> ParseError:
    code = E_RANK if "rank" in str(e) else E_HEADER
    return ParseError(code, str(e), lineno, 1)


def _parse_matrix(lines, header_line: int, header: str) -> AConfig:
    m = _HEADER.match(header.strip())
    if not m:
        raise ParseError(E_HEADER, "expected 'A r=<r> n=<n> blocks=<N1,...>'", header_line, 1)
    r = _header_int(m.group(1), header_line, header)
    n = _header_int(m.group(2), header_line, header)
    blocks = [_header_int(t, header_line, header) for t in m.group(3).split(",") if t]
    rows = []
    width = sum(blocks)
    for lineno, body in lines:
        row = _ints(body, lineno)
        if len(row) != width:
            raise ParseError(E_ROW, f"expected {width} entries, found {len(row)}", lineno, 1)
        rows.append(row)
        if len(rows) > r + n:
            raise ParseError(E_ROW, f"expected {r + n} rows", lineno, 1)
    if len(rows) != r + n:
        raise ParseError(E_ROW, f"expected {r + n} rows, found {len(rows)}", header_line, 1)
    try:
        return AConfig.from_rows(rows, r, blocks)
    except InvalidConfigError as e:
        raise _config_error(e, header_line) from None


def _parse_deltas(lines, header_line: int, header: str) -> AConfig:
    deltas: list[list[list[int]]] = []
    dim = None
    for lineno, body in [(header_line, header), *lines]:
        toks = body.split()
        if toks[0] == "DELTA":
            if len(toks) != 2:
                raise ParseError(E_HEADER, "expected 'DELTA <n>'", lineno, 1)
            d = _header_int(toks[1], lineno, body)
            if dim is not None and d != dim:
                raise ParseError(E_POLYTOPE, f"dimension {d} differs from {dim}", lineno, 1)
            dim = d
            deltas.append([])
            continue
        pt = _ints(body, lineno)
        if len(pt) != dim:
            raise ParseError(E_ROW, f"expected {dim} coordinates, found {len(pt)}", lineno, 1)
        deltas[-1].append(pt)
    for i, d in enumerate(deltas):
        if not d:
            raise ParseError(E_POLYTOPE, f"polytope {i + 1} has no points", header_line, 1)
    try:
        return build_config([PointSet(d, dim) for d in deltas])
    except InvalidConfigError as e:
        raise _config_error(e, header_line) from None


def parse_input(text: str) -> AConfig:
    """Parse a configuration file; raises :class:`ParseError` with a code."""
    lines = list(_lines(text))
    if not lines:
        raise ParseError(E_EMPTY, "no configuration found")
    (lineno, header), rest = lines[0], lines[1:]
    kind = header.split()[0]
    if kind == "A":
        return _parse_matrix(rest, lineno, header)
    if kind == "DELTA":
        return _parse_deltas(rest, lineno, header)
    raise ParseError(E_HEADER, "file must start with 'A' or 'DELTA'", lineno, 1)


def serialize(c: AConfig) -> str:
    """Matrix-mode text that :func:`parse_input` reads back to ``c``."""
    head = f"A r={c.r} n={c.n} blocks={','.join(str(b) for b in c.block_sizes)}"
    return "\n".join([head] + [" ".join(str(x) for x in row) for row in c.matrix]) + "\n"


@dataclass(frozen=True)
class JobSpec:
    path: str
    command: str
    order: int = 6
    degree_bound: int = 6
    simplices: tuple[tuple[int, ...], ...] | None = None
    fmt: str = "text"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")


def parse_simplices(text: str) -> tuple[tuple[int, ...], ...]:
    """``"1,2,3;2,3,4"`` (1-based column indices) to 0-based tuples."""
    out = []
    for part in text.split(";"):
        if not part.strip():
            continue
        idx = tuple(int(x) - 1 for x in part.split(","))
        if any(i < 0 for i in idx):
            raise ValueError("column indices start at 1")
        out.append(idx)
    if not out:
        raise ValueError("no simplices given")
    return tuple(out)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Verdict):
        return x.value
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def _one_based(t: Triangulation):
    return [[i + 1 for i in s] for s in t.simplices]


def _check_simplices(c: AConfig, simplices):
    for s in simplices or ():
        if any(i >= c.N for i in s):
            raise ValueError(f"column index out of range in simplex {[i + 1 for i in s]}")
        if len(s) != c.r + c.n:
            raise ValueError(f"simplex {[i + 1 for i in s]} needs {c.r + c.n} columns")


def _triangulation(c: AConfig, simplices) -> Triangulation:
    if simplices is None:
        return polytope.placing_triangulation(c.columns)
    return Triangulation(tuple(sorted(tuple(sorted(s)) for s in simplices)))


def _cmd_check(c, job, rep):
    beta = beta_standard(c.r, c.n)
    rep["verdicts"] = {
        "homogeneous": check_homogeneous(c),
        "hypothesis": check_hypothesis(c),
        "property_star": check_property_star(c),
        "semi_nonresonance": check_semi_nonresonant_sufficient(c, beta),
    }
    if rep["verdicts"]["semi_nonresonance"] is not Verdict.PASS:
        rep["caveats"].append("semi-nonresonance not confirmed by the facet test")
    return EXIT_OK


def _cmd_normalize(c, job, rep):
    norm = normalize_basis(c)
    rep["matrices"] = {"R": norm.R, "B": norm.B, "B_inv": norm.B_inv, "A_prime": norm.config.matrix}
    return EXIT_OK


def _cmd_box_ops(c, job, rep):
    boxes = box_operators(c, job.degree_bound)
    rep["matrices"] = {
        "boxes": [{"operator": str(b), "nu_plus": b.nu_plus, "nu_minus": b.nu_minus} for b in boxes],
        "kernel": [list(u) for u in c.kernel().basis],
    }
    if c.kernel().rank and not boxes:
        rep["caveats"].append(f"degree bound {job.degree_bound} admits no box operator")
    return EXIT_OK


def _cmd_series(c, job, rep):
    beta = beta_standard(c.r, c.n)
    t = _triangulation(c, job.simplices)
    fam = gamma_family(c, beta, t, job.order, job.degree_bound, system=gkz_system(c, beta, job.degree_bound))
    members = []
    for m in fam.members:
        s = m.series
        members.append({
            "exponent": s.base,
            "terms": len(s.terms),
            "log_degree": s.log_degree,
            "degenerate": s.degenerate,
            "passed": m.verdict.passed,
            "max_checked_order": m.verdict.max_checked_order,
            "first_failure": None if m.verdict.first_failure is None
            else [m.verdict.first_failure[0], list(m.verdict.first_failure[1])],
        })
    rep["matrices"] = {"triangulation": _one_based(t), "members": members}
    rep["series_count"] = count_independent(fam)
    rep["verdicts"] = {"all_members_pass": all(m.verdict.passed for m in fam.members)}
    rep["caveats"].extend(fam.diagnostics)
    return EXIT_OK if rep["verdicts"]["all_members_pass"] else EXIT_FAIL


def _cmd_rank(c, job, rep):
    report = predicted_rank_generic(c)
    rep["predicted_rank"] = report.predicted_rank
    rep["verdicts"] = {
        "justification": report.justification,
        "hypothesis": report.hypothesis_ok,
        "semi_nonresonance": report.semi_nonresonance,
    }
    rep["matrices"] = {"lattice_index": report.lattice_index_used}
    rep["caveats"].append(report.reason)
    if check_property_star(c):
        a, one = rank_one_point(c)
        rep["matrices"]["rank_one_point"] = list(a)
        rep["verdicts"]["rank_at_rank_one_point"] = one.predicted_rank
        rep["caveats"].append(one.reason)
    if not report.hypothesis_ok:
        rep["caveats"].append("hypothesis fails: the volume prediction is not backed by the rank identity")
    return EXIT_OK


def _cmd_verify_main(c, job, rep):
    res = verify_main(c, order=job.order, degree_bound=job.degree_bound, simplices=job.simplices)
    rep["series_count"] = res.series_count
    rep["predicted_rank"] = res.predicted_rank
    rep["verdicts"] = {
        "count_equals_rank": res.matches,
        "status": "verified" if res.verified else ("conditional" if res.matches else "failed"),
        "semi_nonresonance": res.report.semi_nonresonance,
        "hypothesis": res.report.hypothesis_ok,
    }
    rep["matrices"] = {"triangulation": _one_based(res.family.triangulation)}
    if res.conditional:
        rep["caveats"].append("semi-nonresonance not confirmed: the identity is checked conditionally")
    rep["caveats"].extend(res.family.diagnostics)
    return EXIT_OK if res.matches else EXIT_FAIL


_DISPATCH = {
    "check": _cmd_check,
    "normalize": _cmd_normalize,
    "box-ops": _cmd_box_ops,
    "series": _cmd_series,
    "rank": _cmd_rank,
    "verify-main": _cmd_verify_main,
}


def run(job: JobSpec, text: str | None = None) -> tuple[int, dict]:
    """Execute a job; returns ``(exit status, report)``."""
    if text is None:
        with open(job.path, "rb") as fh:
            raw = fh.read()
        text = raw.decode("utf-8")
    else:
        raw = text.encode("utf-8")
    rep = {
        "command": job.command,
        "input_digest": hashlib.sha256(raw).hexdigest(),
        "verdicts": {},
        "matrices": {},
        "series_count": None,
        "predicted_rank": None,
        "caveats": [],
    }
    try:
        c = parse_input(text)
        _check_simplices(c, job.simplices)
        status = _DISPATCH[job.command](c, job, rep)
    except (ParseError, InvalidConfigError, ValueError) as e:
        rep["verdicts"]["error"] = str(e)
        return EXIT_INPUT, rep
    return status, rep


def _paint(word: str, ok: bool, color: bool) -> str:
    if not color:
        return word
    return f"\033[{32 if ok else 31}m{word}\033[0m"


def _fmt_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, Verdict):
        return v.value
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    return str(v)


def format_text(rep: dict, color: bool = False) -> str:
    out = [f"command: {rep['command']}"]
    for k, v in rep["verdicts"].items():
        if isinstance(v, bool) or isinstance(v, Verdict):
            ok = v is True or v is Verdict.PASS
            out.append(f"{k}: {_paint(_fmt_value(v), ok, color)}")
        else:
            out.append(f"{k}: {_fmt_value(v)}")
    for name, m in rep["matrices"].items():
        if isinstance(m, list) and m and isinstance(m[0], (list, tuple)):
            out.append(f"{name}:")
            out.extend("  " + " ".join(_fmt_value(x) for x in row) for row in m)
        elif isinstance(m, list) and m and isinstance(m[0], dict):
            out.append(f"{name}:")
            for item in m:
                out.append("  " + ", ".join(f"{k}={_fmt_value(v)}" for k, v in item.items()))
        else:
            out.append(f"{name}: {_fmt_value(m)}")
    if rep["series_count"] is not None:
        out.append(f"series_count: {rep['series_count']}")
    if rep["predicted_rank"] is not None:
        out.append(f"predicted_rank: {rep['predicted_rank']}")
    for note in rep["caveats"]:
        out.append(f"note: {note}")
    return "\n".join(out) + "\n"


def format_json(rep: dict) -> str:
    return json.dumps(_jsonable(rep), indent=2, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gkzkit", description="Exact checks and Gamma-series for GKZ systems.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input", help="configuration file")
    p.add_argument("--order", type=int, default=6, help="truncation order of the series (default 6)")
    p.add_argument("--degree-bound", type=int, default=6, help="maximal box operator degree (default 6)")
    p.add_argument("--simplices", help="explicit triangulation, e.g. '1,2,3;1,3,4' (1-based columns)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    if args.order < 0 or args.degree_bound < 1:
        print("error: --order must be >= 0 and --degree-bound >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        simplices = parse_simplices(args.simplices) if args.simplices else None
    except ValueError as e:
        print(f"error: --simplices: {e}", file=sys.stderr)
        return EXIT_INPUT
    job = JobSpec(args.input, args.command, args.order, args.degree_bound, simplices, args.format)
    try:
        status, rep = run(job)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if job.fmt == "json":
        sys.stdout.write(format_json(rep))
    else:
        color = sys.stdout.isatty() and not os.environ.get("NO_COLOR")
        sys.stdout.write(format_text(rep, color))
    return status


if __name__ == "__main__":
    sys.exit(main())
