"""Key-value problem files.

A problem file is plain text, one ``key = value`` per line::

    # comments start with '#'
    name   = "wave test"              # optional label
    t0     = 0.0
    T      = 1.0
    lambda = 0.25
    a0     = "t^2+1"
    kernel = "t-2*s^2"
    f      = "(t^2+1)*cos(t) - sin(t)"
    exact  = "cos(t)"                 # optional
    load   = { point = 0.3, coeff = "1-t^3" }
    load   = { point = 0.5, coeff = "t-2" }

``t0``, ``T`` and ``lambda`` are numbers; ``a0``, ``kernel``, ``f`` and
``exact`` are quoted expressions in the grammar of
:mod:`lvie.expressions`; ``load`` lines may repeat, one per load term.
"""

from __future__ import annotations

import os

from .expressions import ParseError
from .problems import LoadTerm, Problem, ScalarFunction

__all__ = ["ConfigError", "parse_problem_config", "load_problem_config"]

_SCALAR_KEYS = ("t0", "T", "lambda")
_EXPR_KEYS = ("a0", "kernel", "f", "exact")
_REQUIRED = ("t0", "T", "lambda", "a0", "kernel", "f")


class ConfigError(ValueError):
    """Malformed problem file; the message names the offending line."""


def _strip_comment(line: str) -> str:
    out = []
    in_quote = False
    for c in line:
        if c == '"':
            in_quote = not in_quote
        if c == "#" and not in_quote:
            break
        out.append(c)
    return "".join(out)


def _parse_value(raw: str, lineno: int):
    raw = raw.strip()
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: expected a number or quoted string, got {raw!r}") from None


def _parse_load(raw: str, lineno: int) -> tuple[float, str]:
    raw = raw.strip()
    if not (raw.startswith("{") and raw.endswith("}")):
        raise ConfigError(f"line {lineno}: load value must look like {{ point = ..., coeff = \"...\" }}")
    fields = {}
    for part in raw[1:-1].split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise ConfigError(f"line {lineno}: malformed load entry {part.strip()!r}")
        key, _, val = part.partition("=")
        fields[key.strip()] = _parse_value(val, lineno)
    if set(fields) != {"point", "coeff"}:
        raise ConfigError(f"line {lineno}: load needs exactly the keys 'point' and 'coeff'")
    if not isinstance(fields["point"], float):
        raise ConfigError(f"line {lineno}: load point must be a number")
    if not isinstance(fields["coeff"], str):
        raise ConfigError(f"line {lineno}: load coeff must be a quoted expression")
    return fields["point"], fields["coeff"]


def _expression(text: str, arity: int, key: str, lineno: int) -> ScalarFunction:
    try:
        return ScalarFunction.from_expression(text, arity)
    except (ParseError, ValueError) as err:
        raise ConfigError(f"line {lineno}: bad expression for {key!r}: {err}") from None


def parse_problem_config(text: str, name: str = "config") -> Problem:
    """Parse problem-file text into a :class:`Problem`."""
    scalars: dict[str, float] = {}
    exprs: dict[str, tuple[str, int]] = {}
    loads: list[tuple[float, str, int]] = []
    label = name

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(line).strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, raw = line.partition("=")
        key = key.strip()
        if key == "load":
            loads.append((*_parse_load(raw, lineno), lineno))
            continue
        if key in scalars or key in exprs or (key == "name" and label != name):
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key == "name":
            value = _parse_value(raw, lineno)
            if not isinstance(value, str):
                raise ConfigError(f"line {lineno}: name must be a quoted string")
            label = value
        elif key in _SCALAR_KEYS:
            value = _parse_value(raw, lineno)
            if not isinstance(value, float):
                raise ConfigError(f"line {lineno}: {key} must be a number")
            scalars[key] = value
        elif key in _EXPR_KEYS:
            value = _parse_value(raw, lineno)
            if not isinstance(value, str):
                raise ConfigError(f"line {lineno}: {key} must be a quoted expression")
            exprs[key] = (value, lineno)
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")

    missing = [k for k in _REQUIRED if k not in scalars and k not in exprs]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    load_terms = tuple(
        LoadTerm(point, _expression(coeff, 1, "load coeff", lineno))
        for point, coeff, lineno in loads
    )
    exact = None
    if "exact" in exprs:
        exact = _expression(exprs["exact"][0], 1, "exact", exprs["exact"][1])
    return Problem(
        t0=scalars["t0"],
        T=scalars["T"],
        lam=scalars["lambda"],
        loads=load_terms,
        a0=_expression(exprs["a0"][0], 1, "a0", exprs["a0"][1]),
        kernel=_expression(exprs["kernel"][0], 2, "kernel", exprs["kernel"][1]),
        rhs=_expression(exprs["f"][0], 1, "f", exprs["f"][1]),
        exact=exact,
        name=label,
    )


def load_problem_config(path: os.PathLike | str) -> Problem:
    """Read and parse a problem file; the file stem becomes the default name."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stem = os.path.splitext(os.path.basename(os.fspath(path)))[0]
    return parse_problem_config(text, name=stem)
