"""Data model for linear loaded Volterra integral equations of the second kind.

A problem describes

    a0(t) x(t) + sum_j a_j(t) x(t_j) = lam * int_{t0}^{t} K(t,s) x(s) ds + f(t)

on an interval [t0, T].  The fixed abscissae t_j (strictly inside the
interval) are the load points; the values x(t_j) entering the equation
are the loads.  Coefficient functions are :class:`ScalarFunction`
values, built either from a parsed expression or from any Python
callable, and evaluate on scalars and numpy arrays alike.

Problems are immutable after construction and safe to share between
concurrent solves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .expressions import EvalError, evaluate, parse

__all__ = [
    "ScalarFunction",
    "LoadTerm",
    "Problem",
    "ValidationReport",
    "validate_problem",
    "builtin_problem",
    "builtin_names",
]


class ScalarFunction:
    """A pure real-valued function of ``t`` or of ``(t, s)``.

    Wraps either a parsed expression or a plain callable.  Inputs may
    be scalars or numpy arrays; two-argument functions broadcast their
    arguments, and the output always has the broadcast shape (constants
    are expanded).  Scalar inputs give a plain ``float`` back.
    """

    __slots__ = ("_fn", "arity", "source")

    def __init__(self, fn: Callable, arity: int, source: str = "<callable>"):
        if arity not in (1, 2):
            raise ValueError("arity must be 1 or 2")
        self._fn = fn
        self.arity = arity
        self.source = source

    @classmethod
    def from_expression(cls, text: str, arity: int) -> "ScalarFunction":
        expr = parse(text)
        if arity == 1 and "s" in expr.variables():
            raise ValueError(
                f"one-argument expression {text!r} references the variable 's'"
            )
        if arity == 1:
            return cls(lambda t: evaluate(expr, t), 1, text)
        return cls(lambda t, s: evaluate(expr, t, s), 2, text)

    @classmethod
    def constant(cls, value: float, arity: int = 1) -> "ScalarFunction":
        value = float(value)
        if arity == 1:
            return cls(lambda t: value, 1, repr(value))
        return cls(lambda t, s: value, 2, repr(value))

    def __call__(self, t, s=None):
        if self.arity == 1:
            if s is not None:
                raise TypeError(f"{self!r} takes a single argument")
            scalar = np.ndim(t) == 0
            t_arr = np.asarray(t, dtype=float)
            out = np.asarray(self._fn(t_arr), dtype=float)
            if out.shape != t_arr.shape:
                out = np.broadcast_to(out, t_arr.shape)
            return float(out) if scalar else out
        if s is None:
            raise TypeError(f"{self!r} takes two arguments; 's' is missing")
        scalar = np.ndim(t) == 0 and np.ndim(s) == 0
        t_arr, s_arr = np.broadcast_arrays(
            np.asarray(t, dtype=float), np.asarray(s, dtype=float)
        )
        out = np.asarray(self._fn(t_arr, s_arr), dtype=float)
        if out.shape != t_arr.shape:
            out = np.broadcast_to(out, t_arr.shape)
        return float(out) if scalar else out

    def __repr__(self):
        return f"ScalarFunction({self.source!r}, arity={self.arity})"


@dataclass(frozen=True)
class LoadTerm:
    """One load: the abscissa t_j and its coefficient a_j(t)."""

    point: float
    coeff: ScalarFunction


@dataclass(frozen=True)
class Problem:
    """A loaded Volterra equation instance; see the module docstring."""

    t0: float
    T: float
    lam: float
    loads: tuple[LoadTerm, ...]
    a0: ScalarFunction
    kernel: ScalarFunction
    rhs: ScalarFunction
    exact: Optional[ScalarFunction] = None
    name: str = ""

    @property
    def load_points(self) -> np.ndarray:
        return np.array([term.point for term in self.loads], dtype=float)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate_problem`: pass/fail plus the first violation."""

    passed: bool
    violation: Optional[str] = None

    def __bool__(self) -> bool:
        return self.passed


def _sample_function(fn: ScalarFunction, ts, label: str) -> Optional[str]:
    """Evaluate on the sample and return a violation message, or None."""
    try:
        vals = fn(ts)
    except (EvalError, ArithmeticError, ValueError, TypeError) as err:
        return f"{label} not evaluable: {err}"
    bad = ~np.isfinite(np.atleast_1d(vals))
    if bad.any():
        where = np.atleast_1d(ts)[bad][0]
        return f"{label} non-finite at t={where:.6g}"
    return None


def validate_problem(p: Problem, samples: int = 1000) -> ValidationReport:
    """Check problem invariants on a uniform sample of the interval.

    Returns a report (never raises for bad problem data): interval
    sanity, strictly increasing interior load points, finiteness of all
    coefficient functions, and a0 nonvanishing on the sample grid.
    Sign changes of a0 between adjacent samples are treated as zeros.
    """
    if samples < 2:
        raise ValueError("samples must be at least 2")

    if not (np.isfinite(p.t0) and np.isfinite(p.T) and np.isfinite(p.lam)):
        return ValidationReport(False, "interval endpoints and lambda must be finite")
    if not p.t0 < p.T:
        return ValidationReport(False, "interval start must precede interval end")

    points = [term.point for term in p.loads]
    if any(b <= a for a, b in zip(points, points[1:])):
        return ValidationReport(False, "load points not increasing")
    for tj in points:
        if not (p.t0 < tj < p.T):
            return ValidationReport(
                False, f"load point {tj:.6g} outside the open interval"
            )

    ts = np.linspace(p.t0, p.T, samples)
    msg = _sample_function(p.a0, ts, "a0")
    if msg:
        return ValidationReport(False, msg)
    for j, term in enumerate(p.loads, start=1):
        msg = _sample_function(term.coeff, ts, f"a{j}")
        if msg:
            return ValidationReport(False, msg)
    msg = _sample_function(p.rhs, ts, "f")
    if msg:
        return ValidationReport(False, msg)

    # Kernel is only defined on t0 <= s <= t <= T; sample that triangle.
    ti, si = np.tril_indices(samples)
    try:
        kvals = p.kernel(ts[ti], ts[si])
    except (EvalError, ArithmeticError, ValueError, TypeError) as err:
        return ValidationReport(False, f"kernel not evaluable: {err}")
    if not np.all(np.isfinite(kvals)):
        bad = int(np.flatnonzero(~np.isfinite(kvals))[0])
        return ValidationReport(
            False,
            f"kernel non-finite at t={ts[ti[bad]]:.6g}, s={ts[si[bad]]:.6g}",
        )

    a0_vals = np.atleast_1d(p.a0(ts))
    zeros = np.flatnonzero(a0_vals == 0.0)
    if zeros.size:
        return ValidationReport(False, f"a0 vanishes near t={ts[zeros[0]]:.6g}")
    flips = np.flatnonzero(np.sign(a0_vals[:-1]) != np.sign(a0_vals[1:]))
    if flips.size:
        mid = 0.5 * (ts[flips[0]] + ts[flips[0] + 1])
        return ValidationReport(False, f"a0 vanishes near t={mid:.6g}")

    return ValidationReport(True)


def _model1() -> Problem:
    f_text = (
        "(t^2+1)*cos(t) + (1-t^3)*cos(3/10) + (t-2)*cos(1/2)"
        " + (t^2/2)*sin(t) - (t/4)*sin(t) + t*cos(t) - sin(t)"
    )
    return Problem(
        t0=0.0,
        T=1.0,
        lam=0.25,
        loads=(
            LoadTerm(0.3, ScalarFunction.from_expression("1-t^3", 1)),
            LoadTerm(0.5, ScalarFunction.from_expression("t-2", 1)),
        ),
        a0=ScalarFunction.from_expression("t^2+1", 1),
        kernel=ScalarFunction.from_expression("t-2*s^2", 2),
        rhs=ScalarFunction.from_expression(f_text, 1),
        exact=ScalarFunction.from_expression("cos(t)", 1),
        name="model1",
    )


def _model2() -> Problem:
    f_text = (
        "((2+t)/3)*exp(t) + (t^3-1/2)*exp(3/10) + (2*t-t^2)*exp(1/2)"
        " + (exp(t)*t^2)/3 - (5*t*exp(t))/6 + (2*exp(t))/3 + t/6 - 2/3"
    )
    return Problem(
        t0=0.0,
        T=1.0,
        lam=1.0 / 6.0,
        loads=(
            LoadTerm(0.3, ScalarFunction.from_expression("t^3-1/2", 1)),
            LoadTerm(0.5, ScalarFunction.from_expression("2*t-t^2", 1)),
        ),
        a0=ScalarFunction.from_expression("(2+t)/3", 1),
        kernel=ScalarFunction.from_expression("t-2*s^2", 2),
        rhs=ScalarFunction.from_expression(f_text, 1),
        exact=ScalarFunction.from_expression("exp(t)", 1),
        name="model2",
    )


_BUILTINS: dict[str, tuple[Callable[[], Problem], str]] = {
    "model1": (_model1, "two loads, lambda=1/4, exact solution cos(t)"),
    "model2": (_model2, "two loads, lambda=1/6, exact solution exp(t)"),
}


def builtin_problem(name: str) -> Problem:
    """Return a built-in benchmark problem by name.

    Construction is referentially transparent: repeated calls return
    structurally identical problems.
    """
    try:
        factory, _ = _BUILTINS[name]
    except KeyError:
        raise ValueError(f"no such builtin: {name!r}") from None
    return factory()


def builtin_names() -> list[tuple[str, str]]:
    """Names and one-line descriptions of the built-in problems."""
    return [(name, desc) for name, (_, desc) in _BUILTINS.items()]
