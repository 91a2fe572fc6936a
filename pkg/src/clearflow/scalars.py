"""Scalar arithmetic modes.

All solver code is generic over the scalar type: exact `fractions.Fraction`
("rational" mode, the default) or IEEE doubles ("float" mode). Rational mode
makes every piecewise-linear quantity in the dynamics bit-exact; float mode
trades exactness for speed on larger batches.

The helpers here convert user-facing values (ints, decimal strings, "p/q"
strings, floats) into the scalar type of a mode and back into JSON-friendly
form ("p/q" strings in rational mode, plain numbers in float mode).
"""

from __future__ import annotations

import math
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from .errors import InvalidParamsError, SchemaError

RATIONAL = "rational"
FLOAT = "float"

MODES = (RATIONAL, FLOAT)

Scalar = Fraction | float

#: relative factor for float-mode zero detection, scaled by the largest
#: initial cash/debt entry of the network at hand
FLOAT_ZERO_REL = 1e-12


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise InvalidParamsError(f"unknown arithmetic mode {mode!r}; expected one of {MODES}")
    return mode


def to_scalar(value, mode: str) -> Scalar:
    """Convert a user-facing amount to the scalar type of `mode`.

    Accepts ints, Fractions, floats and strings. Strings may be decimal
    ("1.25") or rational ("5/4"). Floats fed to rational mode are read
    through their shortest decimal repr, so 0.1 becomes exactly 1/10.
    """
    check_mode(mode)
    if isinstance(value, bool):
        raise SchemaError(f"boolean is not a valid amount: {value!r}")
    if mode == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise SchemaError(f"amount is not finite: {value!r}")
            return Fraction(Decimal(repr(value)))
        if isinstance(value, str):
            return _fraction_from_str(value)
        raise SchemaError(f"cannot read amount of type {type(value).__name__}: {value!r}")
    # float mode
    if isinstance(value, (int, float, Fraction)):
        return float(value)
    if isinstance(value, str):
        return float(_fraction_from_str(value))
    raise SchemaError(f"cannot read amount of type {type(value).__name__}: {value!r}")


def _fraction_from_str(text: str) -> Fraction:
    s = text.strip()
    if "/" in s:
        num, _, den = s.partition("/")
        try:
            p = int(num.strip())
            q = int(den.strip())
        except ValueError as exc:
            raise SchemaError(f"malformed rational string {text!r}") from exc
        if q <= 0:
            raise SchemaError(f"rational string must have a positive denominator: {text!r}")
        return Fraction(p, q)
    try:
        return Fraction(Decimal(s))
    except (InvalidOperation, ValueError) as exc:
        raise SchemaError(f"malformed number {text!r}") from exc


def scalar_to_json(x: Scalar):
    """Serialize one scalar: "p/q" string for Fractions, number for floats."""
    if isinstance(x, Fraction):
        return str(x)
    return x


def format_scalar(x: Scalar) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(x)
