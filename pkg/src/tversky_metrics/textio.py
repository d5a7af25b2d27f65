"""Plain-text and CSV rendering of exact values, counterexamples and region grids."""
from __future__ import annotations

import csv
import io
import math
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, List, Union

from .measures import set_to_mask
from .verify import Counterexample, RegionCell

DECIMAL_DIGITS = 12

GRID_HEADER = (
    "# region grid for D_{alpha,beta}; alpha and beta are exact fractions\n"
    "# predicted: closed-form metric region; violated: a triangle violation was found\n"
    "# X,Y,Z are bitmasks over the row's universe X|Y|Z: bit i marks its i-th smallest element\n"
)


def format_decimal(value: Union[Fraction, int, float], digits: int = DECIMAL_DIGITS) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{digits}g}"
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = digits + 2
        dec = Decimal(value.numerator) / Decimal(value.denominator)
    return f"{dec:.{digits}g}"


def format_exact(value: Union[Fraction, int, float]) -> str:
    if isinstance(value, float):
        return format_decimal(value)
    return str(Fraction(value))


def format_value(value) -> str:
    """``2/3 (0.666666666667)``; integers and floats print once."""
    exact, dec = format_exact(value), format_decimal(value)
    return exact if exact == dec else f"{exact} ({dec})"


def format_set(X) -> str:
    def key(e):
        return (isinstance(e, str), e)

    items = sorted(X, key=key) if not isinstance(X, (str, bytes)) else None
    if items is None:
        return repr(X)
    return "{" + ",".join(str(e) for e in items) + "}"


def counterexample_lines(found: Counterexample) -> List[str]:
    return [
        f"X: {format_set(found.X)}",
        f"Y: {format_set(found.Y)}",
        f"Z: {format_set(found.Z)}",
        f"d(X,Y): {format_value(found.dXY)}",
        f"d(X,Z): {format_value(found.dXZ)}",
        f"d(Z,Y): {format_value(found.dZY)}",
        f"margin: {format_value(found.margin)}",
    ]


def _masks(found: Counterexample):
    universe = found.X | found.Y | found.Z
    return tuple(set_to_mask(S, universe) for S in (found.X, found.Y, found.Z))


def region_csv(cells: Iterable[RegionCell]) -> str:
    buf = io.StringIO()
    buf.write(GRID_HEADER)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alpha", "beta", "predicted", "violated", "X", "Y", "Z", "margin"])
    for cell in cells:
        row = [str(cell.alpha), str(cell.beta), int(cell.predicted_metric), int(cell.violated)]
        if cell.observed_violation is not None:
            row += [*_masks(cell.observed_violation), format_exact(cell.observed_violation.margin)]
        else:
            row += ["", "", "", ""]
        writer.writerow(row)
    return buf.getvalue()


def read_region_csv(text: str) -> List[dict]:
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(body))
