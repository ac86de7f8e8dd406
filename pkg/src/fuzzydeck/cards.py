"""Card chains: integer-gap encodings of ordered value tuples.

A chain pins its first anchor at the domain's lower bound and its last at the
upper bound; every gap holds a whole number of unit cards. Encoding quantizes
values to 10^-p of the domain; decoding applies the cumulative-card rule with
the chain's current total, so inserting or removing cards rescales the unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EditError, OrderingError, PrecisionError

MAX_PRECISION = 9
MIN_GAP = 1


def _floor_units(t: float, total: int) -> int:
    # Guard against binary representation of decimal inputs landing a hair
    # below an integer boundary (e.g. 0.29 * 100 == 28.999...).
    units = t * total
    return math.floor(units + 1e-9 + abs(units) * 1e-12)


@dataclass(frozen=True)
class CardChain:
    """Ordered anchors over [lower, upper] separated by integer card counts."""

    lower: float
    upper: float
    precision: int
    anchors: tuple[str, ...]
    gaps: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "anchors", tuple(self.anchors))
        object.__setattr__(self, "gaps", tuple(int(g) for g in self.gaps))
        if self.lower >= self.upper:
            raise OrderingError(f"invalid chain domain [{self.lower}, {self.upper}]")
        if not 1 <= self.precision <= MAX_PRECISION:
            raise PrecisionError(f"precision must be in 1..{MAX_PRECISION}")
        if len(self.anchors) < 2 or len(self.gaps) != len(self.anchors) - 1:
            raise EditError("need one gap between each pair of consecutive anchors")
        if any(g < MIN_GAP for g in self.gaps):
            raise EditError(f"every gap needs at least {MIN_GAP} card, got {self.gaps}")

    @property
    def total(self) -> int:
        return sum(self.gaps)

    def cumulative(self) -> list[int]:
        out = [0]
        for g in self.gaps:
            out.append(out[-1] + g)
        return out

    def values(self) -> list[float]:
        """Decoded anchor positions; endpoints are exactly the domain bounds."""
        n = self.total
        span = self.upper - self.lower
        vals = [self.lower + span * c / n for c in self.cumulative()]
        vals[0] = self.lower
        vals[-1] = self.upper
        return vals

    def interior_values(self) -> list[float]:
        return self.values()[1:-1]

    def to_dict(self) -> dict:
        cum = self.cumulative()
        return {
            "domain": [self.lower, self.upper],
            "precision": self.precision,
            "total": self.total,
            "anchors": [
                {"label": label, "cumulative": c} for label, c in zip(self.anchors, cum)
            ],
            "gaps": list(self.gaps),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CardChain":
        return cls(
            lower=float(doc["domain"][0]),
            upper=float(doc["domain"][1]),
            precision=int(doc["precision"]),
            anchors=tuple(a["label"] for a in doc["anchors"]),
            gaps=tuple(int(g) for g in doc["gaps"]),
        )


@dataclass(frozen=True)
class CardEdit:
    """insert/remove cards in one gap, or move cards between two gaps."""

    kind: str
    gap_index: int
    count: int
    target_gap_index: int | None = None

    def __post_init__(self):
        if self.kind not in ("insert", "remove", "move"):
            raise EditError(f"unknown edit kind {self.kind!r}")
        if self.count < 1:
            raise EditError(f"edit count must be positive, got {self.count}")
        if self.kind == "move" and self.target_gap_index is None:
            raise EditError("move edits need a target_gap_index")

    def to_dict(self) -> dict:
        doc = {"kind": self.kind, "gap_index": self.gap_index, "count": self.count}
        if self.kind == "move":
            doc["target_gap_index"] = self.target_gap_index
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "CardEdit":
        return cls(
            kind=doc["kind"],
            gap_index=int(doc["gap_index"]),
            count=int(doc["count"]),
            target_gap_index=(
                int(doc["target_gap_index"]) if doc.get("target_gap_index") is not None
                else None
            ),
        )


def choose_precision(values) -> int:
    """Smallest p >= 1 at which consecutive unit floors stay distinct.

    ``values`` must be strictly increasing over [0, 1] with endpoints 0 and 1.
    """
    vals = [float(v) for v in values]
    if len(vals) < 2 or vals[0] != 0.0 or vals[-1] != 1.0:
        raise OrderingError("normalized tuple must start at 0 and end at 1")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise OrderingError(f"tuple must be strictly increasing, got {vals}")
    for p in range(1, MAX_PRECISION + 1):
        n = 10**p
        floors = [_floor_units(v, n) for v in vals]
        if all(b > a for a, b in zip(floors, floors[1:])):
            return p
    raise PrecisionError(
        f"no precision up to 10^-{MAX_PRECISION} separates all values: {vals}"
    )


def values_to_cards(values, labels, precision: int, lower: float | None = None,
                    upper: float | None = None) -> CardChain:
    """Encode an ordered tuple (endpoints included) as a card chain.

    The tuple's first and last entries define the domain unless explicit
    bounds are given. Gap i holds floor(N*t_i) - floor(N*t_{i-1}) cards for
    the normalized positions t; a zero gap means the precision is too coarse.
    """
    vals = [float(v) for v in values]
    labels = tuple(str(s) for s in labels)
    if len(vals) != len(labels):
        raise OrderingError("labels and values must align")
    if len(vals) < 2:
        raise OrderingError("need at least the two endpoint values")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise OrderingError(f"values must be strictly increasing, got {vals}")
    lo = vals[0] if lower is None else float(lower)
    hi = vals[-1] if upper is None else float(upper)
    if vals[0] != lo or vals[-1] != hi:
        raise OrderingError("first/last value must equal the domain bounds")
    if not 1 <= precision <= MAX_PRECISION:
        raise PrecisionError(f"precision must be in 1..{MAX_PRECISION}")

    n = 10**precision
    span = hi - lo
    units = [_floor_units((v - lo) / span, n) for v in vals]
    gaps = [b - a for a, b in zip(units, units[1:])]
    if any(g < MIN_GAP for g in gaps):
        raise PrecisionError(
            f"values collide at precision 10^-{precision}; choose_precision "
            f"suggests the smallest workable p"
        )
    return CardChain(lower=lo, upper=hi, precision=precision, anchors=labels,
                     gaps=tuple(gaps))


def values_to_cards_auto(values, labels, precision: int, lower: float | None = None,
                         upper: float | None = None) -> CardChain:
    """Encode at the requested precision, raising it just enough on collision."""
    try:
        return values_to_cards(values, labels, precision, lower, upper)
    except PrecisionError:
        vals = [float(v) for v in values]
        lo = vals[0] if lower is None else float(lower)
        hi = vals[-1] if upper is None else float(upper)
        span = hi - lo
        normalized = [(v - lo) / span for v in vals]
        normalized[0], normalized[-1] = 0.0, 1.0
        needed = choose_precision(normalized)
        if needed <= precision:
            raise
        return values_to_cards(values, labels, needed, lower, upper)


def cards_to_values(chain: CardChain) -> list[float]:
    """Cumulative-card rule: anchor i sits at lower + span * cum_i / total."""
    return chain.values()


def apply_edit(chain: CardChain, edit: CardEdit) -> CardChain:
    """Apply one edit, returning a new chain; moves preserve the total."""
    gaps = list(chain.gaps)

    def check_index(i: int) -> None:
        if not 0 <= i < len(gaps):
            raise EditError(f"gap index {i} out of range 0..{len(gaps) - 1}")

    check_index(edit.gap_index)
    if edit.kind == "insert":
        gaps[edit.gap_index] += edit.count
    elif edit.kind == "remove":
        if gaps[edit.gap_index] - edit.count < MIN_GAP:
            raise EditError(
                f"removing {edit.count} cards would collapse gap {edit.gap_index} "
                f"(has {gaps[edit.gap_index]}, minimum {MIN_GAP})"
            )
        gaps[edit.gap_index] -= edit.count
    else:  # move
        check_index(edit.target_gap_index)
        if edit.target_gap_index == edit.gap_index:
            raise EditError("move source and target gaps must differ")
        if gaps[edit.gap_index] - edit.count < MIN_GAP:
            raise EditError(
                f"moving {edit.count} cards would collapse gap {edit.gap_index} "
                f"(has {gaps[edit.gap_index]}, minimum {MIN_GAP})"
            )
        gaps[edit.gap_index] -= edit.count
        gaps[edit.target_gap_index] += edit.count

    return CardChain(lower=chain.lower, upper=chain.upper, precision=chain.precision,
                     anchors=chain.anchors, gaps=tuple(gaps))
