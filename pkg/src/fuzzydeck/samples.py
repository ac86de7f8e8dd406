"""1-D observation sets with explicit domain bounds."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DatasetError, DomainError


@dataclass(frozen=True)
class SampleSet:
    """Sorted finite observations on a closed interval [lower, upper].

    ``values`` is kept ascending; duplicates are allowed. Bounds may be wider
    than the data range (supplied by the analyst) but never narrower.
    """

    values: np.ndarray
    lower: float
    upper: float
    dropped: int = field(default=0, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise DatasetError("sample set needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise DatasetError("sample set contains NaN or infinite values")
        arr = np.sort(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        lo, hi = float(self.lower), float(self.upper)
        if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
            raise DomainError(f"invalid bounds [{lo}, {hi}]")
        if arr[0] < lo or arr[-1] > hi:
            offender = arr[0] if arr[0] < lo else arr[-1]
            raise DomainError(
                f"observation {offender!r} lies outside the supplied bounds [{lo}, {hi}]"
            )
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def from_values(cls, values, bounds: tuple[float, float] | None = None,
                    dropped: int = 0) -> "SampleSet":
        """Build a sample set, defaulting bounds to the data range."""
        arr = np.asarray(list(values), dtype=np.float64)
        if arr.size and not np.all(np.isfinite(arr)):
            raise DatasetError("sample set contains NaN or infinite values")
        if bounds is None:
            if arr.size == 0:
                raise DatasetError("sample set needs at least one observation")
            lo, hi = float(arr.min()), float(arr.max())
            if lo == hi:
                # Degenerate range: widen symmetrically so [a, b] is a real interval.
                pad = max(abs(lo), 1.0) * 1e-6
                lo, hi = lo - pad, hi + pad
            bounds = (lo, hi)
        return cls(values=arr, lower=bounds[0], upper=bounds[1], dropped=dropped)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def span(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {
            "values": [float(v) for v in self.values],
            "bounds": [self.lower, self.upper],
            "dropped": self.dropped,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SampleSet":
        return cls.from_values(doc["values"], bounds=tuple(doc["bounds"]),
                               dropped=int(doc.get("dropped", 0)))
