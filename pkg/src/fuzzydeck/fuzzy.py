"""Piecewise-linear fuzzy numbers and fuzzy partitions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FuzzydeckError, OrderingError

_ONE_TOL = 1e-12


@dataclass(frozen=True)
class FuzzyNumberPL:
    """A normal, unimodal membership function given by linear interpolation.

    ``xs`` are strictly increasing breakpoint positions, ``mus`` the matching
    membership degrees. The core is the closed interval where membership is 1;
    the support spans the first to last breakpoint. A boundary class may hold
    membership 1 at the domain bound itself.
    """

    xs: np.ndarray
    mus: np.ndarray
    core: tuple[float, float]
    support: tuple[float, float]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.float64)
        mus = np.asarray(self.mus, dtype=np.float64)
        if xs.ndim != 1 or xs.size < 2 or xs.shape != mus.shape:
            raise FuzzydeckError("breakpoints need matching 1-D arrays of length >= 2")
        if not np.all(np.diff(xs) > 0):
            raise OrderingError("breakpoint positions must be strictly increasing")
        if mus.min() < -_ONE_TOL or mus.max() > 1 + _ONE_TOL:
            raise FuzzydeckError("membership degrees must lie in [0, 1]")
        mus = np.clip(mus, 0.0, 1.0)
        xs.setflags(write=False)
        mus.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "mus", mus)

        c_l, c_r = self.core
        s_l, s_r = self.support
        if not (s_l <= c_l <= c_r <= s_r):
            raise FuzzydeckError(f"core {self.core} not nested in support {self.support}")
        if s_l != xs[0] or s_r != xs[-1]:
            raise FuzzydeckError("support must span the breakpoint range")
        on_core = (xs >= c_l) & (xs <= c_r)
        if not on_core.any() or not np.all(mus[on_core] >= 1 - _ONE_TOL):
            raise FuzzydeckError("membership must be 1 on every core breakpoint")
        left = mus[xs <= c_l]
        right = mus[xs >= c_r]
        if np.any(np.diff(left) < -_ONE_TOL):
            raise FuzzydeckError("left side must be nondecreasing toward the core")
        if np.any(np.diff(right) > _ONE_TOL):
            raise FuzzydeckError("right side must be nonincreasing away from the core")

    @classmethod
    def from_polyline(cls, points, label: str = "") -> "FuzzyNumberPL":
        """Build from (x, mu) pairs: dedupe equal x by averaging, trim flat
        zero tails to a single endpoint, and derive core/support."""
        pts = sorted((float(x), float(mu)) for x, mu in points)
        xs: list[float] = []
        mus: list[float] = []
        i = 0
        while i < len(pts):
            j = i
            acc = 0.0
            while j < len(pts) and pts[j][0] == pts[i][0]:
                acc += pts[j][1]
                j += 1
            xs.append(pts[i][0])
            mus.append(acc / (j - i))
            i = j
        # keep a single zero breakpoint at each flat outer tail
        while len(xs) > 2 and mus[0] <= _ONE_TOL and mus[1] <= _ONE_TOL:
            xs.pop(0)
            mus.pop(0)
        while len(xs) > 2 and mus[-1] <= _ONE_TOL and mus[-2] <= _ONE_TOL:
            xs.pop()
            mus.pop()

        peak = [idx for idx, mu in enumerate(mus) if mu >= 1 - _ONE_TOL]
        if not peak:
            raise FuzzydeckError("polyline never reaches membership 1 (no core)")
        if peak[-1] - peak[0] + 1 != len(peak):
            raise FuzzydeckError("membership-1 breakpoints are not contiguous")
        for idx in peak:
            mus[idx] = 1.0
        core = (xs[peak[0]], xs[peak[-1]])
        support = (xs[0], xs[-1])
        return cls(xs=np.array(xs), mus=np.array(mus), core=core, support=support,
                   label=label)

    def __call__(self, x) -> np.ndarray:
        return np.interp(x, self.xs, self.mus)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "breakpoints": [[float(x), float(mu)] for x, mu in zip(self.xs, self.mus)],
            "core": [float(self.core[0]), float(self.core[1])],
            "support": [float(self.support[0]), float(self.support[1])],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FuzzyNumberPL":
        bps = doc["breakpoints"]
        return cls(
            xs=np.array([p[0] for p in bps]),
            mus=np.array([p[1] for p in bps]),
            core=tuple(doc["core"]),
            support=tuple(doc["support"]),
            label=doc.get("label", ""),
        )


@dataclass(frozen=True)
class FuzzyPartition:
    """Ordered fuzzy numbers whose memberships sum to one over [lower, upper]."""

    classes: tuple[FuzzyNumberPL, ...]
    lower: float
    upper: float

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))

    @property
    def k(self) -> int:
        return len(self.classes)

    def evaluate(self, x) -> np.ndarray:
        """Membership of every class at the given positions, shape (k, len(x))."""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        return np.vstack([cls(x) for cls in self.classes])

    def unity_residual(self, grid_points: int = 10001) -> float:
        grid = np.linspace(self.lower, self.upper, grid_points)
        breaks = np.concatenate([cls.xs for cls in self.classes])
        grid = np.unique(np.concatenate([grid, breaks]))
        total = self.evaluate(grid).sum(axis=0)
        return float(np.abs(total - 1.0).max())

    def validate(self, grid_points: int = 10001, tol: float = 1e-6) -> None:
        """Raise unless partition-of-unity and ordered disjoint cores hold."""
        residual = self.unity_residual(grid_points)
        if residual > tol:
            raise FuzzydeckError(f"partition of unity violated: residual {residual:.3g}")
        for left, right in zip(self.classes, self.classes[1:]):
            if not left.core[1] < right.core[0]:
                raise FuzzydeckError(
                    f"cores overlap or are out of order: {left.core} vs {right.core}"
                )

    def to_dict(self) -> dict:
        return {
            "bounds": [float(self.lower), float(self.upper)],
            "classes": [cls.to_dict() for cls in self.classes],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FuzzyPartition":
        return cls(
            classes=tuple(FuzzyNumberPL.from_dict(c) for c in doc["classes"]),
            lower=doc["bounds"][0],
            upper=doc["bounds"][1],
        )
