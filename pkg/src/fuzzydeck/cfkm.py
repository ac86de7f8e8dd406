"""Order-constrained fuzzy k-means over 1-D data.

Each observation may hold membership only in the two clusters whose centroids
bracket it, which makes every cluster's membership profile a piecewise-linear
fuzzy number and the cluster family a fuzzy partition of the domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    DegenerateClusterError,
    DomainError,
    FuzzydeckError,
    OrderingError,
    ParameterError,
)
from .fuzzy import FuzzyNumberPL, FuzzyPartition
from .samples import SampleSet

ROW_SUM_TOL = 1e-9
DEFAULT_FUZZIFIER = 2.0
DEFAULT_CONV_TOL = 1e-6
DEFAULT_MAX_ITER = 500


@dataclass(frozen=True)
class CentroidVector:
    """k >= 2 strictly increasing cluster centers in the open interval (lower, upper)."""

    values: np.ndarray
    lower: float
    upper: float

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 2:
            raise ParameterError("need at least two centroids")
        if not np.all(np.isfinite(arr)):
            raise OrderingError("centroids must be finite")
        if not np.all(np.diff(arr) > 0):
            raise OrderingError(f"centroids must be strictly increasing, got {arr.tolist()}")
        if arr[0] <= self.lower or arr[-1] >= self.upper:
            raise OrderingError(
                f"centroids must lie strictly inside ({self.lower}, {self.upper})"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def k(self) -> int:
        return int(self.values.size)

    def tuple_with_bounds(self) -> list[float]:
        """(lower, v_1, ..., v_k, upper): the anchor tuple used for card encoding."""
        return [self.lower, *map(float, self.values), self.upper]


@dataclass(frozen=True)
class MembershipMatrix:
    """Dense (n, k) degrees; each row has at most two adjacent nonzero entries."""

    degrees: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.degrees, dtype=np.float64)
        if arr.ndim != 2:
            raise ParameterError("membership matrix must be 2-D")
        arr.setflags(write=False)
        object.__setattr__(self, "degrees", arr)
        self.validate_structure()

    def validate_structure(self, tol: float = ROW_SUM_TOL) -> None:
        arr = self.degrees
        if arr.min() < -tol or arr.max() > 1 + tol:
            raise FuzzydeckError("membership degrees outside [0, 1]")
        sums = arr.sum(axis=1)
        bad = np.abs(sums - 1.0) > tol
        if bad.any():
            i = int(np.argmax(bad))
            raise FuzzydeckError(f"row {i} sums to {sums[i]!r}, expected 1")
        nz = arr > 0
        counts = nz.sum(axis=1)
        if counts.max() > 2:
            raise FuzzydeckError("a row has more than two nonzero memberships")
        rows2 = np.nonzero(counts == 2)[0]
        if rows2.size:
            first = np.argmax(nz[rows2], axis=1)
            last = arr.shape[1] - 1 - np.argmax(nz[rows2][:, ::-1], axis=1)
            if np.any(last - first != 1):
                raise FuzzydeckError("nonzero memberships must sit on adjacent clusters")

    @property
    def shape(self) -> tuple[int, int]:
        return self.degrees.shape

    def row(self, i: int) -> dict[int, float]:
        r = self.degrees[i]
        return {int(j): float(r[j]) for j in np.nonzero(r)[0]}


@dataclass(frozen=True)
class FitReport:
    """Per-iteration objective values and convergence metadata for one fit."""

    objective_trace: tuple[float, ...]
    iterations: int
    converged: bool
    fuzzifier: float
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "objective_trace": list(self.objective_trace),
            "iterations": self.iterations,
            "converged": self.converged,
            "fuzzifier": self.fuzzifier,
            "tolerance": self.tolerance,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FitReport":
        return cls(
            objective_trace=tuple(doc["objective_trace"]),
            iterations=int(doc["iterations"]),
            converged=bool(doc["converged"]),
            fuzzifier=float(doc["fuzzifier"]),
            tolerance=float(doc["tolerance"]),
        )


def bracketing_index(x: float, centroids: CentroidVector) -> int:
    """Index j in {0..k} such that v_j <= x < v_{j+1}, with v_0 = lower and
    v_{k+1} = upper; x == upper maps to k."""
    if not centroids.lower <= x <= centroids.upper:
        raise DomainError(
            f"{x!r} outside domain [{centroids.lower}, {centroids.upper}]"
        )
    return int(np.searchsorted(centroids.values, x, side="right"))


def update_memberships(data: SampleSet, centroids: CentroidVector,
                       m: float = DEFAULT_FUZZIFIER) -> MembershipMatrix:
    """Optimal memberships for fixed centroids.

    Interior points split mass between their two bracketing clusters via the
    closed form u = (1 + (d_left/d_right)^(1/(m-1)))^-1; a point exactly on a
    centroid takes membership 1 there; points below the first or above the
    last centroid belong fully to the single adjacent cluster.
    """
    if m <= 1:
        raise ParameterError(f"fuzzifier must exceed 1, got {m}")
    if centroids.lower != data.lower or centroids.upper != data.upper:
        raise DomainError("centroid bounds do not match the sample bounds")
    u = _kernels.membership_matrix(data.values, centroids.values, float(m))
    return MembershipMatrix(u)


def update_centers(data: SampleSet, memberships: MembershipMatrix,
                   m: float = DEFAULT_FUZZIFIER) -> CentroidVector:
    """Weighted-mean center update; the unique minimizer for fixed memberships."""
    if m <= 1:
        raise ParameterError(f"fuzzifier must exceed 1, got {m}")
    num, den = _kernels.center_sums(data.values, memberships.degrees, float(m))
    dead = np.nonzero(den == 0.0)[0]
    if dead.size:
        raise DegenerateClusterError(
            f"cluster {int(dead[0])} has zero total membership weight"
        )
    return CentroidVector(values=num / den, lower=data.lower, upper=data.upper)


def objective(data: SampleSet, memberships: MembershipMatrix,
              centroids: CentroidVector, m: float = DEFAULT_FUZZIFIER) -> float:
    """Membership-weighted sum of squared distances to the centers."""
    return _kernels.objective_value(
        data.values, memberships.degrees, centroids.values, float(m)
    )


def init_centroids(data: SampleSet, k: int, strategy: str = "even") -> CentroidVector:
    """Initial centers: "even" spaces them at j/(k+1) across [lower, upper];
    "percentile" places them at the 100*j/(k+1) empirical percentiles."""
    if k < 2:
        raise ParameterError(f"need k >= 2 clusters, got {k}")
    fractions = np.arange(1, k + 1) / (k + 1)
    if strategy == "even":
        vals = data.lower + data.span * fractions
    elif strategy == "percentile":
        vals = np.percentile(data.values, 100 * fractions)
        if np.any(np.diff(vals) <= 0):
            raise OrderingError(
                "percentile initialization produced tied centroids; the data is too "
                "discrete at this k; use the 'even' strategy or jitter the data"
            )
        if vals[0] <= data.lower or vals[-1] >= data.upper:
            raise OrderingError(
                "percentile initialization touched a domain bound; widen the bounds "
                "or use the 'even' strategy"
            )
    else:
        raise ParameterError(f"unknown init strategy {strategy!r}")
    return CentroidVector(values=vals, lower=data.lower, upper=data.upper)


def run_cfkm(data: SampleSet, k: int, m: float = DEFAULT_FUZZIFIER,
             strategy: str = "even", tau_conv: float = DEFAULT_CONV_TOL,
             max_iter: int = DEFAULT_MAX_ITER,
             init: CentroidVector | None = None,
             ) -> tuple[CentroidVector, MembershipMatrix, FitReport]:
    """Alternate membership and center updates until the centers settle.

    Parameters
    ----------
    data : SampleSet
        Observations with domain bounds.
    k : int
        Number of clusters (>= 2).
    m : float
        Fuzzifier exponent (> 1).
    strategy : str
        "even" or "percentile" initialization (ignored when ``init`` given).
    tau_conv : float
        Stop when the largest single-center displacement drops below this.
    max_iter : int
        Iteration cap.
    init : CentroidVector, optional
        Explicit starting centers.

    Returns
    -------
    (CentroidVector, MembershipMatrix, FitReport)
        Final centers, memberships consistent with them, and the fit trace.
    """
    if tau_conv <= 0:
        raise ParameterError(f"tau_conv must be positive, got {tau_conv}")
    if max_iter < 1:
        raise ParameterError(f"max_iter must be >= 1, got {max_iter}")
    centroids = init if init is not None else init_centroids(data, k, strategy)
    if centroids.k != k:
        raise ParameterError("init centroid count does not match k")

    trace: list[float] = []
    converged = False
    iterations = 0
    for t in range(1, max_iter + 1):
        iterations = t
        try:
            memberships = update_memberships(data, centroids, m)
            new_centroids = update_centers(data, memberships, m)
        except (DegenerateClusterError, OrderingError) as exc:
            raise type(exc)(f"iteration {t}: {exc}") from exc
        trace.append(objective(data, memberships, new_centroids, m))
        delta = float(np.max(np.abs(new_centroids.values - centroids.values)))
        centroids = new_centroids
        if delta < tau_conv:
            converged = True
            break

    memberships = update_memberships(data, centroids, m)
    report = FitReport(
        objective_trace=tuple(trace),
        iterations=iterations,
        converged=converged,
        fuzzifier=float(m),
        tolerance=float(tau_conv),
    )
    return centroids, memberships, report


def partition_from_memberships(data: SampleSet, centroids: CentroidVector,
                               memberships: MembershipMatrix) -> FuzzyPartition:
    """Piecewise-linear fuzzy partition through the observed memberships.

    Class j interpolates its data memberships over [v_{j-1}, v_{j+1}] and is
    pinned to 1 at its own centroid and to 0 at each neighbour centroid. The
    first class stays at 1 down to the lower bound, the last up to the upper
    bound. Adjacent classes share breakpoints, so their sum is exactly 1.
    """
    x = data.values
    u = memberships.degrees
    if u.shape != (data.n, centroids.k):
        raise ParameterError("membership matrix shape does not match data and centroids")
    v = centroids.values
    k = centroids.k
    classes = []
    for c in range(k):
        left = data.lower if c == 0 else float(v[c - 1])
        right = data.upper if c == k - 1 else float(v[c + 1])
        points = [(float(v[c]), 1.0)]
        points.append((left, 1.0) if c == 0 else (left, 0.0))
        points.append((right, 1.0) if c == k - 1 else (right, 0.0))
        inside = (x >= left) & (x <= right)
        points.extend(zip(x[inside].tolist(), u[inside, c].tolist()))
        classes.append(FuzzyNumberPL.from_polyline(points, label=f"class_{c + 1}"))
    return FuzzyPartition(classes=tuple(classes), lower=data.lower, upper=data.upper)
