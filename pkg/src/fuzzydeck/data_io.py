"""Dataset ingestion, synthetic generators, and plot-ready summaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import DatasetError, ParameterError
from .samples import SampleSet

SHAPES = ("symmetric", "skewed", "multimodal")
KDE_GRID_POINTS = 512


@dataclass(frozen=True)
class DatasetSummary:
    """Histogram and Gaussian-KDE view of a sample set, for plotting."""

    n: int
    min: float
    max: float
    mean: float
    bin_edges: np.ndarray
    counts: np.ndarray
    kde_x: np.ndarray
    kde_density: np.ndarray
    bandwidth: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "min": self.min,
            "max": self.max,
            "mean": self.mean,
            "histogram": {
                "bin_edges": [float(e) for e in self.bin_edges],
                "counts": [int(c) for c in self.counts],
            },
            "kde": {
                "x": [float(v) for v in self.kde_x],
                "density": [float(d) for d in self.kde_density],
            },
            "bandwidth": self.bandwidth,
        }


def load_csv(path, column_name: str, bounds: tuple[float, float] | None = None,
             ) -> SampleSet:
    """Read one numeric column; non-numeric and NaN rows are dropped and counted.

    Bounds default to the cleaned data range; supplied bounds must contain it.
    """
    try:
        frame = pd.read_csv(path)
    except OSError as exc:
        raise DatasetError(f"cannot read {path!r}: {exc}")
    except pd.errors.EmptyDataError:
        raise DatasetError(f"{path!r} is empty")
    except ValueError as exc:
        # covers parser errors and undecodable (binary) input
        raise DatasetError(f"{path!r} is not parseable CSV: {exc}")
    if column_name not in frame.columns:
        raise DatasetError(
            f"column {column_name!r} not in {sorted(frame.columns)}"
        )
    raw = pd.to_numeric(frame[column_name], errors="coerce")
    clean = raw.dropna()
    dropped = int(len(raw) - len(clean))
    if clean.empty:
        raise DatasetError(f"column {column_name!r} has no numeric rows")
    return SampleSet.from_values(clean.to_numpy(dtype=float), bounds=bounds,
                                 dropped=dropped)


def synth_generate(shape: str, n: int, seed: int) -> SampleSet:
    """Seed-deterministic synthetic samples on [0, 1].

    symmetric: one central bell (Beta(5, 5)); skewed: right-skewed mass in the
    low region (Beta(2, 6)); multimodal: equal mixture of three narrow bells
    near 0.2, 0.5, and 0.8.
    """
    if shape not in SHAPES:
        raise ParameterError(f"shape must be one of {SHAPES}, got {shape!r}")
    if n < 100:
        raise ParameterError(f"need n >= 100 synthetic samples, got {n}")
    rng = np.random.default_rng(seed)
    if shape == "symmetric":
        values = rng.beta(5, 5, size=n)
    elif shape == "skewed":
        values = rng.beta(2, 6, size=n)
    else:
        params = ((30, 120), (75, 75), (120, 30))
        component = rng.integers(0, 3, size=n)
        values = np.empty(n)
        for c, (alpha, beta) in enumerate(params):
            mask = component == c
            values[mask] = rng.beta(alpha, beta, size=int(mask.sum()))
    return SampleSet.from_values(values, bounds=(0.0, 1.0))


def silverman_bandwidth(values: np.ndarray) -> float:
    n = values.size
    sd = float(np.std(values))
    q75, q25 = np.percentile(values, [75, 25])
    iqr = float(q75 - q25)
    scale = min(sd, iqr / 1.34) if iqr > 0 else sd
    if scale <= 0:
        scale = max(abs(float(values[0])), 1.0) * 0.01
    return 0.9 * scale * n ** (-0.2)


def summarize(data: SampleSet, bin_count: int = 30,
              bandwidth: float | None = None) -> DatasetSummary:
    """Histogram over the domain plus a Gaussian KDE on an extended grid.

    The KDE grid reaches three bandwidths past each bound so the density
    integrates to ~1 even when mass sits near a bound.
    """
    if bin_count < 1:
        raise ParameterError(f"bin_count must be >= 1, got {bin_count}")
    if bandwidth is not None and bandwidth <= 0:
        raise ParameterError(f"bandwidth must be positive, got {bandwidth}")
    x = data.values
    h = bandwidth if bandwidth is not None else silverman_bandwidth(x)
    counts, edges = np.histogram(x, bins=bin_count, range=(data.lower, data.upper))
    grid = np.linspace(data.lower - 3 * h, data.upper + 3 * h, KDE_GRID_POINTS)
    z = (grid[:, None] - x[None, :]) / h
    density = np.exp(-0.5 * z**2).sum(axis=1) / (x.size * h * np.sqrt(2 * np.pi))
    return DatasetSummary(
        n=data.n,
        min=float(x.min()),
        max=float(x.max()),
        mean=float(x.mean()),
        bin_edges=edges,
        counts=counts,
        kde_x=grid,
        kde_density=density,
        bandwidth=float(h),
    )


def kde_local_maxima(summary: DatasetSummary, floor_ratio: float = 0.1) -> list[float]:
    """Positions of interior KDE peaks taller than floor_ratio * max density."""
    d = summary.kde_density
    floor = floor_ratio * d.max()
    peaks = []
    for i in range(1, len(d) - 1):
        if d[i] > d[i - 1] and d[i] >= d[i + 1] and d[i] > floor:
            peaks.append(float(summary.kde_x[i]))
    return peaks


def kde_valleys(summary: DatasetSummary) -> list[float]:
    """Positions of interior KDE local minima between peaks."""
    d = summary.kde_density
    valleys = []
    for i in range(1, len(d) - 1):
        if d[i] < d[i - 1] and d[i] <= d[i + 1]:
            valleys.append(float(summary.kde_x[i]))
    return valleys
