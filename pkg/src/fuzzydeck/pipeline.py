"""Three-stage elicitation sessions: propose from data, edit as cards, commit.

Stage 1 builds a value scale from cluster centers, stage 2 widens it to cores
and supports, stage 3 fine-tunes one membership side at a time. Every proposal
and edit lands in a replayable transcript.
"""

from __future__ import annotations

import logging
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

import numpy as np

from .cards import CardChain, CardEdit, apply_edit, values_to_cards_auto
from .cfkm import (
    CentroidVector,
    FitReport,
    MembershipMatrix,
    partition_from_memberships,
    run_cfkm,
    update_memberships,
)
from .errors import (
    EditError,
    FuzzydeckError,
    InsufficientDataError,
    OrderingError,
    ParameterError,
    ReplayDivergenceError,
    StageError,
)
from .fuzzy import FuzzyNumberPL, FuzzyPartition
from .samples import SampleSet

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

STAGES = (
    "Created",
    "Step1Proposed",
    "Step1Committed",
    "Step2Proposed",
    "Step2Committed",
    "Step3InProgress",
    "Finalized",
)

SIDES = ("left", "right")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


@dataclass(frozen=True)
class PipelineParams:
    """Knobs shared by the whole session."""

    k: int = 5
    fuzzifier: float = 2.0
    core_tolerance: float = 0.01
    conv_tolerance: float = 1e-6
    init: str = "even"
    scale_precision: int = 2
    side_precision: int = 3
    max_iter: int = 500

    def __post_init__(self):
        if self.k < 2:
            raise ParameterError(f"k must be >= 2, got {self.k}")
        if self.fuzzifier <= 1:
            raise ParameterError(f"fuzzifier must exceed 1, got {self.fuzzifier}")
        if not 0 < self.core_tolerance < 0.5:
            raise ParameterError(
                f"core tolerance must lie in (0, 0.5), got {self.core_tolerance}"
            )
        if self.conv_tolerance <= 0:
            raise ParameterError("convergence tolerance must be positive")
        if self.init not in ("even", "percentile"):
            raise ParameterError(f"init must be 'even' or 'percentile', got {self.init!r}")
        if not (1 <= self.scale_precision <= 9 and 1 <= self.side_precision <= 9):
            raise ParameterError("precisions must lie in 1..9")
        if self.max_iter < 1:
            raise ParameterError("max_iter must be >= 1")

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "fuzzifier": self.fuzzifier,
            "core_tolerance": self.core_tolerance,
            "conv_tolerance": self.conv_tolerance,
            "init": self.init,
            "scale_precision": self.scale_precision,
            "side_precision": self.side_precision,
            "max_iter": self.max_iter,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineParams":
        return cls(**{k: doc[k] for k in cls().to_dict() if k in doc})


@dataclass(frozen=True)
class SideRefinement:
    """One monotone branch staged for fine-tuning: confidence levels on the
    membership axis and matching breakpoints on the value axis."""

    class_index: int
    side: str
    interval: tuple[float, float]
    levels: tuple[float, ...]
    breakpoints: tuple[float, ...]
    level_chain: CardChain
    breakpoint_chain: CardChain

    def to_dict(self) -> dict:
        return {
            "class_index": self.class_index,
            "side": self.side,
            "interval": [self.interval[0], self.interval[1]],
            "levels": list(self.levels),
            "breakpoints": list(self.breakpoints),
            "level_chain": self.level_chain.to_dict(),
            "breakpoint_chain": self.breakpoint_chain.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SideRefinement":
        return cls(
            class_index=int(doc["class_index"]),
            side=doc["side"],
            interval=tuple(doc["interval"]),
            levels=tuple(doc["levels"]),
            breakpoints=tuple(doc["breakpoints"]),
            level_chain=CardChain.from_dict(doc["level_chain"]),
            breakpoint_chain=CardChain.from_dict(doc["breakpoint_chain"]),
        )


@dataclass
class Session:
    """Mutable elicitation state; advance it with the module functions."""

    dataset: SampleSet
    params: PipelineParams
    id: str = field(default_factory=lambda: uuid.uuid4().hex)
    created_at: str = field(default_factory=_now)
    stage: str = "Created"
    step1_chain: CardChain | None = None
    step2_chain: CardChain | None = None
    active_refinement: SideRefinement | None = None
    proposed_centroids: CentroidVector | None = None
    validated_centroids: CentroidVector | None = None
    cores: tuple[tuple[float, float], ...] | None = None
    partition: FuzzyPartition | None = None
    fit_report: FitReport | None = None
    memberships: MembershipMatrix | None = None
    transcript: list = field(default_factory=list)

    def record(self, operation: str, payload: dict) -> None:
        self.transcript.append(
            {
                "stage": self.stage,
                "operation": operation,
                "payload": payload,
                "timestamp": _now(),
            }
        )

    def require_stage(self, *allowed: str) -> None:
        if self.stage not in allowed:
            raise StageError(
                f"operation requires stage in {allowed}, session is at {self.stage}"
            )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "created_at": self.created_at,
            "stage": self.stage,
            "dataset": self.dataset.to_dict(),
            "params": self.params.to_dict(),
            "step1_chain": self.step1_chain.to_dict() if self.step1_chain else None,
            "step2_chain": self.step2_chain.to_dict() if self.step2_chain else None,
            "active_refinement": (
                self.active_refinement.to_dict() if self.active_refinement else None
            ),
            "proposed_centroids": (
                [float(v) for v in self.proposed_centroids.values]
                if self.proposed_centroids
                else None
            ),
            "validated_centroids": (
                [float(v) for v in self.validated_centroids.values]
                if self.validated_centroids
                else None
            ),
            "cores": [list(c) for c in self.cores] if self.cores else None,
            "partition": self.partition.to_dict() if self.partition else None,
            "fit_report": self.fit_report.to_dict() if self.fit_report else None,
            "transcript": list(self.transcript),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Session":
        if int(doc.get("schema_version", 0)) != SCHEMA_VERSION:
            raise FuzzydeckError(
                f"unsupported session schema_version {doc.get('schema_version')!r}"
            )
        dataset = SampleSet.from_dict(doc["dataset"])
        session = cls(
            dataset=dataset,
            params=PipelineParams.from_dict(doc["params"]),
            id=doc["id"],
            created_at=doc["created_at"],
            stage=doc["stage"],
            transcript=list(doc.get("transcript", [])),
        )
        if doc.get("step1_chain"):
            session.step1_chain = CardChain.from_dict(doc["step1_chain"])
        if doc.get("step2_chain"):
            session.step2_chain = CardChain.from_dict(doc["step2_chain"])
        if doc.get("active_refinement"):
            session.active_refinement = SideRefinement.from_dict(doc["active_refinement"])
        if doc.get("proposed_centroids"):
            session.proposed_centroids = CentroidVector(
                values=np.array(doc["proposed_centroids"]),
                lower=dataset.lower,
                upper=dataset.upper,
            )
        if doc.get("validated_centroids"):
            session.validated_centroids = CentroidVector(
                values=np.array(doc["validated_centroids"]),
                lower=dataset.lower,
                upper=dataset.upper,
            )
        if doc.get("cores"):
            session.cores = tuple(tuple(c) for c in doc["cores"])
        if doc.get("partition"):
            session.partition = FuzzyPartition.from_dict(doc["partition"])
        if doc.get("fit_report"):
            session.fit_report = FitReport.from_dict(doc["fit_report"])
        session._rebuild_memberships()
        return session

    def _rebuild_memberships(self) -> None:
        """Derive the membership cache for the current stage after a reload."""
        if self.stage in ("Step1Committed", "Step2Proposed") and self.validated_centroids:
            self.memberships = update_memberships(
                self.dataset, self.validated_centroids, self.params.fuzzifier
            )
        elif self.cores is not None:
            self.memberships = MembershipMatrix(
                _core_rule_memberships(self.dataset, self.cores, self.params.fuzzifier)
            )


def create_session(dataset: SampleSet, params: PipelineParams | None = None,
                   session_id: str | None = None) -> Session:
    params = params or PipelineParams()
    session = Session(dataset=dataset, params=params)
    if session_id is not None:
        session.id = session_id
    session.record(
        "create",
        {"params": params.to_dict(),
         "dataset": {"n": dataset.n, "bounds": [dataset.lower, dataset.upper],
                     "dropped": dataset.dropped}},
    )
    return session


# ---------------------------------------------------------------------------
# Step 1: value scale


def step1_propose(session: Session) -> tuple[CardChain, FuzzyPartition]:
    """Cluster the data and lay the centers out as a card chain."""
    session.require_stage("Created")
    p = session.params
    centroids, memberships, report = run_cfkm(
        session.dataset, k=p.k, m=p.fuzzifier, strategy=p.init,
        tau_conv=p.conv_tolerance, max_iter=p.max_iter,
    )
    labels = ["a", *[f"v_{j + 1}" for j in range(p.k)], "b"]
    chain = values_to_cards_auto(centroids.tuple_with_bounds(), labels,
                                 p.scale_precision)
    preview = partition_from_memberships(session.dataset, centroids, memberships)
    session.proposed_centroids = centroids
    session.memberships = memberships
    session.fit_report = report
    session.step1_chain = chain
    session.partition = preview
    session.record("step1_propose", {"chain": chain.to_dict()})
    session.stage = "Step1Proposed"
    return chain, preview


def step1_commit(session: Session, edited_chain: CardChain | None = None,
                 ) -> tuple[CentroidVector, MembershipMatrix]:
    """Fix the centers at the decoded chain anchors and refresh memberships."""
    session.require_stage("Step1Proposed")
    chain = edited_chain if edited_chain is not None else session.step1_chain
    _check_chain_shape(chain, session.step1_chain)
    centroids = CentroidVector(
        values=np.array(chain.interior_values()),
        lower=session.dataset.lower,
        upper=session.dataset.upper,
    )
    memberships = update_memberships(session.dataset, centroids,
                                     session.params.fuzzifier)
    session.step1_chain = chain
    session.validated_centroids = centroids
    session.memberships = memberships
    session.partition = partition_from_memberships(session.dataset, centroids,
                                                   memberships)
    session.partition.validate()
    session.record("step1_commit", {"chain": chain.to_dict()})
    session.stage = "Step1Committed"
    return centroids, memberships


# ---------------------------------------------------------------------------
# Step 2: cores and supports


def extract_cores(session: Session, tau: float | None = None,
                  ) -> list[tuple[float, float]]:
    """Per class, the data range holding membership >= 1 - tau.

    The first core is pinned down to the lower bound and the last up to the
    upper bound. A class with no qualifying point falls back to its center.
    """
    session.require_stage("Step1Committed")
    tau = session.params.core_tolerance if tau is None else tau
    if not 0 < tau < 0.5:
        raise ParameterError(f"core tolerance must lie in (0, 0.5), got {tau}")
    x = session.dataset.values
    u = session.memberships.degrees
    v = session.validated_centroids.values
    k = session.validated_centroids.k
    cores: list[tuple[float, float]] = []
    for j in range(k):
        qualifying = x[u[:, j] >= 1 - tau]
        if qualifying.size == 0:
            logger.warning(
                "class %d has no data point within tolerance %.3g of full "
                "membership; core falls back to its center", j + 1, tau,
            )
            lo = hi = float(v[j])
        else:
            lo, hi = float(qualifying.min()), float(qualifying.max())
        if j == 0:
            lo = session.dataset.lower
        if j == k - 1:
            hi = session.dataset.upper
        cores.append((lo, hi))
    return cores


def step2_propose(session: Session) -> CardChain:
    """Lay the 2k core bounds out as a card chain pinned at the domain bounds."""
    session.require_stage("Step1Committed")
    cores = extract_cores(session)
    values: list[float] = [bound for core in cores for bound in core]
    labels = [
        f"c_{j + 1}_{side}" for j in range(len(cores)) for side in ("lower", "upper")
    ]
    for a, b in zip(values, values[1:]):
        if b <= a:
            raise FuzzydeckError(
                "core bounds are not strictly increasing (a core collapsed to a "
                "point); raise the core tolerance or use more data"
            )
    chain = values_to_cards_auto(values, labels, session.params.scale_precision)
    session.step2_chain = chain
    session.cores = tuple(cores)
    session.record("step2_propose", {"chain": chain.to_dict()})
    session.stage = "Step2Proposed"
    return chain


def _core_rule_memberships(dataset: SampleSet, cores, m: float) -> np.ndarray:
    """Membership 1 inside a core; between two cores, split by the two-cluster
    rule with the facing core bounds acting as centers."""
    x = dataset.values
    k = len(cores)
    u = np.zeros((x.size, k))
    for j, (lo, hi) in enumerate(cores):
        u[(x >= lo) & (x <= hi), j] = 1.0
    e = 1.0 / (m - 1.0)
    for j in range(k - 1):
        lo, hi = cores[j][1], cores[j + 1][0]
        gap = (x > lo) & (x < hi)
        if gap.any():
            dl = (x[gap] - lo) ** 2
            dr = (x[gap] - hi) ** 2
            with np.errstate(over="ignore"):
                left_share = 1.0 / (1.0 + (dl / dr) ** e)
            u[gap, j] = left_share
            u[gap, j + 1] = 1.0 - left_share
    return u


def _partition_from_cores(dataset: SampleSet, cores, u: np.ndarray) -> FuzzyPartition:
    """Polylines through the recomputed memberships; supports end at the
    facing bound of each neighbouring core."""
    x = dataset.values
    k = len(cores)
    classes = []
    for j, (lo, hi) in enumerate(cores):
        points = [(lo, 1.0), (hi, 1.0)]
        if j > 0:
            left_edge = cores[j - 1][1]
            points.append((left_edge, 0.0))
            gap = (x > left_edge) & (x < lo)
            points.extend(zip(x[gap].tolist(), u[gap, j].tolist()))
        if j < k - 1:
            right_edge = cores[j + 1][0]
            points.append((right_edge, 0.0))
            gap = (x > hi) & (x < right_edge)
            points.extend(zip(x[gap].tolist(), u[gap, j].tolist()))
        classes.append(FuzzyNumberPL.from_polyline(points, label=f"class_{j + 1}"))
    return FuzzyPartition(classes=tuple(classes), lower=dataset.lower,
                          upper=dataset.upper)


def step2_commit(session: Session, edited_chain: CardChain | None = None,
                 ) -> tuple[tuple[tuple[float, float], ...], FuzzyPartition]:
    """Adopt the decoded cores, recompute memberships, derive the supports."""
    session.require_stage("Step2Proposed")
    chain = edited_chain if edited_chain is not None else session.step2_chain
    _check_chain_shape(chain, session.step2_chain)
    decoded = chain.values()
    cores = tuple(
        (decoded[2 * j], decoded[2 * j + 1]) for j in range(len(decoded) // 2)
    )
    v = session.validated_centroids.values
    slack = 1e-12 * session.dataset.span
    for j, (lo, hi) in enumerate(cores):
        if not lo - slack <= v[j] <= hi + slack:
            raise OrderingError(
                f"validated center {j + 1} at {v[j]:.6g} falls outside the decoded "
                f"core [{lo:.6g}, {hi:.6g}]"
            )
    u = _core_rule_memberships(session.dataset, cores, session.params.fuzzifier)
    memberships = MembershipMatrix(u)
    partition = _partition_from_cores(session.dataset, cores, u)
    partition.validate()
    session.step2_chain = chain
    session.cores = cores
    session.memberships = memberships
    session.partition = partition
    session.record("step2_commit", {"chain": chain.to_dict()})
    session.stage = "Step2Committed"
    return cores, partition


# ---------------------------------------------------------------------------
# Step 3: side fine-tuning


def _side_interval(cls: FuzzyNumberPL, side: str) -> tuple[float, float]:
    if side == "left":
        return (cls.support[0], cls.core[0])
    return (cls.core[1], cls.support[1])


def _side_branch(cls: FuzzyNumberPL, side: str) -> tuple[np.ndarray, np.ndarray]:
    """(mu, x) arrays of the branch polyline, sorted by ascending mu."""
    lo, hi = _side_interval(cls, side)
    mask = (cls.xs >= lo) & (cls.xs <= hi)
    bx, bmu = cls.xs[mask], cls.mus[mask]
    if side == "right":
        bx, bmu = bx[::-1], bmu[::-1]
    return bmu, bx


def step3_propose(session: Session, class_index: int, side: str,
                  k_side: int = 3) -> SideRefinement:
    """Cluster one branch's membership values into confidence levels and stage
    both the level chain and the matching breakpoint chain for editing."""
    session.require_stage("Step2Committed", "Step3InProgress")
    if side not in SIDES:
        raise ParameterError(f"side must be one of {SIDES}, got {side!r}")
    if k_side < 1:
        raise ParameterError(f"k_side must be >= 1, got {k_side}")
    if not 0 <= class_index < session.partition.k:
        raise ParameterError(f"class_index {class_index} out of range")
    cls = session.partition.classes[class_index]
    lo, hi = _side_interval(cls, side)
    if hi <= lo:
        raise InsufficientDataError(
            f"class {class_index + 1} has no {side} branch (core touches the bound)"
        )
    x = session.dataset.values
    inside = (x > lo) & (x < hi)
    mu = cls(x[inside])
    distinct = np.unique(mu)
    if distinct.size < k_side:
        raise InsufficientDataError(
            f"{side} branch of class {class_index + 1} holds {distinct.size} distinct "
            f"membership values, need at least k_side={k_side}"
        )
    if k_side == 1:
        levels = (float(np.mean(mu)),)
    else:
        level_data = SampleSet.from_values(mu, bounds=(0.0, 1.0))
        centers, _, _ = run_cfkm(
            level_data, k=k_side, m=session.params.fuzzifier, strategy="even",
            tau_conv=session.params.conv_tolerance, max_iter=session.params.max_iter,
        )
        levels = tuple(float(v) for v in centers.values)

    refinement = _build_refinement(session, cls, class_index, side, levels)
    session.active_refinement = refinement
    session.record("step3_propose", refinement.to_dict() | {"k_side": k_side})
    session.stage = "Step3InProgress"
    return refinement


def _build_refinement(session: Session, cls: FuzzyNumberPL, class_index: int,
                      side: str, levels: tuple[float, ...]) -> SideRefinement:
    lo, hi = _side_interval(cls, side)
    branch_mu, branch_x = _side_branch(cls, side)
    breakpoints = tuple(float(np.interp(c, branch_mu, branch_x)) for c in levels)

    level_labels = ["mu_min", *[f"level_{i + 1}" for i in range(len(levels))], "mu_max"]
    level_chain = values_to_cards_auto([0.0, *levels, 1.0], level_labels,
                                       session.params.scale_precision)
    if side == "left":
        x_sorted = breakpoints
        x_labels = [f"x_{i + 1}" for i in range(len(levels))]
    else:
        x_sorted = tuple(reversed(breakpoints))
        x_labels = [f"x_{i + 1}" for i in reversed(range(len(levels)))]
    bp_labels = ["side_start", *x_labels, "side_end"]
    breakpoint_chain = values_to_cards_auto([lo, *x_sorted, hi], bp_labels,
                                            session.params.side_precision)
    return SideRefinement(
        class_index=class_index,
        side=side,
        interval=(lo, hi),
        levels=levels,
        breakpoints=breakpoints,
        level_chain=level_chain,
        breakpoint_chain=breakpoint_chain,
    )


def step3_edit(session: Session, target: str, edits: list[CardEdit],
               ) -> SideRefinement:
    """Edit the staged refinement. Level edits re-derive the breakpoints (and
    discard any prior breakpoint edits); breakpoint edits stand alone."""
    session.require_stage("Step3InProgress")
    refinement = session.active_refinement
    if refinement is None:
        raise StageError("no side refinement is staged; propose one first")
    if target not in ("levels", "breakpoints"):
        raise ParameterError("step-3 edits target 'levels' or 'breakpoints'")
    if target == "levels":
        chain = _apply_edit_sequence(refinement.level_chain, edits)
        levels = tuple(chain.interior_values())
        cls = session.partition.classes[refinement.class_index]
        rebuilt = _build_refinement(session, cls, refinement.class_index,
                                    refinement.side, levels)
        refinement = replace(rebuilt, level_chain=chain)
    else:
        chain = _apply_edit_sequence(refinement.breakpoint_chain, edits)
        decoded = chain.interior_values()
        ordered = decoded if refinement.side == "left" else list(reversed(decoded))
        refinement = replace(refinement, breakpoint_chain=chain,
                             breakpoints=tuple(ordered))
    session.active_refinement = refinement
    for edit in edits:
        session.record("edit", {"target": target, "edit": edit.to_dict()})
    return refinement


def step3_commit(session: Session, refinement: SideRefinement | None = None,
                 ) -> FuzzyNumberPL:
    """Rebuild the edited side as the polyline through the decoded levels and
    breakpoints, and mirror the facing side of the neighbour class so the
    partition still sums to one."""
    session.require_stage("Step3InProgress")
    if refinement is None:
        refinement = session.active_refinement
    if refinement is None:
        raise StageError("no side refinement to commit")
    j = refinement.class_index
    side = refinement.side
    lo, hi = refinement.interval
    levels = tuple(refinement.level_chain.interior_values())
    decoded_x = refinement.breakpoint_chain.interior_values()
    if len(decoded_x) != len(levels):
        raise EditError("level and breakpoint chains hold different anchor counts")
    ordered_levels = list(levels) if side == "left" else list(reversed(levels))
    for level in levels:
        if not 0.0 < level < 1.0:
            raise OrderingError(f"confidence level {level} must lie strictly in (0, 1)")

    if side == "left":
        side_points = [(lo, 0.0), *zip(decoded_x, ordered_levels), (hi, 1.0)]
    else:
        side_points = [(lo, 1.0), *zip(decoded_x, ordered_levels), (hi, 0.0)]
    mus = [p[1] for p in side_points]
    if side == "left" and any(b <= a for a, b in zip(mus, mus[1:])):
        raise OrderingError("edited left side is not strictly increasing")
    if side == "right" and any(b >= a for a, b in zip(mus, mus[1:])):
        raise OrderingError("edited right side is not strictly decreasing")

    classes = list(session.partition.classes)
    classes[j] = _replace_side(classes[j], side, side_points)
    neighbour = j - 1 if side == "left" else j + 1
    complement = [(x, 1.0 - mu) for x, mu in side_points]
    neighbour_side = "right" if side == "left" else "left"
    classes[neighbour] = _replace_side(classes[neighbour], neighbour_side, complement)

    partition = FuzzyPartition(classes=tuple(classes),
                               lower=session.dataset.lower,
                               upper=session.dataset.upper)
    partition.validate()
    session.partition = partition
    session.record("step3_commit", refinement.to_dict())
    session.active_refinement = None
    return classes[j]


def _replace_side(cls: FuzzyNumberPL, side: str, new_points) -> FuzzyNumberPL:
    lo = min(p[0] for p in new_points)
    hi = max(p[0] for p in new_points)
    if side == "left":
        if (lo, hi) != (cls.support[0], cls.core[0]):
            raise EditError(
                f"refined interval [{lo}, {hi}] does not match the class's left "
                f"side [{cls.support[0]}, {cls.core[0]}]"
            )
        keep = cls.xs > hi
    else:
        if (lo, hi) != (cls.core[1], cls.support[1]):
            raise EditError(
                f"refined interval [{lo}, {hi}] does not match the class's right "
                f"side [{cls.core[1]}, {cls.support[1]}]"
            )
        keep = cls.xs < lo
    points = list(zip(cls.xs[keep].tolist(), cls.mus[keep].tolist()))
    points.extend(new_points)
    return FuzzyNumberPL.from_polyline(points, label=cls.label)


# ---------------------------------------------------------------------------
# wrap-up


def finalize(session: Session) -> tuple[FuzzyPartition, list]:
    """Freeze the partition and hand back the replayable transcript."""
    if session.stage == "Finalized":
        return session.partition, list(session.transcript)
    session.require_stage("Step2Committed", "Step3InProgress")
    session.partition.validate()
    session.record("finalize", {})
    session.stage = "Finalized"
    return session.partition, list(session.transcript)


# ---------------------------------------------------------------------------
# edits and replay


def _apply_edit_sequence(chain: CardChain, edits: list[CardEdit]) -> CardChain:
    """All-or-nothing application; the error names the offending edit."""
    working = chain
    for idx, edit in enumerate(edits):
        try:
            working = apply_edit(working, edit)
        except EditError as exc:
            raise EditError(f"edit {idx} invalid: {exc}") from exc
    return working


def apply_session_edits(session: Session, edits: list[CardEdit],
                        target: str | None = None) -> CardChain | SideRefinement:
    """Route edits to the chain the session is currently showing."""
    if session.stage == "Step1Proposed":
        if target not in (None, "step1"):
            raise ParameterError(f"stage Step1Proposed cannot edit {target!r}")
        chain = _apply_edit_sequence(session.step1_chain, edits)
        session.step1_chain = chain
        for edit in edits:
            session.record("edit", {"target": "step1", "edit": edit.to_dict()})
        return chain
    if session.stage == "Step2Proposed":
        if target not in (None, "step2"):
            raise ParameterError(f"stage Step2Proposed cannot edit {target!r}")
        chain = _apply_edit_sequence(session.step2_chain, edits)
        session.step2_chain = chain
        for edit in edits:
            session.record("edit", {"target": "step2", "edit": edit.to_dict()})
        return chain
    if session.stage == "Step3InProgress":
        if target is None:
            raise ParameterError(
                "stage Step3InProgress edits must target 'levels' or 'breakpoints'"
            )
        return step3_edit(session, target, edits)
    raise StageError(f"stage {session.stage} has no editable chain")


def _check_chain_shape(chain: CardChain, reference: CardChain | None) -> None:
    if reference is None:
        raise StageError("no proposal chain exists to commit")
    if chain.anchors != reference.anchors or (chain.lower, chain.upper) != (
        reference.lower,
        reference.upper,
    ):
        raise EditError("committed chain must keep the proposed anchors and domain")


def replay(dataset: SampleSet, transcript: list, strict: bool = True) -> Session:
    """Re-run a transcript against a dataset.

    In strict mode every recorded proposal must match the recomputed one
    exactly; commits always use the recorded (absolute) chains, so lenient
    replay reproduces the validated artefacts even when the proposals drift.
    """
    if not transcript or transcript[0].get("operation") != "create":
        raise ReplayDivergenceError("transcript must start with a create record", 0)
    params = PipelineParams.from_dict(transcript[0]["payload"]["params"])
    session = create_session(dataset, params)

    for idx, rec in enumerate(transcript[1:], start=1):
        op = rec.get("operation")
        payload = rec.get("payload", {})
        try:
            if op == "step1_propose":
                chain, _ = step1_propose(session)
                _check_divergence(strict, chain, payload.get("chain"), idx)
            elif op == "edit":
                edit = CardEdit.from_dict(payload["edit"])
                apply_session_edits(session, [edit], payload.get("target"))
            elif op == "step1_commit":
                step1_commit(session, CardChain.from_dict(payload["chain"]))
            elif op == "step2_propose":
                chain = step2_propose(session)
                _check_divergence(strict, chain, payload.get("chain"), idx)
            elif op == "step2_commit":
                step2_commit(session, CardChain.from_dict(payload["chain"]))
            elif op == "step3_propose":
                refinement = step3_propose(
                    session, int(payload["class_index"]), payload["side"],
                    int(payload.get("k_side", 3)),
                )
                _check_divergence(strict, refinement.level_chain,
                                  payload.get("level_chain"), idx)
                _check_divergence(strict, refinement.breakpoint_chain,
                                  payload.get("breakpoint_chain"), idx)
            elif op == "step3_commit":
                step3_commit(session, SideRefinement.from_dict(payload))
            elif op == "finalize":
                finalize(session)
            else:
                raise ReplayDivergenceError(f"unknown transcript operation {op!r}", idx)
        except ReplayDivergenceError:
            raise
        except FuzzydeckError as exc:
            raise ReplayDivergenceError(
                f"transcript step {idx} ({op}) failed: {exc}", idx
            ) from exc
    return session


def _check_divergence(strict: bool, chain: CardChain, recorded: dict | None,
                      step_index: int) -> None:
    if not strict or recorded is None:
        return
    if chain.to_dict() != recorded:
        raise ReplayDivergenceError(
            f"transcript step {step_index}: recomputed chain {chain.gaps} does not "
            f"match the recorded one {tuple(recorded.get('gaps', ()))}",
            step_index,
        )
