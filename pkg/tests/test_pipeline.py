"""Three-step elicitation flow: proposals, edits, commits, replay."""

import json

import numpy as np
import pytest

from fuzzydeck.cards import CardChain, CardEdit
from fuzzydeck.data_io import synth_generate
from fuzzydeck.errors import (
    EditError,
    InsufficientDataError,
    OrderingError,
    ParameterError,
    ReplayDivergenceError,
    StageError,
)
from fuzzydeck.pipeline import (
    PipelineParams,
    Session,
    SideRefinement,
    apply_session_edits,
    create_session,
    extract_cores,
    finalize,
    replay,
    step1_commit,
    step1_propose,
    step2_commit,
    step2_propose,
    step3_commit,
    step3_edit,
    step3_propose,
)
from fuzzydeck.samples import SampleSet


def grid_session(n=401, k=2, **overrides) -> Session:
    data = SampleSet.from_values(np.linspace(0, 1, n), bounds=(0, 1))
    return create_session(data, PipelineParams(k=k, **overrides))


def committed_quarters_session(n=401) -> Session:
    """Session with centers pinned exactly at 0.25 and 0.75 on a dense grid."""
    session = grid_session(n=n, k=2)
    step1_propose(session)
    pinned = CardChain(lower=0.0, upper=1.0, precision=2,
                       anchors=session.step1_chain.anchors, gaps=(25, 50, 25))
    step1_commit(session, pinned)
    return session


class TestStep1:
    def test_two_point_dataset_centers_on_points(self):
        data = SampleSet.from_values([0.01, 0.99], bounds=(0, 1))
        session = create_session(data, PipelineParams(k=2))
        chain, preview = step1_propose(session)
        assert session.stage == "Step1Proposed"
        assert session.proposed_centroids.values == pytest.approx([0.01, 0.99])
        assert len(chain.gaps) == 3
        preview.validate()

    def test_symmetric_data_near_equal_interior_gaps(self):
        data = synth_generate("symmetric", 2000, seed=11)
        session = create_session(data, PipelineParams(k=3))
        chain, _ = step1_propose(session)
        interior = chain.gaps[1:-1]
        assert max(interior) / min(interior) < 1.5

    def test_propose_requires_created_stage(self):
        session = grid_session()
        step1_propose(session)
        with pytest.raises(StageError):
            step1_propose(session)

    def test_noop_commit_within_quantization(self):
        session = grid_session(k=3)
        chain, _ = step1_propose(session)
        centroids, _ = step1_commit(session)
        quantum = 10.0 ** -chain.precision * session.dataset.span
        for committed, proposed in zip(centroids.values,
                                       session.proposed_centroids.values):
            assert abs(committed - proposed) < quantum

    def test_commit_recomputes_memberships_for_fixed_centers(self):
        session = committed_quarters_session()
        assert session.validated_centroids.values.tolist() == [0.25, 0.75]
        u = session.memberships.degrees
        x = session.dataset.values
        at_center = np.isclose(x, 0.25)
        assert np.all(u[at_center, 0] == 1.0)
        session.partition.validate()

    def test_collapsing_edit_rejected(self):
        session = grid_session()
        step1_propose(session)
        gaps = session.step1_chain.gaps
        with pytest.raises(EditError):
            apply_session_edits(
                session,
                [CardEdit(kind="move", gap_index=1, count=gaps[1],
                          target_gap_index=0)],
            )

    def test_edits_are_all_or_nothing(self):
        session = grid_session()
        step1_propose(session)
        before = session.step1_chain.gaps
        good = CardEdit(kind="move", gap_index=1, count=1, target_gap_index=0)
        bad = CardEdit(kind="remove", gap_index=0, count=10_000)
        with pytest.raises(EditError, match="edit 1"):
            apply_session_edits(session, [good, bad])
        assert session.step1_chain.gaps == before


class TestExtractCores:
    def test_analytic_core_radius_on_dense_grid(self):
        # m=2, centers 0.25/0.75: membership 0.99 is crossed at the positive
        # root of 98 t^2 + t - 0.25 = 0 away from the center (span 0.5 gap).
        session = committed_quarters_session(n=401)
        cores = extract_cores(session, tau=0.01)
        radius = (np.sqrt(99) - 1) / 196
        grid_step = 1 / 400
        assert cores[0][0] == 0.0
        assert abs(cores[0][1] - (0.25 + radius)) <= grid_step
        assert abs(cores[1][0] - (0.75 - radius)) <= grid_step
        assert cores[1][1] == 1.0

    def test_singleton_fallback_to_center(self):
        # middle cluster at 0.5 keeps weight but no data near full membership
        data = SampleSet.from_values([0.1, 0.2, 0.45, 0.55, 0.8, 0.9],
                                     bounds=(0, 1))
        session = create_session(data, PipelineParams(k=3))
        step1_propose(session)
        pinned = CardChain(lower=0.0, upper=1.0, precision=2,
                           anchors=session.step1_chain.anchors,
                           gaps=(15, 35, 35, 15))
        step1_commit(session, pinned)
        cores = extract_cores(session, tau=0.01)
        assert cores[1] == (0.5, 0.5)

    def test_requires_step1_committed(self):
        session = grid_session()
        with pytest.raises(StageError):
            extract_cores(session)

    def test_tau_validation(self):
        session = committed_quarters_session()
        with pytest.raises(ParameterError):
            extract_cores(session, tau=0.7)


class TestStep2:
    def test_chain_structure(self):
        session = committed_quarters_session()
        chain = step2_propose(session)
        assert session.stage == "Step2Proposed"
        assert len(chain.anchors) == 4  # 2k anchors
        assert chain.anchors[0] == "c_1_lower" and chain.anchors[-1] == "c_2_upper"
        vals = chain.values()
        assert vals[0] == 0.0 and vals[-1] == 1.0

    def test_symmetric_data_palindromic_gaps(self):
        session = committed_quarters_session()
        chain = step2_propose(session)
        assert abs(chain.gaps[0] - chain.gaps[-1]) <= 1

    def test_commit_sets_membership_one_inside_cores(self):
        session = committed_quarters_session()
        step2_propose(session)
        cores, partition = step2_commit(session)
        x = session.dataset.values
        u = session.memberships.degrees
        for j, (lo, hi) in enumerate(cores):
            inside = (x >= lo) & (x <= hi)
            assert np.all(u[inside, j] == 1.0)
            others = [c for c in range(len(cores)) if c != j]
            assert np.all(u[np.ix_(inside, others)] == 0.0)
        partition.validate()
        assert session.stage == "Step2Committed"

    def test_two_cluster_rule_midpoint_and_quarter(self):
        session = committed_quarters_session()
        step2_propose(session)
        cores, partition = step2_commit(session)
        hi0, lo1 = cores[0][1], cores[1][0]
        mid = (hi0 + lo1) / 2
        assert partition.classes[0](mid) == pytest.approx(0.5, abs=1e-9)
        quarter = hi0 + 0.25 * (lo1 - hi0)
        assert partition.classes[0](quarter) == pytest.approx(0.9, abs=2e-3)

    def test_supports_come_from_adjacent_cores(self):
        session = committed_quarters_session()
        step2_propose(session)
        cores, partition = step2_commit(session)
        assert partition.classes[0].support == (0.0, cores[1][0])
        assert partition.classes[1].support == (cores[0][1], 1.0)

    def test_centroid_outside_core_rejected(self):
        session = committed_quarters_session()
        chain = step2_propose(session)
        # shrink class-1 core to [0, 0.2], leaving its center at 0.25 outside
        shoved = CardChain(lower=0, upper=1, precision=chain.precision,
                           anchors=chain.anchors, gaps=(20, 30, 50))
        with pytest.raises(OrderingError, match="center 1"):
            step2_commit(session, shoved)

    def test_edits_route_to_step2_chain(self):
        session = committed_quarters_session()
        chain = step2_propose(session)
        updated = apply_session_edits(
            session, [CardEdit(kind="move", gap_index=1, count=2,
                               target_gap_index=0)]
        )
        assert updated.total == chain.total
        assert session.step2_chain.gaps[0] == chain.gaps[0] + 2


def branch_x_for_mu(t: float, lo: float, hi: float) -> float:
    """Invert the m=2 two-cluster rule on the gap (lo, hi) for the rising
    class: mu = (x-lo)^2 / ((x-lo)^2 + (hi-x)^2) solved for x."""
    r = np.sqrt(t / (1 - t))
    return (lo + hi * r) / (1 + r)


class TestStep3:
    def make_uniform_mu_session(self) -> Session:
        # data placed so the rising branch memberships are uniform in (0, 1)
        lo, hi = 0.3, 0.7
        ts = np.linspace(0.02, 0.98, 49)
        gap_points = [branch_x_for_mu(t, lo, hi) for t in ts]
        core_points = list(np.linspace(0, lo, 40)) + list(np.linspace(hi, 1, 40))
        data = SampleSet.from_values(core_points + gap_points, bounds=(0, 1))
        session = create_session(data, PipelineParams(k=2))
        step1_propose(session)
        pinned = CardChain(lower=0, upper=1, precision=2,
                           anchors=session.step1_chain.anchors, gaps=(15, 70, 15))
        step1_commit(session, pinned)
        chain = step2_propose(session)
        pinned2 = CardChain(lower=0, upper=1, precision=2, anchors=chain.anchors,
                            gaps=(30, 40, 30))
        step2_commit(session, pinned2)
        return session

    def test_uniform_branch_levels(self):
        session = self.make_uniform_mu_session()
        refinement = step3_propose(session, class_index=1, side="left", k_side=3)
        assert session.stage == "Step3InProgress"
        x = session.dataset.values
        cls = session.partition.classes[1]
        lo, hi = refinement.interval
        mu = cls(x[(x > lo) & (x < hi)])
        # uniform membership values: the middle level sits at the median and
        # the outer levels are symmetric about it. Full membership in the edge
        # clusters below the first / above the last center spreads the outer
        # levels wider than the quartiles.
        oracle = np.percentile(mu, [25, 50, 75])
        c1, c2, c3 = refinement.levels
        assert c2 == pytest.approx(oracle[1], abs=0.05)
        assert c1 + c3 == pytest.approx(1.0, abs=0.05)
        assert c1 < oracle[0] + 0.05
        assert c3 > oracle[2] - 0.05
        # breakpoints invert the branch at the levels
        for level, bp in zip(refinement.levels, refinement.breakpoints):
            assert cls(bp) == pytest.approx(level, abs=1e-9)

    def test_k_side_one_uses_mean_level(self):
        session = self.make_uniform_mu_session()
        refinement = step3_propose(session, class_index=1, side="left", k_side=1)
        assert len(refinement.levels) == 1
        assert refinement.levels[0] == pytest.approx(0.5, abs=0.02)
        assert refinement.breakpoints[0] == pytest.approx(
            branch_x_for_mu(refinement.levels[0], 0.3, 0.7), abs=1e-2
        )

    def test_right_side_chain_ascends_in_x(self):
        session = self.make_uniform_mu_session()
        refinement = step3_propose(session, class_index=0, side="right", k_side=3)
        decoded = refinement.breakpoint_chain.values()
        assert decoded == sorted(decoded)
        # levels ascend while their x positions descend
        assert list(refinement.levels) == sorted(refinement.levels)
        assert list(refinement.breakpoints) == sorted(refinement.breakpoints,
                                                      reverse=True)

    def test_boundary_class_has_no_outer_side(self):
        session = self.make_uniform_mu_session()
        with pytest.raises(InsufficientDataError):
            step3_propose(session, class_index=0, side="left")
        with pytest.raises(InsufficientDataError):
            step3_propose(session, class_index=1, side="right")

    def test_insufficient_distinct_values(self):
        session = self.make_uniform_mu_session()
        with pytest.raises(InsufficientDataError):
            step3_propose(session, class_index=1, side="left", k_side=200)

    def test_noop_commit_matches_proposed_polyline(self):
        session = self.make_uniform_mu_session()
        refinement = step3_propose(session, class_index=1, side="left", k_side=3)
        updated = step3_commit(session)
        x_quantum = 10.0 ** -refinement.breakpoint_chain.precision * (
            refinement.interval[1] - refinement.interval[0]
        )
        mu_quantum = 10.0 ** -refinement.level_chain.precision
        decoded_levels = refinement.level_chain.interior_values()
        decoded_x = refinement.breakpoint_chain.interior_values()
        for level, bp, dec_level, dec_x in zip(refinement.levels,
                                               refinement.breakpoints,
                                               decoded_levels, decoded_x):
            assert abs(dec_level - level) < mu_quantum
            assert abs(dec_x - bp) < x_quantum
            # committed polyline passes exactly through the decoded pairs
            assert updated(dec_x) == pytest.approx(dec_level, abs=1e-12)

    def test_complement_holds_after_edit(self):
        session = self.make_uniform_mu_session()
        step3_propose(session, class_index=1, side="left", k_side=3)
        step3_edit(session, "breakpoints",
                   [CardEdit(kind="move", gap_index=1, count=30,
                             target_gap_index=0)])
        step3_commit(session)
        lo, hi = 0.3, 0.7
        grid = np.linspace(lo, hi, 501)
        total = session.partition.classes[0](grid) + session.partition.classes[1](grid)
        assert np.abs(total - 1.0).max() < 1e-9
        session.partition.validate()

    def test_level_edit_rebuilds_breakpoints(self):
        session = self.make_uniform_mu_session()
        before = step3_propose(session, class_index=1, side="left", k_side=3)
        after = step3_edit(session, "levels",
                           [CardEdit(kind="move", gap_index=0, count=10,
                                     target_gap_index=3)])
        assert after.levels != before.levels
        cls = session.partition.classes[1]
        for level, bp in zip(after.levels, after.breakpoints):
            assert cls(bp) == pytest.approx(level, abs=1e-9)

    def test_mismatched_chains_rejected(self):
        session = self.make_uniform_mu_session()
        r = step3_propose(session, class_index=1, side="left", k_side=3)
        broken = SideRefinement(
            class_index=r.class_index, side=r.side, interval=r.interval,
            levels=r.levels[:2], breakpoints=r.breakpoints[:2],
            level_chain=CardChain(lower=0, upper=1, precision=2,
                                  anchors=("mu_min", "level_1", "mu_max"),
                                  gaps=(50, 50)),
            breakpoint_chain=r.breakpoint_chain,
        )
        with pytest.raises(EditError):
            step3_commit(session, broken)

    def test_support_and_core_preserved(self):
        session = self.make_uniform_mu_session()
        cls_before = session.partition.classes[1]
        step3_propose(session, class_index=1, side="left", k_side=3)
        step3_edit(session, "breakpoints",
                   [CardEdit(kind="move", gap_index=2, count=20,
                             target_gap_index=0)])
        cls_after = step3_commit(session)
        assert cls_after.support == cls_before.support
        assert cls_after.core == cls_before.core


class TestFinalizeAndReplay:
    def full_flow(self, seed=5) -> Session:
        data = synth_generate("skewed", 600, seed=seed)
        session = create_session(data, PipelineParams(k=3))
        step1_propose(session)
        apply_session_edits(
            session, [CardEdit(kind="move", gap_index=0, count=2,
                               target_gap_index=1)]
        )
        step1_commit(session)
        step2_propose(session)
        step2_commit(session)
        finalize(session)
        return session

    def test_finalize_freezes_and_is_idempotent(self):
        session = self.full_flow()
        assert session.stage == "Finalized"
        first, transcript = finalize(session)
        second, _ = finalize(session)
        assert first.to_dict() == second.to_dict()
        assert transcript[-1]["operation"] == "finalize"

    def test_finalize_too_early_rejected(self):
        session = grid_session()
        step1_propose(session)
        with pytest.raises(StageError):
            finalize(session)

    def test_strict_replay_reproduces_partition_bitwise(self):
        session = self.full_flow()
        data = synth_generate("skewed", 600, seed=5)
        replayed = replay(data, session.transcript, strict=True)
        assert json.dumps(replayed.partition.to_dict()) == json.dumps(
            session.partition.to_dict()
        )

    def test_replay_illegal_edit_reports_step_index(self):
        session = self.full_flow()
        transcript = [dict(r) for r in session.transcript]
        bad_index = next(i for i, r in enumerate(transcript)
                         if r["operation"] == "edit")
        transcript[bad_index] = dict(
            transcript[bad_index],
            payload={"target": "step1",
                     "edit": {"kind": "remove", "gap_index": 0, "count": 10_000}},
        )
        data = synth_generate("skewed", 600, seed=5)
        with pytest.raises(ReplayDivergenceError) as err:
            replay(data, transcript, strict=True)
        assert err.value.step_index == bad_index

    def test_strict_replay_detects_divergence(self):
        session = self.full_flow()
        other = synth_generate("skewed", 600, seed=99)
        with pytest.raises(ReplayDivergenceError):
            replay(other, session.transcript, strict=True)

    def test_lenient_replay_reproduces_committed_chains(self):
        session = self.full_flow()
        other = synth_generate("skewed", 600, seed=99)
        replayed = replay(other, session.transcript, strict=False)
        assert replayed.stage == "Finalized"
        np.testing.assert_allclose(replayed.validated_centroids.values,
                                   session.validated_centroids.values)
        assert replayed.cores == session.cores
        replayed.partition.validate()

    def test_step3_records_replay(self):
        session = self.make_step3_session()
        data = SampleSet.from_dict(session.dataset.to_dict())
        replayed = replay(data, session.transcript, strict=True)
        assert json.dumps(replayed.partition.to_dict()) == json.dumps(
            session.partition.to_dict()
        )

    def make_step3_session(self) -> Session:
        t3 = TestStep3()
        session = t3.make_uniform_mu_session()
        step3_propose(session, class_index=1, side="left", k_side=3)
        step3_edit(session, "breakpoints",
                   [CardEdit(kind="move", gap_index=1, count=25,
                             target_gap_index=0)])
        step3_commit(session)
        finalize(session)
        return session


class TestSessionSerialization:
    @staticmethod
    def _session_at(upto: str) -> Session:
        t3 = TestStep3()
        if upto == "propose1":
            session = grid_session(k=2)
            step1_propose(session)
            return session
        if upto == "commit1":
            return committed_quarters_session()
        if upto == "propose2":
            session = committed_quarters_session()
            step2_propose(session)
            return session
        session = t3.make_uniform_mu_session()  # Step2Committed
        if upto in ("step3_staged", "step3_done", "final"):
            step3_propose(session, class_index=1, side="left", k_side=3)
        if upto in ("step3_done", "final"):
            step3_commit(session)
        if upto == "final":
            finalize(session)
        return session

    @pytest.mark.parametrize("upto", ["propose1", "commit1", "propose2", "commit2",
                                      "step3_staged", "step3_done", "final"])
    def test_round_trip_then_continue(self, upto):
        session = self._session_at(upto)
        doc = json.loads(json.dumps(session.to_dict()))
        restored = Session.from_dict(doc)
        assert restored.stage == session.stage
        assert restored.to_dict() == session.to_dict()
        if restored.partition is not None:
            restored.partition.validate()

    def test_membership_cache_rebuilt_after_reload(self):
        session = committed_quarters_session()
        doc = session.to_dict()
        restored = Session.from_dict(doc)
        assert restored.memberships is not None
        np.testing.assert_array_equal(restored.memberships.degrees,
                                      session.memberships.degrees)

    def test_unknown_schema_rejected(self):
        session = grid_session()
        doc = session.to_dict()
        doc["schema_version"] = 99
        with pytest.raises(Exception):
            Session.from_dict(doc)


class TestStageGuards:
    def test_cannot_skip_stages(self):
        session = grid_session()
        with pytest.raises(StageError):
            step1_commit(session, None)
        with pytest.raises(StageError):
            step2_propose(session)
        with pytest.raises(StageError):
            step3_propose(session, 0, "left")
        with pytest.raises(StageError):
            apply_session_edits(session, [CardEdit(kind="insert", gap_index=0,
                                                   count=1)])

    def test_step3_edit_requires_target(self):
        t3 = TestStep3()
        session = t3.make_uniform_mu_session()
        step3_propose(session, class_index=1, side="left", k_side=3)
        with pytest.raises(ParameterError):
            apply_session_edits(session, [CardEdit(kind="insert", gap_index=0,
                                                   count=1)])

    def test_stage1_rejects_step3_targets(self):
        session = grid_session()
        step1_propose(session)
        with pytest.raises(ParameterError):
            apply_session_edits(session, [CardEdit(kind="insert", gap_index=0,
                                                   count=1)], target="levels")

    def test_replay_requires_create_record(self):
        data = SampleSet.from_values([0.2, 0.8], bounds=(0, 1))
        with pytest.raises(ReplayDivergenceError):
            replay(data, [])
        with pytest.raises(ReplayDivergenceError):
            replay(data, [{"operation": "step1_propose", "payload": {}}])
