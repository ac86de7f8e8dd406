"""Regenerate the bundled demo dataset and replay transcripts.

Run from the repo root:  python3 scripts/make_bundled_data.py
"""

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fuzzydeck.cards import CardEdit  # noqa: E402
from fuzzydeck.pipeline import (  # noqa: E402
    PipelineParams,
    apply_session_edits,
    create_session,
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
from fuzzydeck.samples import SampleSet  # noqa: E402

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "fuzzydeck" / "data"
BOUNDS = (2.8, 10.0)


def make_standin_values() -> np.ndarray:
    """Five performance bands between 2.8 and 10, mildly right-heavy."""
    rng = np.random.default_rng(20240514)
    centers = (3.85, 5.68, 7.09, 8.32, 9.77)
    spreads = (0.34, 0.42, 0.38, 0.33, 0.18)
    weights = (0.22, 0.24, 0.22, 0.18, 0.14)
    n = 800
    component = rng.choice(len(centers), size=n, p=weights)
    values = np.empty(n)
    for c, (mu, sd) in enumerate(zip(centers, spreads)):
        mask = component == c
        values[mask] = rng.normal(mu, sd, size=int(mask.sum()))
    return np.clip(values, BOUNDS[0], BOUNDS[1])


def build_standin() -> None:
    values = make_standin_values()
    csv_path = DATA_DIR / "quiz_standin.csv"
    lines = ["quiz1_marks"] + [f"{v:.6f}" for v in values]
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    data = SampleSet.from_values(np.loadtxt(csv_path, skiprows=1), bounds=BOUNDS)
    session = create_session(data, PipelineParams(k=5))
    chain, _ = step1_propose(session)
    print("stand-in step-1 chain:", chain.gaps)
    apply_session_edits(
        session,
        [CardEdit(kind="move", gap_index=4, count=5, target_gap_index=5)],
    )
    step1_commit(session)
    chain2 = step2_propose(session)
    print("stand-in step-2 chain:", chain2.gaps)
    # widen the second core to the left
    apply_session_edits(
        session,
        [CardEdit(kind="move", gap_index=1, count=2, target_gap_index=2)],
    )
    step2_commit(session)
    refinement = step3_propose(session, class_index=1, side="left", k_side=3)
    print("stand-in step-3 breakpoints:", refinement.breakpoint_chain.gaps)
    step3_edit(
        session,
        "breakpoints",
        [CardEdit(kind="move", gap_index=1, count=50, target_gap_index=0)],
    )
    step3_commit(session)
    finalize(session)
    session.partition.validate()

    transcript_path = DATA_DIR / "quiz_standin_transcript.json"
    transcript_path.write_text(json.dumps(session.transcript, indent=2) + "\n",
                               encoding="utf-8")

    check = replay(SampleSet.from_values(np.loadtxt(csv_path, skiprows=1),
                                         bounds=BOUNDS),
                   json.loads(transcript_path.read_text()), strict=True)
    assert check.partition.to_dict() == session.partition.to_dict()
    print("stand-in transcript verified (strict replay matches)")


def quiz_chain_doc(gaps: list[int], anchors: list[str], precision: int = 2) -> dict:
    cum = [0]
    for g in gaps:
        cum.append(cum[-1] + g)
    return {
        "domain": [BOUNDS[0], BOUNDS[1]],
        "precision": precision,
        "total": sum(gaps),
        "anchors": [{"label": a, "cumulative": c} for a, c in zip(anchors, cum)],
        "gaps": gaps,
    }


def build_quiz_transcript() -> None:
    """The recorded interaction for the real quiz dataset: the proposal the
    analyst saw, the five-card move, and the validated absolute chains."""
    ts = "2025-01-01T00:00:00.000+00:00"
    scale_anchors = ["a", "v_1", "v_2", "v_3", "v_4", "v_5", "b"]
    core_anchors = [f"c_{j}_{side}" for j in range(1, 6)
                    for side in ("lower", "upper")]
    records = [
        {
            "stage": "Created",
            "operation": "create",
            "payload": {
                "params": PipelineParams(k=5).to_dict(),
                "dataset": {"n": None, "bounds": list(BOUNDS), "dropped": None},
            },
            "timestamp": ts,
        },
        {
            "stage": "Created",
            "operation": "step1_propose",
            "payload": {"chain": quiz_chain_doc([14, 26, 19, 17, 20, 4],
                                                scale_anchors)},
            "timestamp": ts,
        },
        {
            "stage": "Step1Proposed",
            "operation": "edit",
            "payload": {
                "target": "step1",
                "edit": {"kind": "move", "gap_index": 4, "count": 5,
                         "target_gap_index": 5},
            },
            "timestamp": ts,
        },
        {
            "stage": "Step1Proposed",
            "operation": "step1_commit",
            "payload": {"chain": quiz_chain_doc([14, 26, 19, 17, 15, 9],
                                                scale_anchors)},
            "timestamp": ts,
        },
        {
            "stage": "Step1Committed",
            "operation": "step2_propose",
            "payload": {"chain": quiz_chain_doc([15, 23, 3, 17, 1, 15, 2, 14, 10],
                                                core_anchors)},
            "timestamp": ts,
        },
        {
            "stage": "Step2Proposed",
            "operation": "step2_commit",
            "payload": {"chain": quiz_chain_doc([14, 19, 7, 14, 5, 12, 5, 14, 10],
                                                core_anchors)},
            "timestamp": ts,
        },
        {
            "stage": "Step2Committed",
            "operation": "finalize",
            "payload": {},
            "timestamp": ts,
        },
    ]
    path = DATA_DIR / "quiz_marks_transcript.json"
    path.write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")


if __name__ == "__main__":
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    build_standin()
    build_quiz_transcript()
