"""Paths to the data files shipped with the package."""

from importlib.resources import files
from pathlib import Path

_DATA = files("fuzzydeck") / "data"

# Synthetic stand-in for the public student-quiz dataset, plus the replayable
# session recorded against it.
STANDIN_CSV = Path(str(_DATA / "quiz_standin.csv"))
STANDIN_TRANSCRIPT = Path(str(_DATA / "quiz_standin_transcript.json"))

# Reenactment of the worked elicitation on the real quiz dataset. Replay it
# leniently against the Kaggle CSV (see README); commits carry absolute chains,
# so the validated scale and cores decode exactly.
QUIZ_TRANSCRIPT = Path(str(_DATA / "quiz_marks_transcript.json"))

QUIZ_COLUMN = "quiz1_marks"
QUIZ_BOUNDS = (2.8, 10.0)
