"""Score to band mapping."""

from errors import RangeError
from models.feedback import Band

BAND_BY_SCORE = {
    1: Band.POOR,
    2: Band.POOR,
    3: Band.AVERAGE,
    4: Band.GOOD,
    5: Band.GOOD,
}


def categorize(score: int) -> Band:
    """poor for 1-2, average for 3, good for 4-5."""
    if isinstance(score, bool) or score not in BAND_BY_SCORE:
        raise RangeError(f"score {score!r} is not an integer in [1, 5]")
    return BAND_BY_SCORE[int(score)]
