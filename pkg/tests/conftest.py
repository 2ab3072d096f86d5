from __future__ import annotations

import sys
from pathlib import Path

import pytest

COMPARE_TO_LEFT = """\
public int compareTo(ApplicationAttemptId other) {
    int compareAppIds = this.getApplicationId()
        .compareTo(other.getApplicationId());
    if (compareAppIds == 0) {
        return this.getAttemptId() - other.getAttemptId();
    } else {
        return compareAppIds;
    }
}
"""

COMPARE_TO_RIGHT = """\
public int compareTo(ApplicationAttemptId var0) {
    int compareAppIds = this.getApplicationId()
        .compareTo(var0.getApplicationId());
    if (compareAppIds == 0) {
        return this.getAttemptId() - var0.getAttemptId();
    } else {
        return compareAppIds;
    }
}
"""

ECHO_ANALYZER = Path(__file__).parent / "echo_analyzer.py"


def echo_cmd(*extra: str) -> str:
    return " ".join([sys.executable, str(ECHO_ANALYZER), *extra])


@pytest.fixture
def compare_to_source() -> str:
    return COMPARE_TO_LEFT


@pytest.fixture
def compare_to_renamed() -> str:
    return COMPARE_TO_RIGHT
