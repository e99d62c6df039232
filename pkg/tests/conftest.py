import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from gparith import Operation, OperationSpec, SweepMode, SweepSpec, trace_sweep

from helpers import DIVISION, triple


def _division_trace(mode):
    # the division configuration with its first mean swept over [-200, 200]
    means, stds, theta = DIVISION
    return trace_sweep(
        triple(means, stds),
        OperationSpec(Operation.MUL, theta),
        SweepSpec(operand=0, start=-200.0, stop=200.0, steps=401, mode=mode),
    )


@pytest.fixture(scope="session")
def division_trace_warm():
    return _division_trace(SweepMode.WARM_START)


@pytest.fixture(scope="session")
def division_trace_cold():
    return _division_trace(SweepMode.COLD_MULTI_START)
