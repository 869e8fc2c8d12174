from fractions import Fraction

import pytest

from caseq.seqforge import WaveformConfig


@pytest.fixture
def cfg_a48():
    """Condition A: alpha*gamma = 1."""
    return WaveformConfig(n_seq=48, gamma=2, alpha=Fraction(1, 2))


@pytest.fixture
def cfg_b139():
    """Condition B with the standard guard ratio."""
    return WaveformConfig(n_seq=139, gamma=1, alpha=Fraction(33, 256))


@pytest.fixture
def cfg_b839():
    return WaveformConfig(n_seq=839, gamma=1, alpha=Fraction(33, 256))
