import logging
import math

import numpy as np
import pytest

from shiftlab.cli.histogram import emit_histogram
from shiftlab.core.errors import DomainError
from shiftlab.core.seeding import derive_rng

logger = logging.getLogger(__name__)


class TestEmitHistogram:
    def test_identical_values_share_a_bin(self):
        histogram = emit_histogram([0.25] * 10, 4, (0.0, 1.0))
        assert histogram.bins["count"].tolist() == [0, 10, 0, 0]
        assert histogram.total == 10

    def test_empty_input(self):
        histogram = emit_histogram([], 5, (-1.0, 1.0))
        assert len(histogram.bins) == 5
        assert histogram.bins["count"].sum() == 0
        assert histogram.underflow == histogram.overflow == 0

    def test_uniform_draws(self):
        values = derive_rng(11, "histogram").uniform(0.0, 1.0, size=1000)
        histogram = emit_histogram(values, 10, (0.0, 1.0))
        sigma = math.sqrt(1000 * 0.1 * 0.9)
        assert histogram.total == 1000
        assert all(abs(c - 100) <= 5 * sigma for c in histogram.bins["count"])
        logger.info(f"✓ uniform counts {histogram.bins['count'].tolist()} stay within 5 sigma of 100")

    def test_edges(self):
        histogram = emit_histogram([0.0, 1.0, 2.0], 2, (0.0, 2.0))
        assert histogram.bins["bin_left"].tolist() == [0.0, 1.0]
        assert histogram.bins["bin_right"].tolist() == [1.0, 2.0]
        # the last bin is closed on the right
        assert histogram.bins["count"].tolist() == [1, 2]

    def test_out_of_range_and_nan(self):
        histogram = emit_histogram([-5.0, -0.5, 0.5, 7.0, 9.0, np.nan], 2, (-1.0, 1.0))
        assert histogram.bins["count"].tolist() == [1, 1]
        assert histogram.underflow == 1
        assert histogram.overflow == 2
        assert histogram.total == 5
        assert "underflow: 1  overflow: 2" in histogram.to_string()

    @pytest.mark.parametrize(
        "bin_count, value_range",
        [(0, (0.0, 1.0)), (3, (1.0, 0.0)), (3, (1.0, 1.0)), (3, (0.0, math.inf)), (3, (math.nan, 1.0))],
    )
    def test_invalid(self, bin_count, value_range):
        with pytest.raises(DomainError):
            emit_histogram([0.5], bin_count, value_range)
