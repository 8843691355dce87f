import threading
import time

import pytest

from pap.parallel import map_ordered


def test_results_follow_input_order_when_completion_is_reversed():
    def slow_first(i):
        time.sleep(0.02 * (5 - i))
        return i * i

    assert map_ordered(slow_first, range(6), jobs=6) == [0, 1, 4, 9, 16, 25]


def test_concurrency_never_exceeds_jobs():
    lock = threading.Lock()
    active = peak = 0

    def track(i):
        nonlocal active, peak
        with lock:
            active += 1
            peak = max(peak, active)
        time.sleep(0.01)
        with lock:
            active -= 1
        return i

    assert map_ordered(track, range(12), jobs=3) == list(range(12))
    assert 1 <= peak <= 3


def test_sequential_and_parallel_agree():
    assert map_ordered(str, range(50), jobs=1) == map_ordered(str, range(50), jobs=8)


def test_worker_errors_propagate():
    def fail_on_three(i):
        if i == 3:
            raise ValueError("boom")
        return i

    with pytest.raises(ValueError, match="boom"):
        map_ordered(fail_on_three, range(5), jobs=4)
