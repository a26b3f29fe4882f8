import contextvars
import time

from tamecycles.concurrency import ThreadPoolExecutor, max_workers, run_cases

flag = contextvars.ContextVar("flag", default="unset")


def test_context_is_copied_to_workers():
    flag.set("set")
    with ThreadPoolExecutor(max_workers=2) as executor:
        assert executor.submit(flag.get).result() == "set"


def test_run_cases_keeps_input_order():
    def slow_first(n):
        time.sleep(0.01 * (5 - n))
        return n * n

    assert run_cases(slow_first, [0, 1, 2, 3, 4], workers=4) == [0, 1, 4, 9, 16]
    assert run_cases(slow_first, [2, 1], workers=1) == [4, 1]


def test_max_workers(monkeypatch):
    monkeypatch.delenv("TAMECYCLES_MAX_WORKERS", raising=False)
    assert max_workers() == 1
    monkeypatch.setenv("TAMECYCLES_MAX_WORKERS", "3")
    assert max_workers() == 3
    assert max_workers(0) == 1
