import functools
import os
from concurrent.futures import ThreadPoolExecutor as _ThreadPoolExecutor
from contextvars import copy_context
from typing import Callable, List, Optional, Sequence, TypeVar

__all__ = [
    "ThreadPoolExecutor",
    "max_workers",
    "run_cases",
]

T = TypeVar("T")
R = TypeVar("R")


class ThreadPoolExecutor(_ThreadPoolExecutor):  # type: ignore
    """
    Thread pool with ContextVars

    - https://github.com/python/cpython/issues/78195
    """

    def submit(self, __fn, *args, **kwargs):
        return super().submit(
            functools.partial(copy_context().run, __fn), *args, **kwargs
        )


def max_workers(requested: Optional[int] = None) -> int:
    if requested is not None:
        return max(1, requested)
    return max(1, int(os.environ.get("TAMECYCLES_MAX_WORKERS", "1")))


def run_cases(
    fn: Callable[[T], R], cases: Sequence[T], workers: Optional[int] = None
) -> List[R]:
    """
    Apply `fn` to every case. Results come back in input order, whatever
    order the workers finish in.
    """
    count = max_workers(workers)
    if count == 1 or len(cases) <= 1:
        return [fn(case) for case in cases]
    with ThreadPoolExecutor(max_workers=count) as executor:
        futures = [executor.submit(fn, case) for case in cases]
        return [future.result() for future in futures]
