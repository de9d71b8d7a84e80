import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    try:
        n = int(os.environ.get("STRATA_LAB_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def pmap(fn, items):
    """Order-preserving map, threaded when STRATA_LAB_THREADS > 1."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
