import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strata_lab import _kernels
from strata_lab._kernels import _pykernels

compiled = pytest.mark.skipif(_kernels._compiled is None, reason="compiled extension not built")

int_rows = st.integers(1, 5).flatmap(
    lambda c: st.tuples(st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), max_size=5), st.just(c)))


@compiled
@given(int_rows)
def test_rref_backends_agree(data):
    rows, c = data
    assert _kernels._compiled.rref_int(rows, c) == _pykernels.rref_int(rows, c)


@compiled
def test_rref_overflow_falls_back():
    big = 2 ** 62
    rows = [[big, big - 1], [big - 3, big]]
    assert _kernels.rref_int(rows, 2) == _pykernels.rref_int(rows, 2)


def _signed_perms(n, count, seed):
    rng = random.Random(seed)
    nums, dens = [], []
    for _ in range(count):
        perm = list(range(n))
        rng.shuffle(perm)
        m = [0] * (n * n)
        for i, j in enumerate(perm):
            m[i * n + j] = rng.choice((1, -1))
        nums.append(m)
        dens.append(1)
    return nums, dens


@compiled
@pytest.mark.parametrize("seed", range(5))
def test_stabilizer_backends_agree(seed):
    nums, dens = _signed_perms(4, 12, seed)
    py = _pykernels.IntegerAction(nums, dens, 4)
    c = _kernels._compiled.IntegerAction(nums, dens, 4)
    rng = random.Random(seed)
    for _ in range(50):
        x = [rng.choice((0, 0, 1, -1, 2)) for _ in range(4)]
        assert list(py.stabilizer(x)) == list(c.stabilizer(x))
        for g in range(12):
            assert py.fixes(g, x) == c.fixes(g, x)


def test_backend_name():
    assert _kernels.BACKEND in ("cython", "python")


def test_pure_python_switch(monkeypatch):
    import importlib

    monkeypatch.setenv("STRATA_LAB_PURE_PYTHON", "1")
    mod = importlib.reload(_kernels)
    try:
        assert mod.BACKEND == "python"
        assert mod.rref_int([[2, 4], [1, 3]], 2)[1] == _pykernels.rref_int([[2, 4], [1, 3]], 2)[1]
    finally:
        monkeypatch.delenv("STRATA_LAB_PURE_PYTHON")
        importlib.reload(_kernels)
