"""The two collection kernels must be bit-for-bit interchangeable."""

import random

import pytest

from pearlforge.catalog import build_named
from pearlforge.kernel import PyKernel, kernel_backend, make_kernel


def _kernel_pair(pres):
    flat = [(0,) * pres.n] * (pres.n * pres.n)
    flat = list(flat)
    for (j, i), v in pres.comms.items():
        flat[j * pres.n + i] = v
    pure = make_kernel(pres.p, pres.n, pres.powers, flat, force_pure=True)
    fast = make_kernel(pres.p, pres.n, pres.powers, flat)
    return pure, fast


NAMED = [("extraspecial_plus", 3), ("extraspecial_plus", 7),
         ("sp4_sylow", 3), ("sp4_sylow", 5), ("wreath_3", 3)]


@pytest.mark.parametrize("name,p", NAMED)
def test_backends_agree_on_random_ops(name, p):
    pres = build_named(name, p).pres
    pure, fast = _kernel_pair(pres)
    assert isinstance(pure, PyKernel)
    rng = random.Random(20260825)
    for _ in range(400):
        u = tuple(rng.randrange(p) for _ in range(pres.n))
        v = tuple(rng.randrange(p) for _ in range(pres.n))
        assert pure.mult(u, v) == fast.mult(u, v)
        assert pure.inv(u) == fast.inv(u)
        assert pure.comm(u, v) == fast.comm(u, v)
        e = rng.randrange(-(p ** 2), p ** 2)
        assert pure.pow(u, e) == fast.pow(u, e)


@pytest.mark.parametrize("name,p", NAMED)
def test_backends_agree_on_consistency(name, p):
    pres = build_named(name, p).pres
    pure, fast = _kernel_pair(pres)
    assert pure.consistency_ok() and fast.consistency_ok()
    assert pure.first_violation() is None
    assert fast.first_violation() is None
    # corrupt one structure constant identically in both
    n = pres.n
    bad = [0] * n
    bad[-1] = 1
    pure.set_power(n - 1, tuple(bad))
    fast.set_power(n - 1, tuple(bad))
    assert pure.first_violation() == fast.first_violation()


def test_backend_reports_its_kind():
    assert kernel_backend() in ("compiled", "pure")


def test_group_axioms_per_kernel():
    pres = build_named("sp4_sylow", 3).pres
    for kern in _kernel_pair(pres):
        p, n = pres.p, pres.n
        ident = kern.identity()
        rng = random.Random(7)
        for _ in range(200):
            u = tuple(rng.randrange(p) for _ in range(n))
            v = tuple(rng.randrange(p) for _ in range(n))
            w = tuple(rng.randrange(p) for _ in range(n))
            assert kern.mult(kern.mult(u, v), w) == kern.mult(
                u, kern.mult(v, w)
            )
            assert kern.mult(u, ident) == u
            assert kern.mult(u, kern.inv(u)) == ident
