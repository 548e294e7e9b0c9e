"""Collection kernels.

Two interchangeable implementations of exact arithmetic for weighted
power-commutator presentations:

* :class:`PyKernel` -- pure Python, always available;
* ``pearlforge._ckernel.CKernel`` -- Cython twin with the identical API,
  used automatically when the compiled extension is importable.

Set ``PEARLFORGE_PURE=1`` to force the pure kernel (used by the benchmark
and by tests that compare the two).

A kernel is deliberately dumb: it knows ``p``, ``n`` and the relation
tables and performs collection-from-the-left.  All structural validation,
weight checking and error vocabulary live in :mod:`pearlforge.presentation`.

Element convention: an element is a length-``n`` tuple of ints in
``[0, p)``; entry ``i`` is the exponent of generator ``g_i`` (0-based) in
the normal form ``g_0^{e_0} ... g_{n-1}^{e_{n-1}}``.
"""

import os

from .errors import CollectionLimitError

# Guard against runaway collection; generously above anything a weighted
# presentation of rank <= 8 can produce.
_STEP_LIMIT = 5_000_000


class PyKernel:
    is_compiled = False

    def __init__(self, p, n, powers, comms):
        """powers: n vectors (g_i^p); comms: flat list of n*n vectors where
        comms[j*n + i] is [g_j, g_i] for j > i (other slots ignored)."""
        self.p = p
        self.n = n
        self.powers = [list(v) for v in powers]
        self.comms = [list(v) for v in comms]

    def set_power(self, i, vec):
        self.powers[i] = list(vec)

    def set_comm(self, j, i, vec):
        self.comms[j * self.n + i] = list(vec)

    # -- arithmetic ---------------------------------------------------

    def mult(self, u, v):
        """Normal form of u*v (collection from the left)."""
        p = self.p
        n = self.n
        comms = self.comms
        powers = self.powers
        ev = list(u)
        # stack of (gen, exp) syllables; top of stack = leftmost uncollected
        stack = []
        push = stack.append
        for j in range(n - 1, -1, -1):
            if v[j]:
                push((j, v[j]))
        steps = 0
        while stack:
            steps += 1
            if steps > _STEP_LIMIT:
                raise CollectionLimitError("collection step guard tripped")
            j, e = stack.pop()
            # find the highest generator already collected to the right of g_j
            m = -1
            for i in range(n - 1, j, -1):
                if ev[i]:
                    m = i
                    break
            if m < 0:
                tot = ev[j] + e
                ev[j] = tot % p
                q = tot // p
                if q:
                    w = powers[j]
                    # g_j^p commutes with g_j; insert q copies of its word
                    for _ in range(q):
                        for i in range(n - 1, -1, -1):
                            if w[i]:
                                push((i, w[i]))
            else:
                # peel one g_m and transpose: g_m g_j = g_j g_m [g_m, g_j]
                ev[m] -= 1
                if e > 1:
                    push((j, e - 1))
                c = comms[m * n + j]
                for i in range(n - 1, -1, -1):
                    if c[i]:
                        push((i, c[i]))
                push((m, 1))
                push((j, 1))
        return tuple(ev)

    def identity(self):
        return (0,) * self.n

    def gen(self, i, e=1):
        v = [0] * self.n
        v[i] = e % self.p
        return tuple(v)

    def inv(self, u):
        """Inverse by leading-entry sifting: at most n multiplications."""
        p = self.p
        x = self.identity()
        t = u
        while True:
            lead = -1
            for i, e in enumerate(t):
                if e:
                    lead = i
                    break
            if lead < 0:
                return x
            x = self.mult(x, self.gen(lead, p - t[lead]))
            t = self.mult(u, x)

    def pow(self, u, e):
        if e < 0:
            u = self.inv(u)
            e = -e
        r = self.identity()
        while e:
            if e & 1:
                r = self.mult(r, u)
            u = self.mult(u, u)
            e >>= 1
        return r

    def conj(self, u, g):
        """u^g = g^-1 u g."""
        return self.mult(self.mult(self.inv(g), u), g)

    def comm(self, a, b):
        """[a, b] = a^-1 b^-1 a b."""
        return self.mult(self.inv(self.mult(b, a)), self.mult(a, b))

    # -- consistency --------------------------------------------------

    def consistency_ok(self):
        """Early-exit full overlap scan; True iff consistent."""
        return self.first_violation() is None

    def first_violation(self):
        """First failing overlap test, or None if consistent.

        Test words (all generators have order p):
          assoc       g_k (g_j g_i) = (g_k g_j) g_i   for k > j > i
          power-left  (g_j^p) g_i   = g_j^{p-1} (g_j g_i)  for j > i
          power-right g_j (g_i^p)   = (g_j g_i) g_i^{p-1}  for j > i
          power-self  (g_i^p) g_i   = g_i (g_i^p)
        """
        for t in self.iter_violations():
            return t
        return None

    def iter_violations(self):
        p = self.p
        n = self.n
        mult = self.mult
        gen = self.gen
        powers = self.powers
        for k in range(2, n):
            gk = gen(k)
            for j in range(1, k):
                gj = gen(j)
                kj = mult(gk, gj)
                for i in range(j):
                    gi = gen(i)
                    if mult(gk, mult(gj, gi)) != mult(kj, gi):
                        yield ("assoc", k, j, i)
        for j in range(1, n):
            gj = gen(j)
            pw = tuple(powers[j])
            gj1 = gen(j, p - 1)
            for i in range(j):
                gi = gen(i)
                if mult(pw, gi) != mult(gj1, mult(gj, gi)):
                    yield ("power-left", j, i)
        for j in range(1, n):
            gj = gen(j)
            for i in range(j):
                gi = gen(i)
                pw = tuple(powers[i])
                if mult(gj, pw) != mult(mult(gj, gi), gen(i, p - 1)):
                    yield ("power-right", j, i)
        for i in range(n):
            pw = tuple(powers[i])
            gi = gen(i)
            if mult(pw, gi) != mult(gi, pw):
                yield ("power-self", i)


def _want_pure():
    return os.environ.get("PEARLFORGE_PURE", "") not in ("", "0")


_compiled = None
if not _want_pure():
    try:
        from . import _ckernel as _compiled  # type: ignore
    except ImportError:
        _compiled = None


def kernel_backend():
    """'compiled' or 'pure' -- which backend make_kernel returns."""
    return "compiled" if _compiled is not None else "pure"


def make_kernel(p, n, powers, comms, force_pure=False):
    """Build a kernel. powers: n vectors; comms: flat n*n list of vectors."""
    if _compiled is not None and not force_pure and not _want_pure():
        return _compiled.CKernel(p, n, powers, comms)
    return PyKernel(p, n, powers, comms)
