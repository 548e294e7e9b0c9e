# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled collection kernel: identical semantics to kernel.PyKernel.

Collection-from-the-left with an explicit syllable stack and
single-generator transposition steps.  See kernel.py for the algorithm
description; this file only re-implements it with C arrays.
"""

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset

from .errors import CollectionLimitError

DEF STACK_CAP = 1 << 16
DEF STEP_LIMIT = 5000000


cdef class CKernel:
    cdef public int p
    cdef public int n
    cdef int *powers          # n*n
    cdef int *comms           # n*n*n
    cdef int *stack_g
    cdef int *stack_e
    cdef int *ev
    cdef int *t1
    cdef int *t2
    cdef int *t3
    cdef int *t4

    is_compiled = True

    def __cinit__(self, int p, int n, powers, comms):
        cdef int i, k
        self.p = p
        self.n = n
        self.powers = <int *> malloc(n * n * sizeof(int))
        self.comms = <int *> malloc(n * n * n * sizeof(int))
        self.stack_g = <int *> malloc(STACK_CAP * sizeof(int))
        self.stack_e = <int *> malloc(STACK_CAP * sizeof(int))
        self.ev = <int *> malloc(n * sizeof(int))
        self.t1 = <int *> malloc(n * sizeof(int))
        self.t2 = <int *> malloc(n * sizeof(int))
        self.t3 = <int *> malloc(n * sizeof(int))
        self.t4 = <int *> malloc(n * sizeof(int))
        memset(self.comms, 0, n * n * n * sizeof(int))
        for i in range(n):
            v = powers[i]
            for k in range(n):
                self.powers[i * n + k] = v[k]
        for i in range(n * n):
            v = comms[i]
            for k in range(n):
                self.comms[i * n + k] = v[k]

    def __dealloc__(self):
        free(self.powers)
        free(self.comms)
        free(self.stack_g)
        free(self.stack_e)
        free(self.ev)
        free(self.t1)
        free(self.t2)
        free(self.t3)
        free(self.t4)

    def set_power(self, int i, vec):
        cdef int k
        for k in range(self.n):
            self.powers[i * self.n + k] = vec[k]

    def set_comm(self, int j, int i, vec):
        cdef int k
        for k in range(self.n):
            self.comms[(j * self.n + i) * self.n + k] = vec[k]

    # -- core C routine ------------------------------------------------

    cdef int _cmult(self, int *u, int *v, int *out) except -1:
        """out = normal form of u*v.  out may alias u but not v."""
        cdef int p = self.p
        cdef int n = self.n
        cdef int *ev = self.ev
        cdef int sp = 0          # stack pointer
        cdef int i, j, e, m, tot, q, steps, base
        memcpy(ev, u, n * sizeof(int))
        for j in range(n - 1, -1, -1):
            if v[j]:
                self.stack_g[sp] = j
                self.stack_e[sp] = v[j]
                sp += 1
        steps = 0
        while sp:
            steps += 1
            if steps > STEP_LIMIT:
                raise CollectionLimitError("collection step guard tripped")
            sp -= 1
            j = self.stack_g[sp]
            e = self.stack_e[sp]
            m = -1
            for i in range(n - 1, j, -1):
                if ev[i]:
                    m = i
                    break
            if m < 0:
                tot = ev[j] + e
                ev[j] = tot % p
                q = tot / p
                if q:
                    base = j * n
                    while q:
                        for i in range(n - 1, -1, -1):
                            if self.powers[base + i]:
                                if sp >= STACK_CAP:
                                    raise CollectionLimitError("stack overflow")
                                self.stack_g[sp] = i
                                self.stack_e[sp] = self.powers[base + i]
                                sp += 1
                        q -= 1
            else:
                ev[m] -= 1
                if sp + 4 + n >= STACK_CAP:
                    raise CollectionLimitError("stack overflow")
                if e > 1:
                    self.stack_g[sp] = j
                    self.stack_e[sp] = e - 1
                    sp += 1
                base = (m * n + j) * n
                for i in range(n - 1, -1, -1):
                    if self.comms[base + i]:
                        self.stack_g[sp] = i
                        self.stack_e[sp] = self.comms[base + i]
                        sp += 1
                self.stack_g[sp] = m
                self.stack_e[sp] = 1
                sp += 1
                self.stack_g[sp] = j
                self.stack_e[sp] = 1
                sp += 1
        memcpy(out, ev, n * sizeof(int))
        return 0

    cdef int _cinv(self, int *u, int *out) except -1:
        """out = u^-1 by leading-entry sifting."""
        cdef int n = self.n
        cdef int p = self.p
        cdef int *x = self.t3
        cdef int *t = self.t4
        cdef int i, lead
        memset(x, 0, n * sizeof(int))
        memcpy(t, u, n * sizeof(int))
        while True:
            lead = -1
            for i in range(n):
                if t[i]:
                    lead = i
                    break
            if lead < 0:
                memcpy(out, x, n * sizeof(int))
                return 0
            memset(self.t1, 0, n * sizeof(int))
            self.t1[lead] = p - t[lead]
            self._cmult(x, self.t1, x)
            self._cmult(u, x, t)

    # -- Python API ----------------------------------------------------

    cdef _load(self, int *dst, u):
        cdef int i
        for i in range(self.n):
            dst[i] = u[i]

    cdef tuple _dump(self, int *src):
        cdef int i
        return tuple([src[i] for i in range(self.n)])

    def mult(self, u, v):
        self._load(self.t1, u)
        self._load(self.t2, v)
        self._cmult(self.t1, self.t2, self.t1)
        return self._dump(self.t1)

    def identity(self):
        return (0,) * self.n

    def gen(self, int i, int e=1):
        v = [0] * self.n
        v[i] = e % self.p
        return tuple(v)

    def inv(self, u):
        cdef int *a = <int *> malloc(self.n * sizeof(int))
        cdef int *b = <int *> malloc(self.n * sizeof(int))
        try:
            self._load(a, u)
            self._cinv(a, b)
            return self._dump(b)
        finally:
            free(a)
            free(b)

    def pow(self, u, e):
        cdef long ee = e
        cdef int n = self.n
        cdef int *r = <int *> malloc(n * sizeof(int))
        cdef int *b = <int *> malloc(n * sizeof(int))
        cdef int *tmp = <int *> malloc(n * sizeof(int))
        try:
            self._load(b, u)
            if ee < 0:
                self._cinv(b, b)
                ee = -ee
            memset(r, 0, n * sizeof(int))
            while ee:
                if ee & 1:
                    memcpy(tmp, b, n * sizeof(int))
                    self._cmult(r, tmp, r)
                memcpy(tmp, b, n * sizeof(int))
                self._cmult(b, tmp, b)
                ee >>= 1
            return self._dump(r)
        finally:
            free(r)
            free(b)
            free(tmp)

    def conj(self, u, g):
        return self.mult(self.mult(self.inv(g), u), g)

    def comm(self, a, b):
        cdef int n = self.n
        cdef int *x = <int *> malloc(n * sizeof(int))
        cdef int *y = <int *> malloc(n * sizeof(int))
        cdef int *ba = <int *> malloc(n * sizeof(int))
        cdef int *ab = <int *> malloc(n * sizeof(int))
        try:
            self._load(x, a)
            self._load(y, b)
            self._cmult(y, x, ba)       # b*a
            self._ccomm_tail(x, y, ba, ab)
            return self._dump(ab)
        finally:
            free(x)
            free(y)
            free(ba)
            free(ab)

    cdef int _ccomm_tail(self, int *a, int *b, int *ba, int *out) except -1:
        # out = (b a)^-1 * (a b)
        cdef int n = self.n
        cdef int *ab = <int *> malloc(n * sizeof(int))
        cdef int *ib = <int *> malloc(n * sizeof(int))
        try:
            self._cmult(a, b, ab)
            self._cinv(ba, ib)        # ib = (ba)^-1  (uses t3/t4)
            self._cmult(ib, ab, out)
            return 0
        finally:
            free(ab)
            free(ib)

    # -- consistency ---------------------------------------------------

    cdef int _gen_into(self, int *dst, int i, int e):
        memset(dst, 0, self.n * sizeof(int))
        dst[i] = e % self.p
        return 0

    cdef bint _vecs_eq(self, int *a, int *b):
        cdef int i
        for i in range(self.n):
            if a[i] != b[i]:
                return False
        return True

    def consistency_ok(self):
        """Early-exit full overlap scan; True iff consistent."""
        return self._violations(1, []) == 0

    def first_violation(self):
        out = []
        self._violations(1, out)
        return out[0] if out else None

    def iter_violations(self):
        out = []
        self._violations(0, out)
        return iter(out)

    cdef int _violations(self, bint stop_at_first, list out) except -1:
        cdef int n = self.n
        cdef int p = self.p
        cdef int i, j, k
        cdef int *gi = <int *> malloc(n * sizeof(int))
        cdef int *gj = <int *> malloc(n * sizeof(int))
        cdef int *gk = <int *> malloc(n * sizeof(int))
        cdef int *l = <int *> malloc(n * sizeof(int))
        cdef int *r = <int *> malloc(n * sizeof(int))
        cdef int *s = <int *> malloc(n * sizeof(int))
        cdef int count = 0
        try:
            for k in range(2, n):
                for j in range(1, k):
                    for i in range(j):
                        self._gen_into(gi, i, 1)
                        self._gen_into(gj, j, 1)
                        self._gen_into(gk, k, 1)
                        self._cmult(gj, gi, l)
                        self._cmult(gk, l, l)          # g_k (g_j g_i)
                        self._cmult(gk, gj, r)
                        self._cmult(r, gi, r)          # (g_k g_j) g_i
                        if not self._vecs_eq(l, r):
                            count += 1
                            if out is not None:
                                out.append(("assoc", k, j, i))
                            if stop_at_first:
                                return count
            for j in range(1, n):
                for i in range(j):
                    # (g_j^p) g_i  vs  g_j^{p-1} (g_j g_i)
                    self._gen_into(gi, i, 1)
                    self._gen_into(gj, j, 1)
                    memcpy(s, self.powers + j * n, n * sizeof(int))
                    self._cmult(s, gi, l)
                    self._gen_into(gk, j, p - 1)
                    self._cmult(gj, gi, r)
                    self._cmult(gk, r, r)
                    if not self._vecs_eq(l, r):
                        count += 1
                        if out is not None:
                            out.append(("power-left", j, i))
                        if stop_at_first:
                            return count
            for j in range(1, n):
                for i in range(j):
                    # g_j (g_i^p)  vs  (g_j g_i) g_i^{p-1}
                    self._gen_into(gi, i, 1)
                    self._gen_into(gj, j, 1)
                    memcpy(s, self.powers + i * n, n * sizeof(int))
                    self._cmult(gj, s, l)
                    self._cmult(gj, gi, r)
                    self._gen_into(gk, i, p - 1)
                    self._cmult(r, gk, r)
                    if not self._vecs_eq(l, r):
                        count += 1
                        if out is not None:
                            out.append(("power-right", j, i))
                        if stop_at_first:
                            return count
            for i in range(n):
                # (g_i^p) g_i  vs  g_i (g_i^p)
                self._gen_into(gi, i, 1)
                memcpy(s, self.powers + i * n, n * sizeof(int))
                self._cmult(s, gi, l)
                self._cmult(gi, s, r)
                if not self._vecs_eq(l, r):
                    count += 1
                    if out is not None:
                        out.append(("power-self", i))
                    if stop_at_first:
                        return count
            return count
        finally:
            free(gi)
            free(gj)
            free(gk)
            free(l)
            free(r)
            free(s)
