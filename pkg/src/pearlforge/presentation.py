"""Weighted power-commutator presentations and exact element arithmetic.

The only group representation in the package.  A group of order p^n is
given by pc generators g_0 ... g_{n-1} (0-based in code; 1-based in files
and reports) with relations

    g_i^p      = word supported on generators of weight > w(i)
    [g_j, g_i] = word supported on generators of weight > w(j)   (j > i)

and nondecreasing weights.  Elements are length-n exponent tuples in
normal form; all arithmetic flows through the collection kernel.

Commutator convention: [a, b] = a^-1 b^-1 a b.
"""

import hashlib

from .errors import (
    InconsistentPresentationError,
    MalformedPresentationError,
    MalformedWordError,
    UncheckedPresentationError,
)
from .kernel import make_kernel


def _is_odd_prime(p):
    if p < 3 or p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


class PcPresentation:
    """Immutable after a passed consistency check.

    powers: tuple of n exponent tuples (rhs of g_i^p);
    comms:  dict {(j, i): exponent tuple} for j > i, trivial pairs omitted.
    """

    def __init__(self, p, n, weights, powers, comms, _skip_validation=False):
        self.p = int(p)
        self.n = int(n)
        self.weights = tuple(int(w) for w in weights)
        self.powers = tuple(tuple(int(e) for e in v) for v in powers)
        self.comms = {
            (int(j), int(i)): tuple(int(e) for e in v)
            for (j, i), v in comms.items()
            if any(v)
        }
        self.consistent = False
        if not _skip_validation:
            self._validate()
        flat = [(0,) * self.n] * (self.n * self.n)
        for (j, i), v in self.comms.items():
            flat[j * self.n + i] = v
        self._kernel = make_kernel(self.p, self.n, self.powers, flat)

    # -- structural validation ---------------------------------------

    def _validate(self):
        p, n = self.p, self.n
        if not _is_odd_prime(p):
            raise MalformedPresentationError(f"p = {p} is not an odd prime")
        if n < 1:
            raise MalformedPresentationError("need at least one generator")
        if len(self.weights) != n:
            raise MalformedPresentationError("weights must have length n")
        if any(w < 1 for w in self.weights):
            raise MalformedPresentationError("weights must be positive")
        if any(a > b for a, b in zip(self.weights, self.weights[1:])):
            raise MalformedPresentationError("weights must be nondecreasing")
        if len(self.powers) != n:
            raise MalformedPresentationError("powers must have length n")
        for i, v in enumerate(self.powers):
            self._check_rhs(v, self.weights[i], f"g_{i+1}^p")
        for (j, i), v in self.comms.items():
            if not (0 <= i < j < n):
                raise MalformedPresentationError(
                    f"commutator pair ({j+1},{i+1}) out of range or not j > i"
                )
            self._check_rhs(v, self.weights[j], f"[g_{j+1},g_{i+1}]")

    def _check_rhs(self, vec, w, what):
        if len(vec) != self.n:
            raise MalformedPresentationError(f"{what}: wrong vector length")
        for k, e in enumerate(vec):
            if not 0 <= e < self.p:
                raise MalformedPresentationError(
                    f"{what}: entry {e} not in [0, p)"
                )
            if e and self.weights[k] <= w:
                raise MalformedPresentationError(
                    f"{what}: supported on g_{k+1} of weight "
                    f"{self.weights[k]} <= {w}"
                )

    # -- consistency ---------------------------------------------------

    def check(self):
        """Run the consistency check; set the flag; return self."""
        violations = self.consistency_violations(stop_at_first=True)
        if violations:
            raise InconsistentPresentationError(
                f"overlap test failed: {violations[0]}"
            )
        self.consistent = True
        return self

    def consistency_violations(self, stop_at_first=False):
        out = []
        for v in self._kernel.iter_violations():
            out.append(v)
            if stop_at_first:
                break
        return out

    def _require_consistent(self):
        if not self.consistent:
            raise UncheckedPresentationError(
                "arithmetic on a presentation that has not passed "
                "consistency_check"
            )

    # -- arithmetic (public; gated on the consistency flag) ------------

    @property
    def order(self):
        return self.p ** self.n

    def identity(self):
        return (0,) * self.n

    def gen(self, i, e=1):
        if not 0 <= i < self.n:
            raise MalformedWordError(f"generator index {i} out of range")
        v = [0] * self.n
        v[i] = e % self.p
        return tuple(v)

    def mult(self, u, v):
        self._require_consistent()
        return self._kernel.mult(u, v)

    def inv(self, u):
        self._require_consistent()
        return self._kernel.inv(u)

    def pow(self, u, e):
        self._require_consistent()
        return self._kernel.pow(u, e)

    def conj(self, u, g):
        self._require_consistent()
        return self._kernel.conj(u, g)

    def comm(self, a, b):
        self._require_consistent()
        return self._kernel.comm(a, b)

    def elements(self):
        """Iterate all p^n exponent vectors (each is a distinct element)."""
        self._require_consistent()
        from itertools import product

        for t in product(range(self.p), repeat=self.n):
            yield t

    # -- quotients by tail subgroups -----------------------------------

    def truncate(self, m):
        """Quotient by the (always normal) tail subgroup <g_{m+1},...,g_n>:
        keep the first m generators, drop higher entries from relations."""
        if not 1 <= m <= self.n:
            raise MalformedWordError(f"truncation length {m} out of range")
        powers = tuple(v[:m] for v in self.powers[:m])
        comms = {
            (j, i): v[:m] for (j, i), v in self.comms.items() if j < m
        }
        q = PcPresentation(self.p, m, self.weights[:m], powers, comms)
        # a quotient of a consistent presentation is consistent
        q.consistent = self.consistent
        return q

    # -- serialization -------------------------------------------------

    def save_text(self):
        lines = [f"p {self.p}", f"n {self.n}",
                 "weights " + " ".join(map(str, self.weights))]
        for i, v in enumerate(self.powers):
            lines.append(f"power {i+1} : " + " ".join(map(str, v)))
        for (j, i) in sorted(self.comms):
            v = self.comms[(j, i)]
            lines.append(f"comm {j+1} {i+1} : " + " ".join(map(str, v)))
        return "\n".join(lines) + "\n"

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.save_text())

    def content_hash(self):
        return hashlib.sha256(self.save_text().encode()).hexdigest()[:16]

    @classmethod
    def load_text(cls, text):
        p = n = None
        weights = None
        powers = {}
        comms = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "p":
                    p = int(parts[1])
                elif parts[0] == "n":
                    n = int(parts[1])
                elif parts[0] == "weights":
                    weights = [int(x) for x in parts[1:]]
                elif parts[0] == "power":
                    i = int(parts[1])
                    assert parts[2] == ":"
                    powers[i - 1] = [int(x) for x in parts[3:]]
                elif parts[0] == "comm":
                    j, i = int(parts[1]), int(parts[2])
                    assert parts[3] == ":"
                    comms[(j - 1, i - 1)] = [int(x) for x in parts[4:]]
                else:
                    raise ValueError(f"unknown field {parts[0]!r}")
            except (IndexError, ValueError, AssertionError) as exc:
                raise MalformedPresentationError(
                    f"line {lineno}: cannot parse {raw!r}: {exc}"
                ) from exc
        if p is None or n is None or weights is None:
            raise MalformedPresentationError("missing p, n or weights")
        power_list = [powers.get(i, [0] * n) for i in range(n)]
        return cls(p, n, weights, power_list, comms)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.load_text(fh.read())

    def __repr__(self):
        flag = "consistent" if self.consistent else "unchecked"
        return (f"PcPresentation(p={self.p}, n={self.n}, "
                f"|S|={self.order}, {flag})")


# -- spec-level operation names ---------------------------------------


def collect(pres, word):
    """Normal form of an unreduced word [(gen, exp), ...] (0-based)."""
    pres._require_consistent()
    k = pres._kernel
    acc = k.identity()
    for g, e in word:
        if not 0 <= g < pres.n:
            raise MalformedWordError(f"generator index {g} out of range")
        e = int(e)
        if e == 0:
            continue
        if e < 0:
            acc = k.mult(acc, k.pow(k.gen(g), e))
        else:
            acc = k.mult(acc, k.gen(g, e % pres.p) if e < pres.p
                         else k.pow(k.gen(g), e))
    return acc


def commutator(pres, a, b):
    return pres.comm(a, b)


def element_order(pres, a):
    """Least p^e with a^{p^e} = 1, returned as the integer p^e."""
    pres._require_consistent()
    k = pres._kernel
    order = 1
    ident = k.identity()
    t = tuple(a)
    while t != ident:
        t = k.pow(t, pres.p)
        order *= pres.p
    return order


def consistency_check(pres):
    """Spec-level wrapper: 'pass' or the list of violated overlap tests."""
    violations = pres.consistency_violations()
    if not violations:
        pres.consistent = True
        return "pass"
    return violations
