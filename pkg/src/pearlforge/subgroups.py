"""Subgroups of a pc-presented group.

Canonical representation: an echelonized induced generating sequence --
one basis vector per leading generator index ("pivot"), leading entry 1,
zero entries at all other pivots.  Membership is exact sifting; the
canonical form is unique per subgroup, so dedup is tuple equality.

Key fact used throughout: if u, v are normal forms whose support starts
at indices >= l, the collected product's entries below the common prefix
are additive at the leading index and all collection corrections land on
strictly higher-weight (hence strictly higher-index) generators.
"""

from .errors import BudgetExceededError, UnsupportedGroupError
from .presentation import PcPresentation


def _lead(vec):
    for i, e in enumerate(vec):
        if e:
            return i
    return -1


def _inv_mod(a, p):
    return pow(a, p - 2, p)


class Subgroup:
    __slots__ = ("pres", "basis", "pivots", "m", "_elements")

    def __init__(self, pres, basis):
        """basis: canonical echelon sequence (ascending pivots).  Use
        span() to construct from arbitrary elements."""
        self.pres = pres
        self.basis = tuple(basis)
        self.pivots = tuple(_lead(b) for b in self.basis)
        self.m = len(self.basis)
        self._elements = None

    # -- construction --------------------------------------------------

    @staticmethod
    def span(pres, elements, extra_conjugators=None):
        """Smallest subgroup containing the elements; if extra_conjugators
        is a list of group elements, close under conjugation by them too
        (e.g. pc generators for a normal closure)."""
        k = pres._kernel
        p = pres.p
        ident = k.identity()
        basis = {}

        def sift(v):
            while True:
                l = _lead(v)
                if l < 0:
                    return None, v
                b = basis.get(l)
                if b is None:
                    return l, v
                v = k.mult(k.pow(b, p - v[l]), v)

        queue = [tuple(v) for v in elements]
        while queue:
            v = queue.pop()
            if v == ident:
                continue
            l, v = sift(v)
            if l is None:
                continue
            # normalize leading entry to 1
            if v[l] != 1:
                v = k.pow(v, _inv_mod(v[l], p))
            # closure obligations
            queue.append(k.pow(v, p))
            for b in basis.values():
                queue.append(k.comm(v, b))
            if extra_conjugators:
                for g in extra_conjugators:
                    queue.append(k.conj(v, g))
            basis[l] = v
        return Subgroup(pres, _reduce_echelon(pres, basis))

    @staticmethod
    def trivial(pres):
        return Subgroup(pres, ())

    @staticmethod
    def whole(pres):
        return Subgroup(pres, tuple(pres.gen(i) for i in range(pres.n)))

    # -- basic queries -------------------------------------------------

    @property
    def order(self):
        return self.pres.p ** self.m

    def key(self):
        return self.basis

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __le__(self, other):
        return all(other.contains(b) for b in self.basis)

    def __lt__(self, other):
        return self.m < other.m and self <= other

    def sift(self, v):
        """Residue of v after removing basis components (identity iff
        v is a member)."""
        k = self.pres._kernel
        p = self.pres.p
        v = tuple(v)
        bs = dict(zip(self.pivots, self.basis))
        while True:
            l = _lead(v)
            if l < 0 or l not in bs:
                return v
            v = k.mult(k.pow(bs[l], p - v[l]), v)

    def contains(self, v):
        return _lead(self.sift(v)) < 0

    def contains_subgroup(self, other):
        return all(self.contains(b) for b in other.basis)

    def express(self, v):
        """Coefficients of v in the induced generating sequence, as a
        list parallel to basis, or None if v is not a member."""
        k = self.pres._kernel
        p = self.pres.p
        v = tuple(v)
        coeffs = [0] * self.m
        idx = {l: t for t, l in enumerate(self.pivots)}
        while True:
            l = _lead(v)
            if l < 0:
                return coeffs
            t = idx.get(l)
            if t is None:
                return None
            coeffs[t] = v[l]
            v = k.mult(k.pow(self.basis[t], p - v[l]), v)

    def elements(self):
        """All p^m members (cached list)."""
        if self._elements is None:
            k = self.pres._kernel
            p = self.pres.p
            els = [k.identity()]
            for b in reversed(self.basis):
                pows = [k.identity()]
                for _ in range(p - 1):
                    pows.append(k.mult(pows[-1], b))
                els = [k.mult(pw, e) for pw in pows for e in els]
            self._elements = els
        return self._elements

    def conjugate(self, g):
        k = self.pres._kernel
        return Subgroup.span(self.pres, [k.conj(b, g) for b in self.basis])

    def is_normal(self):
        k = self.pres._kernel
        return all(
            self.contains(k.conj(b, self.pres.gen(i)))
            for b in self.basis
            for i in range(self.pres.n)
        )

    def is_tail(self):
        """True iff the subgroup equals <g_{m0}, ..., g_{n-1}> for the
        tail starting at its smallest pivot."""
        n = self.pres.n
        return self.pivots == tuple(range(n - self.m, n))

    # -- structure -----------------------------------------------------

    def commutator_with(self, other, normal_in=None):
        """[self, other] as a subgroup: span of basis commutators, closed
        under conjugation by normal_in's basis (default: whole group)."""
        k = self.pres._kernel
        gens = [k.comm(a, b) for a in self.basis for b in other.basis]
        conjers = (
            [self.pres.gen(i) for i in range(self.pres.n)]
            if normal_in is None
            else list(normal_in.basis)
        )
        return Subgroup.span(self.pres, gens, extra_conjugators=conjers)

    def derived(self):
        """[H, H] (normal closure inside H)."""
        return self.commutator_with(self, normal_in=self)

    def frattini(self):
        """Phi(H) = H^p [H, H]."""
        k = self.pres._kernel
        gens = [k.pow(b, self.pres.p) for b in self.basis]
        gens += [k.comm(a, b) for a in self.basis for b in self.basis]
        return Subgroup.span(self.pres, gens, extra_conjugators=self.basis)

    def d(self):
        """Minimal number of generators."""
        return self.m - self.frattini().m

    def center_of(self):
        """Z(H): members commuting with every basis element."""
        if self.order > self.pres.p ** 4:
            # H cap (intersection of the ambient centralizers of the
            # basis) -- avoids scanning every element of a large H
            Z = self
            for b in self.basis:
                Z = intersect(self.pres, Z, centralizer(self.pres, b))
            return Z
        k = self.pres._kernel
        ident = k.identity()
        zs = [
            x for x in self.elements()
            if all(k.comm(x, b) == ident for b in self.basis)
        ]
        return Subgroup.span(self.pres, zs)

    def is_abelian(self):
        k = self.pres._kernel
        ident = k.identity()
        return all(
            k.comm(a, b) == ident
            for idx, a in enumerate(self.basis)
            for b in self.basis[idx + 1:]
        )

    def exponent(self):
        """Exact exponent.

        For |H| <= p^p the class is at most m-1 < p, so H is regular:
        each Omega_j is a subgroup and the exponent is attained on any
        generating set.  Larger groups fall back to the exhaustive scan
        (|H| <= p^6 by design)."""
        from .presentation import element_order

        if self.m <= self.pres.p:
            return max(
                (element_order(self.pres, b) for b in self.basis),
                default=1,
            )
        if self.order > self.pres.p ** 6:
            raise UnsupportedGroupError(
                "exhaustive exponent scan limited to |H| <= p^6"
            )
        return max(
            (element_order(self.pres, x) for x in self.elements()),
            default=1,
        )


def induced_presentation(pres, H):
    """Pc presentation of a subgroup on its canonical basis.

    Weights are inherited from the pivot generators; power and commutator
    words are the basis-coefficient expressions of the ambient values.
    The result is checked for consistency before return.
    """
    k = pres._kernel
    p = pres.p
    m = H.m
    weights = tuple(pres.weights[piv] for piv in H.pivots)
    powers = []
    for b in H.basis:
        powers.append(tuple(H.express(k.pow(b, p))))
    comms = {}
    for j in range(m):
        for i in range(j):
            v = H.express(k.comm(H.basis[j], H.basis[i]))
            if any(v):
                comms[(j, i)] = tuple(v)
    q = PcPresentation(p, m, weights, powers, comms)
    q.check()
    return q


def _reduce_echelon(pres, basis_dict):
    """Canonicalize: leading entries already 1; clear every basis vector's
    entries at the other (later) pivots, largest pivot first."""
    k = pres._kernel
    p = pres.p
    pivots = sorted(basis_dict)
    reduced = {}
    for l in reversed(pivots):
        v = basis_dict[l]
        for l2 in pivots:
            if l2 > l and v[l2]:
                v = k.mult(v, k.pow(reduced[l2], p - v[l2]))
        reduced[l] = v
    return tuple(reduced[l] for l in pivots)


# -- profiles ----------------------------------------------------------


def _rank_mod_p(rows, p):
    """Rank of a small integer matrix over F_p (row reduction)."""
    rows = [[e % p for e in row] for row in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next(
            (r for r in range(rank, len(rows)) if rows[r][col]), None
        )
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        rows[rank] = [(e * inv) % p for e in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                c = rows[r][col]
                rows[r] = [
                    (a - c * b) % p
                    for a, b in zip(rows[r], rows[rank])
                ]
        rank += 1
    return rank


def is_extraspecial(H):
    """Z(H) = H' = Phi(H) of order p, decided without a centralizer
    scan: once H' = Phi(H) is central of order p, the commutator
    induces an alternating form on H/Phi(H) whose radical is Z(H)/H',
    so H is extraspecial iff that form is nondegenerate."""
    pres = H.pres
    p = pres.p
    if H.m < 3 or H.is_abelian():
        return False
    der = H.derived()
    if der.m != 1:
        return False
    phi = H.frattini()
    if phi.basis != der.basis:
        return False
    k = pres._kernel
    # Gram matrix of the form w.r.t. a spanning set of H/Phi(H)
    gens = [b for b in H.basis if not der.contains(b)]
    gram = [
        [der.express(k.comm(a, b))[0] for b in gens] for a in gens
    ]
    return _rank_mod_p(gram, p) == H.m - phi.m


class SubgroupProfile:
    def __init__(self, H):
        self.subgroup = H
        self.frattini = H.frattini()
        self.d = H.m - self.frattini.m
        self.abelian = H.is_abelian()
        self.exponent = H.exponent()
        p = H.pres.p
        self.elementary_abelian = self.abelian and self.exponent <= p
        self.extraspecial = is_extraspecial(H)

    def as_dict(self):
        return {
            "order": self.subgroup.order,
            "d": self.d,
            "abelian": self.abelian,
            "elementary_abelian": self.elementary_abelian,
            "extraspecial": self.extraspecial,
            "exponent": self.exponent,
        }


def profile(pres, H):
    return SubgroupProfile(H)


# -- normalizers / centralizers (orbit-stabilizer) ---------------------


def _orbit_stabilizer(pres, point, act, key, seed_subgroup=None):
    """Generic orbit of `point` under conjugation by the pc generators.

    act(point, g) -> new point;  key(point) -> hashable canonical form.
    Returns (orbit dict key->transversal element, stabilizer Subgroup).
    """
    k = pres._kernel
    gens = [pres.gen(i) for i in range(pres.n)]
    start = key(point)
    transversal = {start: k.identity()}
    frontier = [(point, k.identity())]
    stab_gens = list(seed_subgroup.basis) if seed_subgroup else []
    while frontier:
        pt, t = frontier.pop()
        for g in gens:
            npt = act(pt, g)
            nk = key(npt)
            tg = k.mult(t, g)
            if nk in transversal:
                # Schreier generator: t g (t')^-1 stabilizes the point
                stab_gens.append(k.mult(tg, k.inv(transversal[nk])))
            else:
                transversal[nk] = tg
                frontier.append((npt, tg))
    return transversal, Subgroup.span(pres, stab_gens)


def normalizer(pres, H):
    """Exact N_S(H) via the conjugation orbit of H's canonical form."""
    if H.m == pres.n:
        return H

    def act(sub, g):
        return sub.conjugate(g)

    _, stab = _orbit_stabilizer(pres, H, act, Subgroup.key, seed_subgroup=H)
    return stab


def centralizer(pres, X):
    """C_S(X) for a Subgroup or a single element."""
    k = pres._kernel
    if isinstance(X, Subgroup):
        targets = list(X.basis)
    else:
        targets = [tuple(X)]
    if not targets:
        return Subgroup.whole(pres)

    def cent_of_element(x):
        def act(pt, g):
            return k.conj(pt, g)

        _, stab = _orbit_stabilizer(pres, x, act, lambda t: t)
        return stab

    # centralize the target with the smallest centralizer, then filter;
    # targets the running intersection already centralizes (checked on
    # its basis) are skipped without enumerating elements
    cents = [(cent_of_element(x), x) for x in targets]
    cents.sort(key=lambda cx: cx[0].m)
    C, _first = cents[0]
    ident = k.identity()
    for _, x in cents[1:]:
        if all(k.comm(x, b) == ident for b in C.basis):
            continue
        members = [e for e in C.elements() if k.comm(x, e) == ident]
        C = Subgroup.span(pres, members)
    return C


def intersect(pres, A, B):
    """A \\cap B by enumerating the smaller and filtering."""
    small, big = (A, B) if A.m <= B.m else (B, A)
    members = [e for e in small.elements() if big.contains(e)]
    return Subgroup.span(pres, members)


# -- enumeration -------------------------------------------------------


class _Budget:
    def __init__(self, limit):
        # None means "use the default cap", not "unlimited"
        self.limit = DEFAULT_BUDGET if limit is None else limit
        self.used = 0

    def spend(self, amount=1, what=""):
        self.used += amount
        if self.used > self.limit:
            raise BudgetExceededError(
                f"subgroup-node budget {self.limit} exceeded ({what})",
                nodes_visited=self.used,
                detail=what,
            )


DEFAULT_BUDGET = 10_000_000


def enumerate_subgroups(pres, order, budget=DEFAULT_BUDGET):
    """All subgroups of the given order, canonical-sorted.

    Level-by-level: each subgroup of order p^{k+1} contains a normal
    (because maximal) subgroup of order p^k, so extending every level-k
    subgroup H by g in N_S(H) \\ H with g^p in H finds everything.
    """
    p = pres.p
    m_target = 0
    o = order
    while o > 1:
        if o % p:
            raise UnsupportedGroupError(f"order {order} is not a power of p")
        o //= p
        m_target += 1
    if order > pres.order:
        return []
    b = _Budget(budget)
    level = {Subgroup.trivial(pres)}
    for _ in range(m_target):
        nxt = set()
        for H in level:
            N = normalizer(pres, H)
            for g in N.elements():
                if H.contains(g):
                    continue
                if not H.contains(pres._kernel.pow(g, p)):
                    continue
                bigger = Subgroup.span(pres, list(H.basis) + [g])
                if bigger not in nxt:
                    b.spend(1, f"order p^{H.m + 1} layer")
                    nxt.add(bigger)
        level = nxt
    return sorted(level, key=lambda s: s.basis)


def subgroup_class_reps(pres, budget=DEFAULT_BUDGET, max_order=None):
    """One representative per S-conjugacy class of subgroups, all orders
    (up to max_order).  Used by sectional_rank: d(H) is conjugation
    invariant."""
    k = pres._kernel
    p = pres.p
    gens = [pres.gen(i) for i in range(pres.n)]
    b = _Budget(budget)

    def class_key(H):
        # canonical minimum over the conjugation orbit
        seen = {H.key()}
        frontier = [H]
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nb = cur.conjugate(g)
                if nb.key() not in seen:
                    b.spend(1, "orbit scan")
                    seen.add(nb.key())
                    frontier.append(nb)
        return min(seen)

    level = [Subgroup.trivial(pres)]
    out = [Subgroup.trivial(pres)]
    m = 0
    while level and (max_order is None or p ** m < max_order):
        nxt = {}
        for H in level:
            N = normalizer(pres, H)
            seen_ext = set()
            for g in N.elements():
                if H.contains(g):
                    continue
                if not H.contains(k.pow(g, p)):
                    continue
                bigger = Subgroup.span(pres, list(H.basis) + [g])
                if bigger.key() in seen_ext:
                    continue
                seen_ext.add(bigger.key())
                ck = class_key(bigger)
                if ck not in nxt:
                    b.spend(1, f"class layer p^{m + 1}")
                    nxt[ck] = bigger
        level = list(nxt.values())
        out.extend(level)
        m += 1
    return out


class RankReport:
    def __init__(self, rank, witness, exact, scanned=None):
        self.rank = rank
        self.witness = witness
        self.exact = exact
        self.scanned = scanned or []

    def as_dict(self):
        return {
            "sectional_rank": self.rank,
            "witness_order": self.witness.order if self.witness else None,
            "witness": [list(v) for v in self.witness.basis]
            if self.witness
            else None,
            "exact": self.exact,
            "scanned_families": self.scanned,
        }


def sectional_rank(pres, budget=DEFAULT_BUDGET):
    """Exact max d(H) over all subgroups by bounded descent.

    Any H with d(H) > r satisfies |H| >= p^(r+1), so after seeding the
    bound from structural subgroups it suffices to enumerate the
    subgroups above the moving order threshold via descending maximal
    chains; the sweep terminates with a proof of maximality."""
    from . import series as series_mod

    b = _Budget(budget)
    whole = Subgroup.whole(pres)
    best, witness = whole.d(), whole
    sd = series_mod.central_series(pres)
    seeds = list(sd.lcs) + list(sd.zeta)
    g1 = sd.gamma1_or_none()
    if g1 is not None:
        seeds.append(g1)
    for H in seeds:
        dh = H.d()
        if dh > best:
            best, witness = dh, H
    level = {whole.key(): whole}
    m = pres.n
    scanned = ["structural-seeds"]
    while m - 1 >= best + 1:
        nxt = {}
        for H in level.values():
            phi = H.frattini()
            for M in _hyperplanes_between(pres, phi, H):
                if M.key() not in nxt:
                    b.spend(1, f"rank sweep at order p^{m - 1}")
                    nxt[M.key()] = M
        for M in nxt.values():
            dm = M.d()
            if dm > best:
                best, witness = dm, M
        scanned.append(f"all-subgroups-of-order-p^{m - 1}")
        level = nxt
        m -= 1
    return RankReport(best, witness, exact=True, scanned=scanned)


def _hyperplanes_between(pres, K, H):
    """Index-p subgroups L with K <= L < H, for H/K elementary abelian:
    the kernels of the (p^r - 1)/(p - 1) nonzero linear functionals on
    H/K, one representative functional per projective point (leading
    coefficient 1)."""
    p = pres.p
    comp = []
    work = K
    for b in H.basis:
        if not work.contains(b):
            comp.append(b)
            work = Subgroup.span(pres, list(work.basis) + [b])
    r = len(comp)
    out = []
    for pivot in range(r):
        for code in range(p ** (r - pivot - 1)):
            alpha = [0] * r
            alpha[pivot] = 1
            c = code
            for i in range(pivot + 1, r):
                alpha[i] = c % p
                c //= p
            # kernel basis: e_i (i < pivot), e_i - alpha_i e_pivot (i > pivot)
            gens = list(K.basis)
            gens.extend(comp[i] for i in range(pivot))
            for i in range(pivot + 1, r):
                gens.append(
                    pres.mult(
                        comp[i], pres.pow(comp[pivot], (-alpha[i]) % p)
                    )
                )
            out.append(Subgroup.span(pres, gens))
    return out


def maximal_subgroups(pres):
    """The p+1 (for 2-generated; generally (p^d-1)/(p-1)) maximal
    subgroups: preimages of hyperplanes of S/Phi(S)."""
    whole = Subgroup.whole(pres)
    return _hyperplanes_between(pres, whole.frattini(), whole)
