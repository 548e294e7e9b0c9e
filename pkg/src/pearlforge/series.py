"""Characteristic series and class invariants.

Lower/upper central series, the two-step centralizer gamma_1(S) =
C_S(gamma_2/gamma_4), C_S(Z_2(S)), degree of commutativity, omega/agemo
chains, exponent, and the instance checks tying them together for
maximal-class groups.

Indexing convention (maximal-class usage): gamma(i) for i >= 2 is the
lower-central term; index 1 is reserved for the two-step centralizer
gamma_1(S), which is *not* a lower-central term.
"""

from .errors import UndefinedSeriesError, UnsupportedGroupError
from .presentation import element_order
from .subgroups import (
    Subgroup,
    centralizer,
    enumerate_subgroups,
    maximal_subgroups,
)

_BRUTE_LIMIT = 5 ** 6  # largest order for non-tail brute-force fallbacks


class SeriesData:
    def __init__(self, pres, lcs, zeta=None):
        self.pres = pres
        self.lcs = lcs          # [S, gamma_2, ..., trivial]
        self._zeta = zeta       # [trivial = Z_0, Z_1, ..., S], lazy
        self.nilpotency_class = len(lcs) - 1
        self.is_maximal_class = self.nilpotency_class == pres.n - 1
        self._gamma1 = None
        self._cs_z2 = None
        self._doc = "unset"

    @property
    def S(self):
        return self.lcs[0]

    @property
    def zeta(self):
        if self._zeta is None:
            if self.is_maximal_class:
                # maximal class: the two series coincide up to
                # reindexing, Z_i = gamma_{n-i}; the reversed lower
                # series is exactly [Z_0, ..., Z_{n-1} = S]
                self._zeta = list(reversed(self.lcs))
            else:
                self._zeta = _upper_central_series(self.pres)
        return self._zeta

    def gamma(self, i):
        """Lower-central term gamma_i for i >= 2 (trivial beyond the
        series); gamma(1) is the two-step centralizer."""
        if i < 1:
            raise ValueError("gamma index must be >= 1")
        if i == 1:
            return self.gamma1
        if i - 1 < len(self.lcs):
            return self.lcs[i - 1]
        return Subgroup.trivial(self.pres)

    def zeta_(self, i):
        if i < len(self.zeta):
            return self.zeta[i]
        return self.zeta[-1]

    def gamma_depth(self, x):
        """Largest k >= 2 with x in gamma_k; large sentinel for x = 1."""
        if all(e == 0 for e in x):
            return len(self.lcs) + self.pres.n + 2
        depth = 1
        for k in range(2, len(self.lcs) + 1):
            if self.gamma(k).contains(x):
                depth = k
            else:
                break
        return depth

    @property
    def gamma1(self):
        if self._gamma1 is None:
            self._gamma1, self._cs_z2 = two_step_centralizers(
                self.pres, self
            )
        return self._gamma1

    @property
    def cs_z2(self):
        if self._cs_z2 is None:
            _ = self.gamma1
        return self._cs_z2

    def gamma1_or_none(self):
        try:
            return self.gamma1
        except UndefinedSeriesError:
            return None

    @property
    def degree_of_commutativity(self):
        if self._doc == "unset":
            try:
                self._doc = degree_of_commutativity(self.pres, self)
            except UndefinedSeriesError:
                self._doc = None
        return self._doc

    def as_dict(self):
        d = {
            "order": self.pres.order,
            "class": self.nilpotency_class,
            "is_maximal_class": self.is_maximal_class,
            "gamma_orders": [G.order for G in self.lcs],
            "zeta_orders": [Z.order for Z in self.zeta],
        }
        if self.pres.order >= self.pres.p ** 4 and self.is_maximal_class:
            d["gamma1_order"] = self.gamma1.order
            d["gamma1_abelian"] = self.gamma1.is_abelian()
            d["cs_z2_order"] = self.cs_z2.order
            d["gamma1_equals_cs_z2"] = self.gamma1 == self.cs_z2
            d["degree_of_commutativity"] = self.degree_of_commutativity
        return d


def central_series(pres):
    """Both central series, nilpotency class and the maximal-class flag.
    The upper series is computed lazily on first access."""
    pres._require_consistent()
    whole = Subgroup.whole(pres)
    lcs = [whole]
    cur = whole
    while cur.m > 0:
        nxt = cur.commutator_with(whole)
        if nxt.basis == cur.basis:
            raise UnsupportedGroupError("group is not nilpotent?!")
        lcs.append(nxt)
        cur = nxt
    return SeriesData(pres, lcs)


def _upper_central_series(pres):
    zeta = [Subgroup.trivial(pres)]
    cur = zeta[0]
    while cur.m < pres.n:
        nxt = _next_center(pres, cur)
        if nxt.basis == cur.basis:
            raise UnsupportedGroupError("upper central series stalled")
        zeta.append(nxt)
        cur = nxt
    return zeta


def _next_center(pres, Z):
    """Z' with Z'/Z = Z(S/Z)."""
    k = pres._kernel
    if Z.m == 0:
        return centralizer(pres, Subgroup.whole(pres))
    if Z.is_tail():
        m = pres.n - Z.m
        q = pres.truncate(m)
        qz = centralizer(q, Subgroup.whole(q))
        lifted = [tuple(v) + (0,) * Z.m for v in qz.basis]
        tail = [pres.gen(i) for i in range(m, pres.n)]
        return Subgroup.span(pres, lifted + tail)
    if pres.order > _BRUTE_LIMIT:
        raise UnsupportedGroupError(
            "upper central series needs tail-shaped terms at this order"
        )
    gens = [pres.gen(i) for i in range(pres.n)]
    members = [
        x
        for x in Subgroup.whole(pres).elements()
        if all(Z.contains(k.comm(x, g)) for g in gens)
    ]
    return Subgroup.span(pres, members)


def two_step_centralizers(pres, series):
    """(gamma1, cs_z2) = (C_S(gamma_2/gamma_4), C_S(Z_2(S)))."""
    if pres.order <= pres.p ** 3:
        raise UndefinedSeriesError(
            "two-step centralizer undefined for |S| <= p^3"
        )
    k = pres._kernel
    g2 = series.gamma(2)
    g4 = series.gamma(4)
    if g4.is_tail() and g4.m < pres.n:
        m = pres.n - g4.m
        q = pres.truncate(m)
        qg2 = Subgroup.span(q, [v[:m] for v in g2.basis])
        qc = centralizer(q, qg2)
        lifted = [tuple(v) + (0,) * g4.m for v in qc.basis]
        tail = [pres.gen(i) for i in range(m, pres.n)]
        gamma1 = Subgroup.span(pres, lifted + tail)
    elif pres.order <= _BRUTE_LIMIT:
        members = [
            x
            for x in Subgroup.whole(pres).elements()
            if all(g4.contains(k.comm(b, x)) for b in g2.basis)
        ]
        gamma1 = Subgroup.span(pres, members)
    else:
        raise UnsupportedGroupError(
            "gamma_4 is not tail-shaped and the group is too large for "
            "the brute-force fallback"
        )
    cs_z2 = centralizer(pres, series.zeta_(2))
    return gamma1, cs_z2


def degree_of_commutativity(pres, series):
    """Largest l with [gamma_i, gamma_j] <= gamma_{i+j+l} for all
    i, j >= 1 (index 1 = two-step centralizer); n-3 by convention when
    gamma_1 is abelian."""
    if pres.order <= pres.p ** 3:
        raise UndefinedSeriesError(
            "degree of commutativity undefined for |S| <= p^3"
        )
    n = pres.n
    g1 = series.gamma1
    if g1.is_abelian():
        return n - 3
    k = pres._kernel
    best = None
    for i in range(1, n):
        gi = series.gamma(i)
        for j in range(i, n):
            gj = series.gamma(j)
            for a in gi.basis:
                for b in gj.basis:
                    c = k.comm(a, b)
                    if all(e == 0 for e in c):
                        continue
                    l_pair = series.gamma_depth(c) - i - j
                    if best is None or l_pair < best:
                        best = l_pair
    # non-abelian gamma_1 guarantees some nontrivial pair
    return best


def exponent_of(pres, H):
    """Exact exponent of the subgroup by exhaustive scan."""
    pres._require_consistent()
    return H.exponent()


class OmegaReport:
    def __init__(self, omega_chain, agemo, failures, notes):
        self.omega_chain = omega_chain
        self.agemo = agemo
        self.failures = failures
        self.notes = notes

    @property
    def ok(self):
        return not self.failures


def omega_agemo_chains(pres, series):
    """Omega chain of gamma_1 and the agemo subgroups gamma_i^p, with
    the deep-group power-structure assertions when |S| > p^{p+1}."""
    p = pres.p
    n = pres.n
    if pres.order <= p ** 3:
        raise UndefinedSeriesError("defined for |S| >= p^4")
    g1 = series.gamma1
    omega = [Subgroup.trivial(pres)]
    j = 1
    while omega[-1].m < g1.m:
        members = [
            x
            for x in g1.elements()
            if element_order(pres, x) <= p ** j
        ]
        omega.append(Subgroup.span(pres, members))
        j += 1
    agemo = {}
    k = pres._kernel
    for i in range(1, n):
        gi = series.gamma(i) if i >= 2 else g1
        agemo[i] = Subgroup.span(pres, [k.pow(x, p) for x in gi.elements()])
    failures = []
    notes = []
    if pres.order > p ** (p + 1):
        for i in range(1, n - (p - 1) + 1):
            gi = series.gamma(i) if i >= 2 else g1
            om1 = Subgroup.span(
                pres,
                [x for x in gi.elements() if element_order(pres, x) <= p],
            )
            if om1 != series.zeta_(p - 1):
                failures.append(f"Omega_1(gamma_{i}) != Z_{p-1}")
            if agemo[i] != series.gamma(i + p - 1):
                failures.append(f"gamma_{i}^p != gamma_{i + p - 1}")
        for jj in range(2, len(omega) - 1):
            if omega[jj].order != omega[jj - 1].order * p ** (p - 1):
                failures.append(
                    f"[Omega_{jj} : Omega_{jj - 1}] != p^{p - 1}"
                )
        if omega[-1].order // omega[-2].order > p ** (p - 1):
            failures.append("[gamma_1 : Omega_m] > p^{p-1}")
    else:
        notes.append("deep power-structure assertions vacuous (|S| <= p^{p+1})")
    return OmegaReport(omega, agemo, failures, notes)


def subgroup_class(pres, H):
    """Nilpotency class of a subgroup (lower central series inside H)."""
    cur = H
    c = 0
    while cur.m > 0:
        cur = cur.commutator_with(H, normal_in=H)
        c += 1
    return c


def verify_maximal_class_facts(pres, series, sample_limit=2000):
    """Instance checks for maximal-class structure; returns a report
    dict whose 'failures' list is empty on success."""
    p = pres.p
    n = pres.n
    report = {"applicable": True, "failures": [], "checks": []}
    if pres.order <= p ** 3 or not series.is_maximal_class:
        return {"applicable": False, "failures": [], "checks": [],
                "note": "not applicable (|S| <= p^3 or not maximal class)"}
    g1 = series.gamma1
    cz = series.cs_z2
    # (a) maximal subgroups other than gamma1, cs_z2 have maximal class
    n_max_class = 0
    for M in maximal_subgroups(pres):
        if M == g1 or M == cz:
            continue
        c = subgroup_class(pres, M)
        if c != M.m - 1:
            report["failures"].append(
                f"maximal subgroup with class {c} != {M.m - 1}"
            )
        else:
            n_max_class += 1
    report["checks"].append(("maximal-subgroups-maximal-class", n_max_class))
    # (b) P proper, P not in gamma1, and (P not in C_S(Z_2) or
    #     Z(S) <= P), |P| = p^m >= p^2  =>  Z_{m-1}(S) <= P with index p;
    #     moreover P not in C_S(Z_2) forces P to have maximal class.
    z1 = series.zeta_(1)

    def check_P(P):
        if P.m < 2 or P.m >= n:
            return None
        if g1.contains_subgroup(P):
            return None
        in_cz = cz.contains_subgroup(P)
        if in_cz and not P.contains_subgroup(z1):
            return None
        zm1 = series.zeta_(P.m - 1)
        if not P.contains_subgroup(zm1) or P.order != zm1.order * p:
            return f"index check failed at order p^{P.m}"
        if not in_cz and subgroup_class(pres, P) != P.m - 1:
            return f"maximal-class clause failed at order p^{P.m}"
        return "ok"

    checked = 0
    if pres.order <= 3 ** 6:
        for m in range(2, n):
            for P in enumerate_subgroups(pres, p ** m):
                r = check_P(P)
                if r == "ok":
                    checked += 1
                elif r:
                    report["failures"].append(r)
        report["checks"].append(("index-pattern-exhaustive", checked))
    else:
        # deterministic witness sampling: spans of Z(S) with generator
        # products
        k = pres._kernel
        seeds = [pres.gen(i) for i in range(n)]
        words = list(seeds)
        for a in seeds:
            for b in seeds:
                words.append(k.mult(a, b))
        count = 0
        for x in words:
            for y in words:
                if count >= sample_limit:
                    break
                P = Subgroup.span(pres, list(z1.basis) + [x, y])
                count += 1
                r = check_P(P)
                if r == "ok":
                    checked += 1
                elif r:
                    report["failures"].append(r)
        report["checks"].append(("index-pattern-sampled", checked))
    # (c) omega-series stabilization, only meaningful for deep groups
    if pres.order > p ** (p + 1):
        l = series.degree_of_commutativity
        om = omega_agemo_chains(pres, series)
        k = pres._kernel
        stab_checked = 0
        for i in range(1, n):
            if l < (p - 1) - i:
                continue
            gi = series.gamma(i) if i >= 2 else g1
            for jj in range(1, len(om.omega_chain)):
                upper = om.omega_chain[jj]
                lower = om.omega_chain[jj - 1]
                for a in gi.basis:
                    for b in upper.basis:
                        if not lower.contains(k.comm(b, a)):
                            report["failures"].append(
                                f"omega-series not stabilized at i={i}"
                            )
            stab_checked += 1
        report["checks"].append(("omega-stabilization", stab_checked))
    # (d) instance inequality n <= 2l + 2p - 4 for p >= 5
    if p >= 5:
        l = series.degree_of_commutativity
        if l is not None and not n <= 2 * l + 2 * p - 4:
            report["failures"].append("degree-of-commutativity bound violated")
        report["checks"].append(("doc-bound", True))
    return report
