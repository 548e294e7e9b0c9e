"""Pearl-candidate detection, normalizer towers, essential-subgroup filters.

A pearl candidate is a purely group-theoretic object: a subgroup of a
maximal-class group that is either elementary abelian of order p^2 or
extraspecial of order p^3 and exponent p, self-centralizing, with index
p in its normalizer.  Modulo its Frattini subgroup a candidate is a
self-centralizing subgroup of index p in its normalizer ("soft"), which
forces a maximal normalizer tower with a rigid central structure; the
tower checks here verify that structure exhaustively on instances.
"""

from .errors import (
    BudgetExceededError,
    FalsificationError,
    UnsupportedGroupError,
)
from .presentation import element_order
from .subgroups import (
    DEFAULT_BUDGET,
    Subgroup,
    SubgroupProfile,
    _Budget,
    centralizer,
    induced_presentation,
    normalizer,
)


# -- candidates --------------------------------------------------------


class PearlCandidate:
    """kind 'abelian' (C_p x C_p, epsilon 0) or 'extraspecial'
    (p^{1+2}_+ of exponent p, epsilon 1); witness is an order-p element
    outside the two-step centralizer generating E over Z(S) / Z_2(S)."""

    def __init__(self, subgroup, kind, witness):
        self.subgroup = subgroup
        self.kind = kind
        self.epsilon = 0 if kind == "abelian" else 1
        self.witness = witness

    def __repr__(self):
        return (f"PearlCandidate({self.kind}, "
                f"order=p^{self.subgroup.m})")

    def as_dict(self):
        return {
            "kind": self.kind,
            "epsilon": self.epsilon,
            "order": self.subgroup.order,
            "basis": [list(v) for v in self.subgroup.basis],
            "witness": list(self.witness),
        }


def _assert_candidate_invariants(pres, E, kind):
    p = pres.p
    eps = 0 if kind == "abelian" else 1
    if E.order != p ** (2 + eps):
        raise FalsificationError(
            f"candidate of kind {kind} has order {E.order}"
        )
    if not E.contains_subgroup(centralizer(pres, E)):
        raise FalsificationError("candidate is not self-centralizing")
    if normalizer(pres, E).order != E.order * p:
        raise FalsificationError(
            "candidate does not have index p in its normalizer"
        )
    if E.exponent() != p:
        raise FalsificationError("candidate does not have exponent p")
    if kind == "abelian" and not E.is_abelian():
        raise FalsificationError("abelian-kind candidate is nonabelian")
    if kind == "extraspecial" and E.is_abelian():
        raise FalsificationError("extraspecial-kind candidate is abelian")


def find_pearl_candidates(pres, series=None):
    """All pearl candidates: <x>Z(S) and (exponent p only) <x>Z_2(S)
    over order-p elements x outside the two-step centralizer and outside
    the centralizer of the second-step quotient, scanned over coset
    representatives of Z_2(S) and deduplicated by canonical form."""
    from . import series as series_mod

    if series is None:
        series = series_mod.central_series(pres)
    p = pres.p
    if pres.order < p ** 4:
        raise UnsupportedGroupError(
            "candidate scan needs order at least p^4"
        )
    if not series.is_maximal_class:
        raise UnsupportedGroupError("candidate scan needs maximal class")
    cz = series.cs_z2
    g1 = series.gamma1
    z1 = series.zeta_(1)
    z2 = series.zeta_(2)
    k = pres._kernel

    # coset representatives of Z_2(S): vectors vanishing on the leads of
    # its echelon basis (sifting lands every element on one of these)
    leads = {next(i for i, e in enumerate(b) if e) for b in z2.basis}
    free = [i for i in range(pres.n) if i not in leads]
    from itertools import product

    seen = {}
    for combo in product(range(p), repeat=len(free)):
        x = [0] * pres.n
        for pos, e in zip(free, combo):
            x[pos] = e
        x = tuple(x)
        if cz.contains(x) or g1.contains(x):
            continue
        if element_order(pres, x) != p:
            continue
        Ea = Subgroup.span(pres, [x] + list(z1.basis))
        if Ea.key() not in seen:
            seen[Ea.key()] = PearlCandidate(Ea, "abelian", x)
        Ee = Subgroup.span(pres, [x] + list(z2.basis))
        if Ee.exponent() == p and Ee.key() not in seen:
            seen[Ee.key()] = PearlCandidate(Ee, "extraspecial", x)
    out = sorted(seen.values(), key=lambda c: (c.epsilon, c.subgroup.basis))
    for c in out:
        _assert_candidate_invariants(pres, c.subgroup, c.kind)
    return out


# -- normalizer towers -------------------------------------------------

_EXHAUSTIVE_LIMIT = 5 ** 5


def overgroups_of(pres, E, budget=DEFAULT_BUDGET):
    """All subgroups of S containing E, by repeated maximal extension
    (every overgroup refines to a chain of maximal steps through E)."""
    b = _Budget(budget)
    p = pres.p
    k = pres._kernel
    found = {E.key(): E}
    frontier = [E]
    while frontier:
        H = frontier.pop()
        N = normalizer(pres, H)
        for g in N.elements():
            if H.contains(g):
                continue
            if not H.contains(k.pow(g, p)):
                continue
            big = Subgroup.span(pres, list(H.basis) + [g])
            if big.key() not in found:
                b.spend(1, "overgroup scan")
                found[big.key()] = big
                frontier.append(big)
    return sorted(found.values(), key=lambda s: (s.m, s.basis))


def _subgroups_from(pres, seed, inside, budget=DEFAULT_BUDGET):
    """All subgroups L with seed <= L <= inside (maximal-step chains)."""
    b = _Budget(budget)
    p = pres.p
    k = pres._kernel
    found = {seed.key(): seed}
    frontier = [seed]
    while frontier:
        H = frontier.pop()
        N = normalizer(pres, H)
        for g in N.elements():
            if H.contains(g) or not inside.contains(g):
                continue
            if not H.contains(k.pow(g, p)):
                continue
            big = Subgroup.span(pres, list(H.basis) + [g])
            if big.key() not in found:
                b.spend(1, "between scan")
                found[big.key()] = big
                frontier.append(big)
    return sorted(found.values(), key=lambda s: (s.m, s.basis))


def _lift_from_induced(pres, H, vecs):
    """Map exponent vectors of induced_presentation(pres, H) back to
    elements of pres."""
    k = pres._kernel
    out = []
    for v in vecs:
        x = k.identity()
        for t, e in enumerate(v):
            if e:
                x = k.mult(x, k.pow(H.basis[t], e))
        out.append(x)
    return out


def _subgroup_series_of(pres, H):
    """(zeta terms, derived, center) of H as subgroups of pres, via the
    induced presentation."""
    from . import series as series_mod

    q = induced_presentation(pres, H)
    sd = series_mod.central_series(q)
    zetas = []
    for i in range(1, q.n + 1):
        zi = sd.zeta_(i)
        zetas.append(
            Subgroup.span(pres, _lift_from_induced(pres, H, zi.basis))
        )
        if zi.m == q.n:
            break
    return zetas


def _is_characteristic_in(pres, N, K, aut_budget):
    """Is K characteristic in N (subgroups of pres)?  Transports to a
    standard-chain re-presentation of N and checks every computed
    automorphism-coset representative plus normality."""
    from . import autos as autos_mod

    if not all(K.conjugate(g) == K for g in N.basis):
        return False  # not even normal in N
    q = induced_presentation(pres, N)
    std, iso = autos_mod.standardize(q)
    inv = iso.inverse()
    K_q = Subgroup.span(q, [tuple(N.express(b)) for b in K.basis])
    K_std = Subgroup.span(std, [inv.apply(b) for b in K_q.basis])
    ag = autos_mod.automorphism_group(std, budget=aut_budget)
    for rep in ag.reps:
        img = Subgroup.span(std, [rep.apply(b) for b in K_std.basis])
        if img != K_std:
            return False
    return True


class TowerReport:
    def __init__(self, candidate, tower, h_series, checks, notes):
        self.candidate = candidate
        self.tower = tower          # subgroups of S: E < N^1 < ... < S
        self.h_series = h_series    # subgroups of P = S/Phi(E)
        self.checks = checks        # name -> bool
        self.notes = notes
        self.m = len(tower) - 1

    @property
    def maximal_overgroup(self):
        """M_E: the unique maximal subgroup of S containing E."""
        return self.tower[-2] if len(self.tower) >= 2 else self.tower[-1]

    @property
    def ok(self):
        return all(self.checks.values())

    def as_dict(self):
        return {
            "kind": self.candidate.kind,
            "tower_orders": [t.order for t in self.tower],
            "h_series_orders": [h.order for h in self.h_series],
            "checks": dict(self.checks),
            "notes": list(self.notes),
        }


def normalizer_tower(pres, candidate, aut_budget=None, peers=None):
    """The normalizer tower of a candidate with the full battery of
    structural checks; any violated check raises FalsificationError.

    peers: optional list of other candidates, used for the two checks
    that compare distinct self-centralizing subgroups (vacuous with no
    peer of the required position)."""
    from . import series as series_mod

    p = pres.p
    E = candidate.subgroup
    checks = {}
    notes = []

    # tower in S
    tower = [E]
    while tower[-1].m < pres.n:
        tower.append(normalizer(pres, tower[-1]))
        if tower[-1].order == tower[-2].order:
            raise FalsificationError("normalizer tower stalled")
    checks["tower-maximal"] = all(
        b.order == a.order * p for a, b in zip(tower, tower[1:])
    )

    # every overgroup of E has maximal class (pearl-overgroup rigidity)
    for t in tower[1:]:
        if series_mod.subgroup_class(pres, t) != t.m - 1:
            raise FalsificationError(
                "tower member without maximal nilpotency class"
            )
    checks["overgroups-maximal-class"] = True

    # pass to P = S/Phi(E); Phi(E) is Z(S) for the extraspecial kind
    if candidate.epsilon == 0:
        P = pres
        proj = lambda v: v
        A = E
    else:
        z = Subgroup.span(pres, [b for b in E.frattini().basis])
        if not z.is_tail():
            raise UnsupportedGroupError(
                "candidate Frattini subgroup is not a tail subgroup"
            )
        P = pres.truncate(pres.n - z.m)
        proj = lambda v: v[: P.n]
        A = Subgroup.span(P, [proj(b) for b in E.basis])

    m = P.n - A.m
    towerP = [A]
    for _ in range(m):
        towerP.append(normalizer(P, towerP[-1]))
    checks["soft"] = (
        A.contains_subgroup(centralizer(P, A))
        and towerP[1].order == A.order * p
    )

    # Het (1): members are the only overgroups (exhaustive at small order)
    if P.order <= _EXHAUSTIVE_LIMIT:
        over = overgroups_of(P, A)
        keys = {t.key() for t in towerP}
        checks["tower-only-overgroups"] = (
            len(over) == m + 1 and {o.key() for o in over} == keys
        )
    else:
        notes.append("overgroup uniqueness not exhaustively scanned "
                     "(order above the exhaustive limit)")

    # Het (2): class of N^i is i + 1
    checks["tower-class"] = all(
        series_mod.subgroup_class(P, towerP[i]) == i + 1
        for i in range(1, m)
    )

    # H-series: H_i = Z_i(N^i) for i < m; H_m = Z(N^1) [P, P]
    whole = Subgroup.whole(P)
    derivedP = whole.derived()
    h_series = []
    z_n1 = _subgroup_series_of(P, towerP[1])[0]
    for i in range(1, m):
        zetas = _subgroup_series_of(P, towerP[i])
        h_series.append(zetas[min(i, len(zetas)) - 1])
    h_series.append(
        Subgroup.span(P, list(z_n1.basis) + list(derivedP.basis))
    )

    # Het (4): index pattern
    # h_series[i] holds H_{i+1}; towerP[i] holds N^i
    checks["h-indices"] = (
        A.order == h_series[0].order * p
        and all(
            h_series[i].order == h_series[i - 1].order * p
            and towerP[i].order == h_series[i].order * p
            for i in range(1, m)
        )
    )

    # Het (5): N^i / H_i elementary abelian of order p^2
    ok5 = True
    for i in range(1, m + 1):
        N, H = towerP[i], h_series[i - 1]
        if N.order != H.order * p * p:
            ok5 = False
            break
        if not H.contains_subgroup(
            N.commutator_with(N, normal_in=whole)
        ):
            ok5 = False
            break
        if not all(H.contains(P._kernel.pow(b, p)) for b in N.basis):
            ok5 = False
            break
    checks["quotient-rank-two"] = ok5

    # Het (3): H_i <= N^{i-1} and characteristic in N^i
    ok3 = all(
        towerP[i - 1].contains_subgroup(h_series[i - 1])
        for i in range(1, m + 1)
    )
    if ok3:
        for i in range(1, m + 1):
            try:
                if not _is_characteristic_in(
                    P, towerP[i], h_series[i - 1], aut_budget
                ):
                    ok3 = False
                    break
            except BudgetExceededError:
                notes.append(
                    f"characteristic check skipped at tower level {i} "
                    f"(automorphism budget)"
                )
    checks["h-characteristic"] = ok3

    # Het (6): the H_i are the only A-normalized subgroups of H_m
    # containing H_1 (exhaustive at small order)
    if P.order <= _EXHAUSTIVE_LIMIT:
        between = _subgroups_from(P, h_series[0], h_series[-1])
        keys = {h.key() for h in h_series}
        ok6 = True
        for K in between:
            if all(K.conjugate(a) == K for a in A.basis):
                if K.key() not in keys:
                    ok6 = False
        checks["h-chain-unique"] = ok6
    else:
        notes.append("H-chain uniqueness not exhaustively scanned")

    # Het (7) and (8): comparisons against peer candidates
    if peers:
        peer_done = False
        for other in peers:
            if other.subgroup == E:
                continue
            if other.epsilon != candidate.epsilon:
                continue
            B = other.subgroup
            if candidate.epsilon == 1:
                B = Subgroup.span(P, [proj(b) for b in B.basis])
            # Het (7): H_m from the peer's tower
            nb = normalizer(P, B)
            zb = _subgroup_series_of(P, nb)[0]
            hm = Subgroup.span(P, list(zb.basis) + list(derivedP.basis))
            checks["h-top-soft-independent"] = hm == h_series[-1]
            # Het (8): peer inside N^{m-1} is conjugate to A
            if towerP[-2].contains_subgroup(B) and \
                    P.order <= _EXHAUSTIVE_LIMIT:
                conj = _is_conjugate_subgroup(P, B, A)
                checks["peer-conjugate"] = conj
            peer_done = True
        if not peer_done:
            notes.append("no comparable peer candidate; "
                         "peer checks vacuous")
    else:
        notes.append("single candidate class; peer checks vacuous")

    report = TowerReport(candidate, tower, h_series, checks, notes)
    if not report.ok:
        bad = [k for k, v in checks.items() if not v]
        raise FalsificationError(
            f"normalizer tower checks failed: {', '.join(bad)}"
        )
    return report


def _is_conjugate_subgroup(pres, B, A):
    """Is some S-conjugate of B equal to A?  Orbit search over the
    conjugation action."""
    gens = [pres.gen(i) for i in range(pres.n)]
    seen = {B.key()}
    frontier = [B]
    while frontier:
        H = frontier.pop()
        if H == A:
            return True
        for g in gens:
            Hg = H.conjugate(g)
            if Hg.key() not in seen:
                seen.add(Hg.key())
                frontier.append(Hg)
    return A.key() in seen


# -- essential-subgroup filters ----------------------------------------

REASON_PEARL = "pearl"
REASON_GAMMA1 = "gamma1"
REASON_CS_Z2 = "cs_z2-family"
REASON_OTHER = "other"

CODE_NOT_CENTRIC = "not-self-centralizing"
CODE_FRATTINI = "frattini-sandwich-degenerate"
CODE_CHAIN = "characteristic-chain-stabilized"
CODE_MAXCLASS = "maximal-class-not-pearl"
CODE_IN_EXTRA = "proper-in-extraspecial-gamma1"
CODE_C2_SHAPE = "cs_z2-shape-excluded"
CODE_TAIL_DEPTH = "tail-depth-conflict"


def _omega1(pres, H):
    k = pres._kernel
    gens = [x for x in H.elements() if k.pow(x, pres.p) == k.identity()]
    return Subgroup.span(pres, gens)


def _agemo(pres, H):
    k = pres._kernel
    return Subgroup.span(pres, [k.pow(x, pres.p) for x in H.elements()])


def _stabilizes_chain(pres, ngens, chain):
    """Do all given elements act trivially on every factor of the chain
    (and fix its first member pointwise)?"""
    k = pres._kernel
    ident = k.identity()
    for g in ngens:
        for x in chain[0].basis:
            if k.comm(x, g) != ident:
                return False
        for lower, upper in zip(chain, chain[1:]):
            for x in upper.basis:
                if not lower.contains(k.comm(x, g)):
                    return False
    return True


def _characteristic_chain_filtered(pres, E, N):
    """True when the normalizer stabilizes one of the fixed test chains
    of characteristic subgroups of E through Phi(E) -- such a subgroup
    cannot be essential."""
    k = pres._kernel
    p = pres.p
    trivial = Subgroup.trivial(pres)
    phi = E.frattini()
    zc = E.center_of()
    der = E.derived()
    om1 = _omega1(pres, E)
    ag = _agemo(pres, E)
    ngens = [g for g in N.basis]

    chains = []
    if om1 < E:  # exponent > p
        chains.append([ag, om1, E])
    chains.append([trivial, der, zc, om1, E])
    zphi = Subgroup.span(pres, list(zc.basis) + list(phi.basis))
    chains.append([_intersection(pres, zc, phi), zc, zphi, om1, E])
    for chain in chains:
        cleaned = []
        ok = True
        for member in chain:
            if cleaned and not member.contains_subgroup(cleaned[-1]):
                ok = False
                break
            cleaned.append(member)
        if not ok or not phi.contains_subgroup(cleaned[0]):
            continue
        if _stabilizes_chain(pres, ngens, cleaned):
            return True
    return False


def _intersection(pres, A, B):
    from .subgroups import intersect

    return intersect(pres, A, B)


def essential_candidate_scan(pres, series=None, budget=DEFAULT_BUDGET):
    """Subgroups passing every group-level necessary condition for
    being an essential subgroup, labeled pearl / gamma1 / cs_z2-family /
    other.  Scans all subgroups containing the center (a centric
    subgroup must contain it); budget exhaustion raises with the
    unscanned strata listed."""
    from . import series as series_mod

    if series is None:
        series = series_mod.central_series(pres)
    p = pres.p
    if pres.order < p ** 4 or not series.is_maximal_class:
        raise UnsupportedGroupError(
            "essential scan needs maximal class and order at least p^4"
        )
    z1 = series.zeta_(1)
    pearl_keys = _pearl_conjugate_keys(
        pres, find_pearl_candidates(pres, series)
    )

    try:
        cands = _subgroups_from(
            pres, z1, Subgroup.whole(pres), budget=budget
        )
    except BudgetExceededError as exc:
        raise BudgetExceededError(
            "essential scan budget exhausted before all strata above "
            "the center were enumerated",
            nodes_visited=exc.nodes_visited,
            detail="subgroup enumeration",
        ) from exc

    survivors = []
    for E in cands:
        verdict = _filter_one(pres, series, E, pearl_keys)
        if verdict[0]:
            survivors.append((E, [verdict[1]]))
    return survivors


def _pearl_conjugate_keys(pres, pearls):
    keys = set()
    gens = [pres.gen(i) for i in range(pres.n)]
    for c in pearls:
        frontier = [c.subgroup]
        keys.add(c.subgroup.key())
        while frontier:
            H = frontier.pop()
            for g in gens:
                Hg = H.conjugate(g)
                if Hg.key() not in keys:
                    keys.add(Hg.key())
                    frontier.append(Hg)
    return keys


def passes_essential_filters(pres, series, E, pearl_keys=None):
    """(passes, label-or-removal-code) for a single subgroup; the same
    battery essential_candidate_scan applies."""
    if pearl_keys is None:
        pearl_keys = _pearl_conjugate_keys(
            pres, find_pearl_candidates(pres, series)
        )
    return _filter_one(pres, series, E, pearl_keys)


def _filter_one(pres, series, E, pearl_keys):
    from . import series as series_mod

    p = pres.p
    g1 = series.gamma1
    cz = series.cs_z2
    z2 = series.zeta_(2)
    doc = series.degree_of_commutativity
    g1_extraspecial = getattr(series, "_g1_extraspecial", None)
    if g1_extraspecial is None:
        g1_extraspecial = (not g1.is_abelian()) and SubgroupProfile(
            g1
        ).extraspecial
        series._g1_extraspecial = g1_extraspecial
    if E.m == pres.n or E.m == 0:
        return (False, "whole-or-trivial")
    N = normalizer(pres, E)
    C = centralizer(pres, E)
    if not E.contains_subgroup(C):
        return (False, CODE_NOT_CENTRIC)
    phi = E.frattini()
    comm = N.commutator_with(E, normal_in=Subgroup.whole(pres))
    sandwich = Subgroup.span(pres, list(comm.basis) + list(phi.basis))
    if not (phi < sandwich and sandwich < E):
        return (False, CODE_FRATTINI)
    if _characteristic_chain_filtered(pres, E, N):
        return (False, CODE_CHAIN)
    if series_mod.subgroup_class(pres, E) == E.m - 1 and E.m >= 2:
        if E.key() not in pearl_keys:
            return (False, CODE_MAXCLASS)
        return (True, REASON_PEARL)
    if g1_extraspecial and g1.contains_subgroup(E) and E < g1:
        return (False, CODE_IN_EXTRA)
    if E == g1:
        return (True, REASON_GAMMA1)
    if cz != g1 and cz.contains_subgroup(E) and \
            not g1.contains_subgroup(E):
        if not _cs_z2_shape_ok(pres, series, E, z2, cz):
            return (False, CODE_C2_SHAPE)
        return (True, REASON_CS_Z2)
    if pres.order > p ** (p + 1) and g1.contains_subgroup(E) \
            and doc is not None:
        for i in range(2, pres.n):
            gi = series.gamma(i)
            if not E.contains_subgroup(gi) and doc >= (p - 1) - i:
                return (False, CODE_TAIL_DEPTH)
    return (True, REASON_OTHER)


def _cs_z2_shape_ok(pres, series, E, z2, cz):
    """The allowed shapes for an essential subgroup inside the two-step
    centralizer but not inside the distinguished maximal subgroup:
    p^3 <= |E| <= p^5, exponent p, and elementary abelian p^3 /
    C_p x p^{1+2}_+ with center Z_2(S) / extraspecial-over-Z_2(S)."""
    p = pres.p
    if not 3 <= E.m <= 5:
        return False
    if E.exponent() != p:
        return False
    if E.m == 3:
        return E.is_abelian() and E < cz
    der = E.derived()
    zc = E.center_of()
    if E.m == 4:
        return der.m == 1 and zc == z2
    # |E| = p^5: E / Z_2(S) extraspecial of order p^3
    if not E.contains_subgroup(z2):
        return False
    K = Subgroup.span(pres, list(z2.basis) + list(der.basis))
    if K.m != 3:
        return False
    k = pres._kernel
    # K/Z_2 central in E/Z_2 and nothing else is
    for b in E.basis:
        for c in K.basis:
            if not z2.contains(k.comm(c, b)):
                return False
    for b in E.basis:
        if K.contains(b):
            continue
        if all(z2.contains(k.comm(x, b)) for x in E.basis):
            return False
    if E == cz:
        # forced |S| = p^6 with Phi(E) = Z_3(S)
        if pres.order != p ** 6:
            return False
        if E.frattini() != series.zeta_(3):
            return False
    return True
