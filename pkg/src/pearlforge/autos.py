"""Automorphism groups by layer lifting; restriction; isomorphism tests.

Strategy: a maximal-class group on a standard weighted presentation has
tail-shaped lower-central terms, so the quotients S/gamma_m are exactly
the truncations.  An (iso)morphism is determined by the images of the
first two pc generators (the rest are forced by the chain relations
[g_i, g_0] = g_{i+1}), so we lift coset representatives modulo inner
automorphisms level by level: the base level is the induced GL_2 action
on S/Phi(S), each later level contributes p^2 candidate adjustments of
the two defining images, pruned by the relation checks and deduplicated
modulo the inner automorphisms of the level quotient.

Only presentations with the chain structure are supported; everything in
the catalog (and every truncation of it) has it.
"""

from .errors import (
    BudgetExceededError,
    InconclusiveError,
    InvarianceError,
    UnsupportedGroupError,
)
from .subgroups import Subgroup, induced_presentation

DEFAULT_AUT_BUDGET = 10_000_000


# -- automorphism / isomorphism carriers -------------------------------


class Automorphism:
    """A verified homomorphism src -> dst given by pc generator images.

    When check=True the defining relations and surjectivity are verified
    on construction; the internal lifting engine constructs with
    check=False because its candidates are verified incrementally.
    """

    __slots__ = ("src", "dst", "images", "is_inner", "_order")

    def __init__(self, src, dst, images, check=True, is_inner=None):
        self.src = src
        self.dst = dst
        self.images = tuple(tuple(v) for v in images)
        self.is_inner = is_inner
        self._order = None
        if check:
            if len(self.images) != src.n:
                raise UnsupportedGroupError("need one image per generator")
            if not _relations_hold(src, dst, self.images, skip_chain=False):
                raise UnsupportedGroupError(
                    "images do not define a homomorphism"
                )
            if Subgroup.span(dst, self.images).m != dst.n:
                raise UnsupportedGroupError("images do not generate")

    def apply(self, x):
        k = self.dst._kernel
        out = k.identity()
        for i, e in enumerate(x):
            if e:
                out = k.mult(out, k.pow(self.images[i], e))
        return out

    __call__ = apply

    def compose(self, other):
        """self after other (other.dst must be self.src)."""
        if other.dst is not self.src and other.dst.save_text() != \
                self.src.save_text():
            raise UnsupportedGroupError("composition domains do not match")
        return Automorphism(
            other.src,
            self.dst,
            [self.apply(im) for im in other.images],
            check=False,
        )

    def inverse(self):
        """Inverse map by digit-wise solving (layer preservation)."""
        imgs = _inverse_images(self.src, self.dst, self.images)
        return Automorphism(self.dst, self.src, imgs, check=False)

    def power(self, e):
        """self composed with itself e times (e >= 0); automorphisms only."""
        out = identity_automorphism(self.src)
        base = self
        while e:
            if e & 1:
                out = base.compose(out)
            base = base.compose(base)
            e >>= 1
        return out

    def order(self):
        """Exact order (self.src must equal self.dst)."""
        if self._order is None:
            ident = identity_automorphism(self.src).images
            cur = self
            m = 1
            while cur.images != ident:
                cur = self.compose(cur)
                m += 1
            self._order = m
        return self._order

    def matrix_on_frattini_quotient(self):
        """Row i = image of g_i modulo gamma_2, as a 2x2 matrix."""
        return (tuple(self.images[0][:2]), tuple(self.images[1][:2]))

    def center_exponent(self):
        """mu with phi(z) = z^mu on Z(S) = <g_{n-1}> (standard shape)."""
        v = self.images[-1]
        if any(v[:-1]):
            raise UnsupportedGroupError("last generator image not central")
        return v[-1]

    def __eq__(self, other):
        return (
            isinstance(other, Automorphism) and self.images == other.images
        )

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Automorphism({self.images})"


def identity_automorphism(pres):
    return Automorphism(
        pres, pres, [pres.gen(i) for i in range(pres.n)],
        check=False, is_inner=True,
    )


def inner_automorphism(pres, g):
    k = pres._kernel
    return Automorphism(
        pres, pres, [k.conj(pres.gen(i), g) for i in range(pres.n)],
        check=False, is_inner=True,
    )


# -- the lifting engine ------------------------------------------------


def _require_chain(pres):
    """Presentations must satisfy [g_i, g_0] = g_{i+1} for 1<=i<=n-2."""
    n = pres.n
    for i in range(1, n - 1):
        want = pres.gen(i + 1)
        if pres.comms.get((i, 0)) != want:
            raise UnsupportedGroupError(
                "presentation lacks the standard chain [g_i, g_0] = g_{i+1}"
            )


def _eval_word(kern, images, word):
    out = kern.identity()
    for t, e in enumerate(word):
        if e:
            out = kern.mult(out, kern.pow(images[t], e))
    return out


def _forced_images(sp, dp, x, y):
    """Images of all generators forced by the chain relations, or None
    when a lower-central layer would collapse (not bijective)."""
    n = sp.n
    k = dp._kernel
    imgs = [None] * n
    imgs[0] = tuple(x)
    if n >= 2:
        imgs[1] = tuple(y)
    for i in range(1, n - 1):
        c = k.comm(imgs[i], imgs[0])
        if c[i + 1] == 0 or any(c[:i + 1]):
            return None
        imgs[i + 1] = c
    return imgs


def _relations_hold(sp, dp, imgs, skip_chain=True):
    n = sp.n
    p = sp.p
    k = dp._kernel
    zero = (0,) * n
    for i in range(n):
        if k.pow(imgs[i], p) != _eval_word(k, imgs, sp.powers[i]):
            return False
    for j in range(1, n):
        for i in range(j):
            if skip_chain and i == 0 and 1 <= j <= n - 2:
                # [g_j, g_0] = g_{j+1} already used to force imgs[j+1]
                continue
            w = sp.comms.get((j, i), zero)
            if k.comm(imgs[j], imgs[i]) != _eval_word(k, imgs, w):
                return False
    return True


def _inverse_images(src, dst, images):
    """Images of the inverse map by digit-wise solving; needs layer
    preservation (coordinate t of images[t] nonzero), which holds for
    any bijective map between standard-shape presentations."""
    n = src.n
    p = src.p
    k = dst._kernel
    ks = src._kernel

    def apply(u):
        out = k.identity()
        for i, e in enumerate(u):
            if e:
                out = k.mult(out, k.pow(images[i], e))
        return out

    # weight-1 block: images[0], images[1] mod gamma_2 form an invertible
    # 2x2 matrix M; higher images lie in the tail subgroups with nonzero
    # diagonal entry, so the rest solves digit by digit.
    if n >= 2:
        m00, m01 = images[0][0], images[0][1]
        m10, m11 = images[1][0], images[1][1]
        det = (m00 * m11 - m01 * m10) % p
        if det == 0:
            raise UnsupportedGroupError("map does not preserve layers")
        dinv = pow(det, p - 2, p)

    inv = []
    for i in range(n):
        target = dst.gen(i)
        u = ks.identity()
        cur = k.identity()
        if n >= 2:
            r0 = (target[0] - cur[0]) % p
            r1 = (target[1] - cur[1]) % p
            e0 = ((m11 * r0 - m10 * r1) * dinv) % p
            e1 = ((-m01 * r0 + m00 * r1) * dinv) % p
            for t, e in ((0, e0), (1, e1)):
                if e:
                    u = ks.mult(u, ks.gen(t, e))
                    cur = k.mult(cur, k.pow(images[t], e))
        start = 2 if n >= 2 else 0
        for t in range(start, n):
            lead = images[t][t]
            if lead == 0:
                raise UnsupportedGroupError("map does not preserve layers")
            e = ((target[t] - cur[t]) * pow(lead, p - 2, p)) % p
            if e:
                u = ks.mult(u, ks.gen(t, e))
                cur = k.mult(cur, k.pow(images[t], e))
        if cur != target:
            raise UnsupportedGroupError("inverse solve failed")
        inv.append(u)
    return inv


def _inner_pair_dict(pres):
    """{(g_0^t, g_1^t): t} over all t — O(1) inner-automorphism tests."""
    k = pres._kernel
    n = pres.n
    gens = [pres.gen(i) for i in range(n)]
    p0 = pres.gen(0)
    p1 = pres.gen(1) if n >= 2 else k.identity()
    start = (p0, p1)
    D = {start: k.identity()}
    frontier = [(start, k.identity())]
    while frontier:
        (a, b), t = frontier.pop()
        for g in gens:
            np_ = (k.conj(a, g), k.conj(b, g))
            if np_ not in D:
                tg = k.mult(t, g)
                D[np_] = tg
                frontier.append((np_, tg))
    return D


def _gamma1_line(pres):
    """The line of gamma_1 in S/Phi(S); (0, 1) for standard shape."""
    from . import series as series_mod

    sd = series_mod.central_series(pres)
    g1 = sd.gamma1
    dirs = {v[:2] for v in g1.basis if any(v[:2])}
    # all nonzero mod-Phi images of a maximal subgroup lie on one line
    for a, b in dirs:
        if a != 0:
            raise UnsupportedGroupError(
                "two-step centralizer is not the standard g_1 line"
            )
    return (0, 1)


class _Budget:
    def __init__(self, limit):
        self.limit = limit if limit is not None else DEFAULT_AUT_BUDGET
        self.used = 0

    def spend(self, what=""):
        self.used += 1
        if self.used > self.limit:
            raise BudgetExceededError(
                f"lift-tree budget {self.limit} exceeded ({what})",
                nodes_visited=self.used,
                detail=what,
            )


def _base_candidates(src, dst, constrain_line):
    """Level-2 images (x, y) of (g_0, g_1): invertible action on the
    Frattini quotient, with g_1 kept on the gamma_1 line when that line
    is characteristic (|S| >= p^4)."""
    p = src.p
    if src.n == 1:
        return [((a,), (0,)) for a in range(1, p)]
    out = []
    for a0 in range(p):
        for a1 in range(p):
            if a0 == 0 and a1 == 0:
                continue
            if constrain_line and a0 == 0:
                continue  # x must stay outside the gamma_1 line
            for b0 in range(p):
                if constrain_line and b0 != 0:
                    continue  # y must stay on the gamma_1 line
                for b1 in range(p):
                    if (a0 * b1 - a1 * b0) % p == 0:
                        continue
                    out.append(((a0, a1), (b0, b1)))
    return out


def _lift_isomorphisms(src, dst, budget=None, find_one=False):
    """Coset representatives modulo Inn(dst) of all isomorphisms
    src -> dst, or (in find_one mode) at most one of them.

    Returns (final_image_lists, obstruction_level, nodes_used):
    obstruction_level is the quotient size p^m at which all candidates
    died (None when representatives were found).
    """
    p = src.p
    n = src.n
    if dst.p != p or dst.n != n:
        return [], 1, 0
    _require_chain(src)
    _require_chain(dst)
    b = _Budget(budget)
    constrain = False
    if n >= 4:
        try:
            constrain = (_gamma1_line(src) == (0, 1)
                         and _gamma1_line(dst) == (0, 1))
        except UnsupportedGroupError:
            constrain = False

    if n == 1:
        reps = []
        for a in range(1, p):
            b.spend("base")
            imgs = [(a,)]
            if _relations_hold(src, dst, imgs):
                reps.append(imgs)
        return (reps, None if reps else 1, b.used)

    m0 = 2
    src_levels = {m: src.truncate(m) for m in range(m0, n + 1)}
    dst_levels = {m: dst.truncate(m) for m in range(m0, n + 1)}

    # base level: relations of the C_p x C_p quotient are trivial, but we
    # run the checks anyway (cheap, and correct for degenerate shapes)
    sp, dp = src_levels[m0], dst_levels[m0]
    survivors = []
    for x, y in _base_candidates(sp, dp, constrain):
        b.spend("base level")
        imgs = _forced_images(sp, dp, x, y)
        if imgs is not None and _relations_hold(sp, dp, imgs):
            survivors.append((x, y))
    if n == m0:
        reps = [_forced_images(sp, dp, x, y) for (x, y) in survivors]
        # dedup modulo Inn (trivial for abelian level-2 groups)
        return (reps, None if reps else p ** m0, b.used)

    for m in range(m0 + 1, n + 1):
        sp, dp = src_levels[m], dst_levels[m]
        D = _inner_pair_dict(dp)
        nxt = []
        for (x, y) in survivors:
            accepted = []  # (full images, inverse images)
            # the p^2 extensions of (x, y) differ by central factors of
            # the new top layer, which drop out of every commutator and
            # p-th power: they satisfy the relations (and force the same
            # higher images) all together, so test once at (0, 0)
            base = _forced_images(sp, dp, x + (0,), y + (0,))
            if base is None or not _relations_hold(sp, dp, base):
                for _ in range(p * p):
                    b.spend(f"level p^{m}")
                continue
            for d0 in range(p):
                for d1 in range(p):
                    b.spend(f"level p^{m}")
                    dup = False
                    # same central-factor argument: composing with an
                    # accepted inverse shifts only the top coordinate,
                    # linearly in (d0, d1), so evaluate words on the
                    # base images once per accepted entry
                    for (_aimg, ainv, q0b, q1b) in accepted:
                        q0 = q0b[:-1] + (
                            (q0b[-1] + d0 * ainv[0][0]
                             + d1 * ainv[0][1]) % p,
                        )
                        q1 = q1b[:-1] + (
                            (q1b[-1] + d0 * ainv[1][0]
                             + d1 * ainv[1][1]) % p,
                        )
                        if (q0, q1) in D:
                            dup = True
                            break
                    if dup:
                        continue
                    imgs = list(base)
                    imgs[0] = x + (d0,)
                    imgs[1] = y + (d1,)
                    ainv = _inverse_images(sp, dp, imgs)
                    accepted.append((
                        imgs, ainv,
                        _eval_word(dp._kernel, base, ainv[0]),
                        _eval_word(dp._kernel, base, ainv[1]),
                    ))
                    if find_one and m == n:
                        return ([imgs], None, b.used)
            nxt.extend(
                (imgs[0], imgs[1]) for imgs, _inv, _q0, _q1 in accepted
            )
        survivors = nxt
        if not survivors:
            return ([], p ** m, b.used)

    reps = []
    sp, dp = src_levels[n], dst_levels[n]
    for (x, y) in survivors:
        reps.append(_forced_images(sp, dp, x, y))
    return (reps, None, b.used)


# -- Aut(S) description ------------------------------------------------


def _prime_factors(m):
    out = []
    f = 2
    while f * f <= m:
        if m % f == 0:
            out.append(f)
            while m % f == 0:
                m //= f
        f += 1
    if m > 1:
        out.append(m)
    return out


def _pprime_and_ppart(p, order):
    a = 0
    while order % p == 0:
        order //= p
        a += 1
    return order, p ** a


class AutGroupDescription:
    """Aut(S) as Inn(S) x (coset representatives).

    reps: one verified Automorphism per coset of Inn(S), deterministic
    order; order = |Inn| * len(reps).
    """

    def __init__(self, pres, reps, nodes_used, z_order):
        self.pres = pres
        self.reps = reps
        self.nodes_used = nodes_used
        self.inn_order = pres.order // z_order
        self.out_order = len(reps)
        self.order = self.inn_order * self.out_order
        pprime, ppart = _pprime_and_ppart(pres.p, self.order)
        self.pprime_order = pprime
        self.p_part_order = ppart
        self._inner_pairs = None
        self._rep_inverses = None
        self._pprime = None

    # -- coset bookkeeping --------------------------------------------

    def _pairs(self):
        if self._inner_pairs is None:
            self._inner_pairs = _inner_pair_dict(self.pres)
        return self._inner_pairs

    def is_inner(self, auto):
        key = (auto.images[0],
               auto.images[1] if self.pres.n >= 2 else self.pres.identity())
        return key in self._pairs()

    def coset_index(self, auto):
        """Index of the representative of auto's Inn-coset."""
        if self._rep_inverses is None:
            self._rep_inverses = [
                _inverse_images(self.pres, self.pres, r.images)
                for r in self.reps
            ]
        k = self.pres._kernel
        D = self._pairs()
        for idx, inv in enumerate(self._rep_inverses):
            q0 = _eval_word(k, auto.images, inv[0])
            q1 = _eval_word(k, auto.images, inv[1]) \
                if self.pres.n >= 2 else self.pres.identity()
            if (q0, q1) in D:
                return idx
        raise UnsupportedGroupError("automorphism not in the computed group")

    def out_order_of(self, auto):
        """Order of auto's image in Aut(S)/Inn(S), by stripping prime
        factors from the group exponent bound |Out|."""
        o = self.out_order
        for q in _prime_factors(self.out_order):
            while o % q == 0 and self.is_inner(auto.power(o // q)):
                o //= q
        return o

    # -- p'-structure --------------------------------------------------

    def pprime_elements(self):
        """One genuine p'-order automorphism per p'-element of Out(S).

        Every p'-element of Aut(S) is Inn-conjugate to exactly one of
        these (coprime complement conjugacy), so scanning them together
        with Inn-conjugation is exhaustive over the p'-part.
        """
        if self._pprime is not None:
            return self._pprime
        p = self.pres.p
        out = []
        for rep in self.reps:
            r = self.out_order_of(rep)
            if r % p == 0:
                continue  # not a p'-element of Out
            out.append((self._pprime_witness(rep, r), r))
        self._pprime = out
        return self._pprime

    def _pprime_witness(self, psi, m):
        """A p'-order automorphism in psi's coset (psi has p'-out-order
        m): inside the cyclic group <psi>, psi^m is inner of p-power
        order p^c, so psi^(p^c * t) with p^c*t = 1 mod m is p' of order
        exactly m."""
        if m == 1:
            return identity_automorphism(self.pres)
        p = self.pres.p
        tail = psi.power(m)
        ident = identity_automorphism(self.pres).images
        c = 0
        cur = tail
        while cur.images != ident:
            cur = cur.power(p)
            c += 1
        pc = p ** c
        t = pow(pc, -1, m) if pc % m != 1 else 1
        # smallest exponent e = pc*t with e = 1 mod m and p^c | e
        e = (pc * t) % (m * pc)
        if e == 0:
            e = m * pc
        out = psi.power(e)
        return out

    def pprime_cyclic_data(self):
        """(cyclic_flag, generator or None, all p'-element orders)."""
        elems = self.pprime_elements()
        orders = sorted({m for _w, m in elems})
        top = max(orders) if orders else 1
        gen = None
        for w, m in elems:
            if m == top:
                gen = w
                break
        cyclic = top == self.pprime_order and all(
            top % m == 0 for m in orders
        )
        return cyclic, gen, orders

    def center_action_scan(self):
        """(out-order, center exponent, Frattini-quotient matrix) for
        every p'-element of Out(S) — the Z(S)-action scan."""
        counts = {}
        for w, m in self.pprime_elements():
            key = (m, w.center_exponent(), w.matrix_on_frattini_quotient())
            counts[key] = counts.get(key, 0) + 1
        return [
            {
                "order": m,
                "center_exponent": mu,
                "matrix": mat,
                "count": counts[(m, mu, mat)],
            }
            for (m, mu, mat) in sorted(counts)
        ]

    def as_dict(self):
        cyclic, gen, orders = self.pprime_cyclic_data()
        return {
            "order": self.order,
            "inn_order": self.inn_order,
            "out_order": self.out_order,
            "p_part": self.p_part_order,
            "pprime_part": self.pprime_order,
            "pprime_cyclic": cyclic,
            "pprime_element_orders": orders,
            "pprime_generator_matrix": (
                gen.matrix_on_frattini_quotient() if gen else None
            ),
        }


def automorphism_group(pres, budget=None):
    """Aut(S) for a maximal-class group on a standard chain presentation."""
    from . import series as series_mod

    pres._require_consistent()
    sd = series_mod.central_series(pres)
    if not sd.is_maximal_class:
        raise UnsupportedGroupError(
            "automorphism_group supports maximal-class groups only"
        )
    rep_images, obstruction, nodes = _lift_isomorphisms(
        pres, pres, budget=budget
    )
    if obstruction is not None:
        raise UnsupportedGroupError("no automorphisms found (impossible)")
    rep_images.sort()
    reps = [Automorphism(pres, pres, imgs, check=True)
            for imgs in rep_images]
    z_order = sd.zeta_(1).order
    return AutGroupDescription(pres, reps, nodes, z_order)


def verify_autoS_structure(pres, autg):
    """Structure report for Aut(S) when gamma_1 is neither abelian nor
    extraspecial: p'-part cyclic of order dividing p-1, plus the scalar
    relation b = a^(r+1-i-j) on a computed witness."""
    from . import series as series_mod
    from .subgroups import SubgroupProfile

    p = pres.p
    n = pres.n
    report = {"applicable": True, "failures": [], "witness": None}
    if pres.order < p ** 4:
        return {"applicable": False, "reason": "|S| < p^4"}
    sd = series_mod.central_series(pres)
    if not sd.is_maximal_class:
        return {"applicable": False, "reason": "not maximal class"}
    g1 = sd.gamma1
    if g1.is_abelian():
        return {"applicable": False, "reason": "gamma_1 abelian",
                "pprime_order": autg.pprime_order}
    if SubgroupProfile(g1).extraspecial:
        return {"applicable": False, "reason": "gamma_1 extraspecial",
                "pprime_order": autg.pprime_order}
    cyclic, gen, orders = autg.pprime_cyclic_data()
    if not cyclic:
        report["failures"].append("p'-part not cyclic")
    if autg.pprime_order and (p - 1) % autg.pprime_order != 0:
        report["failures"].append(
            f"p'-part order {autg.pprime_order} does not divide p-1"
        )
    if any((p - 1) % m != 0 for m in orders):
        report["failures"].append("a p'-element order does not divide p-1")
    if gen is not None and gen.images != \
            identity_automorphism(pres).images:
        report["witness"] = _scalar_relation_witness(pres, sd, gen)
        if report["witness"] and not report["witness"]["holds"]:
            report["failures"].append("scalar relation b = a^(r+1-i-j)")
    report["pprime_order"] = autg.pprime_order
    return report


def _scalar_relation_witness(pres, sd, phi):
    """Diagonalize phi on S/Phi(S) in a basis (x, s_1) with s_1 on the
    gamma_1 line, build the chain s_i = [x, s_{i-1}], find a nontrivial
    [s_i, s_j] of depth r and test b = a^(r+1-i-j)."""
    p = pres.p
    n = pres.n
    k = pres._kernel
    M = phi.matrix_on_frattini_quotient()
    a = M[0][0]
    c = M[0][1]
    bb = M[1][1]
    if M[1][0] != 0 or a == 0 or bb == 0:
        return None
    if a != bb:
        w = (c * pow((a - bb) % p, p - 2, p)) % p
    elif c == 0:
        w = 0
    else:
        return None  # not diagonalizable; not a p'-element
    x = k.mult(pres.gen(0), pres.gen(1, w))
    s = [None, pres.gen(1)]
    for i in range(2, n - 1):
        s.append(k.comm(x, s[i - 1]))
    if sd.gamma1 == sd.cs_z2:
        s.append(k.comm(x, s[n - 2]))
    else:
        s.append(k.comm(s[1], s[n - 2]))
    for i in range(1, n - 1):
        for j in range(i + 1, n - 1):
            cm = k.comm(s[i], s[j])
            if any(cm):
                r = sd.gamma_depth(cm)
                want = pow(a, (r + 1 - i - j) % (p - 1), p)
                return {
                    "a": a,
                    "b": bb,
                    "i": i,
                    "j": j,
                    "r": r,
                    "holds": bb % p == want,
                }
    return None


# -- restriction -------------------------------------------------------


def restriction(auto, H):
    """Automorphism induced on an invariant subgroup, expressed in H's
    induced pc basis."""
    for b in H.basis:
        if not H.contains(auto.apply(b)):
            raise InvarianceError(
                "subgroup is not invariant under the automorphism"
            )
    hp = induced_presentation(auto.src, H)
    images = [tuple(H.express(auto.apply(b))) for b in H.basis]
    return Automorphism(hp, hp, images, check=True)


# -- isomorphism testing -----------------------------------------------


class IsoResult:
    def __init__(self, isomorphic, mapping, distinguishers, nodes):
        self.isomorphic = isomorphic
        self.map = mapping
        self.distinguishers = distinguishers
        self.nodes = nodes

    def as_dict(self):
        return {
            "isomorphic": self.isomorphic,
            "map": [list(v) for v in self.map.images] if self.map else None,
            "distinguishers": self.distinguishers,
            "nodes": self.nodes,
        }


def isomorphism_test(presA, presB, budget=None):
    """Explicit isomorphism or a distinguishing certificate.

    Raises InconclusiveError if the budget runs out before either a
    verified map or an exhausted lift level is obtained.
    """
    from . import series as series_mod

    presA._require_consistent()
    presB._require_consistent()
    dist = []
    if presA.p != presB.p or presA.n != presB.n:
        dist.append("order")
        return IsoResult(False, None, dist, 0)
    sa = series_mod.central_series(presA)
    sb = series_mod.central_series(presB)
    if sa.nilpotency_class != sb.nilpotency_class:
        dist.append("nilpotency class")
        return IsoResult(False, None, dist, 0)
    if not sa.is_maximal_class:
        raise UnsupportedGroupError(
            "isomorphism_test supports maximal-class groups only"
        )
    if presA.n >= 4:
        ga, gb = sa.gamma1, sb.gamma1
        if ga.is_abelian() != gb.is_abelian():
            dist.append("centralizer of the second-step quotient: "
                        "abelian in one group only")
        if sa.cs_z2.is_abelian() != sb.cs_z2.is_abelian():
            dist.append("two-step centralizer: abelian in one group only")
        if sa.degree_of_commutativity != sb.degree_of_commutativity:
            dist.append("degree of commutativity")
        if dist:
            return IsoResult(False, None, dist, 0)
    try:
        reps, obstruction, nodes = _lift_isomorphisms(
            presA, presB, budget=budget, find_one=True
        )
    except BudgetExceededError as exc:
        raise InconclusiveError(
            f"isomorphism search budget exhausted "
            f"({exc.nodes_visited} nodes)"
        ) from exc
    if reps:
        mapping = Automorphism(presA, presB, reps[0], check=True)
        return IsoResult(True, mapping, [], nodes)
    dist.append(f"no isomorphism lifts to the quotient of order "
                f"{obstruction}")
    return IsoResult(False, None, dist, nodes)


# -- re-presentation on a standard chain basis -------------------------


def standardize(pres, max_tries=None):
    """An isomorphic standard-chain presentation plus the isomorphism
    (standard -> pres), for any consistent maximal-class presentation.

    Searches for a generating pair (x, s_1) with x outside the
    centralizer-of-second-step maximal subgroup line and s_1 inside it
    such that the chain s_{i+1} = [s_i, x] descends one lower-central
    step at a time, then rewrites all relations in the chain basis.
    """
    from . import series as series_mod
    from .presentation import PcPresentation

    pres._require_consistent()
    n, p = pres.n, pres.p
    if n <= 2:
        return pres, identity_automorphism(pres)
    sd = series_mod.central_series(pres)
    if not sd.is_maximal_class:
        raise UnsupportedGroupError("standardize needs maximal class")
    k = pres._kernel

    # filtration terms T_0 = S > T_1 > T_2 > ... > T_n = 1 where T_1 is
    # a maximal subgroup between gamma_2 and S (the distinguished one
    # when it is defined; any one works at order p^3)
    if n == 3:
        g2 = sd.gamma(2)
        line = None
        for b in Subgroup.whole(pres).basis:
            if not g2.contains(b):
                line = Subgroup.span(pres, [b] + list(g2.basis))
                break
        terms = [Subgroup.whole(pres), line]
    else:
        terms = [Subgroup.whole(pres), sd.gamma1]
    terms.extend(sd.gamma(i) for i in range(2, n))
    terms.append(Subgroup.trivial(pres))

    def chain_for(x, s1):
        s = [x, s1]
        for i in range(1, n - 1):
            nxt = k.comm(s[i], x)
            if not terms[i + 1].contains(nxt) or \
                    terms[i + 2].contains(nxt):
                return None
            s.append(nxt)
        return s

    from itertools import product

    imgs = None
    width = min(n, 3)
    g1b = terms[1].basis
    tries = 0
    limit = max_tries if max_tries is not None else 200_000
    for xe in product(range(p), repeat=width):
        x = k.identity()
        for t, e in enumerate(xe):
            if e:
                x = k.mult(x, pres.gen(t, e))
        if terms[1].contains(x):
            continue
        for se in product(range(p), repeat=min(len(g1b), 3)):
            tries += 1
            if tries > limit:
                raise UnsupportedGroupError(
                    "no chain generating pair found within the try limit"
                )
            s1 = k.identity()
            for t, e in enumerate(se):
                if e:
                    s1 = k.mult(s1, k.pow(g1b[t], e))
            if not terms[1].contains(s1) or terms[2].contains(s1):
                continue
            imgs = chain_for(x, s1)
            if imgs is not None:
                break
        if imgs is not None:
            break
    if imgs is None:
        raise UnsupportedGroupError("no chain generating pair exists")

    def express(t):
        """Digits of t in the chain basis, peeling one filtration step
        at a time (imgs[j] has depth exactly j)."""
        r = t
        out = []
        for j in range(n):
            found = None
            for e in range(p):
                rest = k.mult(k.inv(k.pow(imgs[j], e)), r)
                if terms[j + 1].contains(rest):
                    found = e
                    r = rest
                    break
            if found is None:
                raise UnsupportedGroupError("chain basis does not span")
            out.append(found)
        if any(r):
            raise UnsupportedGroupError("chain basis does not span")
        return tuple(out)

    weights = (1,) + tuple(range(1, n))
    powers = [express(k.pow(imgs[i], p)) for i in range(n)]
    comms = {}
    for j in range(1, n):
        for i in range(j):
            c = k.comm(imgs[j], imgs[i])
            if any(c):
                comms[(j, i)] = express(c)
    std = PcPresentation(p, n, weights, powers, comms).check()
    iso = Automorphism(std, pres, imgs, check=True)
    return std, iso
