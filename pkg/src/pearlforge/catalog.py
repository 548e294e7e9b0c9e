"""Named constructions and the constrained family-derivation engine.

Named groups come with explicit structure constants; derived groups come
out of a complete parameter-cube search over weighted presentations in
standard maximal-class form (see derive_family).  The shipped catalog is
a directory of presentation files plus a manifest; every labeled property
is re-verified on load.
"""

import json
import os
from itertools import product

from .errors import (
    BudgetExceededError,
    FalsificationError,
    MalformedPresentationError,
)
from .presentation import PcPresentation

# -- standard maximal-class shape --------------------------------------
#
# Generators: g_0 = s (outside gamma_1 and C_S(Z_2)), g_1 = s_1 in
# gamma_1 \ gamma_2, g_{i+1} = s_i = [s_{i-1}, s].  Weights 1,1,2,...,n-1.
# Defining commutators [g_{i}, g_0] = g_{i+1}; the free structure
# constants live in [g_j, g_i] for 1 <= i < j (supported on indices
# >= i+j, 0-based: > i+j-1) and in the power relations.


def standard_weights(n):
    return (1, 1) + tuple(range(2, n))


def _vec(n, entries):
    v = [0] * n
    for k, e in entries.items():
        v[k] = e
    return tuple(v)


def make_standard(p, n, comm_params, power_params):
    """Build the presentation from standard-form data.

    comm_params: {(j, i): {index: exp}} for 1 <= i < j <= n-1 (0-based
    generator indices), giving [g_j, g_i]; the chain [g_i, g_0] = g_{i+1}
    is added automatically.
    power_params: {i: {index: exp}} giving g_i^p.
    """
    comms = {}
    for i in range(1, n - 1):
        comms[(i, 0)] = _vec(n, {i + 1: 1})
    for (j, i), entries in comm_params.items():
        comms[(j, i)] = _vec(n, entries)
    powers = [_vec(n, power_params.get(i, {})) for i in range(n)]
    return PcPresentation(p, n, standard_weights(n), powers, comms)


# -- named constructions -----------------------------------------------


def build_named(name, p):
    """Explicit constructions: extraspecial_plus, sp4_sylow, wreath_3."""
    if p < 3 or p % 2 == 0:
        raise MalformedPresentationError("p must be an odd prime")
    if name == "extraspecial_plus":
        # p^{1+2}_+: exponent p, [g_1, g_0] = g_2 central
        pres = PcPresentation(
            p, 3, (1, 1, 2), [(0, 0, 0)] * 3, {(1, 0): (0, 0, 1)}
        )
    elif name == "sp4_sylow":
        # elementary abelian p^3 = <s_1, s_2, s_3> extended by the
        # regular-unipotent (Jordan block) generator s of order p:
        # [s_1, s] = s_2, [s_2, s] = s_3, [s_3, s] = 1.
        pres = make_standard(p, 4, {}, {})
    elif name == "wreath_3":
        # C_3 wr C_3 in base coordinates v, [v,x], [[v,x],x]; the base
        # is elementary abelian and [[[v,x],x],x] = v^3 ... = 1 at p=3,
        # giving exactly the sp4_sylow structure constants at p = 3.
        if p != 3:
            raise MalformedPresentationError("wreath_3 is defined at p = 3")
        pres = make_standard(3, 4, {}, {})
    else:
        raise MalformedPresentationError(f"unknown named group {name!r}")
    pres.check()
    return CatalogEntry(label=f"{name}(p={p})", pres=pres,
                        provenance="explicit-construction")


class CatalogEntry:
    def __init__(self, label, pres, provenance, properties=None, note=""):
        self.label = label
        self.pres = pres
        self.provenance = provenance
        self.properties = properties or {}
        self.note = note

    def __repr__(self):
        return f"CatalogEntry({self.label}, {self.pres!r})"


# -- constrained family derivation -------------------------------------


class FamilyConstraints:
    """Closed predicate vocabulary for derive_family."""

    FLAGS = (
        "gamma1_abelian",
        "gamma1_nonabelian",
        "gamma1_extraspecial",
        "cs_z2_abelian",
        "cs_z2_nonabelian",
        "derived_elementary_abelian",
        "maximal_elementary_abelian_exists",
        "maximal_subgroup_extraspecial",
        "no_abelian_maximal_subgroup",
        "pearl_candidate_bearing",
    )

    def __init__(self, p, n, required_class=None, exponent=None, flags=()):
        self.p = p
        self.n = n
        self.required_class = required_class
        self.exponent = exponent
        self.flags = tuple(flags)
        for f in self.flags:
            if f not in self.FLAGS:
                raise MalformedPresentationError(f"unknown predicate {f!r}")

    def as_dict(self):
        return {
            "p": self.p,
            "n": self.n,
            "class": self.required_class,
            "exponent": self.exponent,
            "flags": list(self.flags),
        }


def _param_slots(p, n, exponent_p):
    """The free structure-constant slots of the standard form.

    Commutator slots: [g_j, g_i] for 1 <= i < j <= n-1, supported on
    0-based indices i+j .. n-1 (the gamma_{i+j} tail; empty support
    means the slot is forced trivial).  Power slots (only when the
    required exponent is not p): g_0^p and g_1^p in <g_{n-1}> (center),
    all other g_i^p = 1 (the n <= p+1 power structure).
    """
    comm_slots = []
    for j in range(2, n - 1):
        for i in range(1, j):
            # [gamma_i, gamma_j] <= gamma_{i+j} (degree of commutativity
            # is nonnegative on the two-step-centralizer chain), so the
            # slot is supported on indices >= i+j
            span = list(range(i + j, n))
            if span:
                comm_slots.append(((j, i), span))
    power_slots = [] if exponent_p else [0, 1]
    return comm_slots, power_slots


def _iter_standard_family(p, n, exponent_p, budget=None):
    """Yield consistent standard-form presentations (complete for
    maximal class with n <= p+1).  Reuses one kernel buffer per shape."""
    from .kernel import make_kernel

    comm_slots, power_slots = _param_slots(p, n, exponent_p)
    base = make_standard(p, n, {}, {})
    flat = [(0,) * n] * (n * n)
    for (j, i), v in base.comms.items():
        flat[j * n + i] = v
    kern = make_kernel(p, n, base.powers, flat)

    dims = [len(span) for _, span in comm_slots]
    total_axes = sum(dims) + len(power_slots)
    count = 0
    zero = (0,) * n
    for point in product(range(p), repeat=total_axes):
        count += 1
        if budget is not None and count > budget:
            raise BudgetExceededError(
                "family search budget exceeded", nodes_visited=count
            )
        pos = 0
        comm_params = {}
        for (slot, span), d in zip(comm_slots, dims):
            vals = point[pos:pos + d]
            pos += d
            kern.set_comm(slot[0], slot[1],
                          _vec(n, dict(zip(span, vals))))
            if any(vals):
                comm_params[slot] = dict(zip(span, vals))
        power_params = {}
        for gi in power_slots:
            val = point[pos]
            pos += 1
            kern.set_power(gi, _vec(n, {n - 1: val}))
            if val:
                power_params[gi] = {n - 1: val}
        if kern.consistency_ok():
            pres = make_standard(p, n, comm_params, power_params)
            pres.consistent = True
            yield pres


def _rebase(pres, a, b):
    """The same group on the scaled chain basis x_0 = g_0^a, x_1 =
    g_1^b, x_{i+1} = [x_i, x_0]; a, b in GF(p)*.  Torus scalings are
    exactly the standard-form base changes that fix both generator
    lines, so scanning them collapses scaling orbits of the structure
    constants."""
    k = pres._kernel
    p, n = pres.p, pres.n
    basis = [pres.gen(0, a % p), pres.gen(1, b % p)]
    for i in range(1, n - 1):
        basis.append(k.comm(basis[i], basis[0]))
    lead_inv = [pow(v[i], p - 2, p) for i, v in enumerate(basis)]
    ident = k.identity()

    def express(t):
        cur = t
        digits = []
        for i in range(n):
            e = (cur[i] * lead_inv[i]) % p
            digits.append(e)
            cur = k.mult(k.inv(k.pow(basis[i], e)), cur)
        if cur != ident:
            raise FalsificationError("rebased chain does not span")
        return tuple(digits)

    powers = [express(k.pow(v, p)) for v in basis]
    comms = {
        (j, i): express(k.comm(basis[j], basis[i]))
        for j in range(1, n)
        for i in range(j)
    }
    out = PcPresentation(p, n, standard_weights(n), powers, comms)
    out.consistent = True
    return out


def torus_canonical_form(pres):
    """Lexicographically least serialization over all torus rebasings;
    equal canonical forms certify isomorphism (the rebasing is an
    explicit one)."""
    best = None
    for a in range(1, pres.p):
        for b in range(1, pres.p):
            text = _rebase(pres, a, b).save_text()
            if best is None or text < best:
                best = text
    return best


def _check_constraints(pres, cons):
    """Evaluate the predicate vocabulary on a consistent candidate."""
    from . import pearls as pearls_mod
    from . import series as series_mod
    from .subgroups import Subgroup, maximal_subgroups

    sd = series_mod.central_series(pres)
    if not sd.is_maximal_class:
        return False
    if cons.required_class is not None and sd.nilpotency_class != cons.required_class:
        return False
    if cons.exponent is not None:
        if series_mod.exponent_of(pres, Subgroup.whole(pres)) != cons.exponent:
            return False
    flags = set(cons.flags)
    if flags & {"gamma1_abelian", "gamma1_nonabelian", "gamma1_extraspecial",
                "cs_z2_abelian", "cs_z2_nonabelian"}:
        g1, cz2 = series_mod.two_step_centralizers(pres, sd)
        if "gamma1_abelian" in flags and not g1.is_abelian():
            return False
        if "gamma1_nonabelian" in flags and g1.is_abelian():
            return False
        if "gamma1_extraspecial" in flags:
            from .subgroups import is_extraspecial

            if not is_extraspecial(g1):
                return False
        if "cs_z2_abelian" in flags and not cz2.is_abelian():
            return False
        if "cs_z2_nonabelian" in flags and cz2.is_abelian():
            return False
    if "derived_elementary_abelian" in flags:
        der = sd.gamma(2)
        if not (der.is_abelian() and der.exponent() <= pres.p):
            return False
    maximals = None
    if flags & {"maximal_elementary_abelian_exists",
                "maximal_subgroup_extraspecial",
                "no_abelian_maximal_subgroup"}:
        maximals = maximal_subgroups(pres)
    if "maximal_elementary_abelian_exists" in flags:
        if not any(
            M.is_abelian() and M.exponent() <= pres.p for M in maximals
        ):
            return False
    if "maximal_subgroup_extraspecial" in flags:
        from .subgroups import is_extraspecial

        if not any(is_extraspecial(M) for M in maximals):
            return False
    if "no_abelian_maximal_subgroup" in flags:
        if any(M.is_abelian() for M in maximals):
            return False
    if "pearl_candidate_bearing" in flags:
        if not pearls_mod.find_pearl_candidates(pres, sd):
            return False
    return True


def derive_family(constraints, budget=None, label_prefix=None,
                  order_seed=None):
    """Enumerate the constrained standard-form family, classify up to
    isomorphism, and return one CatalogEntry per class.

    Output is independent of the internal search order: each class is
    represented by the lexicographically smallest presentation text
    among its survivors, and classes are sorted by that text.
    order_seed shuffles the classification order (for determinism
    tests); the result must not change."""
    import random

    from .autos import isomorphism_test

    p, n = constraints.p, constraints.n
    if n > 7:
        raise MalformedPresentationError("derive_family limited to n <= 7")
    if n > p + 1:
        raise MalformedPresentationError(
            "standard-form search is complete only for n <= p+1"
        )
    exponent_p = constraints.exponent == p
    survivors = []
    for pres in _iter_standard_family(p, n, exponent_p, budget=budget):
        if _check_constraints(pres, constraints):
            survivors.append(pres)
    # collapse torus-scaling orbits first (cheap, certified isomorphic),
    # then classify the canonical representatives by isomorphism search
    canon = {}
    for pres in survivors:
        canon.setdefault(torus_canonical_form(pres), pres)
    texts = sorted(canon)
    if order_seed is not None:
        random.Random(order_seed).shuffle(texts)
    reduced = [PcPresentation.load_text(text).check() for text in texts]
    classes = []  # list of [member, ...] presentation lists
    for pres in reduced:
        matched = False
        for members in classes:
            if _same_invariant_bucket(members[0], pres) and (
                isomorphism_test(members[0], pres).isomorphic
            ):
                members.append(pres)
                matched = True
                break
        if not matched:
            classes.append([pres])
    reps = [
        min(members, key=lambda q: q.save_text()) for members in classes
    ]
    prefix = label_prefix or f"{p}^{n}-family"
    entries = []
    for idx, rep in enumerate(
        sorted(reps, key=lambda q: q.save_text())
    ):
        entries.append(
            CatalogEntry(
                label=f"{prefix}-class{idx}",
                pres=rep,
                provenance="derived-by-search",
                properties=constraints.as_dict(),
            )
        )
    return entries


def _invariant_bucket(pres):
    """Cheap isomorphism invariants used to pre-sort survivors."""
    from . import series as series_mod
    from .presentation import element_order
    from .subgroups import Subgroup, maximal_subgroups

    sd = series_mod.central_series(pres)
    key = [sd.nilpotency_class]
    g1, cz2 = (None, None)
    if pres.order >= pres.p ** 4:
        g1, cz2 = series_mod.two_step_centralizers(pres, sd)
        key.append(g1.is_abelian())
        key.append(cz2.is_abelian())
        key.append(g1.derived().m)
        key.append(g1.frattini().m)
        key.append(g1.center_of().m)
        key.append(g1 == cz2)
        key.append(sd.degree_of_commutativity)
        # commutator-depth matrix of the characteristic chain terms
        terms = [g1] + [sd.gamma(i) for i in range(2, pres.n)]
        whole = Subgroup.whole(pres)
        key.append(tuple(
            a.commutator_with(b, normal_in=whole).m
            for a in terms for b in terms
        ))
    key.append(
        tuple(sorted(
            (M.is_abelian(), M.d(), M.derived().m, M.exponent())
            for M in maximal_subgroups(pres)
        ))
    )
    # element-order histogram of the generated Frattini quotient reps:
    # count elements of order <= p in the whole group when small enough
    if pres.order <= pres.p ** 6:
        orders = {}
        for x in Subgroup.whole(pres).elements():
            o = element_order(pres, x)
            orders[o] = orders.get(o, 0) + 1
        key.append(tuple(sorted(orders.items())))
    return tuple(key)


_bucket_cache = {}


def _same_invariant_bucket(a, b):
    ka = _bucket_cache.get(id(a))
    if ka is None:
        ka = _invariant_bucket(a)
        _bucket_cache[id(a)] = ka
    kb = _bucket_cache.get(id(b))
    if kb is None:
        kb = _invariant_bucket(b)
        _bucket_cache[id(b)] = kb
    return ka == kb


# -- shipped catalog ---------------------------------------------------


def catalog_dir():
    override = os.environ.get("PEARLFORGE_CATALOG")
    if override:
        return override
    return os.path.join(os.path.dirname(__file__), "data", "catalog")


def load_catalog(verify=True):
    """Load every entry of the shipped (or overridden) catalog; labeled
    properties re-verify on load unless verify=False."""
    directory = catalog_dir()
    manifest_path = os.path.join(directory, "manifest.json")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    entries = {}
    for item in manifest["entries"]:
        pres = PcPresentation.load(os.path.join(directory, item["file"]))
        pres.check()
        entry = CatalogEntry(
            label=item["label"],
            pres=pres,
            provenance=item.get("provenance", "shipped"),
            properties=item.get("properties", {}),
            note=item.get("note", ""),
        )
        if verify:
            _verify_entry(entry)
        entries[entry.label] = entry
    return entries


def _verify_entry(entry):
    from . import series as series_mod
    from .subgroups import Subgroup, SubgroupProfile

    props = entry.properties
    pres = entry.pres
    sd = series_mod.central_series(pres)
    checks = {
        "order": lambda v: pres.order == v,
        "class": lambda v: sd.nilpotency_class == v,
        "maximal_class": lambda v: sd.is_maximal_class == v,
        "exponent": lambda v: series_mod.exponent_of(
            pres, Subgroup.whole(pres)
        ) == v,
        "gamma1_abelian": lambda v: series_mod.two_step_centralizers(
            pres, sd
        )[0].is_abelian() == v,
        "gamma1_extraspecial": lambda v: SubgroupProfile(
            series_mod.two_step_centralizers(pres, sd)[0]
        ).extraspecial == v,
        "cs_z2_nonabelian": lambda v: (
            not series_mod.two_step_centralizers(pres, sd)[1].is_abelian()
        ) == v,
    }
    for name, value in props.items():
        check = checks.get(name)
        if check is None:
            continue
        if not check(value):
            raise FalsificationError(
                f"catalog entry {entry.label}: property {name}={value!r} "
                f"failed to re-verify"
            )
