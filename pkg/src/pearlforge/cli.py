"""Command-line harness: deterministic report-producing commands.

Commands: analyze, verify-table, derive, aut, towers, certificate.
Exit codes: 0 pass, 1 input error, 2 claim falsification, 3 budget
exhausted — exhaustive and mutually exclusive.  Structured output
(--format structured) is the stable interface; text output is cosmetic.
All computations are exact and deterministic; --threads is accepted as
a worker hint but every command produces identical output at any value.
"""

import argparse
import json
import os
import sys
import time

from .errors import (
    BudgetExceededError,
    FalsificationError,
    InconclusiveError,
    InconsistentPresentationError,
    MalformedPresentationError,
    MalformedWordError,
    PearlforgeError,
    UndefinedSeriesError,
    UnsupportedGroupError,
)
from .presentation import PcPresentation

EXIT_PASS = 0
EXIT_INPUT = 1
EXIT_FALSIFIED = 2
EXIT_BUDGET = 3


def _load_presentation(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc
    try:
        pres = PcPresentation.load_text(text)
        pres.check()
    except (MalformedPresentationError, MalformedWordError,
            InconsistentPresentationError) as exc:
        raise _InputError(f"bad presentation {path}: {exc}") from exc
    return pres


class _InputError(Exception):
    pass


class _TableMismatch(Exception):
    def __init__(self, row, cell, detail):
        super().__init__(f"table row {row}, cell {cell}: {detail}")
        self.row = row
        self.cell = cell


# -- report plumbing ----------------------------------------------------


def _report_skeleton(command, args):
    return {
        "command": command,
        "flags": {
            "budget": args.budget,
            "threads": args.threads,
            "lambda": args.lam,
            "format": args.format,
        },
        "results": {},
        "verdicts": [],
        "timing": {},
    }


def _emit(report, args):
    if args.format == "structured":
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    print(f"# {report['command']}")
    for section, value in sorted(report["results"].items()):
        print(f"[{section}]")
        print(json.dumps(value, indent=2, sort_keys=True))
    for v in report["verdicts"]:
        print(f"{'PASS' if v['ok'] else 'FAIL'}  {v['what']}"
              + (f"  ({v['detail']})" if v.get("detail") else ""))
    for what, dt in sorted(report["timing"].items()):
        print(f"time {what}: {dt:.2f}s")


def _verdict(report, what, ok, detail=""):
    report["verdicts"].append({"what": what, "ok": bool(ok),
                               "detail": detail})
    if not ok:
        raise FalsificationError(f"{what}: {detail or 'failed'}")


# -- analyze ------------------------------------------------------------


def run_analyze(args, report):
    from . import series as series_mod
    from .subgroups import SubgroupProfile, sectional_rank

    pres = _load_presentation(args.file)
    p = pres.p
    report["results"]["group"] = {
        "hash": pres.content_hash(), "p": p, "n": pres.n,
        "order": pres.order,
    }
    t0 = time.time()
    sd = series_mod.central_series(pres)
    rank = sectional_rank(pres)
    res = {
        "consistent": True,
        "class": sd.nilpotency_class,
        "maximal_class": sd.is_maximal_class,
        "sectional_rank": rank.rank,
        "gamma_orders": [g.order for g in sd.lcs],
    }
    if pres.order >= p ** 4 and sd.is_maximal_class:
        g1 = sd.gamma1
        res["gamma1"] = {
            "abelian": g1.is_abelian(),
            "extraspecial": (not g1.is_abelian())
            and SubgroupProfile(g1).extraspecial,
            "order": g1.order,
        }
        res["cs_z2_equals_gamma1"] = sd.gamma1 == sd.cs_z2
        res["degree_of_commutativity"] = sd.degree_of_commutativity
    report["results"]["series"] = res
    report["timing"]["series"] = time.time() - t0

    if pres.order >= p ** 4 and sd.is_maximal_class:
        from .pearls import (
            essential_candidate_scan,
            find_pearl_candidates,
            normalizer_tower,
        )
        from .fusion import conjugacy_class_reps

        t0 = time.time()
        cands = find_pearl_candidates(pres, sd)
        reps = conjugacy_class_reps(pres, cands)
        kinds = sorted({c.kind for c in cands})
        report["results"]["pearl_candidates"] = {
            "count": len(cands),
            "kinds": kinds,
            "s_classes": len(reps),
        }
        report["timing"]["pearls"] = time.time() - t0

        t0 = time.time()
        towers = []
        for c in reps:
            tr = normalizer_tower(pres, c, peers=reps)
            towers.append({
                "kind": c.kind,
                "m": tr.m,
                "tower_orders": [H.order for H in tr.tower],
                "checks_passed": sorted(
                    k for k, v in tr.checks.items() if v
                ),
            })
        report["results"]["towers"] = towers
        report["timing"]["towers"] = time.time() - t0

        t0 = time.time()
        scan = essential_candidate_scan(pres, sd, budget=args.budget)
        labels = {}
        for _H, labs in scan:
            for lab in labs:
                labels[lab] = labels.get(lab, 0) + 1
        report["results"]["essential_scan"] = {
            "survivors": len(scan),
            "by_label": labels,
        }
        report["timing"]["essential_scan"] = time.time() - t0
    else:
        report["results"]["pearl_candidates"] = {
            "count": 0,
            "note": "not applicable below p^4 or outside maximal class",
        }
    return EXIT_PASS


# -- aut ----------------------------------------------------------------


def run_aut(args, report):
    from .autos import automorphism_group, verify_autoS_structure

    pres = _load_presentation(args.file)
    report["results"]["group"] = {"hash": pres.content_hash(),
                                  "order": pres.order}
    t0 = time.time()
    autg = automorphism_group(pres, budget=args.budget)
    report["results"]["aut"] = autg.as_dict()
    report["results"]["center_action"] = [
        {**row, "matrix": [list(r) for r in row["matrix"]]}
        for row in autg.center_action_scan()
    ]
    structure = verify_autoS_structure(pres, autg)
    report["results"]["structure"] = structure
    report["timing"]["aut"] = time.time() - t0
    if structure.get("applicable") and structure.get("failures"):
        _verdict(report, "aut-structure", False,
                 "; ".join(structure["failures"]))
    return EXIT_PASS


# -- towers -------------------------------------------------------------


def run_towers(args, report):
    from . import series as series_mod
    from .fusion import conjugacy_class_reps
    from .pearls import find_pearl_candidates, normalizer_tower

    pres = _load_presentation(args.file)
    report["results"]["group"] = {"hash": pres.content_hash(),
                                  "order": pres.order}
    sd = series_mod.central_series(pres)
    cands = find_pearl_candidates(pres, sd)
    reps = conjugacy_class_reps(pres, cands)
    out = []
    t0 = time.time()
    for c in reps:
        tr = normalizer_tower(pres, c, peers=reps)
        out.append(tr.as_dict())
    report["results"]["towers"] = out
    report["timing"]["towers"] = time.time() - t0
    return EXIT_PASS


# -- certificate --------------------------------------------------------


def run_certificate(args, report):
    from . import series as series_mod
    from .autos import automorphism_group
    from .fusion import (
        build_fusion_certificate,
        conjugacy_class_reps,
        construct_delta,
    )
    from .pearls import find_pearl_candidates

    pres = _load_presentation(args.file)
    report["results"]["group"] = {"hash": pres.content_hash(),
                                  "order": pres.order}
    sd = series_mod.central_series(pres)
    autg = automorphism_group(pres, budget=args.budget)
    cands = find_pearl_candidates(pres, sd)
    reps = conjugacy_class_reps(pres, cands)
    if args.pearl_kind:
        want = "abelian" if args.pearl_kind == "a" else "extraspecial"
        reps = [c for c in reps if c.kind == want]
        if not reps:
            raise _InputError(f"no {want} pearl candidates")
    # keep the delta-admitting classes; reject if none
    chosen = []
    for c in reps:
        d = construct_delta(pres, c, lam=args.lam, autg=autg, series=sd)
        if d.exists:
            chosen.append(c)
    if not chosen:
        raise FalsificationError(
            "no selected pearl candidate admits a delta automorphism"
        )
    t0 = time.time()
    cert = build_fusion_certificate(
        pres, chosen, lam=args.lam, autg=autg, series=sd,
    )
    report["results"]["certificate"] = cert.as_dict()
    report["timing"]["certificate"] = time.time() - t0
    if args.emit_presentations:
        os.makedirs(args.emit_presentations, exist_ok=True)
        path = os.path.join(args.emit_presentations,
                            f"{pres.content_hash()}.pres")
        pres.save(path)
        report["results"]["emitted"] = [path]
    return EXIT_PASS


# -- derive -------------------------------------------------------------


def run_derive(args, report):
    from .catalog import FamilyConstraints, derive_family

    try:
        with open(args.file) as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _InputError(f"cannot read constraint spec: {exc}") from exc
    try:
        cons = FamilyConstraints(
            p=int(spec["p"]),
            n=int(spec["n"]),
            required_class=spec.get("class"),
            exponent=spec.get("exponent"),
            flags=tuple(spec.get("flags", ())),
        )
    except (KeyError, TypeError, ValueError,
            MalformedPresentationError) as exc:
        raise _InputError(f"bad constraint spec: {exc}") from exc
    t0 = time.time()
    entries = derive_family(cons, budget=args.budget,
                            label_prefix=spec.get("label"))
    report["results"]["family"] = {
        "constraints": cons.as_dict(),
        "classes": len(entries),
        "labels": [e.label for e in entries],
        "hashes": [e.pres.content_hash() for e in entries],
    }
    report["timing"]["derive"] = time.time() - t0
    if args.emit_presentations:
        os.makedirs(args.emit_presentations, exist_ok=True)
        written = []
        for e in entries:
            path = os.path.join(args.emit_presentations,
                                f"{e.label}.pres")
            e.pres.save(path)
            written.append(path)
        report["results"]["emitted"] = written
    expected = spec.get("expected_classes")
    if expected is not None and expected != len(entries):
        _verdict(report, "class-count", False,
                 f"expected {expected}, derived {len(entries)}")
    return EXIT_PASS


# -- verify-table -------------------------------------------------------


def _catalog():
    from .catalog import load_catalog

    return load_catalog(verify=True)


def _pick(entries, **props):
    """Catalog entries whose manifest properties include all of props."""
    out = []
    for e in entries.values():
        if all(e.properties.get(k) == v for k, v in props.items()):
            out.append(e)
    return sorted(out, key=lambda e: e.label)


def _aut_fusion_classes(pres, autg, reps):
    """Number of orbits of the pearl-candidate S-classes under the
    p'-part of Aut(S) (one witness per p'-outer element)."""
    from .fusion import _conjugate_orbit
    from .subgroups import Subgroup

    class_keys = []
    for c in reps:
        class_keys.append(
            {H.key() for H, _g in _conjugate_orbit(pres, c.subgroup)}
        )

    def class_of(H):
        key = H.key()
        for idx, keys in enumerate(class_keys):
            if key in keys:
                return idx
        return None

    parent = list(range(len(reps)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for w, _m in autg.pprime_elements():
        for idx, c in enumerate(reps):
            img = Subgroup.span(
                pres, [w.apply(b) for b in c.subgroup.basis]
            )
            j = class_of(img)
            if j is not None and j != idx:
                ra, rb = find(idx), find(j)
                if ra != rb:
                    parent[ra] = rb
    return len({find(i) for i in range(len(reps))})


def run_verify_table(args, report):
    from . import series as series_mod
    from .autos import automorphism_group, isomorphism_test
    from .fusion import (
        build_fusion_certificate,
        conjugacy_class_reps,
        construct_delta,
    )
    from .pearls import find_pearl_candidates
    from .subgroups import Subgroup, SubgroupProfile, sectional_rank

    entries = _catalog()
    rows = []

    def check(row, cell, ok, detail=""):
        rows.append({"row": row, "cell": cell, "ok": bool(ok),
                     "detail": detail})
        if not ok:
            raise _TableMismatch(row, cell, detail)

    # row 1: rank 2, S = p^{1+2}_+, abelian pearls, no other essentials
    for p in (3, 5, 7):
        e = entries[f"extraspecial_plus(p={p})"]
        pres = e.pres
        check("k=2", f"order(p={p})", pres.order == p ** 3)
        check("k=2", f"shape(p={p})",
              SubgroupProfile(Subgroup.whole(pres)).extraspecial)
        check("k=2", f"rank(p={p})", sectional_rank(pres).rank == 2)

    # row 2: rank 3, Sp4(p)-Sylow, both kinds, gamma_1 = C_p^3
    for p in (3, 5):
        pres = entries[f"sp4_sylow(p={p})"].pres
        sd = series_mod.central_series(pres)
        check("k=3-sp4", f"rank(p={p})", sectional_rank(pres).rank == 3)
        cands = find_pearl_candidates(pres, sd)
        kinds = sorted({c.kind for c in cands})
        check("k=3-sp4", f"pearl-kinds(p={p})",
              kinds == ["abelian", "extraspecial"], repr(kinds))
        g1 = sd.gamma1
        check("k=3-sp4", f"gamma1(p={p})",
              g1.is_abelian() and g1.exponent() == p
              and g1.order == p ** 3)

    # row 3: rank 3, the 7^5 host, abelian pearls only, 1 fused class,
    # torus order 6
    pres = _pick(entries, family="7^5-exotic-host")[0].pres
    sd = series_mod.central_series(pres)
    check("k=3-7^5", "rank", sectional_rank(pres).rank == 3)
    autg = automorphism_group(pres, budget=args.budget)
    check("k=3-7^5", "torus-order", autg.pprime_order == 6,
          str(autg.pprime_order))
    cands = find_pearl_candidates(pres, sd)
    reps = conjugacy_class_reps(pres, cands)
    bearing = [c for c in reps
               if construct_delta(pres, c, lam=args.lam, autg=autg,
                                  series=sd).exists]
    check("k=3-7^5", "pearl-kinds",
          sorted({c.kind for c in bearing}) == ["abelian"])
    fused = _aut_fusion_classes(pres, autg, bearing)
    check("k=3-7^5", "one-fused-class", fused == 1, str(fused))

    # row 4: rank 4, extraspecial-maximal 7^6 host, abelian pearls,
    # gamma_1 = 7^{1+4}_+
    pres = _pick(entries, family="7^6-extraspecial-maximal")[0].pres
    sd = series_mod.central_series(pres)
    check("k=4-g2", "rank", sectional_rank(pres).rank == 4)
    g1 = sd.gamma1
    check("k=4-g2", "gamma1-extraspecial",
          (not g1.is_abelian()) and SubgroupProfile(g1).extraspecial
          and g1.order == 7 ** 5)
    autg6 = automorphism_group(pres, budget=args.budget)
    cands = find_pearl_candidates(pres, sd)
    reps = conjugacy_class_reps(pres, cands)
    bearing = [c for c in reps
               if construct_delta(pres, c, lam=args.lam, autg=autg6,
                                  series=sd).exists]
    check("k=4-g2", "pearl-kinds",
          sorted({c.kind for c in bearing}) == ["abelian"])

    # row 5: rank 4, delta-bearing member of the 7^6 pair, extraspecial
    # pearls, torus order 6, O_7 = Z(S), quotient relation to the 7^5 host
    pair = _pick(entries, family="7^6-pair")
    # try manifest-flagged members first (ordering hint only: bearing is
    # re-established by constructing the deltas)
    pair = sorted(
        pair, key=lambda e: not e.properties.get("delta_bearing", False)
    )
    bearing_entry = None
    for e in pair:
        pres = e.pres
        sd = series_mod.central_series(pres)
        autg6 = automorphism_group(pres, budget=args.budget)
        cands = find_pearl_candidates(pres, sd)
        reps = conjugacy_class_reps(pres, cands)
        bearing = [c for c in reps
                   if construct_delta(pres, c, lam=args.lam,
                                      autg=autg6, series=sd).exists]
        if bearing:
            bearing_entry = (e, pres, sd, autg6, bearing)
            break
    check("k=4-pair", "delta-bearing-member-exists",
          bearing_entry is not None)
    e, pres, sd, autg6, bearing = bearing_entry
    check("k=4-pair", "rank", sectional_rank(pres).rank == 4)
    check("k=4-pair", "torus-order", autg6.pprime_order == 6,
          str(autg6.pprime_order))
    check("k=4-pair", "pearl-kinds",
          sorted({c.kind for c in bearing}) == ["extraspecial"])
    cert = build_fusion_certificate(
        pres, bearing[:1], lam=args.lam, autg=autg6, series=sd,
    )
    z = sd.zeta_(1)
    check("k=4-pair", "O_7=Z(S)",
          cert.op_lower.order == z.order == 7
          and cert.op_lower == cert.op_upper == z)
    host = _pick(entries, family="7^5-exotic-host")[0].pres
    quotient = pres.truncate(pres.n - 1)
    iso = isomorphism_test(quotient, host, budget=args.budget)
    check("k=4-pair", "quotient-relation", iso.isomorphic,
          "S/Z(S) isomorphic to the 7^5 host")
    report["results"]["table"] = rows
    return EXIT_PASS


# -- entry --------------------------------------------------------------


def _build_parser():
    ap = argparse.ArgumentParser(prog="pearlforge", description=__doc__)
    ap.add_argument("--budget", type=int, default=None,
                    help="node budget for searches/enumerations")
    ap.add_argument("--threads", type=int, default=1,
                    help="worker hint; outputs are identical at any value")
    ap.add_argument("--lambda", dest="lam", type=int, default=None,
                    help="diagonal-torus eigenvalue (default: smallest "
                         "primitive root mod p)")
    ap.add_argument("--emit-presentations", default=None, metavar="DIR",
                    help="write presentation files to DIR")
    ap.add_argument("--format", choices=("text", "structured"),
                    default="text")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, needs_file in (
        ("analyze", True), ("verify-table", False), ("derive", True),
        ("aut", True), ("towers", True), ("certificate", True),
    ):
        sp = sub.add_parser(name)
        if needs_file:
            sp.add_argument("file")
        if name == "certificate":
            sp.add_argument("--pearl-kind", choices=("a", "e"),
                            default=None)
    return ap


_RUNNERS = {
    "analyze": run_analyze,
    "verify-table": run_verify_table,
    "derive": run_derive,
    "aut": run_aut,
    "towers": run_towers,
    "certificate": run_certificate,
}


def main(argv=None):
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    report = _report_skeleton(args.command, args)
    t0 = time.time()
    try:
        code = _RUNNERS[args.command](args, report)
    except _InputError as exc:
        report["verdicts"].append(
            {"what": "input", "ok": False, "detail": str(exc)}
        )
        _finish(report, args, t0)
        return EXIT_INPUT
    except _TableMismatch as exc:
        report["verdicts"].append(
            {"what": f"table:{exc.row}:{exc.cell}", "ok": False,
             "detail": str(exc)}
        )
        _finish(report, args, t0)
        return EXIT_FALSIFIED
    except FalsificationError as exc:
        report["verdicts"].append(
            {"what": "falsification", "ok": False, "detail": str(exc)}
        )
        _finish(report, args, t0)
        return EXIT_FALSIFIED
    except (BudgetExceededError, InconclusiveError) as exc:
        report["verdicts"].append(
            {"what": "budget", "ok": False, "detail": str(exc)}
        )
        _finish(report, args, t0)
        return EXIT_BUDGET
    except (UnsupportedGroupError, UndefinedSeriesError,
            MalformedPresentationError, MalformedWordError,
            PearlforgeError) as exc:
        report["verdicts"].append(
            {"what": "input", "ok": False, "detail": str(exc)}
        )
        _finish(report, args, t0)
        return EXIT_INPUT
    if not report["verdicts"]:
        report["verdicts"].append({"what": args.command, "ok": True,
                                   "detail": ""})
    _finish(report, args, t0)
    return code


def _finish(report, args, t0):
    report["timing"]["total"] = time.time() - t0
    _emit(report, args)


if __name__ == "__main__":
    sys.exit(main())
