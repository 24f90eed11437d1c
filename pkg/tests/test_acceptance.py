"""End-to-end acceptance checks, one test per numbered criterion.

Each test prints a single pass/fail line with the measured runtime so the
suite output doubles as the acceptance record.  Budgets are asserted, not
just reported; the suite must run green on a stock container.
"""

from __future__ import annotations

import random
import time

import numpy as np

from oracle_graded import graded_end_dims
from stabrec import fixtures
from stabrec.derived import (
    Complex,
    as_complex,
    derived_hom_dims,
    endo_dg_cohomology,
    nu_family_check,
    random_tower,
    tower_reorder,
    tower_side_check,
    tower_truncate,
    verify_family_pattern,
)
from stabrec.filtration import (
    align_filtrations,
    exhaustive_radical_filtrations,
    s_radical_filtration,
    stable_iso_lifts,
    strip_remainder,
    verify_s_radical,
)
from stabrec.graded import graded_iso_check
from stabrec.modules import (
    Module,
    ModuleMap,
    combine,
    direct_sum,
    ext1,
    hom_space,
    quotient,
    radical_series,
)
from stabrec.reconstruct import end_g, generator_build
from stabrec.stable import stable_hom, stably_isomorphic, syzygy


def _verdict(num: int, ok: bool, detail: str) -> None:
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_1_remark_family_quantitative():
    t0 = time.perf_counter()
    lam = fixtures.load("lambda4")
    su = lam.simple(0)
    pu, pv = lam.projective(0), lam.projective(1)
    members = [as_complex(su), as_complex(pu, degree=-1)]
    i_s = Complex(lam, {-1: pu, 0: pv}, {-1: hom_space(pu, pv)[0]},
                  name="I(S)")
    candidates = [i_s, as_complex(pu, degree=-1)]
    pattern = verify_family_pattern(members, candidates, "I")
    endo = endo_dg_cohomology(candidates)
    nu = nu_family_check(candidates)
    dt = time.perf_counter() - t0
    want = {n: (3 if n == 0 else 1 if n == -1 else 0) for n in endo}
    ok = pattern.ok and endo == want and nu.status == "Not" and dt < 1.0
    _verdict(1, ok,
             f"pattern ok={pattern.ok}, endo={endo} want={want}, "
             f"nu={nu.status} want=Not ({dt:.2f}s < 1s)")


def test_criterion_2_symmetric_vanishing():
    t0 = time.perf_counter()
    bad = []
    for name in ("n3", "kx2"):
        alg = fixtures.load(name)
        covers = [as_complex(alg.projective(v))
                  for v in range(alg.nvertices)]
        endo = endo_dg_cohomology(covers, (-6, 6))
        if any(d for n, d in endo.items() if n != 0) or endo[0] != alg.dim:
            bad.append((name, endo))
    dt = time.perf_counter() - t0
    _verdict(2, not bad and dt < 1.0,
             f"H^i=0 off degree 0 on n3, kx2; bad={bad} ({dt:.2f}s < 1s)")


def test_criterion_3_reconstruction_all_fixtures():
    t0 = time.perf_counter()
    verdicts = {}
    for name in fixtures.CORPUS:
        alg = fixtures.load(name)
        gen = generator_build(alg, fixtures.simples(alg))
        verdicts[name] = graded_iso_check(end_g(gen),
                                          alg.gr_oracle()).verdict
    dt = time.perf_counter() - t0
    ok = all(v == "iso" for v in verdicts.values()) and dt < 10.0
    _verdict(3, ok, f"{verdicts} ({dt:.2f}s < 10s)")


def test_criterion_4_omega_twist_reconstruction():
    t0 = time.perf_counter()
    n3 = fixtures.load("n3")
    p = n3.projective(0)
    rows = radical_series(p)[2][0]
    pad = np.zeros((rows.shape[0], p.dim), dtype=np.int16)
    pad[:, : rows.shape[1]] = rows
    j2 = quotient(p, pad, name="J2")[0]
    gen = generator_build(n3, [j2])
    g = end_g(gen)
    dims = g.dims_by_degree()
    oracle = graded_end_dims(gen.module, gen.filt.chain)
    verdict = graded_iso_check(g, n3.gr_oracle()).verdict
    dt = time.perf_counter() - t0
    ok = (gen.module.dim == 6 and dims == {0: 1, 1: 1, 2: 1}
          and oracle == (1, 1, 1) and verdict == "iso" and dt < 5.0)
    _verdict(4, ok,
             f"generator dim={gen.module.dim}, dims={dims}, "
             f"oracle={oracle}, iso={verdict} ({dt:.2f}s < 5s)")


def test_criterion_5_ka4_nonuniqueness():
    t0 = time.perf_counter()
    fam = fixtures.ka4_family()
    rp = fixtures.ka4_restricted_projective()
    filts = exhaustive_radical_filtrations(rp, fam)
    by_multiset = {}
    for f in filts:
        by_multiset.setdefault(f.layer_multiset(), f)
    certs = {ms: verify_s_radical(f) for ms, f in by_multiset.items()}
    dt = time.perf_counter() - t0
    ok = (len(by_multiset) >= 2
          and all(c.ok and not c.level0_bijective for c in certs.values())
          and dt < 300.0)
    _verdict(5, ok,
             f"{len(filts)} filtrations, {len(by_multiset)} layer multisets, "
             f"certs ok={[c.ok for c in certs.values()]} ({dt:.1f}s < 300s)")


def _random_filtrable(algebra, sset, seed):
    rng = random.Random(seed)
    fld = algebra.field
    m = sset[rng.randrange(len(sset))]
    for _ in range(rng.randint(1, 3)):
        s = sset[rng.randrange(len(sset))]
        ex = ext1(s, m)
        if ex.dim and rng.random() < 0.75:
            coeffs = [rng.randrange(fld.q) for _ in range(ex.dim)]
            if not any(coeffs):
                coeffs[0] = 1
            m = ex.realize(combine(ex.reps, coeffs))[0]
        else:
            m = direct_sum([m, s], name="m")[0]
    n, _ = strip_remainder(m, sset, seed=seed)
    return n


def _scrambled(m, seed):
    rng = random.Random(seed)
    fld = m.algebra.field
    cs, cinvs = [], []
    for d in m.dims:
        if d == 0:
            z = np.zeros((0, 0), dtype=np.int16)
            cs.append(z)
            cinvs.append(z)
            continue
        while True:
            c = np.array([[rng.randrange(fld.q) for _ in range(d)]
                          for _ in range(d)], dtype=np.int16)
            if fld.rank(c) == d:
                break
        cs.append(c)
        cinvs.append(fld.solve_matrix(c, np.eye(d, dtype=np.int16)))
    mats = [fld.matmul(fld.matmul(cs[t], m.mats[a]), cinvs[s])
            for a, (_, s, t) in enumerate(m.algebra.arrows)]
    m2 = Module(m.algebra, m.dims, mats, name=m.name + "'")
    w = ModuleMap(m, m2, cs)
    assert w.is_map() and w.is_iso()
    return m2


def test_criterion_6_uniqueness_suite():
    t0 = time.perf_counter()
    failures = []
    counts = {}
    for name in fixtures.CORPUS:
        alg = fixtures.load(name)
        sset = fixtures.simples(alg)
        done, seed = 0, 0
        while done < 200:
            seed += 1
            n = _random_filtrable(alg, sset, seed)
            if n.dim == 0:
                continue
            f1 = s_radical_filtration(n, sset, seed=1000 + seed)
            f2 = s_radical_filtration(n, sset, seed=2000 + seed)
            tops = tuple(stable_hom(n, s).dim for s in sset)
            if f1.mult_sequence()[0] != tops:
                failures.append((name, seed, "top layer"))
            if f1.mult_sequence() != f2.mult_sequence():
                failures.append((name, seed, "greedy mismatch"))
            aut = align_filtrations(f1, f2)
            if not (aut.is_map() and aut.is_iso()):
                failures.append((name, seed, "align"))
            m2 = _scrambled(n, seed)
            if stably_isomorphic(n, m2, seed=seed) is None:
                failures.append((name, seed, "stable iso"))
            lift = stable_iso_lifts(n, m2, sset, seed=seed)
            if not (lift.is_map() and lift.is_iso()):
                failures.append((name, seed, "lift"))
            done += 1
        counts[name] = done
    dt = time.perf_counter() - t0
    ok = not failures and all(c >= 200 for c in counts.values()) and dt < 120.0
    _verdict(6, ok,
             f"{sum(counts.values())} modules over {len(counts)} fixtures, "
             f"failures={failures[:5]} ({dt:.1f}s < 120s)")


def test_criterion_7_reorder_suite():
    t0 = time.perf_counter()
    failures = []
    total = 0
    for name in ("lambda4", "n3"):
        alg = fixtures.load(name)
        members = fixtures.simples(alg)
        for seed in range(60):
            tw = random_tower(alg, members, 2 + seed % 5, seed=seed,
                              split_only=True)
            res = tower_reorder(tw)
            ds = res.tower.d_list()
            if not all(a >= b for a, b in zip(ds, ds[1:])):
                failures.append((name, seed, "order"))
            layers = list(res.tower.layer_multiset())
            for pair in res.cancelled:
                layers.extend(pair)
            if sorted(layers) != sorted(tw.layer_multiset()):
                failures.append((name, seed, "multiset"))
            tr = tower_truncate(res.tower)
            if not tower_side_check(tr.sub_tower, "le").ok:
                failures.append((name, seed, "le side"))
            if not tower_side_check(tr.quot_tower, "gt").ok:
                failures.append((name, seed, "gt side"))
            total += 1
    dt = time.perf_counter() - t0
    ok = not failures and total >= 100 and dt < 60.0
    _verdict(7, ok,
             f"{total} towers, failures={failures[:5]} ({dt:.1f}s < 60s)")


def test_criterion_8_derived_self_consistency():
    t0 = time.perf_counter()
    bad = []
    for name in fixtures.CORPUS:
        alg = fixtures.load(name)
        sims = fixtures.simples(alg)
        for s in sims:
            for t in sims:
                got = derived_hom_dims(s, t, (-3, 3))
                e1 = ext1(s, t).dim
                if e1 != stable_hom(syzygy(s, 1), t).dim:
                    bad.append((name, s.name, t.name, "ext1 vs omega"))
                want = (0, 0, 0, len(hom_space(s, t)), e1,
                        stable_hom(syzygy(s, 2), t).dim,
                        stable_hom(syzygy(s, 3), t).dim)
                if tuple(got) != want:
                    bad.append((name, s.name, t.name, tuple(got), want))
        s0 = sims[0]
        if tuple(derived_hom_dims(s0, s0, (-3, 3), depth=8)) != \
                tuple(derived_hom_dims(s0, s0, (-3, 3), depth=11)):
            bad.append((name, "depth stability"))
    dt = time.perf_counter() - t0
    _verdict(8, not bad and dt < 30.0,
             f"all fixture simple pairs on [-3,3]; bad={bad[:5]} "
             f"({dt:.1f}s < 30s)")
