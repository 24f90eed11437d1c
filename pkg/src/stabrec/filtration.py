"""Filtrations with layers in add(S) and the S-radical filtration calculus.

A filtration is stored as a chain of global row spaces of the ambient module,
each arrow-stable, strictly decreasing, ending at zero.  Layer witnesses
(isomorphisms onto direct sums of members of S) are recomputed on demand, so
a Filtration value is self-validating.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import (
    Inconclusive,
    NoSurjectionInCoset,
    NotFiltrable,
    PresentationError,
    Undecided,
)
from .gf import coset_rank_maximize
from .modules import (
    Module,
    ModuleMap,
    combine,
    decompose,
    direct_sum,
    extend_along_injection,
    hom_space,
    injective_hull,
    is_exact_pair,
    is_projective,
    kernel,
    module_isomorphic,
    quotient,
    submodule,
    submodule_closure,
    zero_module,
)
from .stable import projective_maps, stable_hom, stably_isomorphic


# -- row-space plumbing --------------------------------------------------------

def _full_rows(m: Module) -> np.ndarray:
    return np.eye(m.dim, dtype=np.int16)


def _empty_rows(m: Module) -> np.ndarray:
    return np.zeros((0, m.dim), dtype=np.int16)


def _transport_rows(fmap: ModuleMap, rows: np.ndarray) -> np.ndarray:
    """Row space of the image of a subspace under a map, in target coords."""
    fld = fmap.src.algebra.field
    if rows.shape[0] == 0:
        return np.zeros((0, fmap.tgt.dim), dtype=np.int16)
    g = fmap.global_matrix()
    return fld.row_space(fld.matmul(rows, g.T))


def _rows_in_sub(incl: ModuleMap, rows: np.ndarray) -> np.ndarray:
    """Express rows (contained in the image of incl) in subobject coords."""
    fld = incl.src.algebra.field
    if rows.shape[0] == 0:
        return np.zeros((0, incl.src.dim), dtype=np.int16)
    sol = fld.solve_matrix(incl.global_matrix(), rows.T)
    if sol is None:
        raise PresentationError("rows do not lie in the submodule")
    return fld.row_space(sol.T)


def _contains(fld, big: np.ndarray, small: np.ndarray) -> bool:
    if small.shape[0] == 0:
        return True
    stacked = np.concatenate([big, small], axis=0)
    return fld.row_space(stacked).shape[0] == big.shape[0]


def _sset_sig(sset) -> tuple:
    return tuple(s.key for s in sset)


def _sum_with_mults(sset, mults):
    """Direct sum of S-copies grouped by member: (X, injs, projs, layout),
    layout[c] = (member index, copy number)."""
    algebra = sset[0].algebra
    parts, layout = [], []
    for si, s in enumerate(sset):
        for c in range(mults[si]):
            parts.append(s)
            layout.append((si, c))
    if not parts:
        return zero_module(algebra), [], [], layout
    x, injs, projs = direct_sum(parts, name="X")
    return x, injs, projs, layout


# -- filtration values -----------------------------------------------------------

class _Level:
    __slots__ = ("sub", "incl", "layer", "qmap", "mults", "witness")

    def __init__(self, sub, incl, layer, qmap, mults, witness):
        self.sub = sub
        self.incl = incl
        self.layer = layer
        self.qmap = qmap
        self.mults = mults
        self.witness = witness


class Filtration:
    """Chain of arrow-stable subspaces of module with add(S) layers."""

    __slots__ = ("module", "sset", "chain", "_levels")

    def __init__(self, module: Module, sset, chain, check: bool = True):
        self.module = module
        self.sset = list(sset)
        fld = module.algebra.field
        self.chain = [fld.row_space(np.asarray(r, dtype=np.int16))
                      for r in chain]
        self._levels = None
        if check:
            self._validate()

    def _validate(self):
        m, fld = self.module, self.module.algebra.field
        if self.chain[0].shape[0] != m.dim:
            raise PresentationError("filtration must start at the full module")
        if self.chain[-1].shape[0] != 0:
            raise PresentationError("filtration must end at zero")
        for i in range(len(self.chain) - 1):
            hi, lo = self.chain[i], self.chain[i + 1]
            if lo.shape[0] >= hi.shape[0]:
                raise PresentationError("filtration steps must strictly drop")
            if not _contains(fld, hi, lo):
                raise PresentationError("filtration chain is not nested")
        for rows in self.chain:
            closed = submodule_closure(m, rows)
            if closed.shape[0] != rows.shape[0]:
                raise PresentationError("filtration level is not a submodule")

    def __len__(self) -> int:
        return len(self.chain) - 1

    def levels(self) -> list[_Level]:
        """Materialize submodules, layer quotients, and add(S) witnesses."""
        if self._levels is not None:
            return self._levels
        out = []
        for i in range(len(self)):
            sub, incl = submodule(self.module, self.chain[i], name=f"M_{i}")
            inner = _rows_in_sub(incl, self.chain[i + 1])
            layer, qmap = quotient(sub, inner, name=f"L_{i}")
            mults, witness = _layer_witness(layer, self.sset)
            out.append(_Level(sub, incl, layer, qmap, mults, witness))
        self._levels = out
        return out

    def mult_sequence(self) -> tuple[tuple[int, ...], ...]:
        return tuple(lv.mults for lv in self.levels())

    def layer_multiset(self) -> tuple[tuple[int, ...], ...]:
        """Multiset (sorted tuple) of layer multiplicity vectors."""
        return tuple(sorted(self.mult_sequence()))


def _layer_witness(layer: Module, sset):
    """Multiplicities and an iso onto the grouped direct sum of S-copies."""
    if layer.dim == 0:
        raise PresentationError("zero layer in a filtration")
    pieces = decompose(layer)
    mults = [0] * len(sset)
    tagged = []
    for p in pieces:
        for si, s in enumerate(sset):
            if p.module.dim == s.dim:
                w = module_isomorphic(p.module, s)
                if w is not None:
                    tagged.append((si, p, w))
                    mults[si] += 1
                    break
        else:
            if not p.certified:
                raise Inconclusive(
                    "layer summand matched no member of S but its "
                    "indecomposability was not certified")
            raise NotFiltrable(
                f"layer summand of dim {p.module.dim} is not in add(S)")
    x, injs, _, layout = _sum_with_mults(sset, mults)
    slot = {pair: c for c, pair in enumerate(layout)}
    used = [0] * len(sset)
    witness = ModuleMap.zero(layer, x)
    for si, p, w in tagged:
        c = slot[(si, used[si])]
        used[si] += 1
        witness = witness.add(injs[c].compose(w).compose(p.proj))
    if not witness.is_iso():
        raise PresentationError("layer witness failed to assemble")
    return tuple(mults), witness


# -- canonical top layer ---------------------------------------------------------

def canonical_top(m: Module, sset):
    """X = sum of S-copies sized by stable Hom, with the canonical map."""
    mults = [stable_hom(m, s).dim for s in sset]
    x, injs, _, layout = _sum_with_mults(sset, mults)
    g = ModuleMap.zero(m, x)
    for c, (si, j) in enumerate(layout):
        rep = stable_hom(m, sset[si]).reps[j]
        g = g.add(injs[c].compose(rep))
    return x, g, tuple(mults)


def surjective_representative(g: ModuleMap, seed: int = 0) -> ModuleMap:
    """A surjection stably equal to g, or raise NoSurjectionInCoset."""
    m, x = g.src, g.tgt
    if x.dim == 0:
        return g
    fld = m.algebra.field
    dirs = stable_hom(m, x).proj
    mats = [d.global_matrix() for d in dirs]
    _, coeffs, rank, exhaustive = coset_rank_maximize(
        fld, g.global_matrix(), mats, target_rank=x.dim, seed=seed)
    if rank < x.dim:
        raise NoSurjectionInCoset(
            f"no surjection onto {x.name} in the stable class",
            exhaustive=exhaustive)
    f = g if not dirs else g.add(combine(dirs, coeffs))
    if not f.is_surjective_map():
        raise PresentationError("coset search returned a non-surjection")
    return f


def top_layer(m: Module, sset, seed: int = 0):
    """(X, f, K, incl, mults): canonical top quotient and its kernel.

    X is the sum of S-copies with multiplicity dim stable Hom(m, S); f is a
    surjective lift of the canonical stable map.
    """
    x, g, mults = canonical_top(m, sset)
    if x.dim == 0:
        if m.dim:
            raise NoSurjectionInCoset(
                "all stable Hom(m, S) vanish on a nonzero module",
                exhaustive=True)
        return x, g, m, ModuleMap.identity(m), mults
    f = surjective_representative(g, seed=seed)
    k, incl = kernel(f, name=f"radS({m.name})")
    return x, f, k, incl, mults


def s_radical_filtration(m: Module, sset, seed: int = 0) -> Filtration:
    """Greedy S-radical filtration; complete for filtrable modules with no
    projective remainder."""
    chain = [_full_rows(m)]
    cur, to_m = m, ModuleMap.identity(m)
    while cur.dim:
        try:
            _, _, k, incl, _ = top_layer(cur, sset, seed=seed)
        except NoSurjectionInCoset as e:
            raise NotFiltrable(f"greedy filtration stalled: {e}") from e
        to_m = to_m.compose(incl)
        chain.append(_transport_rows(to_m, _full_rows(k)))
        cur = k
    return Filtration(m, sset, chain)


# -- filtrability ---------------------------------------------------------------

class _Budget:
    __slots__ = ("maps", "hit")

    def __init__(self, maps: int):
        self.maps = maps
        self.hit = False

    def spend(self, n: int = 1) -> bool:
        if self.maps < n:
            self.hit = True
            return False
        self.maps -= n
        return True


def _dims_feasible(dims, sset) -> bool:
    """Necessary condition for filtrability: the vertex dimension vector
    must be a nonnegative integer combination of the member vectors."""
    svecs = [s.dims for s in sset]
    memo: dict = {}

    def rec(t, i):
        if not any(t):
            return True
        if i == len(svecs):
            return False
        key = (t, i)
        if key in memo:
            return memo[key]
        sv = svecs[i]
        b = min((tc // sc) for tc, sc in zip(t, sv) if sc)
        ok = False
        for y in range(b, -1, -1):
            rest = tuple(tc - y * sc for tc, sc in zip(t, sv))
            if rec(rest, i + 1):
                ok = True
                break
        memo[key] = ok
        return ok

    return rec(tuple(dims), 0)


def _mult_candidates(m: Module, sset):
    """Multiplicity vectors for potential top layers, pruned by vertex
    dimensions, ordered by total dimension then lexicographically."""
    bounds = []
    for s in sset:
        b = m.dim // s.dim
        for v in range(len(m.dims)):
            if s.dims[v]:
                b = min(b, m.dims[v] // s.dims[v])
        bounds.append(b)
    cands = []
    for mv in itertools.product(*(range(b + 1) for b in bounds)):
        if not any(mv):
            continue
        dims = [sum(mv[si] * s.dims[v] for si, s in enumerate(sset))
                for v in range(len(m.dims))]
        if all(d <= mvd for d, mvd in zip(dims, m.dims)):
            cands.append((sum(dims), mv))
    cands.sort()
    return [mv for _, mv in cands]


def _surjections_onto(m: Module, x: Module, budget: _Budget):
    """Iterate surjective maps m -> x in coefficient order, spending budget."""
    homs = hom_space(m, x)
    if not homs:
        return
    q = m.algebra.field.q
    if q ** len(homs) > budget.maps:
        budget.hit = True
        return
    for coeffs in itertools.product(range(q), repeat=len(homs)):
        if not any(coeffs):
            continue
        if not budget.spend():
            return
        f = combine(homs, coeffs)
        if f.is_surjective_map():
            yield f


def _filtrable(m: Module, sset, seed, budget, cache) -> Filtration | None:
    key = m.key
    if key in cache:
        return cache[key]
    if m.dim == 0:
        filt = Filtration(m, sset, [_empty_rows(m)])
        cache[key] = filt
        return filt
    if not _dims_feasible(m.dims, sset):
        cache[key] = None
        return None

    try:
        filt = s_radical_filtration(m, sset, seed=seed)
        cache[key] = filt
        return filt
    except NotFiltrable:
        pass

    pieces = decompose(m, seed=seed)
    proj_idx = [i for i, p in enumerate(pieces) if is_projective(p.module)]
    if len(pieces) > 1 and proj_idx:
        for size in range(1, len(proj_idx) + 1):
            for subset in itertools.combinations(proj_idx, size):
                rest = [p for i, p in enumerate(pieces) if i not in subset]
                if not rest:
                    break  # fully projective: the direct search handles it
                part = [pieces[i] for i in subset]
                merged = _split_and_filter(m, sset, rest, part, seed,
                                           budget, cache)
                if merged is not None:
                    cache[key] = merged
                    return merged

    filt = _search_filtration(m, sset, seed, budget, cache)
    if filt is not None or not budget.hit:
        cache[key] = filt
    return filt


def _split_and_filter(m, sset, rest, part, seed, budget, cache):
    """Filtration of m from filtrations of complementary summand groups."""
    rest_mod, _, rest_prs = direct_sum([p.module for p in rest])
    part_mod, _, part_prs = direct_sum([p.module for p in part])
    f_rest = _filtrable(rest_mod, sset, seed, budget, cache)
    if f_rest is None:
        return None
    f_part = _filtrable(part_mod, sset, seed, budget, cache)
    if f_part is None:
        return None
    rest_to_m = ModuleMap.zero(rest_mod, m)
    for p, pr in zip(rest, rest_prs):
        rest_to_m = rest_to_m.add(p.incl.compose(pr))
    part_to_m = ModuleMap.zero(part_mod, m)
    for p, pr in zip(part, part_prs):
        part_to_m = part_to_m.add(p.incl.compose(pr))
    fld = m.algebra.field
    chain = []
    part_full = _transport_rows(part_to_m, _full_rows(part_mod))
    for rows in f_rest.chain:
        top = _transport_rows(rest_to_m, rows)
        chain.append(fld.row_space(np.concatenate([top, part_full], axis=0)))
    for rows in f_part.chain[1:]:
        chain.append(_transport_rows(part_to_m, rows))
    return Filtration(m, sset, chain)


def _search_filtration(m, sset, seed, budget, cache) -> Filtration | None:
    """Bounded exhaustive search over quotients in add(S)."""
    for mv in _mult_candidates(m, sset):
        x, _, _, _ = _sum_with_mults(sset, mv)
        seen = set()
        for f in _surjections_onto(m, x, budget):
            k, incl = kernel(f)
            rows = _transport_rows(incl, _full_rows(k))
            skey = rows.tobytes()
            if skey in seen:
                continue
            seen.add(skey)
            sub = _filtrable(k, sset, seed, budget, cache)
            if sub is None:
                continue
            chain = [_full_rows(m)]
            for r in sub.chain:
                chain.append(_transport_rows(incl, r))
            return Filtration(m, sset, chain)
    return None


def is_filtrable(m: Module, sset, seed: int = 0,
                 search_cap: int = 200000) -> Filtration | None:
    """A filtration with add(S) layers, or None (certified), or Undecided.

    Greedy first; then splitting off projective summand groups; then a
    bounded exhaustive search over top quotients.  A None returned after a
    search that hit no cap is a certified negative; otherwise Undecided.
    """
    alg = m.algebra
    caches = getattr(alg, "_filt_cache", None)
    if caches is None:
        caches = alg._filt_cache = {}
    cache = caches.setdefault(_sset_sig(sset), {})
    budget = _Budget(search_cap)
    filt = _filtrable(m, sset, seed, budget, cache)
    if filt is None and budget.hit:
        raise Undecided("filtration search hit its cap")
    return filt


def has_projective_remainder(m: Module, sset, seed: int = 0) -> bool:
    """Whether m = N + P with P a nonzero projective summand group and N
    filtrable."""
    pieces = decompose(m, seed=seed)
    proj_idx = [i for i, p in enumerate(pieces) if is_projective(p.module)]
    for size in range(1, len(proj_idx) + 1):
        for subset in itertools.combinations(proj_idx, size):
            rest = [p.module for i, p in enumerate(pieces) if i not in subset]
            n = direct_sum(rest)[0] if rest else zero_module(m.algebra)
            if is_filtrable(n, sset, seed=seed) is not None:
                return True
    return False


def strip_remainder(m: Module, sset, seed: int = 0):
    """(N, P) with m = N + P, P projective maximal with N still filtrable."""
    pieces = decompose(m, seed=seed)
    proj_idx = [i for i, p in enumerate(pieces) if is_projective(p.module)]
    for size in range(len(proj_idx), 0, -1):
        for subset in itertools.combinations(proj_idx, size):
            rest = [p.module for i, p in enumerate(pieces) if i not in subset]
            n = direct_sum(rest)[0] if rest else zero_module(m.algebra)
            if is_filtrable(n, sset, seed=seed) is not None:
                part = direct_sum([pieces[i].module for i in subset])[0]
                return n, part
    if is_filtrable(m, sset, seed=seed) is not None:
        return m, zero_module(m.algebra)
    raise NotFiltrable("no decomposition with a filtrable complement")


def find_nonzero_target(m: Module, sset, side: str = "to") -> Module:
    """Some S with nonzero stable Hom(m, S) (or Hom(S, m) for side='from')."""
    for s in sset:
        d = stable_hom(m, s).dim if side == "to" else stable_hom(s, m).dim
        if d:
            return s
    raise PresentationError(
        "no nonzero stable map to any S: module is projective or the "
        "filtrable precondition fails")


# -- certification ----------------------------------------------------------------

class RadicalCertificate:
    """Stable-category test results for an S-filtration.

    ok requires: the induced map on stable Hom into each S is bijective at
    every level above 0 and surjective at level 0, and no level above 0 has
    a projective remainder.  level0_bijective additionally records whether
    the whole module has no projective remainder.
    """

    __slots__ = ("ok", "levels", "reasons", "level0_bijective")

    def __init__(self, ok, levels, reasons, level0_bijective):
        self.ok = ok
        self.levels = levels
        self.reasons = reasons
        self.level0_bijective = level0_bijective

    def __bool__(self):
        return self.ok


def _canonical_stable_matrix(layer, qmap, sub, s):
    """Matrix of stable Hom(layer, s) -> stable Hom(sub, s) over the chosen
    coset bases."""
    sh_l = stable_hom(layer, s)
    sh_m = stable_hom(sub, s)
    if sh_l.dim == 0:
        return np.zeros((0, sh_m.dim), dtype=np.int16), 0, sh_m.dim
    rows = np.stack([sh_m.coords(r.compose(qmap)) for r in sh_l.reps])
    return rows, sh_l.dim, sh_m.dim


def verify_s_radical(filt: Filtration, seed: int = 0) -> RadicalCertificate:
    fld = filt.module.algebra.field
    levels = []
    reasons = []
    level0_bij = True
    for i, lv in enumerate(filt.levels()):
        rec = {"level": i, "mults": lv.mults}
        bij, surj = True, True
        for s in filt.sset:
            mat, dl, dm = _canonical_stable_matrix(lv.layer, lv.qmap,
                                                   lv.sub, s)
            rank = fld.rank(mat) if mat.size else 0
            if rank < dm:
                surj = False
            if dl != dm or rank < dm:
                bij = False
        rec["stable_surjective"] = surj
        rec["stable_bijective"] = bij
        if i == 0:
            level0_bij = bij
            if not surj:
                reasons.append("level 0 canonical map not stably surjective")
        else:
            if not bij:
                reasons.append(f"level {i} canonical map not stably bijective")
            rem = has_projective_remainder(lv.sub, filt.sset, seed=seed)
            rec["no_projective_remainder"] = not rem
            if rem:
                reasons.append(f"level {i} has a projective remainder")
        levels.append(rec)
    return RadicalCertificate(not reasons, levels, reasons, level0_bij)


# -- exhaustive radical-filtration enumeration ------------------------------------

def exhaustive_radical_filtrations(m: Module, sset, seed: int = 0,
                                   max_results: int = 64,
                                   search_cap: int = 500000) -> list[Filtration]:
    """All S-radical filtrations of m, deduplicated by subspace chain.

    Each level enumerates surjections onto add(S) sums whose kernel is
    filtrable, has no projective remainder, and which satisfy the stable
    surjectivity half of the minimality criterion.
    """
    budget = _Budget(search_cap)
    fld = m.algebra.field
    results: list[Filtration] = []
    seen_chains = set()

    def admissible(cur, x, f, k):
        try:
            if is_filtrable(k, sset, seed=seed) is None:
                return False
            if has_projective_remainder(k, sset, seed=seed):
                return False
        except Undecided:
            budget.hit = True
            return False
        for s in sset:
            sh_c = stable_hom(cur, s)
            if sh_c.dim == 0:
                continue
            sh_x = stable_hom(x, s)
            if sh_x.dim == 0:
                return False
            mat = np.stack([sh_c.coords(r.compose(f)) for r in sh_x.reps])
            if fld.rank(mat) < sh_c.dim:
                return False
        return True

    def minimal_step(cur):
        found = {}
        for mv in _mult_candidates(cur, sset):
            x, _, _, _ = _sum_with_mults(sset, mv)
            for f in _surjections_onto(cur, x, budget):
                k, incl = kernel(f)
                rows = _transport_rows(incl, _full_rows(k))
                skey = rows.tobytes()
                if skey in found:
                    continue
                if admissible(cur, x, f, k):
                    found[skey] = (k, incl)
        return list(found.values())

    def dfs(cur, to_m, chain):
        if len(results) >= max_results:
            return
        if cur.dim == 0:
            key = tuple(r.tobytes() for r in chain)
            if key not in seen_chains:
                seen_chains.add(key)
                results.append(Filtration(m, sset, list(chain)))
            return
        for k, incl in minimal_step(cur):
            nxt = to_m.compose(incl)
            chain.append(_transport_rows(nxt, _full_rows(k)))
            dfs(k, nxt, chain)
            chain.pop()

    dfs(m, ModuleMap.identity(m), [_full_rows(m)])
    if budget.hit and len(results) < 2:
        raise Undecided("radical filtration enumeration hit its cap")
    return results


# -- alignment -------------------------------------------------------------------

def _solve_in_span(prods, target_flat, fld):
    """Coefficients c with sum c_t prods_t = target (as flats), or None."""
    if not prods:
        return None if np.any(target_flat) else np.zeros(0, dtype=np.int16)
    mat = np.stack([p.flat() for p in prods]).T
    return fld.solve(mat, target_flat)


def _align(f: ModuleMap, fp: ModuleMap, compose_side: str, seed: int) -> ModuleMap:
    """Shared worker: sigma in Aut(M), stably the identity, with
    f . sigma = fp (side='pre', M = src) or sigma . f = fp (side='post',
    M = tgt)."""
    m = f.src if compose_side == "pre" else f.tgt
    fld = m.algebra.field
    sh = stable_hom(f.src, f.tgt)
    if np.any(sh.coords(f.sub(fp))):
        raise PresentationError("maps are not stably equal")
    pend = stable_hom(m, m).proj
    if not pend:
        if np.any(f.sub(fp).flat()):
            raise PresentationError("no projective endomorphisms to adjust by")
        return ModuleMap.identity(m)
    if compose_side == "pre":
        prods = [f.compose(p) for p in pend]
    else:
        prods = [p.compose(f) for p in pend]
    c = _solve_in_span(prods, fp.sub(f).flat(), fld)
    if c is None:
        raise PresentationError("stable equality failed to lift")
    h0 = combine(pend, c)
    ker = fld.kernel(np.stack([p.flat() for p in prods]).T)
    dirs = [combine(pend, row) for row in ker if np.any(row)]
    base = ModuleMap.identity(m).add(h0)
    mats = [d.global_matrix() for d in dirs]
    _, coeffs, rank, exhaustive = coset_rank_maximize(
        fld, base.global_matrix(), mats, target_rank=m.dim, seed=seed)
    if rank < m.dim:
        if exhaustive:
            raise PresentationError("no automorphism aligns the maps")
        raise Inconclusive("automorphism search not exhaustive")
    sigma = base if not dirs else base.add(combine(dirs, coeffs))
    got = f.compose(sigma) if compose_side == "pre" else sigma.compose(f)
    if np.any(got.sub(fp).flat()):
        raise PresentationError("alignment verification failed")
    return sigma


def align_surjections(f: ModuleMap, fp: ModuleMap, seed: int = 0) -> ModuleMap:
    """sigma in Aut(M) with fp = f . sigma, sigma stably the identity."""
    if not (f.is_surjective_map() and fp.is_surjective_map()):
        raise PresentationError("align_surjections needs surjective inputs")
    return _align(f, fp, "pre", seed)


def align_injections(f: ModuleMap, fp: ModuleMap, seed: int = 0) -> ModuleMap:
    """sigma in Aut(M) with fp = sigma . f, sigma stably the identity."""
    if not (f.is_injective_map() and fp.is_injective_map()):
        raise PresentationError("align_injections needs injective inputs")
    return _align(f, fp, "post", seed)


def _extend_projective_map(incl: ModuleMap, p: ModuleMap,
                           tgt: Module) -> ModuleMap:
    """Projective q: M -> tgt with q . incl = p, for projective p: N -> tgt
    and incl: N -> M injective."""
    sub = incl.src
    fld = sub.algebra.field
    _, iota = injective_hull(sub)
    gs = hom_space(iota.tgt, tgt)
    if not gs:
        if np.any(p.flat()):
            raise PresentationError("projective map fails to extend")
        return ModuleMap.zero(incl.tgt, tgt)
    mat = np.stack([g.compose(iota).flat() for g in gs]).T
    c = fld.solve(mat, p.flat())
    if c is None:
        raise PresentationError("map is not projective through the hull")
    gamma = combine(gs, c)
    iota2 = extend_along_injection(incl, iota)
    return gamma.compose(iota2)


def align_filtrations(f1: Filtration, f2: Filtration, seed: int = 0) -> ModuleMap:
    """Automorphism sigma of M, stably the identity, with sigma(F2_i) = F1_i.

    Refuses modules with a projective remainder: uniqueness genuinely fails
    there (a projective module can carry radical filtrations with different
    layers).
    """
    if f1.module.key != f2.module.key:
        raise PresentationError("filtrations live on different modules")
    m = f1.module
    if has_projective_remainder(m, f1.sset, seed=seed):
        raise PresentationError(
            "module has a projective remainder; alignment is not guaranteed")
    if not (verify_s_radical(f1, seed=seed).ok and
            verify_s_radical(f2, seed=seed).ok):
        raise PresentationError("both filtrations must be S-radical")
    if len(f1) != len(f2):
        raise PresentationError("radical filtrations of equal length expected")

    fld = m.algebra.field

    def recurse(cur, chain_a, chain_b):
        if len(chain_a) <= 1 or cur.dim == 0:
            return ModuleMap.identity(cur)
        la, qa = quotient(cur, chain_a[1], name="LA")
        lb, qb = quotient(cur, chain_b[1], name="LB")
        homs = hom_space(lb, la)
        if not homs:
            raise PresentationError("no maps between top layers")
        pmaps = projective_maps(cur, la)
        cols = [h.compose(qb).flat() for h in homs] + [p.flat() for p in pmaps]
        mat = np.stack(cols).T
        sol = fld.solve(mat, qa.flat())
        if sol is None:
            raise PresentationError("layer quotients are not stably equal")
        psi0 = combine(homs, sol[: len(homs)])
        dirs = []
        for row in fld.kernel(mat):
            part = row[: len(homs)]
            if np.any(part):
                dirs.append(combine(homs, part))
        mats = [d.global_matrix() for d in dirs]
        _, coeffs, rank, exhaustive = coset_rank_maximize(
            fld, psi0.global_matrix(), mats, target_rank=la.dim, seed=seed)
        if rank < la.dim:
            if exhaustive:
                raise PresentationError("no stable iso between top layers")
            raise Inconclusive("layer iso search not exhaustive")
        psi = psi0 if not dirs else psi0.add(combine(dirs, coeffs))
        sigma1 = align_surjections(qa, psi.compose(qb), seed=seed)
        moved = [_transport_rows(sigma1, r) for r in chain_b]
        if not np.array_equal(moved[1], chain_a[1]):
            raise PresentationError("alignment failed to match the next level")
        sub, incl = submodule(cur, chain_a[1], name="M1")
        sub_a = [_rows_in_sub(incl, r) for r in chain_a[1:]]
        sub_b = [_rows_in_sub(incl, r) for r in moved[1:]]
        tau = recurse(sub, sub_a, sub_b)
        p = tau.sub(ModuleMap.identity(sub))
        if not np.any(p.flat()):
            return sigma1
        qmap = _extend_projective_map(incl, p, sub)
        sigma2 = ModuleMap.identity(cur).add(incl.compose(qmap))
        if not sigma2.is_iso():
            raise PresentationError("extension of the inner automorphism failed")
        return sigma2.compose(sigma1)

    sigma = recurse(m, f1.chain, f2.chain)
    for ra, rb in zip(f1.chain, f2.chain):
        if not np.array_equal(_transport_rows(sigma, rb), ra):
            raise PresentationError("filtration alignment verification failed")
    if np.any(stable_hom(m, m).coords(sigma.sub(ModuleMap.identity(m)))):
        raise PresentationError("aligning automorphism is not stably trivial")
    return sigma


def stable_iso_lifts(m1: Module, m2: Module, sset, seed: int = 0) -> ModuleMap:
    """Upgrade a stable isomorphism between filtrable no-remainder modules
    to a module isomorphism."""
    for m in (m1, m2):
        if is_filtrable(m, sset, seed=seed) is None:
            raise NotFiltrable(f"{m.name} is not filtrable")
        if has_projective_remainder(m, sset, seed=seed):
            raise PresentationError(f"{m.name} has a projective remainder")
    if stably_isomorphic(m1, m2, seed=seed) is None:
        raise PresentationError("modules are not stably isomorphic")
    iso = module_isomorphic(m1, m2, seed=seed)
    if iso is None:
        raise PresentationError(
            "uniqueness violated: stably isomorphic no-remainder filtrable "
            "modules must be isomorphic")
    return iso


# -- symmetric two-step uniqueness -------------------------------------------------

def _splits(mono: ModuleMap, epi: ModuleMap) -> bool:
    fld = epi.src.algebra.field
    homs = hom_space(epi.tgt, epi.src)
    if not homs:
        return epi.tgt.dim == 0
    mat = np.stack([epi.compose(h).flat() for h in homs]).T
    return fld.solve(mat, ModuleMap.identity(epi.tgt).flat()) is not None


def symmetric_two_step_swap(e1, e2, sset, seed: int = 0):
    """Automorphism of the shared middle carrying one two-step exact
    sequence onto the other; needs a symmetric algebra and sequences that
    don't both split.

    e1, e2 are (mono, epi) pairs with ends in S and the same middle.
    Returns (sigma, a, b) with sigma.mono1 = mono2.a and epi2.sigma = b.epi1.
    """
    mono1, epi1 = e1
    mono2, epi2 = e2
    m = epi1.src
    alg = m.algebra
    if not alg.symmetry().symmetric:
        raise PresentationError("algebra is not symmetric")
    if epi2.src.key != m.key:
        raise PresentationError("sequences have different middles")
    for mod in (mono1.src, epi1.tgt, mono2.src, epi2.tgt):
        if not any(s.dim == mod.dim and module_isomorphic(mod, s) is not None
                   for s in sset):
            raise PresentationError("sequence end is not in S")
    if not (is_exact_pair(mono1, epi1) and is_exact_pair(mono2, epi2)):
        raise PresentationError("inputs are not exact sequences")
    if _splits(mono1, epi1) and _splits(mono2, epi2):
        raise PresentationError("both sequences split: swap not guaranteed")
    fld = alg.field
    ends = hom_space(m, m)
    hs = hom_space(mono1.src, mono2.src)
    ht = hom_space(epi1.tgt, epi2.tgt)
    z1 = m.dim * mono1.src.dim
    z2 = epi2.tgt.dim * m.dim
    cols = []
    for e in ends:
        cols.append(np.concatenate([e.compose(mono1).flat(),
                                    epi2.compose(e).flat()]))
    for a in hs:
        cols.append(np.concatenate(
            [np.asarray(fld.neg(mono2.compose(a).flat()), dtype=np.int16),
             np.zeros(z2, dtype=np.int16)]))
    for b in ht:
        cols.append(np.concatenate(
            [np.zeros(z1, dtype=np.int16),
             np.asarray(fld.neg(b.compose(epi1).flat()), dtype=np.int16)]))
    kerrows = fld.kernel(np.stack(cols).T)
    sdirs, rows_kept = [], []
    for row in kerrows:
        if np.any(row[: len(ends)]):
            sdirs.append(combine(ends, row[: len(ends)]).global_matrix())
            rows_kept.append(row)
    base = np.zeros((m.dim, m.dim), dtype=np.int16)
    _, coeffs, rank, exhaustive = coset_rank_maximize(
        fld, base, sdirs, target_rank=m.dim, seed=seed)
    if rank < m.dim:
        if exhaustive:
            raise PresentationError("no automorphism swaps the sequences")
        raise Inconclusive("swap search not exhaustive")
    total = np.zeros(len(cols), dtype=np.int16)
    for c, row in zip(coeffs, rows_kept):
        total = np.asarray(fld.add(total, fld.scale(int(c), row)),
                           dtype=np.int16)
    sigma = combine(ends, total[: len(ends)])
    a = combine(hs, total[len(ends): len(ends) + len(hs)])
    b = combine(ht, total[len(ends) + len(hs):])
    if not (sigma.is_iso() and a.is_iso() and b.is_iso()):
        raise PresentationError("swap solution degenerated")
    if np.any(sigma.compose(mono1).sub(mono2.compose(a)).flat()):
        raise PresentationError("swap verification failed on the socle side")
    if np.any(epi2.compose(sigma).sub(b.compose(epi1)).flat()):
        raise PresentationError("swap verification failed on the top side")
    return sigma, a, b


# -- non-projective surjection adjustment ------------------------------------------

def _elementary_chain(filt: Filtration):
    """Refine an add(S) filtration into single-S steps: (rows, tags)."""
    m = filt.module
    fld = m.algebra.field
    rows_out = [_full_rows(m)]
    tags = []
    for i, lv in enumerate(filt.levels()):
        _, _, projs, layout = _sum_with_mults(filt.sset, lv.mults)
        casc = lv.witness.compose(lv.qmap)  # sub_i -> X
        k = len(layout)
        for c in range(k):
            if c + 1 < k:
                # kernel of the projection onto the first c+1 copies
                head = [projs[j].compose(casc) for j in range(c + 1)]
                mats = np.concatenate([h.global_matrix() for h in head],
                                      axis=0).astype(np.int16)
                ker_rows = fld.kernel(mats)
                rows_out.append(_transport_rows(lv.incl, ker_rows))
            else:
                rows_out.append(filt.chain[i + 1])
            tags.append(layout[c][0])
    return rows_out, tags


def adjust_to_surjection(f: ModuleMap, filt: Filtration, seed: int = 0):
    """g stably equal to f, surjective, with filtrable kernel.

    Peels one S-layer of the filtration at a time, correcting by projective
    maps.  Returns (g, kernel module, kernel inclusion, kernel Filtration).
    """
    m, s = f.src, f.tgt
    sset = filt.sset
    if m.key != filt.module.key:
        raise PresentationError("filtration is for a different module")
    if not any(t.key == s.key for t in sset):
        raise PresentationError("target is not a member of S")
    if stable_hom(m, s).is_projective_map(f):
        raise PresentationError("map is projective; no surjective adjustment")
    rows, tags = _elementary_chain(filt)

    def recurse(cur, rows_c, tags_c, fc):
        fld = cur.algebra.field
        sh = stable_hom(cur, s)
        if len(tags_c) == 1:
            g = sh.rep(sh.coords(fc))
            if not g.is_surjective_map():
                raise PresentationError("base-case representative not onto")
            return g, [_empty_rows(cur)], []
        sub, alpha = submodule(cur, rows_c[1], name="N")
        rows_n = [_rows_in_sub(alpha, r) for r in rows_c[1:]]
        t = sset[tags_c[0]]
        fa = fc.compose(alpha)
        if stable_hom(sub, s).is_projective_map(fa):
            lq, qm = quotient(cur, rows_c[1], name="T")
            wit = module_isomorphic(lq, t)
            if wit is None:
                raise PresentationError("top layer fails to match its tag")
            beta = wit.compose(qm)
            pmaps = projective_maps(cur, s)
            ghoms = hom_space(t, s)
            if not ghoms:
                raise PresentationError(
                    "no maps from the top layer to the target")
            cols = [p.flat() for p in pmaps] + \
                   [g.compose(beta).flat() for g in ghoms]
            sol = fld.solve(np.stack(cols).T, fc.flat())
            if sol is None:
                raise PresentationError("projective-restriction split failed")
            gpart = combine(ghoms, sol[len(pmaps):])
            if not gpart.is_iso():
                raise PresentationError("layer-to-target map must be an iso")
            g = gpart.compose(beta)
            return g, rows_c[1:], tags_c[1:]
        gn, krows_n, ktags_n = recurse(sub, rows_n, tags_c[1:], fa)
        p = _extend_projective_map(alpha, gn.sub(fa), s)
        g = fc.add(p)
        if not g.is_surjective_map():
            raise PresentationError("adjusted map is not surjective")
        k, incl = kernel(g)
        out_rows = [_transport_rows(incl, _full_rows(k))]
        for r in krows_n:
            out_rows.append(_transport_rows(alpha, r))
        return g, out_rows, [tags_c[0]] + ktags_n

    g, krows, ktags = recurse(m, rows, tags, f)
    if np.any(stable_hom(m, s).coords(g.sub(f))):
        raise PresentationError("adjustment changed the stable class")
    kmod, kincl = submodule(m, krows[0], name="ker_adj")
    kchain = [_rows_in_sub(kincl, r) for r in krows]
    kfilt = Filtration(kmod, sset, kchain)
    return g, kmod, kincl, kfilt


# -- padding and hypothesis checks --------------------------------------------------

def padding_search(m: Module, sset, cap: int | None = None, seed: int = 0):
    """Projective P with m + P filtrable, by increasing dim P.

    Raises NotFiltrable when a vertex supported in m lies outside the
    support of S (no padding can ever help), Undecided past the cap
    (default 4 dim A).  Returns (P, multiplicity vector, Filtration).
    """
    alg = m.algebra
    if cap is None:
        cap = 4 * alg.dim
    for v in range(alg.nvertices):
        if m.dims[v] and all(s.dims[v] == 0 for s in sset):
            raise NotFiltrable(
                f"vertex {alg.vertices[v]} is outside the support of S")
    pdims = [alg.projective(v).dim for v in range(alg.nvertices)]
    cands = []
    for mv in itertools.product(*(range(cap // d + 1) for d in pdims)):
        total = sum(c * d for c, d in zip(mv, pdims))
        if total <= cap:
            cands.append((total, mv))
    cands.sort()
    undecided = False
    for total, mv in cands:
        parts = [m] + [alg.projective(v) for v in range(alg.nvertices)
                       for _ in range(mv[v])]
        padded = direct_sum(parts)[0] if len(parts) > 1 else m
        try:
            filt = is_filtrable(padded, sset, seed=seed)
        except Undecided:
            undecided = True
            continue
        if filt is not None:
            pad = direct_sum(parts[1:])[0] if len(parts) > 1 else \
                zero_module(alg)
            return pad, mv, filt
    raise Undecided("padding search exhausted its cap"
                    + (" with undecided branches" if undecided else ""))


class HypReport:
    """Combined report: simple-set conditions plus per-module padding."""

    __slots__ = ("simple_report", "entries", "ok")

    def __init__(self, simple_report, entries, ok):
        self.simple_report = simple_report
        self.entries = entries
        self.ok = ok

    def __bool__(self):
        return self.ok


def hyp_check(algebra, sset, extra=(), cap: int | None = None,
              seed: int = 0) -> HypReport:
    """Check the standing hypotheses on (A, S).

    Runs the stable-Hom pattern test on S, then a padding search for every
    simple module, every first syzygy of a member, and any extra modules:
    each must become filtrable after adding some projective.
    """
    from .stable import check_simple_set, syzygy

    srep = check_simple_set(algebra, sset, seed=seed)
    mods = [algebra.simple(v) for v in range(algebra.nvertices)]
    mods += [syzygy(s, 1, seed=seed) for s in sset]
    mods += list(extra)
    entries = []
    ok = srep.ok
    for mod in mods:
        try:
            pad, mv, _ = padding_search(mod, sset, cap=cap, seed=seed)
            entries.append({"module": mod.name, "status": "ok",
                            "padding": mv, "padding_dim": pad.dim})
        except NotFiltrable as e:
            entries.append({"module": mod.name, "status": "fail",
                            "reason": str(e)})
            ok = False
        except Undecided as e:
            entries.append({"module": mod.name, "status": "undecided",
                            "reason": str(e)})
            ok = False
    return HypReport(srep, entries, ok)
