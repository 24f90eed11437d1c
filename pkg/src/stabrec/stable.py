"""Stable module category: projective maps, stable Hom, syzygies, Nakayama.

Everything here assumes the algebra is self-injective; operations refuse to
run otherwise, since the stable category is only triangulated in that case.
"""

from __future__ import annotations

import numpy as np

from .errors import NotSelfInjective, PresentationError
from . import modules as _mod
from .modules import (
    Module,
    ModuleMap,
    cover_kernel,
    decompose,
    direct_sum,
    flat_to_map,
    hom_space,
    hull_cokernel,
    injective_hull,
    is_projective,
    module_isomorphic,
    zero_module,
)


def _gate(algebra) -> None:
    rep = algebra.self_injectivity()
    if not rep.ok:
        raise NotSelfInjective(rep.witness)


def projective_maps(m: Module, n: Module) -> list[ModuleMap]:
    """Basis of the subspace of Hom(m, n) of maps factoring through a
    projective module.

    Every such map factors through the injective hull of m: injectives are
    projective here, and the hull embedding is a left factor of any map into
    a projective-injective.  The basis is the canonical reduced one.
    """
    _gate(m.algebra)
    if m.dim == 0 or n.dim == 0:
        return []
    fld = m.algebra.field
    _, mono = injective_hull(m)
    homs = hom_space(mono.tgt, n)
    if not homs:
        return []
    flats = np.stack([g.compose(mono).flat() for g in homs])
    rows = fld.row_space(flats)
    return [flat_to_map(m, n, r) for r in rows]


class StableHom:
    """Hom(m, n) together with its projective subspace and a choice of coset
    representatives completing it to a basis."""

    __slots__ = ("src", "tgt", "hom", "proj", "reps", "_basis_t")

    def __init__(self, src: Module, tgt: Module, hom, proj, reps):
        self.src = src
        self.tgt = tgt
        self.hom = hom
        self.proj = proj
        self.reps = reps
        rows = [p.flat() for p in proj] + [r.flat() for r in reps]
        w = src.dim * tgt.dim
        self._basis_t = (np.stack(rows).T if rows
                         else np.zeros((w, 0), dtype=np.int16))

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coords(self, f: ModuleMap) -> np.ndarray:
        """Coordinates of the stable class of f in the representative basis."""
        fld = self.src.algebra.field
        if self._basis_t.shape[1] == 0:
            if np.any(f.flat()):
                raise PresentationError("map outside the Hom space")
            return np.zeros(0, dtype=np.int16)
        sol = fld.solve(self._basis_t, f.flat())
        if sol is None:
            raise PresentationError("map outside the Hom space")
        return sol[len(self.proj):]

    def is_projective_map(self, f: ModuleMap) -> bool:
        return not np.any(self.coords(f))

    def rep(self, coords) -> ModuleMap:
        """A module map whose stable class has the given coordinates."""
        if self.dim == 0:
            return ModuleMap.zero(self.src, self.tgt)
        return _mod.combine(self.reps, np.asarray(coords, dtype=np.int16))


def stable_hom(m: Module, n: Module) -> StableHom:
    _gate(m.algebra)
    alg = m.algebra
    cache = getattr(alg, "_stab_cache", None)
    if cache is None:
        cache = alg._stab_cache = {}
    key = (m.key, n.key)
    if key in cache:
        return cache[key]
    fld = alg.field
    hom = hom_space(m, n)
    proj = projective_maps(m, n)
    reps: list[ModuleMap] = []
    if hom:
        stack = ([p.flat() for p in proj]
                 if proj else [np.zeros_like(hom[0].flat())])
        cur = fld.row_space(np.stack(stack))
        rank = cur.shape[0]
        for h in hom:
            trial = fld.row_space(np.concatenate([cur, h.flat()[None, :]]))
            if trial.shape[0] > rank:
                reps.append(h)
                cur, rank = trial, trial.shape[0]
    sh = StableHom(m, n, hom, proj, reps)
    cache[key] = sh
    return sh


def stable_end_dim(m: Module) -> int:
    return stable_hom(m, m).dim


def stable_core(m: Module, seed: int = 0):
    """Largest direct summand of m without projective indecomposables.

    Returns (core, kept, dropped) where kept/dropped are the Summand records
    of the decomposition, dropped being the projective ones.
    """
    _gate(m.algebra)
    pieces = decompose(m, seed=seed)
    kept = [p for p in pieces if not is_projective(p.module)]
    dropped = [p for p in pieces if is_projective(p.module)]
    if not kept:
        return zero_module(m.algebra), kept, dropped
    core, _, _ = direct_sum([p.module for p in kept], name=f"core({m.name})")
    return core, kept, dropped


def stably_isomorphic(m: Module, n: Module, seed: int = 0) -> ModuleMap | None:
    """Iso witness between the projective-free cores, or None.

    DecompositionInconclusive from the splitting engine propagates; a None
    is a certified negative.
    """
    _gate(m.algebra)
    core_m, _, _ = stable_core(m, seed=seed)
    core_n, _, _ = stable_core(n, seed=seed)
    if core_m.dim == 0 and core_n.dim == 0:
        return ModuleMap.identity(core_m)
    return module_isomorphic(core_m, core_n, seed=seed)


def syzygy(m: Module, d: int = 1, seed: int = 0) -> Module:
    """Omega^d m for d >= 0, cosyzygy for d < 0, projective summands
    stripped at each step."""
    _gate(m.algebra)
    cur, _, _ = stable_core(m, seed=seed)
    while d > 0:
        k, _, _, _ = cover_kernel(cur)
        cur, _, _ = stable_core(k, seed=seed)
        d -= 1
    while d < 0:
        c, _, _, _ = hull_cokernel(cur)
        cur, _, _ = stable_core(c, seed=seed)
        d += 1
    return cur


# -- Nakayama functor ---------------------------------------------------------

def _regular_module(alg):
    """The left regular module with its right-action bookkeeping."""
    cached = getattr(alg, "_regular", None)
    if cached is not None:
        return cached
    projs = [alg.projective(v) for v in range(alg.nvertices)]
    total, injs, projections = direct_sum(projs, name="A")
    right = {}
    for v in range(alg.nvertices):
        right[("e", v)] = injs[v].compose(projections[v])
    for a, (_, u, w) in enumerate(alg.arrows):
        rm = alg.right_mult(alg.word_index[(a,)])
        # x . a is zero off the P_{tgt a} component and lands in P_{src a}
        right[("a", a)] = injs[u].compose(rm).compose(projections[w])
    alg._regular = (total, right)
    return alg._regular


def nakayama_module(m: Module) -> Module:
    """nu(m) = D Hom(m, A) as a left module.

    Hom(m, A) is a right module by postcomposing with right multiplications;
    its dual is split into vertex spaces by the transposed idempotent actions.
    """
    _gate(m.algebra)
    alg = m.algebra
    fld = alg.field
    regular, right = _regular_module(alg)
    homs = hom_space(m, regular)
    h = len(homs)
    if h == 0:
        return zero_module(alg, name=f"nu({m.name})")
    flats_t = np.stack([f.flat() for f in homs]).T

    def action(rmap: ModuleMap) -> np.ndarray:
        cols = []
        for f in homs:
            sol = fld.solve_matrix(flats_t, rmap.compose(f).flat()[:, None])
            cols.append(sol[:, 0])
        return np.stack(cols, axis=1)

    # dual coordinates: y acts as rho(y)^T, so e_v picks out the row space
    # of rho(e_v) and the arrow action of a is right multiplication by rho(a)
    rho_e = [action(right[("e", v)]) for v in range(alg.nvertices)]
    rho_a = [action(right[("a", a)]) for a in range(len(alg.arrows))]
    bases = [fld.row_space(r) for r in rho_e]
    dims = [b.shape[0] for b in bases]
    mats = []
    for a, (_, u, w) in enumerate(alg.arrows):
        img = fld.matmul(bases[u], rho_a[a])
        mats.append(fld.solve_matrix(bases[w].T, img.T).astype(np.int16))
    out = Module(alg, dims, mats, name=f"nu({m.name})")
    if out.dim != m.dim:
        raise PresentationError("Nakayama image has wrong dimension")
    return out


# -- simple-set certification --------------------------------------------------

class SimpleSetReport:
    """Result of the delta-pattern certification of a candidate set."""

    __slots__ = ("ok", "mods", "pattern", "violations")

    def __init__(self, ok, mods, pattern, violations):
        self.ok = ok
        self.mods = mods
        self.pattern = pattern
        self.violations = violations

    def __bool__(self):
        return self.ok

    def __repr__(self):
        tag = "ok" if self.ok else "; ".join(self.violations)
        return f"SimpleSetReport({tag})"


def check_simple_set(algebra, mods: list[Module], seed: int = 0) -> SimpleSetReport:
    """Certify that stable Hom between the candidates follows the identity
    pattern and that each is indecomposable non-projective."""
    _gate(algebra)
    violations = []
    for s in mods:
        if s.dim == 0:
            violations.append(f"{s.name} is zero")
            continue
        if is_projective(s):
            violations.append(f"{s.name} is projective")
        pieces = decompose(s, seed=seed)
        if len(pieces) != 1:
            violations.append(f"{s.name} is decomposable")
    n = len(mods)
    pattern = np.zeros((n, n), dtype=np.int64)
    for i, s in enumerate(mods):
        for j, t in enumerate(mods):
            d = stable_hom(s, t).dim
            pattern[i, j] = d
            want = 1 if i == j else 0
            if d != want:
                violations.append(
                    f"stable Hom({s.name},{t.name}) has dim {d}, want {want}")
    return SimpleSetReport(not violations, list(mods), pattern, violations)
