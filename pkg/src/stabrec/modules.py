"""Finite-dimensional left modules over a bound quiver algebra.

A module is a representation of the quiver: one GF(q) vector space per
vertex plus one matrix per arrow, acting on column vectors, satisfying the
relations of the algebra.  A path (a_1, ..., a_l), written first-applied
first, acts by the composite A_{a_l} ... A_{a_1}.

Submodules and subspaces are passed around as row matrices in the global
coordinates of the ambient module (vertex components concatenated in vertex
order).  All computations are exact; bounded searches that fail raise
Inconclusive instead of returning a guess.
"""

from __future__ import annotations

import numpy as np

from stabrec.errors import DecompositionInconclusive, PresentationError
from stabrec.gf import coset_rank_maximize


class Module:
    """A quiver representation.

    Attributes:
        algebra: the bound quiver algebra acted by.
        dims: tuple of vertex dimensions.
        mats: tuple of arrow action matrices, mats[a] with shape
            (dims[tgt(a)], dims[src(a)]).
        name: display label, not used in any computation.
    """

    __slots__ = ("algebra", "dims", "mats", "name", "offsets", "dim", "_key")

    def __init__(self, algebra, dims, mats, name: str = "M", check: bool = True):
        self.algebra = algebra
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != algebra.nvertices:
            raise PresentationError("dims length must equal number of vertices")
        f = algebra.field
        fixed = []
        for a, (_, src, tgt) in enumerate(algebra.arrows):
            m = np.asarray(mats[a], dtype=np.int16).reshape(self.dims[tgt], self.dims[src])
            fixed.append(m)
        self.mats = tuple(fixed)
        self.name = name
        self.offsets = tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.dims)]))
        self.dim = self.offsets[-1]
        self._key = None
        if check:
            algebra.check_relations(self)
        if any(m.size and int(m.max()) >= f.q for m in self.mats):
            raise PresentationError("matrix entries out of field range")

    def __repr__(self):
        return f"Module({self.name}, dims={self.dims})"

    @property
    def key(self) -> bytes:
        """Content key: equal keys imply equal representations on the nose."""
        if self._key is None:
            parts = [np.asarray(self.dims, dtype=np.int64).tobytes()]
            parts.extend(m.tobytes() for m in self.mats)
            self._key = b"|".join(parts)
        return self._key

    def slice_of(self, rows: np.ndarray, v: int) -> np.ndarray:
        """Vertex-v columns of a global row matrix."""
        return rows[:, self.offsets[v]: self.offsets[v + 1]]

    def word_action(self, word: tuple[int, ...]) -> np.ndarray:
        """Action matrix of a path, first arrow applied first."""
        A = self.algebra
        if not word:
            raise ValueError("use vertex_projection for idempotents")
        src = A.arrows[word[0]][1]
        m = np.eye(self.dims[src], dtype=np.int16)
        for a in word:
            m = A.field.matmul(self.mats[a], m)
        return m

    def global_vec(self, v: int, local: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.int16)
        out[self.offsets[v]: self.offsets[v + 1]] = local
        return out

    def is_zero(self) -> bool:
        return self.dim == 0


class ModuleMap:
    """A homomorphism of representations, stored as per-vertex blocks."""

    __slots__ = ("src", "tgt", "blocks")

    def __init__(self, src: Module, tgt: Module, blocks, check: bool = False):
        self.src = src
        self.tgt = tgt
        self.blocks = tuple(
            np.asarray(b, dtype=np.int16).reshape(tgt.dims[v], src.dims[v])
            for v, b in enumerate(blocks)
        )
        if check and not self.is_map():
            raise PresentationError("blocks do not commute with the arrow actions")

    @staticmethod
    def identity(m: Module) -> "ModuleMap":
        return ModuleMap(m, m, [np.eye(d, dtype=np.int16) for d in m.dims])

    @staticmethod
    def zero(src: Module, tgt: Module) -> "ModuleMap":
        return ModuleMap(src, tgt, [np.zeros((tgt.dims[v], src.dims[v]), dtype=np.int16)
                                    for v in range(len(src.dims))])

    def is_map(self) -> bool:
        f = self.src.algebra.field
        for a, (_, u, v) in enumerate(self.src.algebra.arrows):
            lhs = f.matmul(self.tgt.mats[a], self.blocks[u])
            rhs = f.matmul(self.blocks[v], self.src.mats[a])
            if not np.array_equal(lhs, rhs):
                return False
        return True

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self after other."""
        if other.tgt is not self.src and other.tgt.key != self.src.key:
            raise PresentationError("composition mismatch")
        f = self.src.algebra.field
        return ModuleMap(other.src, self.tgt,
                         [f.matmul(self.blocks[v], other.blocks[v])
                          for v in range(len(self.blocks))])

    def add(self, other: "ModuleMap") -> "ModuleMap":
        f = self.src.algebra.field
        return ModuleMap(self.src, self.tgt,
                         [f.add_mat(a, b) for a, b in zip(self.blocks, other.blocks)])

    def sub(self, other: "ModuleMap") -> "ModuleMap":
        f = self.src.algebra.field
        return ModuleMap(self.src, self.tgt,
                         [f.sub_mat(a, b) for a, b in zip(self.blocks, other.blocks)])

    def scale(self, c: int) -> "ModuleMap":
        f = self.src.algebra.field
        return ModuleMap(self.src, self.tgt, [f.scale(c, b) for b in self.blocks])

    def global_matrix(self) -> np.ndarray:
        m = np.zeros((self.tgt.dim, self.src.dim), dtype=np.int16)
        for v in range(len(self.blocks)):
            m[self.tgt.offsets[v]: self.tgt.offsets[v + 1],
              self.src.offsets[v]: self.src.offsets[v + 1]] = self.blocks[v]
        return m

    def flat(self) -> np.ndarray:
        """Coordinates in Hom(src, tgt) as one vector (vertex blocks in order,
        row-major)."""
        if not self.blocks:
            return np.zeros(0, dtype=np.int16)
        return np.concatenate([b.reshape(-1) for b in self.blocks])

    def is_zero(self) -> bool:
        return not any(np.any(b) for b in self.blocks)

    def is_iso(self) -> bool:
        f = self.src.algebra.field
        return self.src.dims == self.tgt.dims and all(
            f.is_invertible(b) if b.size else True for b in self.blocks)

    def inverse(self) -> "ModuleMap":
        f = self.src.algebra.field
        inv = []
        for b in self.blocks:
            bi = f.matinv(b)
            if bi is None:
                raise PresentationError("map is not invertible")
            inv.append(bi)
        return ModuleMap(self.tgt, self.src, inv)

    def rank(self) -> int:
        f = self.src.algebra.field
        return sum(f.rank(b) for b in self.blocks)

    def is_injective_map(self) -> bool:
        return self.rank() == self.src.dim

    def is_surjective_map(self) -> bool:
        return self.rank() == self.tgt.dim

def factor_through_surjection(epi: ModuleMap, f: ModuleMap) -> ModuleMap:
    """The unique h with h epi = f, for epi: X ->> W surjective and
    ker(epi) contained in ker(f)."""
    fld = epi.src.algebra.field
    blocks = []
    for v in range(len(epi.blocks)):
        sol = fld.solve_matrix(epi.blocks[v].T, f.blocks[v].T)
        if sol is None:
            raise PresentationError("map does not kill the kernel of the surjection")
        blocks.append(sol.T)
    return ModuleMap(epi.tgt, f.tgt, blocks)


def factor_through_injection(mono: ModuleMap, f: ModuleMap) -> ModuleMap:
    """The unique h with mono h = f, for mono: W -> X injective and
    im(f) contained in im(mono)."""
    fld = mono.src.algebra.field
    blocks = []
    for v in range(len(mono.blocks)):
        sol = fld.solve_matrix(mono.blocks[v], f.blocks[v])
        if sol is None:
            raise PresentationError("image does not land in the submodule")
        blocks.append(sol)
    return ModuleMap(f.src, mono.src, blocks)


def combine(maps: list[ModuleMap], coeffs) -> ModuleMap:
    """Linear combination of parallel maps."""
    if not maps:
        raise PresentationError("cannot combine an empty list of maps")
    out = maps[0].scale(int(coeffs[0]))
    for h, c in zip(maps[1:], coeffs[1:]):
        if c:
            out = out.add(h.scale(int(c)))
    return out


def lift_through_surjection(epi: ModuleMap, f: ModuleMap) -> ModuleMap:
    """Some L with epi L = f, or raise.  Always solvable when f.src is
    projective and epi is surjective."""
    fld = epi.src.algebra.field
    homs = hom_space(f.src, epi.src)
    if not homs:
        if f.is_zero():
            return ModuleMap.zero(f.src, epi.src)
        raise PresentationError("no lift exists: Hom is zero")
    imgs = np.stack([epi.compose(h).flat() for h in homs])
    c = fld.solve(imgs.T, f.flat())
    if c is None:
        raise PresentationError("map does not lift through the surjection")
    return combine(homs, c)


def extend_along_injection(mono: ModuleMap, f: ModuleMap) -> ModuleMap:
    """Some g with g mono = f, or raise.  Always solvable when f.tgt is
    injective and mono is injective."""
    fld = mono.src.algebra.field
    homs = hom_space(mono.tgt, f.tgt)
    if not homs:
        if f.is_zero():
            return ModuleMap.zero(mono.tgt, f.tgt)
        raise PresentationError("no extension exists: Hom is zero")
    imgs = np.stack([h.compose(mono).flat() for h in homs])
    c = fld.solve(imgs.T, f.flat())
    if c is None:
        raise PresentationError("map does not extend along the injection")
    return combine(homs, c)


def flat_to_map(src: Module, tgt: Module, vec: np.ndarray) -> ModuleMap:
    blocks = []
    pos = 0
    for v in range(len(src.dims)):
        n = tgt.dims[v] * src.dims[v]
        blocks.append(np.asarray(vec[pos: pos + n], dtype=np.int16).reshape(tgt.dims[v], src.dims[v]))
        pos += n
    return ModuleMap(src, tgt, blocks)


def hom_space(m: Module, n: Module) -> list[ModuleMap]:
    """Canonical basis of Hom_A(m, n).

    Solves the intertwining system N_a F_u = F_v M_a for every arrow
    a: u -> v.  The result is the reduced-echelon basis of the solution
    space in flat coordinates, so it is deterministic.
    """
    cache = m.algebra._hom_cache
    ck = (m.key, n.key)
    hit = cache.get(ck)
    if hit is not None:
        return [flat_to_map(m, n, vec) for vec in hit]
    f = m.algebra.field
    nv = len(m.dims)
    sizes = [n.dims[v] * m.dims[v] for v in range(nv)]
    total = sum(sizes)
    if total == 0:
        cache[ck] = []
        return []
    starts = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    rows = []
    for a, (_, u, v) in enumerate(m.algebra.arrows):
        r = n.dims[v] * m.dims[u]
        if r == 0:
            continue
        block = np.zeros((r, total), dtype=np.int16)
        # vec(N_a F_u) = (N_a kron I) vec(F_u), row-major vec
        lhs = f.kron(n.mats[a], np.eye(m.dims[u], dtype=np.int16))
        block[:, starts[u]: starts[u + 1]] = lhs
        # vec(F_v M_a) = (I kron M_a^T) vec(F_v)
        rhs = f.kron(np.eye(n.dims[v], dtype=np.int16), m.mats[a].T)
        block[:, starts[v]: starts[v + 1]] = f.sub_mat(block[:, starts[v]: starts[v + 1]], rhs)
        rows.append(block)
    system = np.concatenate(rows, axis=0) if rows else np.zeros((0, total), dtype=np.int16)
    basis = f.kernel(system)
    cache[ck] = [basis[i].copy() for i in range(basis.shape[0])]
    return [flat_to_map(m, n, basis[i]) for i in range(basis.shape[0])]


def end_space(m: Module) -> list[ModuleMap]:
    return hom_space(m, m)


def direct_sum(mods: list[Module], name: str | None = None):
    """Direct sum with canonical injections and projections.

    Returns:
        (sum module, [injections], [projections]).
    """
    if not mods:
        raise PresentationError("direct_sum of an empty list; pass the algebra's zero module instead")
    A = mods[0].algebra
    nv = A.nvertices
    dims = tuple(sum(m.dims[v] for m in mods) for v in range(nv))
    mats = []
    for a in range(len(A.arrows)):
        _, src, tgt = A.arrows[a]
        blocks = [m.mats[a] for m in mods]
        big = np.zeros((dims[tgt], dims[src]), dtype=np.int16)
        r = c = 0
        for m in mods:
            big[r: r + m.dims[tgt], c: c + m.dims[src]] = m.mats[a]
            r += m.dims[tgt]
            c += m.dims[src]
        mats.append(big)
    total = Module(A, dims, mats, name=name or "(" + " + ".join(m.name for m in mods) + ")",
                   check=False)
    injs, projs = [], []
    row_off = [0] * nv
    for m in mods:
        iblocks, pblocks = [], []
        for v in range(nv):
            i = np.zeros((dims[v], m.dims[v]), dtype=np.int16)
            p = np.zeros((m.dims[v], dims[v]), dtype=np.int16)
            o = row_off[v]
            i[o: o + m.dims[v], :] = np.eye(m.dims[v], dtype=np.int16)
            p[:, o: o + m.dims[v]] = np.eye(m.dims[v], dtype=np.int16)
            iblocks.append(i)
            pblocks.append(p)
            row_off[v] = o + m.dims[v]
        injs.append(ModuleMap(m, total, iblocks))
        projs.append(ModuleMap(total, m, pblocks))
    return total, injs, projs


def zero_module(algebra, name: str = "0") -> Module:
    nv = algebra.nvertices
    return Module(algebra, (0,) * nv,
                  [np.zeros((0, 0), dtype=np.int16) for _ in algebra.arrows],
                  name=name, check=False)


def submodule_closure(m: Module, rows: np.ndarray) -> np.ndarray:
    """Global row basis (canonical per-vertex echelon) of the submodule
    generated by the given global row vectors."""
    f = m.algebra.field
    nv = len(m.dims)
    per_vertex = [m.slice_of(np.atleast_2d(rows), v) if rows.size else
                  np.zeros((0, m.dims[v]), dtype=np.int16) for v in range(nv)]
    spaces = [f.row_space(p) for p in per_vertex]
    changed = True
    while changed:
        changed = False
        for a, (_, u, v) in enumerate(m.algebra.arrows):
            if spaces[u].shape[0] == 0 or m.dims[v] == 0:
                continue
            img = f.matmul(m.mats[a], spaces[u].T).T
            combined = f.row_space(np.concatenate([spaces[v], img], axis=0))
            if combined.shape[0] != spaces[v].shape[0]:
                spaces[v] = combined
                changed = True
    out = []
    for v in range(nv):
        block = np.zeros((spaces[v].shape[0], m.dim), dtype=np.int16)
        block[:, m.offsets[v]: m.offsets[v + 1]] = spaces[v]
        out.append(block)
    return np.concatenate(out, axis=0) if out else np.zeros((0, m.dim), dtype=np.int16)


def _per_vertex_rows(m: Module, global_rows: np.ndarray) -> list[np.ndarray]:
    """Split a vertex-homogeneous global row basis into per-vertex bases.

    Requires every row to be supported at a single vertex (always true for
    the canonical bases produced by submodule_closure and kernel/image)."""
    f = m.algebra.field
    nv = len(m.dims)
    spaces = [[] for _ in range(nv)]
    for row in np.atleast_2d(global_rows):
        support = [v for v in range(nv) if np.any(m.slice_of(row[None, :], v))]
        if len(support) > 1:
            raise PresentationError("row basis is not vertex-homogeneous")
        if support:
            spaces[support[0]].append(m.slice_of(row[None, :], v=support[0])[0])
    return [f.row_space(np.array(s, dtype=np.int16).reshape(len(s), m.dims[v]))
            if s else np.zeros((0, m.dims[v]), dtype=np.int16)
            for v, s in enumerate(spaces)]


def submodule(m: Module, rows: np.ndarray, name: str = "sub") -> tuple[Module, ModuleMap]:
    """The submodule generated by global row vectors, with its inclusion."""
    f = m.algebra.field
    closed = submodule_closure(m, np.atleast_2d(rows)) if np.atleast_2d(rows).size else \
        np.zeros((0, m.dim), dtype=np.int16)
    spaces = _per_vertex_rows(m, closed) if closed.size else \
        [np.zeros((0, m.dims[v]), dtype=np.int16) for v in range(len(m.dims))]
    return _sub_from_spaces(m, spaces, name)


def _sub_from_spaces(m: Module, spaces: list[np.ndarray], name: str) -> tuple[Module, ModuleMap]:
    """Build the submodule on given per-vertex row bases (assumed invariant)."""
    f = m.algebra.field
    dims = tuple(s.shape[0] for s in spaces)
    mats = []
    for a, (_, u, v) in enumerate(m.algebra.arrows):
        if dims[u] == 0 or dims[v] == 0:
            mats.append(np.zeros((dims[v], dims[u]), dtype=np.int16))
            continue
        img = f.matmul(m.mats[a], spaces[u].T)  # columns: images of basis vectors
        coords = f.solve_matrix(spaces[v].T, img)
        if coords is None:
            raise PresentationError("row spaces are not arrow-invariant")
        mats.append(coords)
    sub = Module(m.algebra, dims, mats, name=name, check=False)
    incl = ModuleMap(sub, m, [spaces[v].T for v in range(len(dims))])
    return sub, incl


def quotient(m: Module, rows: np.ndarray, name: str = "quot") -> tuple[Module, ModuleMap]:
    """The quotient by the submodule generated by the rows, with projection."""
    f = m.algebra.field
    closed = submodule_closure(m, np.atleast_2d(rows)) if np.atleast_2d(rows).size else \
        np.zeros((0, m.dim), dtype=np.int16)
    spaces = _per_vertex_rows(m, closed) if closed.size else \
        [np.zeros((0, m.dims[v]), dtype=np.int16) for v in range(len(m.dims))]
    projs, dims = [], []
    for v in range(len(m.dims)):
        r, piv = f.rref(spaces[v])
        r = r[: len(piv)]
        free = [c for c in range(m.dims[v]) if c not in piv]
        sel = np.zeros((len(piv), m.dims[v]), dtype=np.int16)
        for i, p in enumerate(piv):
            sel[i, p] = 1
        reducer = f.sub_mat(np.eye(m.dims[v], dtype=np.int16), f.matmul(r.T, sel))
        projs.append(reducer[free, :] if free else np.zeros((0, m.dims[v]), dtype=np.int16))
        dims.append(len(free))
    # quotient actions through an explicit section (free coordinates
    # embedded with pivot coordinates zero)
    sections = []
    for v in range(len(m.dims)):
        r, piv = f.rref(spaces[v])
        free = [c for c in range(m.dims[v]) if c not in piv]
        s = np.zeros((m.dims[v], dims[v]), dtype=np.int16)
        for i, c in enumerate(free):
            s[c, i] = 1
        sections.append(s)
    mats = []
    for a, (_, u, v) in enumerate(m.algebra.arrows):
        mats.append(f.matmul(projs[v], f.matmul(m.mats[a], sections[u])))
    quot = Module(m.algebra, dims, mats, name=name, check=False)
    proj = ModuleMap(m, quot, projs)
    return quot, proj


def kernel(fmap: ModuleMap, name: str = "ker") -> tuple[Module, ModuleMap]:
    """Kernel submodule with inclusion."""
    f = fmap.src.algebra.field
    spaces = [f.kernel(b) for b in fmap.blocks]
    return _sub_from_spaces(fmap.src, spaces, name)


def image(fmap: ModuleMap, name: str = "im") -> tuple[Module, ModuleMap]:
    """Image submodule of the target, with inclusion."""
    f = fmap.src.algebra.field
    spaces = [f.row_space(b.T) for b in fmap.blocks]
    return _sub_from_spaces(fmap.tgt, spaces, name)


def cokernel(fmap: ModuleMap, name: str = "coker") -> tuple[Module, ModuleMap]:
    """Cokernel with projection from the target."""
    m = fmap.tgt
    rows = []
    f = m.algebra.field
    for v in range(len(m.dims)):
        block = np.zeros((fmap.blocks[v].shape[1], m.dim), dtype=np.int16)
        block[:, m.offsets[v]: m.offsets[v + 1]] = fmap.blocks[v].T
        rows.append(block)
    allrows = np.concatenate(rows, axis=0) if rows else np.zeros((0, m.dim), dtype=np.int16)
    return quotient(m, allrows, name=name)


def radical(m: Module) -> list[np.ndarray]:
    """Per-vertex row bases of rad(A) m = sum of arrow images."""
    f = m.algebra.field
    nv = len(m.dims)
    spaces = [np.zeros((0, m.dims[v]), dtype=np.int16) for v in range(nv)]
    for a, (_, u, v) in enumerate(m.algebra.arrows):
        img = m.mats[a].T
        spaces[v] = f.row_space(np.concatenate([spaces[v], img], axis=0))
    return spaces


def radical_submodule(m: Module) -> tuple[Module, ModuleMap]:
    return _sub_from_spaces(m, radical(m), name=f"rad({m.name})")


def top_dims(m: Module) -> tuple[int, ...]:
    rad = radical(m)
    return tuple(m.dims[v] - rad[v].shape[0] for v in range(len(m.dims)))


def socle_dims(m: Module) -> tuple[int, ...]:
    return tuple(s.shape[0] for s in socle(m))


def socle(m: Module) -> list[np.ndarray]:
    """Per-vertex row bases of the socle (joint kernel of all arrows out)."""
    f = m.algebra.field
    nv = len(m.dims)
    out = []
    for v in range(nv):
        stacked = [m.mats[a] for a, (_, u, _t) in enumerate(m.algebra.arrows) if u == v]
        if not stacked:
            out.append(np.eye(m.dims[v], dtype=np.int16))
            continue
        sys = np.concatenate(stacked, axis=0)
        out.append(f.kernel(sys))
    return out


def radical_series(m: Module) -> list[list[np.ndarray]]:
    """Per-vertex bases of rad^i m for i = 0, 1, ... until zero."""
    f = m.algebra.field
    cur = [np.eye(d, dtype=np.int16) for d in m.dims]
    series = [cur]
    while any(s.shape[0] for s in cur):
        nxt = [np.zeros((0, m.dims[v]), dtype=np.int16) for v in range(len(m.dims))]
        for a, (_, u, v) in enumerate(m.algebra.arrows):
            if cur[u].shape[0] == 0:
                continue
            img = f.matmul(m.mats[a], cur[u].T).T
            nxt[v] = f.row_space(np.concatenate([nxt[v], img], axis=0))
        if [s.shape[0] for s in nxt] == [s.shape[0] for s in cur]:
            raise PresentationError("radical series does not terminate; algebra not admissible")
        series.append(nxt)
        cur = nxt
    return series


def loewy_length(m: Module) -> int:
    return len(radical_series(m)) - 1


def projective_cover(m: Module):
    """Minimal projective cover.

    Returns:
        (P, epi) where epi: P -> m is surjective with ker epi contained in
        rad P.  P is a direct sum of indecomposable projectives matching the
        top of m; generators are the echelon complement of rad m.
    """
    A = m.algebra
    f = A.field
    rad = radical(m)
    gens = []  # (vertex, local generator vector)
    for v in range(len(m.dims)):
        r, piv = f.rref(rad[v])
        free = [c for c in range(m.dims[v]) if c not in piv]
        for c in free:
            e = np.zeros(m.dims[v], dtype=np.int16)
            e[c] = 1
            gens.append((v, e))
    if not gens:
        p = zero_module(A)
        return p, ModuleMap(p, m, [np.zeros((m.dims[v], 0), dtype=np.int16)
                                   for v in range(len(m.dims))])
    summands = [A.projective(v) for v, _ in gens]
    p, injs, _ = direct_sum(summands, name=f"P({m.name})")
    blocks = [np.zeros((m.dims[w], p.dims[w]), dtype=np.int16) for w in range(len(m.dims))]
    col_off = [0] * len(m.dims)
    for (v, gen), pv in zip(gens, summands):
        for w in range(len(m.dims)):
            for j, bidx in enumerate(A.projective_basis_words(v, w)):
                word = A.basis_words[bidx]
                if word:
                    vec = f.matmul(m.word_action(word), gen[:, None]).reshape(-1)
                else:
                    vec = gen
                blocks[w][:, col_off[w] + j] = vec
        for w in range(len(m.dims)):
            col_off[w] += pv.dims[w]
    epi = ModuleMap(p, m, blocks)
    if not epi.is_surjective_map():
        raise PresentationError("projective cover construction failed to surject")
    return p, epi


def cover_kernel(m: Module):
    """(K, incl, P, epi) for the kernel of the minimal projective cover."""
    p, epi = projective_cover(m)
    k, incl = kernel(epi, name=f"om({m.name})")
    return k, incl, p, epi


def injective_hull(m: Module):
    """Minimal injective hull.

    Returns:
        (I, mono) where mono: m -> I is injective and an isomorphism on
        socles.  I is a sum of indecomposable injectives matching soc m.
    """
    A = m.algebra
    f = A.field
    soc = socle(m)
    pieces = []  # (vertex v, functional xi on m at v)
    for v in range(len(m.dims)):
        s = soc[v]
        if s.shape[0] == 0:
            continue
        r, piv = f.rref(s)
        free = [c for c in range(m.dims[v]) if c not in piv]
        basis_rows = np.concatenate(
            [r[: len(piv)]] +
            ([np.eye(m.dims[v], dtype=np.int16)[free]] if free else []), axis=0)
        binv = f.matinv(basis_rows.T)
        # functionals dual to the socle basis, vanishing on the complement
        for j in range(s.shape[0]):
            pieces.append((v, binv[j]))
    if not pieces:
        i0 = zero_module(A)
        return i0, ModuleMap(m, i0, [np.zeros((0, m.dims[v]), dtype=np.int16)
                                     for v in range(len(m.dims))])
    summands = [A.injective(v) for v, _ in pieces]
    big, injs, _ = direct_sum(summands, name=f"I({m.name})")
    blocks = [np.zeros((big.dims[w], m.dims[w]), dtype=np.int16) for w in range(len(m.dims))]
    row_off = [0] * len(m.dims)
    for (v, xi), iv in zip(pieces, summands):
        for w in range(len(m.dims)):
            words = A.injective_basis_words(v, w)
            for j, bidx in enumerate(words):
                word = A.basis_words[bidx]
                if word:
                    row = f.matmul(xi[None, :], m.word_action(word))
                else:
                    row = xi[None, :]
                blocks[w][row_off[w] + j, :] = row[0]
        for w in range(len(m.dims)):
            row_off[w] += iv.dims[w]
    mono = ModuleMap(m, big, blocks)
    if not mono.is_injective_map():
        raise PresentationError("injective hull construction failed to embed")
    return big, mono


def hull_cokernel(m: Module):
    """(C, proj, I, mono) for the cokernel of the minimal injective hull."""
    i, mono = injective_hull(m)
    c, proj = cokernel(mono, name=f"om-({m.name})")
    return c, proj, i, mono


def is_projective(m: Module) -> bool:
    k, _, _, _ = cover_kernel(m)
    return k.dim == 0


def is_injective_module(m: Module) -> bool:
    c, _, _, _ = hull_cokernel(m)
    return c.dim == 0


# -- pullback / pushout / extensions ---------------------------------------


def pushout(f: ModuleMap, g: ModuleMap):
    """Pushout of f: X -> Y and g: X -> Z.

    Returns:
        (W, py, pz) with py: Y -> W, pz: Z -> W and py f = pz g.
    """
    if f.src.key != g.src.key:
        raise PresentationError("pushout legs must share their source")
    fld = f.src.algebra.field
    yz, (iy, iz), _ = _sum2(f.tgt, g.tgt)
    diff = iy.compose(f).sub(iz.compose(g))
    im_rows = _map_image_rows(diff)
    w, proj = quotient(yz, im_rows, name="pushout")
    return w, proj.compose(iy), proj.compose(iz)


def pullback(f: ModuleMap, g: ModuleMap):
    """Pullback of f: Y -> X and g: Z -> X.

    Returns:
        (W, py, pz) with py: W -> Y, pz: W -> Z and f py = g pz.
    """
    if f.tgt.key != g.tgt.key:
        raise PresentationError("pullback legs must share their target")
    yz, (iy, iz), (py, pz) = _sum2(f.src, g.src)
    diff = f.compose(py).sub(g.compose(pz))
    w, incl = kernel(diff, name="pullback")
    return w, py.compose(incl), pz.compose(incl)


def _sum2(a: Module, b: Module):
    s, injs, projs = direct_sum([a, b])
    return s, tuple(injs), tuple(projs)


def _map_image_rows(fmap: ModuleMap) -> np.ndarray:
    """Global row basis of the image of a map."""
    m = fmap.tgt
    rows = []
    for v in range(len(m.dims)):
        space = fmap.src.algebra.field.row_space(fmap.blocks[v].T)
        block = np.zeros((space.shape[0], m.dim), dtype=np.int16)
        block[:, m.offsets[v]: m.offsets[v + 1]] = space
        rows.append(block)
    return np.concatenate(rows, axis=0) if rows else np.zeros((0, m.dim), dtype=np.int16)


class Ext1:
    """Ext^1(M, N) presented off the minimal cover of M.

    Attributes:
        dim: dimension of Ext^1.
        reps: list of ModuleMaps K -> N representing a basis of classes,
            where K is the cover kernel of M.
    """

    def __init__(self, m: Module, n: Module):
        self.m = m
        self.n = n
        k, incl, p, epi = cover_kernel(m)
        self.k, self.incl, self.p, self.epi = k, incl, p, epi
        f = m.algebra.field
        hom_kn = hom_space(k, n)
        hom_pn = hom_space(p, n)
        self._hom_kn = hom_kn
        if not hom_kn:
            self.dim = 0
            self.reps = []
            self._img = np.zeros((0, 0), dtype=np.int16)
            self._basis_flat = np.zeros((0, 0), dtype=np.int16)
            self._free = []
            self._piv = ()
            return
        flat = np.stack([h.flat() for h in hom_kn])
        img_vecs = [g.compose(incl).flat() for g in hom_pn]
        img_coord = []
        for vec in img_vecs:
            c = f.solve(flat.T, vec)
            if c is None:
                raise PresentationError("restriction image escaped Hom(K, N)")
            img_coord.append(c)
        img_rows = f.row_space(np.array(img_coord, dtype=np.int16).reshape(len(img_coord), flat.shape[0])) \
            if img_coord else np.zeros((0, flat.shape[0]), dtype=np.int16)
        self._img = img_rows
        self._basis_flat = flat
        r, piv = f.rref(img_rows)
        free = [c for c in range(flat.shape[0]) if c not in piv]
        self.dim = len(free)
        self.reps = [hom_kn[c] for c in free]
        self._free = free
        self._piv = piv

    def class_coords(self, g: ModuleMap) -> np.ndarray:
        """Coordinates of the class of g: K -> N in the chosen basis."""
        f = self.m.algebra.field
        if not self._hom_kn:
            if not g.is_zero():
                raise PresentationError("map is not in Hom(K, N)")
            return np.zeros(0, dtype=np.int16)
        c = f.solve(self._basis_flat.T, g.flat())
        if c is None:
            raise PresentationError("map is not in Hom(K, N)")
        r, piv = f.rref(self._img)
        vec = c.astype(np.int16)
        for i, p in enumerate(piv):
            if vec[p]:
                vec = f.sub_mat(vec[None, :], f.scale(int(vec[p]), r[i][None, :]))[0]
        return vec[self._free] if self._free else np.zeros(0, dtype=np.int16)

    def realize(self, g: ModuleMap):
        """Short exact sequence 0 -> N -> E -> M -> 0 with class [g].

        Returns:
            (E, mono, epi) where mono: N -> E and epi: E -> M.
        """
        if g.src.key != self.k.key or g.tgt.key != self.n.key:
            raise PresentationError("realize expects a map cover_kernel(M) -> N")
        w, p_p, p_n = pushout(self.incl, g)
        # epi: W -> M induced by (cover epi, 0) on P + N, which kills the
        # pushout relations since incl lands in ker(epi)
        sumpn, (ip, in_), _ = _sum2(self.p, self.n)
        tomod = [np.concatenate([self.epi.blocks[v],
                                 np.zeros((self.m.dims[v], self.n.dims[v]), dtype=np.int16)],
                                axis=1) for v in range(len(self.m.dims))]
        combined = ModuleMap(sumpn, self.m, tomod)
        onto_w = ModuleMap(sumpn, w, [np.concatenate([p_p.blocks[v], p_n.blocks[v]], axis=1)
                                      for v in range(len(self.m.dims))])
        epi = factor_through_surjection(onto_w, combined)
        return w, p_n, epi


def ext1(m: Module, n: Module) -> Ext1:
    return Ext1(m, n)


def ses_class(ext: Ext1, mono: ModuleMap, epi: ModuleMap) -> np.ndarray:
    """Class coordinates of the extension 0 -> N -> E -> M -> 0 in ext."""
    lift = lift_through_surjection(epi, ext.epi)
    restricted = lift.compose(ext.incl)
    g = factor_through_injection(mono, restricted)
    return ext.class_coords(g)


def is_exact_pair(mono: ModuleMap, epi: ModuleMap) -> bool:
    """Whether 0 -> src(mono) -> E -> tgt(epi) -> 0 is exact."""
    if mono.tgt.key != epi.src.key:
        return False
    if not mono.is_injective_map() or not epi.is_surjective_map():
        return False
    if not epi.compose(mono).is_zero():
        return False
    return mono.src.dim + epi.tgt.dim == mono.tgt.dim


# -- decomposition ----------------------------------------------------------


class Summand:
    __slots__ = ("module", "incl", "proj", "certified")

    def __init__(self, module, incl, proj, certified):
        self.module = module
        self.incl = incl
        self.proj = proj
        self.certified = certified


def _fitting_split(m: Module, f_end: ModuleMap):
    """If f_end gives a nontrivial Fitting decomposition, return the pair of
    (rows_kernel, rows_image) per-vertex spaces, else None."""
    fld = m.algebra.field
    cur = f_end
    prev_rank = cur.rank()
    for _ in range(m.dim + 1):
        nxt = cur.compose(cur)
        r = nxt.rank()
        if r == prev_rank:
            cur = nxt
            break
        prev_rank = r
        cur = nxt
    r = cur.rank()
    if r == 0 or r == m.dim:
        return None
    ker_spaces = [fld.kernel(b) for b in cur.blocks]
    im_spaces = [fld.row_space(b.T) for b in cur.blocks]
    return ker_spaces, im_spaces


def _split_once(m: Module, budget: int, seed: int):
    """Find one nontrivial direct-sum splitting, or certify indecomposable.

    Returns ('split', (ker_spaces, im_spaces)), ('indec', True) when
    certified, or ('indec', False) when the budget ran out."""
    ends = end_space(m)
    d = len(ends)
    if d == 1:
        return "indec", True  # End = k is local
    fld = m.algebra.field
    for e in ends:
        out = _fitting_split(m, e)
        if out is not None:
            return "split", out
    if fld.q ** d <= 1 << 16:
        # exhaust the whole endomorphism algebra; if nothing splits, every
        # endomorphism is nilpotent or invertible, so End is local
        coeffs = [0] * d
        while True:
            i = 0
            while i < d and coeffs[i] == fld.q - 1:
                coeffs[i] = 0
                i += 1
            if i == d:
                break
            coeffs[i] += 1
            e = ends[0].scale(coeffs[0])
            for j in range(1, d):
                if coeffs[j]:
                    e = e.add(ends[j].scale(coeffs[j]))
            out = _fitting_split(m, e)
            if out is not None:
                return "split", out
        return "indec", True
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        cs = rng.integers(0, fld.q, size=d)
        e = ends[0].scale(int(cs[0]))
        for j in range(1, d):
            if cs[j]:
                e = e.add(ends[j].scale(int(cs[j])))
        out = _fitting_split(m, e)
        if out is not None:
            return "split", out
    return "indec", False


def decompose(m: Module, *, seed: int = 0, budget: int = 512) -> list[Summand]:
    """Decompose into indecomposable summands with splitting witnesses.

    Returns a list of Summand(module, incl, proj) with sum(incl_i proj_i)
    equal to the identity.  Raises DecompositionInconclusive when a piece
    can neither be split nor certified indecomposable within budget.
    """
    if m.dim == 0:
        return []
    fld = m.algebra.field
    status, data = _split_once(m, budget, seed)
    if status == "indec":
        if not data:
            raise DecompositionInconclusive(
                f"no splitting endomorphism of {m.name} found within budget "
                f"and End is too large to exhaust")
        return [Summand(m, ModuleMap.identity(m), ModuleMap.identity(m), True)]
    ker_spaces, im_spaces = data
    k_mod, k_incl = _sub_from_spaces(m, ker_spaces, f"{m.name}.a")
    i_mod, i_incl = _sub_from_spaces(m, im_spaces, f"{m.name}.b")
    projs = _complementary_projections(m, k_incl, i_incl)
    out = []
    for piece, incl, proj in ((k_mod, k_incl, projs[0]), (i_mod, i_incl, projs[1])):
        for s in decompose(piece, seed=seed, budget=budget):
            out.append(Summand(s.module, incl.compose(s.incl), s.proj.compose(proj),
                               s.certified))
    return out


def _complementary_projections(m: Module, incl_a: ModuleMap, incl_b: ModuleMap):
    """Projections onto two complementary submodules given their inclusions."""
    fld = m.algebra.field
    pa, pb = [], []
    for v in range(len(m.dims)):
        da = incl_a.blocks[v].shape[1]
        db = incl_b.blocks[v].shape[1]
        c = np.concatenate([incl_a.blocks[v], incl_b.blocks[v]], axis=1)
        if c.shape[0] != da + db:
            raise PresentationError("submodules are not complementary")
        cinv = fld.matinv(c) if c.size else np.zeros((0, 0), dtype=np.int16)
        if cinv is None:
            raise PresentationError("submodules are not complementary")
        pa.append(cinv[:da, :])
        pb.append(cinv[da:, :])
    return (ModuleMap(m, incl_a.src, pa), ModuleMap(m, incl_b.src, pb))


def module_isomorphic(m: Module, n: Module, *, seed: int = 0) -> ModuleMap | None:
    """An isomorphism m -> n, or None if provably not isomorphic.

    Searches the finite Hom space for an invertible element with the coset
    rank maximizer.  When the search is not exhaustive and fails, raises
    DecompositionInconclusive rather than answering.
    """
    if m.dims != n.dims:
        return None
    if m.dim == 0:
        return ModuleMap(m, n, [np.zeros((0, 0), dtype=np.int16) for _ in m.dims])
    homs = hom_space(m, n)
    if not homs:
        return None
    fld = m.algebra.field
    base = np.zeros((m.dim, m.dim), dtype=np.int16)
    dirs = [h.global_matrix() for h in homs]
    mat, coeffs, rank, exhaustive = coset_rank_maximize(fld, base, dirs,
                                                        target_rank=m.dim, seed=seed)
    if rank == m.dim:
        out = homs[0].scale(coeffs[0])
        for j in range(1, len(homs)):
            if coeffs[j]:
                out = out.add(homs[j].scale(coeffs[j]))
        return out
    if exhaustive:
        return None
    raise DecompositionInconclusive(
        f"isomorphism search {m.name} vs {n.name} inconclusive (non-exhaustive)")
