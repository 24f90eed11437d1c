"""Elimination-based recomputation of graded endomorphism dimensions.

Deliberately avoids the package's graded machinery: chain-respecting
endomorphism spaces are cut out by reducing images against the reduced
chain bases (instead of pairing with kernel annihilators), and induced
layer maps are assembled from explicit global matrices with a solved
section (instead of the factor-through helpers).  Shared ground is only
the field arithmetic, plain hom/submodule/quotient, and the stable Hom
handle, each of which has its own test coverage.
"""

from __future__ import annotations

import numpy as np

from stabrec.modules import ModuleMap, combine, hom_space, quotient, submodule
from stabrec.stable import stable_hom


def _residual(fld, rref_rows, w):
    """w minus its row-space projection; zero iff w lies in the row space."""
    out = w.copy()
    for r in rref_rows:
        nz = np.nonzero(r)[0]
        if nz.size == 0:
            continue
        c = int(out[nz[0]])
        if c:
            out = fld.sub_mat(out[None, :], fld.scale(c, r[None, :]))[0]
    return out


def _blocks_from_global(src, tgt, mat):
    return [mat[tgt.offsets[v]: tgt.offsets[v + 1],
                src.offsets[v]: src.offsets[v + 1]]
            for v in range(len(src.dims))]


def graded_end_dims(module, chain):
    """Dimensions by degree of the graded endomorphism spaces of (module,
    chain): for each shift i, the rank of the stable classes of the induced
    top-layer maps over all endomorphisms g with g(chain[j]) in chain[j+i]."""
    fld = module.algebra.field
    homs = hom_space(module, module)
    r = len(chain) - 1

    layers = []
    for t in range(r):
        sub, incl = submodule(module, chain[t], name=f"m{t}")
        inner = fld.solve_matrix(incl.global_matrix(), chain[t + 1].T)
        layer, qmap = quotient(sub, inner.T, name=f"l{t}")
        layers.append((incl.global_matrix(), layer, qmap.global_matrix()))

    i0, l0, q0 = layers[0]
    f0 = fld.matmul(q0, fld.matinv(i0))
    section = fld.solve_matrix(f0, np.eye(l0.dim, dtype=np.int16))

    dims = []
    for i in range(r):
        cols = []
        for h in homs:
            gt = h.global_matrix().T
            vec = []
            for j in range(r):
                target = chain[min(i + j, r)]
                for w in fld.matmul(chain[j], gt):
                    vec.append(_residual(fld, target, w))
            cols.append(np.concatenate(vec))
        coeffs = fld.kernel(np.stack(cols, axis=1))
        fmaps = [combine(homs, c) for c in coeffs]
        ii, li, qi = layers[i]
        sh = stable_hom(l0, li)
        rows = []
        for g in fmaps:
            core = fld.solve_matrix(ii, fld.matmul(g.global_matrix(), section))
            tmat = fld.matmul(qi, core)
            gmap = ModuleMap(l0, li, _blocks_from_global(l0, li, tmat))
            rows.append(sh.coords(gmap))
        stacked = (np.stack(rows) if rows
                   else np.zeros((0, sh.dim), dtype=np.int16))
        dims.append(int(fld.rank(stacked)) if stacked.size else 0)
    return tuple(dims)
