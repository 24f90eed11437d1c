"""JSON input/output.

Schemas (versioned by a "schema" field): algebra.v1, module.v1, complex.v1,
filtration.v1, graded_algebra.v1, tower.v1, runreport.v1.  Dump functions
emit dictionaries with a fixed key order and canonical integer encodings so
that serialized output is byte-identical across runs.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from stabrec.algebra import Algebra
from stabrec.derived import Complex, Tower, TowerStep
from stabrec.errors import PresentationError
from stabrec.filtration import Filtration
from stabrec.gf import Field
from stabrec.graded import GradedAlgebra
from stabrec.modules import Module, ModuleMap


def canon_dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=True) + "\n"


def save(path, obj) -> None:
    Path(path).write_text(canon_dumps(obj), encoding="utf-8")


def _as_dict(src) -> dict:
    if isinstance(src, dict):
        return src
    return json.loads(Path(src).read_text(encoding="utf-8"))


def _expect_schema(data: dict, schema: str) -> None:
    if data.get("schema") != schema:
        raise PresentationError(f"expected schema {schema!r}, got {data.get('schema')!r}")


# -- algebra.v1 --------------------------------------------------------------


def load_algebra(src) -> Algebra:
    data = _as_dict(src)
    _expect_schema(data, "algebra.v1")
    fld = data["field"]
    field = Field(int(fld["p"]), int(fld.get("k", 1)),
                  modulus=tuple(fld["modulus"]) if "modulus" in fld else None)
    relations = [[(int(c), list(path)) for c, path in rel] for rel in data.get("relations", [])]
    return Algebra(field, list(data["vertices"]),
                   [tuple(a) for a in data["arrows"]],
                   relations, name=data.get("name", "A"))


def dump_algebra(a: Algebra) -> dict:
    fld: dict = {"p": a.field.p, "k": a.field.k}
    if a.field.k > 1:
        fld["modulus"] = list(a.field.modulus)
    return {
        "schema": "algebra.v1",
        "name": a.name,
        "field": fld,
        "vertices": list(a.vertices),
        "arrows": [[n, a.vertices[s], a.vertices[t]] for (n, s, t) in a.arrows],
        "relations": [
            [[int(c), [a.arrows[x][0] for x in w]] for w, c in sorted(p.items())]
            for p in a.relations
        ],
    }


# -- module.v1 ---------------------------------------------------------------


def load_module(src, algebra: Algebra) -> Module:
    data = _as_dict(src)
    _expect_schema(data, "module.v1")
    if data.get("algebra") not in (None, algebra.name):
        raise PresentationError(
            f"module is over algebra {data.get('algebra')!r}, not {algebra.name!r}")
    dims = [int(data["dims"].get(v, 0)) for v in algebra.vertices]
    mats = []
    arrs = data.get("arrows", {})
    for name, s, t in algebra.arrows:
        if name in arrs:
            mats.append(np.array(arrs[name], dtype=np.int16).reshape(dims[t], dims[s]))
        else:
            mats.append(np.zeros((dims[t], dims[s]), dtype=np.int16))
    return Module(algebra, dims, mats, name=data.get("name", "M"))


def dump_module(m: Module) -> dict:
    a = m.algebra
    arrows = {}
    for i, (name, _s, _t) in enumerate(a.arrows):
        if np.any(m.mats[i]):
            arrows[name] = [[int(x) for x in row] for row in m.mats[i]]
    return {
        "schema": "module.v1",
        "algebra": a.name,
        "name": m.name,
        "dims": {v: int(d) for v, d in zip(a.vertices, m.dims)},
        "arrows": arrows,
    }


# -- graded_algebra.v1 --------------------------------------------------------


def dump_graded(g: GradedAlgebra) -> dict:
    entries = []
    n = g.dim
    for i in range(n):
        for j in range(n):
            v = g.table[i, j]
            for l in np.nonzero(v)[0]:
                entries.append([i, j, int(l), int(v[l])])
    return {
        "schema": "graded_algebra.v1",
        "name": g.name,
        "field": {"p": g.field.p, "k": g.field.k},
        "degrees": [int(d) for d in g.degrees],
        "labels": list(g.labels),
        "table": entries,
    }


def load_graded(src, field: Field | None = None) -> GradedAlgebra:
    data = _as_dict(src)
    _expect_schema(data, "graded_algebra.v1")
    fld = data["field"]
    f = field if field is not None else Field(int(fld["p"]), int(fld.get("k", 1)))
    degrees = data["degrees"]
    n = len(degrees)
    table = np.zeros((n, n, n), dtype=np.int16)
    for i, j, l, c in data["table"]:
        table[int(i), int(j), int(l)] = int(c)
    return GradedAlgebra(f, degrees, data["labels"], table, name=data.get("name", "G"))


# -- complex.v1 ----------------------------------------------------------------


def _dump_blocks(fmap: ModuleMap) -> list:
    return [[[int(x) for x in row] for row in b] for b in fmap.blocks]


def _load_map(src_mod: Module, tgt_mod: Module, blocks) -> ModuleMap:
    out = []
    for v in range(len(src_mod.dims)):
        b = np.array(blocks[v], dtype=np.int16)
        out.append(b.reshape(tgt_mod.dims[v], src_mod.dims[v]))
    return ModuleMap(src_mod, tgt_mod, out, check=True)


def dump_complex(c: Complex) -> dict:
    degs = sorted(c.terms)
    return {
        "schema": "complex.v1",
        "algebra": c.algebra.name,
        "name": c.name,
        "terms": [{"degree": n, "module": dump_module(c.terms[n])} for n in degs],
        "diffs": [{"degree": n, "blocks": _dump_blocks(d)}
                  for n, d in sorted(c.diffs.items())],
    }


def load_complex(src, algebra: Algebra) -> Complex:
    data = _as_dict(src)
    _expect_schema(data, "complex.v1")
    terms = {int(t["degree"]): load_module(t["module"], algebra)
             for t in data["terms"]}
    diffs = {}
    for entry in data["diffs"]:
        n = int(entry["degree"])
        diffs[n] = _load_map(terms[n], terms[n + 1], entry["blocks"])
    return Complex(algebra, terms, diffs, name=data.get("name", "C"))


# -- filtration.v1 -------------------------------------------------------------


def dump_filtration(filt: Filtration, flags: dict | None = None) -> dict:
    mults = filt.mult_sequence()
    return {
        "schema": "filtration.v1",
        "algebra": filt.module.algebra.name,
        "module": dump_module(filt.module),
        "members": [dump_module(s) for s in filt.sset],
        "chain": [[[int(x) for x in row] for row in level] for level in filt.chain],
        "chain_dims": [int(level.shape[0]) for level in filt.chain],
        "mult_sequence": [list(m) for m in mults],
        "flags": dict(flags or {}),
    }


def load_filtration(src, algebra: Algebra) -> Filtration:
    data = _as_dict(src)
    _expect_schema(data, "filtration.v1")
    module = load_module(data["module"], algebra)
    sset = [load_module(s, algebra) for s in data["members"]]
    chain = [np.array(level, dtype=np.int16).reshape(-1, module.dim)
             for level in data["chain"]]
    return Filtration(module, sset, chain)


# -- tower.v1 ------------------------------------------------------------------


def dump_tower(t: Tower) -> dict:
    steps = []
    for st in t.steps:
        steps.append({
            "member": int(st.member),
            "d": int(st.d),
            "ambient": dump_module(st.sub.tgt),
            "sub_src": dump_module(st.sub.src),
            "layer": dump_module(st.quot.tgt),
            "sub_blocks": _dump_blocks(st.sub),
            "quot_blocks": _dump_blocks(st.quot),
        })
    return {
        "schema": "tower.v1",
        "algebra": t.algebra.name,
        "members": [dump_module(s) for s in t.members],
        "top": dump_module(t.top),
        "steps": steps,
    }


def load_tower(src, algebra: Algebra) -> Tower:
    data = _as_dict(src)
    _expect_schema(data, "tower.v1")
    members = [load_module(s, algebra) for s in data["members"]]
    top = load_module(data["top"], algebra)
    steps = []
    for entry in data["steps"]:
        amb = load_module(entry["ambient"], algebra)
        src_mod = load_module(entry["sub_src"], algebra)
        layer = load_module(entry["layer"], algebra)
        steps.append(TowerStep(
            _load_map(src_mod, amb, entry["sub_blocks"]),
            _load_map(amb, layer, entry["quot_blocks"]),
            int(entry["member"]), int(entry["d"])))
    return Tower(algebra, members, steps, top)


# -- runreport.v1 --------------------------------------------------------------


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def dump_report(command: str, inputs: dict, seed: int, outcome: str,
                artifacts: list, seconds: float) -> dict:
    """Run summary; `inputs` maps labels to raw file text, hashed here.

    Timing is carried for humans only: artifact bytes never depend on it.
    """
    return {
        "schema": "runreport.v1",
        "command": command,
        "inputs": {k: sha256_text(v) for k, v in sorted(inputs.items())},
        "seed": int(seed),
        "outcome": outcome,
        "artifacts": artifacts,
        "timing": {"seconds": round(float(seconds), 6)},
    }
