"""Canonical JSON serialization for algebras, modules and reports.

Round-trip rule: any serialized object re-parses to a structurally identical
one (hash equality).  Opposite and internally derived algebras serialize
through their structure constants, which every kind supports.
"""

import hashlib
import json

import numpy as np

from .algebra import Algebra, algebra_to_structure_spec, build_algebra, spec_from_dict
from .errors import SpecError
from .modules import Module, make_module


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()[:16]


def algebra_to_dict(a: Algebra) -> dict:
    """A rebuildable description: the original source when present, else
    structure constants."""
    if a.source:
        return dict(a.source)
    return algebra_to_structure_spec(a)


def algebra_from_dict(doc) -> Algebra:
    return build_algebra(spec_from_dict(doc))


def module_to_dict(m: Module, algebra_ref=None) -> dict:
    """Module file content: generator actions keyed by generator name.

    algebra_ref may be a path string; default embeds the algebra inline.
    """
    gens = {name: mat.tolist() for name, mat in m.generator_actions().items()}
    return {
        "algebra": algebra_ref if algebra_ref is not None else algebra_to_dict(m.algebra),
        "dim": m.dim,
        "action": gens,
    }


def module_from_dict(doc, algebra=None, resolve_path=None) -> Module:
    if not isinstance(doc, dict):
        raise SpecError("module description must be a JSON object")
    unknown = set(doc) - {"algebra", "dim", "action"}
    if unknown:
        raise SpecError(f"unknown keys {sorted(unknown)} in module description")
    if algebra is None:
        ref = doc.get("algebra")
        if ref is None:
            raise SpecError('module description needs an "algebra" (path or inline spec)')
        if isinstance(ref, str):
            if resolve_path is None:
                raise SpecError("cannot resolve an algebra path without a base directory")
            with open(resolve_path(ref), "r", encoding="utf-8") as fh:
                ref = json.load(fh)
        algebra = algebra_from_dict(ref)
    dim = doc.get("dim")
    if not isinstance(dim, int) or dim < 0:
        raise SpecError('"dim" must be a non-negative integer')
    action = doc.get("action", {})
    mats = {name: np.asarray(mat, dtype=np.int64) for name, mat in action.items()}
    for name, mat in mats.items():
        if mat.shape != (dim, dim):
            raise SpecError(f"action of {name!r} must be {dim}x{dim}")
    if dim == 0:
        from .modules import zero_module

        return zero_module(algebra)
    return make_module(algebra, mats, dim=dim)


def module_payload(m: Module) -> dict:
    """Invariant-free payload used for hashing and witness files."""
    return {
        "algebra_hash": m.algebra.content_hash(),
        "dim": m.dim,
        "action": {name: mat.tolist() for name, mat in m.generator_actions().items()},
    }


def module_content_hash(m: Module) -> str:
    return content_hash(module_payload(m))
