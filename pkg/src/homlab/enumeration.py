"""Module enumeration: exhaustive up to isomorphism at small dimension,
seeded random sampling beyond.

Exhaustive mode factors candidates through the idempotent block structure:
idempotents act as the canonical block projectors (every module is isomorphic
to one of this shape), so only the non-idempotent generators carry free
entries.  Candidate batches are validated by the full multiplication law,
vectorized over the batch.
"""

import itertools

import numpy as np

from .errors import HomlabError
from .linalg import rref_array
from .modules import (
    Module,
    direct_sum,
    build_projective,
    decompose,
    hom_dim,
    is_isomorphic,
    iso_fingerprint,
    radical_subspace,
    submodule,
    quotient_module,
    zero_module,
)
from .homology import ext_dims, linear_dual, transpose
from .serialize import module_content_hash

_CHUNK = 1 << 14


def _generator_blocks(a):
    """(idempotent generators, [(gen index, target block, source block)]).

    Returns None when some generator is not concentrated in one block; the
    caller then falls back to unstructured enumeration.
    """
    r = a.idempotents.shape[0]
    idem_rows = {}
    for i in range(r):
        idem_rows[a.idempotents[i].tobytes()] = i
    idem_gens = {}
    placed = []
    for g, (name, vec) in enumerate(a.generators):
        key = vec.tobytes()
        if key in idem_rows:
            idem_gens[g] = idem_rows[key]
            continue
        spot = None
        for t in range(r):
            for s in range(r):
                prod = a.mult(a.mult(a.idempotents[t], vec), a.idempotents[s])
                if np.array_equal(prod, vec):
                    spot = (t, s)
                    break
            if spot:
                break
        if spot is None:
            return None
        placed.append((g, spot[0], spot[1]))
    return idem_gens, placed


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def exhaustive_candidate_count(a, max_dim):
    """Total number of block-structured generator assignments up to max_dim."""
    blocks = _generator_blocks(a)
    total = 0
    for d in range(1, max_dim + 1):
        if blocks is None:
            total += a.p ** (len(a.generators) * d * d)
            continue
        _, placed = blocks
        r = a.idempotents.shape[0]
        for dims in _compositions(d, r):
            params = sum(dims[t] * dims[s] for _, t, s in placed)
            total += a.p**params
    return total


def _digits_chunk(start, count, p, nparams):
    """Base-p digit matrix for candidate indices start..start+count-1."""
    idx = np.arange(start, start + count, dtype=np.int64)
    out = np.zeros((count, nparams), dtype=np.int64)
    for k in range(nparams):
        out[:, k] = idx % p
        idx = idx // p
    return out


def _batch_valid_mask(a, gen_mats):
    """Check the module laws for a batch: gen_mats[g] has shape (N, d, d)."""
    p = a.p
    n = gen_mats[0].shape[0] if gen_mats else 0
    d = gen_mats[0].shape[1] if gen_mats else 0
    basis = np.zeros((n, a.dim, d, d), dtype=np.int64)
    ident = np.broadcast_to(np.eye(d, dtype=np.int64), (n, d, d))
    for i, word in enumerate(a.words):
        cur = ident
        for g in word:
            cur = np.einsum("nab,nbc->nac", gen_mats[g], cur) % p
        basis[:, i] = cur
    mask = np.ones(n, dtype=bool)
    unit_act = np.einsum("k,nkab->nab", a.unit, basis) % p
    mask &= (unit_act == np.eye(d, dtype=np.int64)).all(axis=(1, 2))
    for i in range(a.dim):
        for j in range(a.dim):
            lhs = np.einsum("nab,nbc->nac", basis[:, i], basis[:, j]) % p
            rhs = np.einsum("k,nkab->nab", a.table[i, j], basis) % p
            mask &= (lhs == rhs).all(axis=(1, 2))
            if not mask.any():
                return mask, basis
    return mask, basis


def _iter_exhaustive(a, max_dim):
    """Yield every valid block-structured module of dimension 1..max_dim."""
    blocks = _generator_blocks(a)
    r = a.idempotents.shape[0]
    ngen = len(a.generators)
    for d in range(1, max_dim + 1):
        if blocks is None:
            dims_list = [None]  # unstructured: full matrices for every generator
        else:
            dims_list = list(_compositions(d, r))
        for dims in dims_list:
            if blocks is None:
                slots = [(g, 0, d, 0, d) for g in range(ngen)]
                fixed = {}
            else:
                idem_gens, placed = blocks
                off = np.concatenate([[0], np.cumsum(dims)])
                fixed = {}
                for g, i in idem_gens.items():
                    mat = np.zeros((d, d), dtype=np.int64)
                    mat[off[i] : off[i + 1], off[i] : off[i + 1]] = np.eye(dims[i], dtype=np.int64)
                    fixed[g] = mat
                slots = [
                    (g, off[t], off[t] + dims[t], off[s], off[s] + dims[s])
                    for g, t, s in placed
                ]
            nparams = sum((r1 - r0) * (c1 - c0) for _, r0, r1, c0, c1 in slots)
            ncand = a.p**nparams
            for start in range(0, ncand, _CHUNK):
                count = min(_CHUNK, ncand - start)
                digits = _digits_chunk(start, count, a.p, nparams)
                gen_mats = []
                pos = 0
                for g in range(ngen):
                    if g in fixed:
                        gen_mats.append(np.broadcast_to(fixed[g], (count, d, d)))
                        continue
                    slot = next(s for s in slots if s[0] == g)
                    _, r0, r1, c0, c1 = slot
                    nn = (r1 - r0) * (c1 - c0)
                    mat = np.zeros((count, d, d), dtype=np.int64)
                    mat[:, r0:r1, c0:c1] = digits[:, pos : pos + nn].reshape(
                        count, r1 - r0, c1 - c0
                    )
                    pos += nn
                    gen_mats.append(mat)
                mask, basis = _batch_valid_mask(a, gen_mats)
                for idx in np.nonzero(mask)[0]:
                    yield Module(a, basis[idx].copy(), check=False)


def spec_invariant_hash(m: Module):
    """The dedup hash from basis-independent invariants only."""
    if m.dim == 0:
        return (0,)
    fp = iso_fingerprint(m)
    e1 = ext_dims(m, m, 1)[1]
    return fp + (e1,)


class _ClassStore:
    """Pairwise non-isomorphic representatives bucketed by cheap invariants."""

    def __init__(self):
        self.buckets = {}

    def add(self, mod, strict=True):
        key = iso_fingerprint(mod)
        bucket = self.buckets.setdefault(key, [])
        for rep in bucket:
            verdict = is_isomorphic(rep, mod)
            if verdict.verdict == "iso":
                return False
            if verdict.verdict == "undetermined" and strict:
                raise HomlabError("undetermined isomorphism verdict during dedup")
        bucket.append(mod)
        return True

    def all_modules(self):
        out = []
        for bucket in self.buckets.values():
            out.extend(bucket)
        return out


def _sorted_classes(mods):
    return sorted(
        mods,
        key=lambda m: (m.dim, spec_invariant_hash(m), module_content_hash(m)),
    )


def enumerate_modules(a, max_dim, budget=1 << 20, seed=0, exhaustive=None):
    """Pairwise non-isomorphic modules of dimension <= max_dim.

    Exhaustive (complete up to isomorphism) whenever the structured candidate
    count fits the budget, or when forced; otherwise a seeded random sample
    closed under syzygy, transpose-translate, dual-translate and summands.
    The zero module is always class number one.
    """
    if exhaustive is None:
        exhaustive = exhaustive_candidate_count(a, max_dim) <= budget
    elif exhaustive:
        count = exhaustive_candidate_count(a, max_dim)
        if count > budget:
            raise HomlabError(
                f"exhaustive enumeration needs {count} candidates, over the budget {budget}"
            )
    store = _ClassStore()
    if exhaustive:
        for mod in _iter_exhaustive(a, max_dim):
            store.add(mod)
    else:
        for mod in sample_modules(a, max_dim, draws=budget, seed=seed):
            store.add(mod)
        _close_under_operations(a, store, max_dim)
    return [zero_module(a)] + _sorted_classes(store.all_modules())


def random_quotient_of_projective(a, max_dim, rng):
    """P/U for a random projective P and a random submodule U of J P."""
    r = a.idempotents.shape[0]
    copies = []
    for i in range(r):
        copies.extend([i] * int(rng.integers(0, 3)))
    if not copies:
        copies = [int(rng.integers(0, r))]
    proj = build_projective(a, copies)
    rad = radical_subspace(proj)
    if rad.dim == 0:
        mod = proj
    else:
        k = int(rng.integers(0, rad.dim + 1))
        picks = rng.integers(0, a.p, size=(k, rad.dim))
        vecs = (picks @ rad.basis.a) % a.p
        rows = [(proj.act(a.basis_vector(b)) @ v) % a.p for v in vecs for b in range(a.dim)]
        rows.extend(vecs)
        from .linalg import Subspace

        sub = Subspace.from_rows(np.array(rows).reshape(-1, proj.dim), a.p, proj.dim)
        mod, _ = quotient_module(proj, sub)
    return mod


def sample_modules(a, max_dim, draws, seed=0, exact_dim=None):
    """Seeded random module instances (not deduplicated) with dim <= max_dim."""
    rng = np.random.default_rng(np.uint64(seed))
    out = []
    for _ in range(draws):
        mod = random_quotient_of_projective(a, max_dim, rng)
        if mod.dim == 0 or mod.dim > max_dim:
            continue
        if exact_dim is not None and mod.dim != exact_dim:
            continue
        out.append(mod)
    return out


def _close_under_operations(a, store, max_dim):
    """Close the class store under syzygy, the two translate functors and
    indecomposable summand extraction."""
    from .modules import syzygy

    frontier = store.all_modules()
    rounds = 0
    while frontier and rounds < 3:
        new_frontier = []
        for m in frontier:
            derived = []
            if m.dim:
                omega, _, _ = syzygy(m)
                derived.append(omega)
                derived.append(linear_dual(transpose(m)))
                derived.append(transpose(linear_dual(m)))
                try:
                    derived.extend(decompose(m))
                except HomlabError:
                    pass
            for d in derived:
                if 0 < d.dim <= max_dim and d.algebra is a:
                    if store.add(d):
                        new_frontier.append(d)
        frontier = new_frontier
        rounds += 1
