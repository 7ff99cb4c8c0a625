"""Finitely generated modules as action-matrix representations.

A module over an Algebra is a stack of action matrices, one per algebra basis
element, satisfying the multiplication law exactly.  Everything downstream
(Hom spaces, covers, resolutions, isomorphism testing, decompositions) is
exact linear algebra over F_p.
"""

import itertools
import threading

import numpy as np

from .errors import HomlabError, ModuleError, UndeterminedError
from .linalg import Mat, Subspace, kernel_basis, rref_array

ISO_RANDOM_TRIALS = 256
ISO_EXHAUSTIVE_CAP = 1 << 16
END_SCAN_CAP = 1 << 20
_FIXED_RNG_SEED = 0x5EED


class Module:
    """A left module, stored as one action matrix per algebra basis element."""

    __slots__ = ("algebra", "dim", "_acts", "_cache", "_lock")

    def __init__(self, algebra, actions, check=True):
        acts = np.asarray(actions, dtype=np.int64) % algebra.p
        if acts.shape != (algebra.dim, acts.shape[1], acts.shape[1]):
            raise ModuleError(f"actions must have shape (algebra dim, d, d), got {acts.shape}")
        acts.setflags(write=False)
        self.algebra = algebra
        self.dim = int(acts.shape[1])
        self._acts = acts
        self._cache = {}
        self._lock = threading.Lock()
        if check:
            _verify_module(self)

    # -- basic access --------------------------------------------------------

    def action(self, i) -> Mat:
        return Mat(self._acts[i], self.algebra.p, _reduce=False)

    def act(self, coords):
        """Action matrix of the algebra element with the given coordinates."""
        return np.einsum("k,kab->ab", np.asarray(coords) % self.algebra.p, self._acts) % self.algebra.p

    def generator_actions(self):
        """Action matrix per named algebra generator (used for serialization)."""
        return {name: self.act(vec) for name, vec in self.algebra.generators}

    def idempotent_action(self, i):
        key = ("idem_act", i)
        if key not in self._cache:
            self._cache[key] = self.act(self.algebra.idempotents[i])
        return self._cache[key]

    def idempotent_image(self, i) -> Subspace:
        """The subspace e_i * M."""
        key = ("idem_image", i)
        if key not in self._cache:
            e = self.idempotent_action(i)
            self._cache[key] = Subspace.from_rows(e.T, self.algebra.p, self.dim)
        return self._cache[key]

    def is_zero(self):
        return self.dim == 0

    def __repr__(self):
        return f"Module(dim={self.dim}, over {self.algebra.describe()})"


def _verify_module(m: Module):
    a = m.algebra
    p = a.p
    acts = m._acts
    d = m.dim
    ident = np.eye(d, dtype=np.int64)
    unit_act = np.einsum("k,kab->ab", a.unit, acts) % p
    if not np.array_equal(unit_act, ident):
        raise ModuleError("unit does not act as the identity")
    lhs = np.einsum("iab,jbc->ijac", acts, acts) % p
    rhs = np.einsum("ijk,kac->ijac", a.table, acts) % p
    if not np.array_equal(lhs, rhs):
        bad = np.argwhere((lhs != rhs).any(axis=(2, 3)))[0]
        raise ModuleError(
            f"action is not multiplicative on basis pair "
            f"({a.labels[bad[0]]}, {a.labels[bad[1]]})"
        )


def make_module(algebra, generator_matrices, dim=None) -> Module:
    """Build a module from one square matrix per named algebra generator.

    Actions of all basis elements are obtained by multiplying out the
    recorded generator words; the multiplication law is then verified, which
    subsumes checking the algebra's defining relations.
    """
    mats = {}
    for name, _ in algebra.generators:
        if name not in generator_matrices:
            raise ModuleError(f"missing action for generator {name!r}")
        arr = np.asarray(generator_matrices[name], dtype=np.int64) % algebra.p
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ModuleError(f"action of {name!r} must be square")
        mats[name] = arr
    extra = set(generator_matrices) - set(mats)
    if extra:
        raise ModuleError(f"unknown generators {sorted(extra)}")
    sizes = {m.shape[0] for m in mats.values()}
    if len(sizes) > 1:
        raise ModuleError(f"generator actions disagree on dimension: {sorted(sizes)}")
    d = sizes.pop() if sizes else (dim if dim is not None else 0)
    gen_list = [mats[name] for name, _ in algebra.generators]
    ident = np.eye(d, dtype=np.int64)
    acts = np.zeros((algebra.dim, d, d), dtype=np.int64)
    for i, word in enumerate(algebra.words):
        cur = ident
        for g in word:
            cur = (gen_list[g] @ cur) % algebra.p
        acts[i] = cur
    try:
        return Module(algebra, acts)
    except ModuleError as e:
        for rel_idx, rel in enumerate(algebra.relation_words):
            val = np.zeros((d, d), dtype=np.int64)
            for coeff, word in rel:
                cur = ident
                for g in word:
                    cur = (gen_list[g] @ cur) % algebra.p
                val = (val + coeff * cur) % algebra.p
            if val.any():
                raise ModuleError(
                    f"generator actions violate relation #{rel_idx + 1}"
                ) from None
        raise e


def zero_module(algebra) -> Module:
    return Module(algebra, np.zeros((algebra.dim, 0, 0), dtype=np.int64), check=False)


def regular_module(algebra) -> Module:
    """The algebra acting on itself by left multiplication."""
    if "regular" not in algebra._cache:
        acts = algebra.table.transpose(0, 2, 1).copy()
        algebra._cache["regular"] = Module(algebra, acts, check=False)
    return algebra._cache["regular"]


# ---------------------------------------------------------------------------
# Maps


class ModMap:
    """An intertwining linear map between modules over the same algebra."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix, check=True):
        if source.algebra is not target.algebra:
            raise ModuleError("source and target live over different algebras")
        arr = matrix.a if isinstance(matrix, Mat) else np.asarray(matrix, dtype=np.int64)
        arr = arr.reshape(target.dim, source.dim) % source.algebra.p
        self.source = source
        self.target = target
        self.matrix = Mat(arr, source.algebra.p, _reduce=False)
        if check:
            self._check_intertwining()

    def _check_intertwining(self):
        f = self.matrix.a
        p = self.source.algebra.p
        for _, vec in self.source.algebra.generators:
            a = self.source.act(vec)
            b = self.target.act(vec)
            if not np.array_equal((f @ a) % p, (b @ f) % p):
                raise ModuleError("matrix does not intertwine the module actions")

    @classmethod
    def identity(cls, m):
        return cls(m, m, np.eye(m.dim, dtype=np.int64), check=False)

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, np.zeros((target.dim, source.dim), dtype=np.int64), check=False)

    def compose(self, other):
        """self after other."""
        if other.target is not self.source and other.target.dim != self.source.dim:
            raise ModuleError("composition dimension mismatch")
        return ModMap(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __call__(self, vec):
        return (self.matrix.a @ (np.asarray(vec) % self.matrix.p)) % self.matrix.p

    def kernel(self) -> Subspace:
        return kernel_basis(self.matrix)

    def image(self) -> Subspace:
        return Subspace.from_rows(self.matrix.a.T, self.matrix.p, self.target.dim)

    def rank(self):
        return self.matrix.rank()

    def is_epi(self):
        return self.rank() == self.target.dim

    def is_mono(self):
        return self.rank() == self.source.dim

    def is_iso(self):
        return self.source.dim == self.target.dim and self.rank() == self.source.dim

    def __repr__(self):
        return f"ModMap({self.source.dim} -> {self.target.dim})"


# ---------------------------------------------------------------------------
# Sub/quotient/sum constructions


def submodule(m: Module, space: Subspace):
    """The submodule on the given action-closed subspace: (module, inclusion)."""
    p = m.algebra.p
    b = space.basis.a
    acts = np.zeros((m.algebra.dim, space.dim, space.dim), dtype=np.int64)
    for i in range(m.algebra.dim):
        img = (b @ m._acts[i].T) % p
        coords = space.coordinates_matrix(img)
        if coords is None:
            raise ModuleError("subspace is not closed under the action")
        acts[i] = coords.T
    sub = Module(m.algebra, acts, check=False)
    incl = ModMap(sub, m, b.T, check=False)
    return sub, incl


def quotient_module(m: Module, space: Subspace):
    """The quotient by an action-closed subspace: (module, projection)."""
    p = m.algebra.p
    d = m.dim
    for i in range(m.algebra.dim):
        img = (space.basis.a @ m._acts[i].T) % p
        if space.coordinates_matrix(img) is None:
            raise ModuleError("subspace is not closed under the action")
    pivots = list(space.pivots)
    free = [c for c in range(d) if c not in set(pivots)]
    red = np.eye(d, dtype=np.int64)
    if pivots:
        sel = np.zeros((space.dim, d), dtype=np.int64)
        for r, c in enumerate(pivots):
            sel[r, c] = 1
        red = (red - space.basis.a.T @ sel) % p
    proj = red[free, :]
    lift = np.eye(d, dtype=np.int64)[:, free]
    acts = np.zeros((m.algebra.dim, len(free), len(free)), dtype=np.int64)
    for i in range(m.algebra.dim):
        acts[i] = (proj @ m._acts[i] @ lift) % p
    quot = Module(m.algebra, acts, check=False)
    return quot, ModMap(m, quot, proj, check=False)


def direct_sum(mods):
    """Direct sum with canonical inclusions and projections."""
    mods = list(mods)
    if not mods:
        raise HomlabError("direct_sum of an empty list (algebra unknown)")
    a = mods[0].algebra
    dims = [m.dim for m in mods]
    total = sum(dims)
    acts = np.zeros((a.dim, total, total), dtype=np.int64)
    off = 0
    for m in mods:
        acts[:, off : off + m.dim, off : off + m.dim] = m._acts
        off += m.dim
    s = Module(a, acts, check=False)
    incls, projs = [], []
    off = 0
    for m in mods:
        inc = np.zeros((total, m.dim), dtype=np.int64)
        inc[off : off + m.dim] = np.eye(m.dim, dtype=np.int64)
        incls.append(ModMap(m, s, inc, check=False))
        projs.append(ModMap(s, m, inc.T, check=False))
        off += m.dim
    return s, incls, projs


# ---------------------------------------------------------------------------
# Hom spaces


def hom_space(m: Module, n: Module):
    """A basis of Hom(m, n) as a list of ModMaps (canonical rref order)."""
    if m.algebra is not n.algebra:
        raise ModuleError("hom_space needs modules over one algebra")
    if m.dim == 0 or n.dim == 0:
        return []
    p = m.algebra.p
    dm, dn = m.dim, n.dim
    blocks = []
    for _, vec in m.algebra.generators:
        amat = m.act(vec)
        bmat = n.act(vec)
        blocks.append((np.kron(np.eye(dn, dtype=np.int64), amat.T) -
                       np.kron(bmat, np.eye(dm, dtype=np.int64))) % p)
    system = Mat(np.vstack(blocks), p, _reduce=False)
    ker = kernel_basis(system)
    return [ModMap(m, n, row.reshape(dn, dm), check=False) for row in ker.basis.a]


def hom_dim(m: Module, n: Module) -> int:
    if m.dim == 0 or n.dim == 0:
        return 0
    # cache holds a strong reference to n so the id key cannot be recycled
    key = ("hom_dim", id(n))
    cached = m._cache.get(key)
    if cached is not None and cached[0] is n:
        return cached[1]
    p = m.algebra.p
    dm, dn = m.dim, n.dim
    blocks = []
    for _, vec in m.algebra.generators:
        amat = m.act(vec)
        bmat = n.act(vec)
        blocks.append((np.kron(np.eye(dn, dtype=np.int64), amat.T) -
                       np.kron(bmat, np.eye(dm, dtype=np.int64))) % p)
    _, rank, _ = rref_array(np.vstack(blocks), p)
    out = dm * dn - rank
    m._cache[key] = (n, out)
    return out


# ---------------------------------------------------------------------------
# Radical, socle, top


def radical_subspace(m: Module) -> Subspace:
    """J * M as a subspace of M."""
    key = "radical_subspace"
    if key not in m._cache:
        rb = m.algebra.radical.basis.a
        if rb.shape[0] == 0 or m.dim == 0:
            m._cache[key] = Subspace.zero(m.dim, m.algebra.p)
        else:
            rows = np.vstack([m.act(r).T for r in rb])
            m._cache[key] = Subspace.from_rows(rows, m.algebra.p, m.dim)
    return m._cache[key]


def socle_subspace(m: Module) -> Subspace:
    """{v : J v = 0} as a subspace of M."""
    key = "socle_subspace"
    if key not in m._cache:
        rb = m.algebra.radical.basis.a
        if rb.shape[0] == 0 or m.dim == 0:
            m._cache[key] = Subspace.full(m.dim, m.algebra.p)
        else:
            stacked = Mat(np.vstack([m.act(r) for r in rb]), m.algebra.p, _reduce=False)
            m._cache[key] = kernel_basis(stacked)
    return m._cache[key]


def _semisimple_multiplicities(m: Module, space: Subspace):
    """Multiplicity of each simple (indexed by idempotent) in a semisimple layer."""
    a = m.algebra
    counts = []
    simple_dims = _simple_idempotent_dims(a)
    for i in range(a.idempotents.shape[0]):
        e = m.idempotent_action(i)
        rows = (space.basis.a @ e.T) % a.p
        _, rank, _ = rref_array(rows, a.p)
        q, r = divmod(rank, simple_dims[i])
        if r:
            raise HomlabError("non-integral simple multiplicity; algebra is not split basic")
        counts.append(q)
    return tuple(counts)


def _simple_idempotent_dims(a):
    """dim e_i S_i per idempotent (1 for split algebras; verified at build)."""
    key = "simple_idem_dims"
    if key not in a._cache:
        dims = []
        for i in range(a.idempotents.shape[0]):
            s, _ = simples_and_projectives(a)[i]
            _, r, _ = rref_array(s.idempotent_action(i), a.p)
            dims.append(r if r else 1)
        a._cache[key] = dims
    return a._cache[key]


def top_socle(m: Module):
    """(top multiplicities per simple, socle multiplicities per simple)."""
    key = "top_socle"
    if key not in m._cache:
        a = m.algebra
        rad = radical_subspace(m)
        top_mod, _ = quotient_module(m, rad)
        top = _semisimple_multiplicities(top_mod, Subspace.full(top_mod.dim, a.p))
        soc = _semisimple_multiplicities(m, socle_subspace(m))
        m._cache[key] = (top, soc)
    return m._cache[key]


# ---------------------------------------------------------------------------
# Projectives, covers, resolutions


class ProjectiveModule(Module):
    """Direct sum of indecomposable projectives Lambda*e_j with bookkeeping.

    copies[c] is the idempotent index of the c-th summand; each summand keeps
    its basis inside Lambda (lambda coordinates) and its canonical generator,
    which is what makes Hom(P, N) enumerable without solving linear systems.
    """

    __slots__ = ("copies", "offsets", "copy_dims", "copy_lambda", "copy_gen")

    def __init__(self, algebra, actions, copies, offsets, copy_dims, copy_lambda, copy_gen):
        super().__init__(algebra, actions, check=False)
        self.copies = copies
        self.offsets = offsets
        self.copy_dims = copy_dims
        self.copy_lambda = copy_lambda
        self.copy_gen = copy_gen


def _indec_projective_data(a):
    key = "indec_projectives"
    if key not in a._cache:
        reg = regular_module(a)
        out = []
        for i in range(a.idempotents.shape[0]):
            e = a.idempotents[i]
            rows = np.array([a.mult(a.basis_vector(j), e) for j in range(a.dim)])
            space = Subspace.from_rows(rows, a.p, a.dim)
            sub, _ = submodule(reg, space)
            gen = space.coordinates(e)
            if gen is None:
                raise HomlabError("idempotent not inside its own projective")
            out.append((sub, space.basis.a.copy(), gen))
        a._cache[key] = out
    return a._cache[key]


def build_projective(a, copies) -> ProjectiveModule:
    data = _indec_projective_data(a)
    mods = [data[i][0] for i in copies]
    dims = [m.dim for m in mods]
    total = sum(dims)
    acts = np.zeros((a.dim, total, total), dtype=np.int64)
    off = 0
    offsets = []
    copy_lambda = []
    copy_gen = []
    for c, i in enumerate(copies):
        sub, lam, gen = data[i]
        acts[:, off : off + sub.dim, off : off + sub.dim] = sub._acts
        offsets.append(off)
        copy_lambda.append(lam)
        g = np.zeros(total, dtype=np.int64)
        g[off : off + sub.dim] = gen
        copy_gen.append(g)
        off += sub.dim
    return ProjectiveModule(a, acts, list(copies), offsets, dims,
                            copy_lambda, copy_gen)


def simples_and_projectives(a):
    """One (simple, indecomposable projective) pair per primitive idempotent."""
    key = "simples_and_projectives"
    if key not in a._cache:
        pairs = []
        for i in range(a.idempotents.shape[0]):
            proj = build_projective(a, [i])
            rad = radical_subspace(proj)
            simple, _ = quotient_module(proj, rad)
            pairs.append((simple, proj))
        a._cache[key] = pairs
    return a._cache[key]


def projective_cover(m: Module) -> ModMap:
    """The projective cover epi P(M) -> M (superfluous kernel, verified)."""
    a = m.algebra
    p = a.p
    if m.dim == 0:
        return ModMap(build_projective(a, []), m, np.zeros((0, 0), dtype=np.int64), check=False)
    rad = radical_subspace(m)
    top_mod, proj = quotient_module(m, rad)
    pivots = set(rad.pivots)
    free = [c for c in range(m.dim) if c not in pivots]
    lift = np.eye(m.dim, dtype=np.int64)[:, free]
    copies = []
    gens_in_m = []
    for i in range(a.idempotents.shape[0]):
        ebar = (proj.matrix.a @ m.idempotent_action(i) @ lift) % p
        img = Subspace.from_rows(ebar.T, p, top_mod.dim)
        for row in img.basis.a:
            v = (lift @ row) % p
            v = (m.idempotent_action(i) @ v) % p
            copies.append(i)
            gens_in_m.append(v)
    cover_proj = build_projective(a, copies)
    mat = np.zeros((m.dim, cover_proj.dim), dtype=np.int64)
    for c in range(len(copies)):
        lam = cover_proj.copy_lambda[c]
        off = cover_proj.offsets[c]
        dc = cover_proj.copy_dims[c]
        # column for basis element w of Lambda*e_j: rho(w) applied to the lift
        block = np.stack([ (m.act(lam[k]) @ gens_in_m[c]) % p for k in range(dc) ], axis=1)
        mat[:, off : off + dc] = block
    cover = ModMap(cover_proj, m, mat, check=False)
    if cover.rank() != m.dim:
        raise HomlabError("projective cover construction failed to be epi")
    ker = cover.kernel()
    if not radical_subspace(cover_proj).contains_space(ker):
        raise HomlabError("projective cover kernel is not superfluous")
    return cover


def syzygy(m: Module):
    """(Omega M, inclusion into P(M), the cover map)."""
    cover = projective_cover(m)
    ker = cover.kernel()
    sub, incl = submodule(cover.source, ker)
    return sub, incl, cover


class Resolution:
    """A minimal projective resolution, extendable on demand.

    terms[i] covers the i-th syzygy; diffs[i] : terms[i] -> terms[i-1] for
    i >= 1; augmentation maps terms[0] onto the base.  syzygies[i] is the
    i-th syzygy module (syzygies[0] is the base itself).  periodicity, when
    set, is a certified pair (i0, period) with Omega^{i0+period} iso to
    Omega^{i0}.
    """

    def __init__(self, base):
        self.base = base
        self.terms = []
        self.diffs = []
        self.augmentation = None
        self.syzygies = [base]
        self._incls = []
        self.periodicity = None
        self.minimal = True

    def extend_to(self, length):
        """Ensure terms P_0 .. P_length exist."""
        while len(self.terms) <= length:
            current = self.syzygies[-1]
            omega, incl, cover = syzygy(current)
            if not self.terms:
                self.augmentation = cover
                self.terms.append(cover.source)
            else:
                prev_incl = self._incls[-1]
                self.terms.append(cover.source)
                self.diffs.append(prev_incl.compose(cover))
            self._incls.append(incl)
            self.syzygies.append(omega)
            self._detect_periodicity()
        return self

    def _detect_periodicity(self):
        if self.periodicity is not None:
            return
        new_idx = len(self.syzygies) - 1
        new = self.syzygies[new_idx]
        for j in range(new_idx):
            old = self.syzygies[j]
            if old.dim != new.dim:
                continue
            if old.dim == 0:
                # the resolution terminated; 0 is isomorphic to 0
                self.periodicity = (j, new_idx - j)
                return
            if top_socle(old) != top_socle(new):
                continue
            verdict = is_isomorphic(old, new)
            if verdict.isomorphic is True:
                self.periodicity = (j, new_idx - j)
                return

    def diff(self, i):
        """d_i : P_i -> P_{i-1} (i >= 1)."""
        return self.diffs[i - 1]


def minimal_resolution(m: Module, length: int) -> Resolution:
    with m._lock:
        res = m._cache.get("resolution")
        if res is None:
            res = Resolution(m)
            m._cache["resolution"] = res
        res.extend_to(length)
    return res


def is_projective(m: Module) -> bool:
    if m.dim == 0:
        return True
    key = "is_projective"
    if key not in m._cache:
        cover = projective_cover(m)
        m._cache[key] = cover.source.dim == m.dim
    return m._cache[key]


def is_faithful(m: Module):
    """(faithful flag, the annihilator ideal as a subspace of the algebra)."""
    a = m.algebra
    if m.dim == 0:
        ann = Subspace.full(a.dim, a.p)
        return a.dim == 0, ann
    flat = m._acts.reshape(a.dim, m.dim * m.dim).T % a.p
    ann = kernel_basis(Mat(flat, a.p, _reduce=False))
    return ann.dim == 0, ann


# ---------------------------------------------------------------------------
# Fitting decompositions and isomorphism testing


def _fitting_split(m: Module, endo):
    """Try to split M along an endomorphism; returns (ker g^inf, im g^inf) or None.

    Squaring bit_length(d)+1 times raises g beyond the d-th power, where the
    rank chain of an endomorphism of a d-dimensional space has stabilized.
    """
    p = m.algebra.p
    d = m.dim
    power = endo % p
    for _ in range(d.bit_length() + 1):
        power = (power @ power) % p
    _, rank, _ = rref_array(power, p)
    if rank == 0 or rank == d:
        return None
    ker = kernel_basis(Mat(power, p, _reduce=False))
    img = Subspace.from_rows(power.T, p, d)
    return ker, img


def _endo_basis_matrices(m: Module):
    return [f.matrix.a for f in hom_space(m, m)]


def _splitting_candidates(basis, p, rng):
    """Endomorphisms to probe: basis, pairwise sums, then seeded random combos."""
    for b in basis:
        yield b
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            yield (basis[i] + basis[j]) % p
    h = len(basis)
    if h:
        stack = np.stack(basis)
        for _ in range(ISO_RANDOM_TRIALS):
            coeffs = rng.integers(0, p, size=h)
            yield np.einsum("i,iab->ab", coeffs, stack) % p


def find_splitting(m: Module):
    """A pair of complementary nonzero submodules of M, or None if none found.

    None is definitive (indecomposable) when the exhaustive End scan ran;
    callers that need certainty should use is_indecomposable.
    """
    if m.dim <= 1:
        return None
    p = m.algebra.p
    basis = _endo_basis_matrices(m)
    rng = np.random.default_rng(_FIXED_RNG_SEED)
    seen = set()
    for endo in _splitting_candidates(basis, p, rng):
        keyb = endo.tobytes()
        if keyb in seen:
            continue
        seen.add(keyb)
        split = _fitting_split(m, endo)
        if split is not None:
            return split
    return None


def _exhaustive_indecomposable(m: Module, basis):
    """Scan all of End(M): decomposable iff some element is neither nilpotent
    nor invertible (Fitting)."""
    p = m.algebra.p
    h = len(basis)
    stack = np.stack(basis) if h else np.zeros((0, m.dim, m.dim), dtype=np.int64)
    for coeffs in itertools.product(range(p), repeat=h):
        if not any(coeffs):
            continue
        endo = np.einsum("i,iab->ab", np.array(coeffs, dtype=np.int64), stack) % p
        split = _fitting_split(m, endo)
        if split is not None:
            return False, split
    return True, None


def is_indecomposable(m: Module) -> bool:
    """Exact indecomposability via Fitting splittings over End(M)."""
    if m.dim == 0:
        raise ModuleError("the zero module is neither decomposable nor indecomposable")
    if m.dim == 1:
        return True
    key = "is_indecomposable"
    if key in m._cache:
        return m._cache[key]
    split = find_splitting(m)
    if split is not None:
        m._cache[key] = False
        return False
    basis = _endo_basis_matrices(m)
    p = m.algebra.p
    if p ** len(basis) <= END_SCAN_CAP:
        verdict, _ = _exhaustive_indecomposable(m, basis)
        m._cache[key] = verdict
        return verdict
    raise UndeterminedError(
        f"indecomposability undecided: End dimension {len(basis)} exceeds the exhaustive scan cap"
    )


def decompose(m: Module):
    """Indecomposable summands of M (exact; may raise UndeterminedError)."""
    if m.dim == 0:
        return []
    if is_indecomposable(m):
        return [m]
    split = find_splitting(m)
    if split is None:
        basis = _endo_basis_matrices(m)
        _, split = _exhaustive_indecomposable(m, basis)
    ker, img = split
    left, _ = submodule(m, ker)
    right, _ = submodule(m, img)
    return decompose(left) + decompose(right)


class ClassRegistry:
    """Per-algebra store of indecomposable isomorphism-class representatives.

    Mapping arbitrary modules onto shared representatives lets every
    homological quantity be memoized per class, which collapses the
    exponential blowup of syzygy multiplicities into multiset bookkeeping.
    """

    def __init__(self):
        self.buckets = {}

    def representative(self, mod: Module) -> Module:
        key = iso_fingerprint(mod)
        bucket = self.buckets.setdefault(key, [])
        for rep in bucket:
            verdict = is_isomorphic(rep, mod)
            if verdict.verdict == "iso":
                return rep
            if verdict.verdict == "undetermined":
                raise UndeterminedError("class registry hit an undetermined isomorphism")
        bucket.append(mod)
        return mod


def class_registry(a) -> ClassRegistry:
    if "class_registry" not in a._cache:
        a._cache["class_registry"] = ClassRegistry()
    return a._cache["class_registry"]


def indec_parts(m: Module):
    """Indecomposable summands of M as shared class representatives."""
    key = "indec_parts"
    if key not in m._cache:
        reg = class_registry(m.algebra)
        m._cache[key] = tuple(reg.representative(x) for x in decompose(m))
    return m._cache[key]


def syzygy_parts(rep: Module):
    """Class representatives of the summands of Omega(rep); memoized."""
    key = "syzygy_parts"
    if key not in rep._cache:
        if rep.dim == 0 or is_projective(rep):
            rep._cache[key] = ()
        else:
            omega, _, _ = syzygy(rep)
            rep._cache[key] = indec_parts(omega)
    return rep._cache[key]


def cover_copies(rep: Module):
    """Idempotent indices of the projective cover of rep; memoized."""
    key = "cover_copies"
    if key not in rep._cache:
        if rep.dim == 0:
            rep._cache[key] = ()
        else:
            rep._cache[key] = tuple(projective_cover(rep).source.copies)
    return rep._cache[key]


class IsoDecision:
    """Tri-state isomorphism verdict with an optional certificate."""

    __slots__ = ("verdict", "certificate")

    def __init__(self, verdict, certificate=None):
        self.verdict = verdict  # "iso" | "not_iso" | "undetermined"
        self.certificate = certificate

    @property
    def isomorphic(self):
        if self.verdict == "undetermined":
            return None
        return self.verdict == "iso"

    def __repr__(self):
        return f"IsoDecision({self.verdict})"


def iso_fingerprint(m: Module):
    """Cheap isomorphism invariants: dim, top, socle, generator action ranks."""
    key = "iso_fingerprint"
    if key not in m._cache:
        if m.dim == 0:
            m._cache[key] = (0,)
        else:
            top, soc = top_socle(m)
            ranks = []
            for _, vec in m.algebra.generators:
                _, r, _ = rref_array(m.act(vec), m.algebra.p)
                ranks.append(r)
            m._cache[key] = (m.dim, top, soc, tuple(ranks))
    return m._cache[key]


def _invertible_combo(maps, p, dim, exhaustive_cap=ISO_EXHAUSTIVE_CAP):
    """Search for an invertible combination of the given matrices.

    Returns (matrix, certain) where certain=True means the absence of a hit is
    definitive (the whole space was scanned).
    """
    h = len(maps)
    if h == 0:
        return None, True
    stack = np.stack(maps)
    for f in maps:
        _, r, _ = rref_array(f, p)
        if r == dim:
            return f, True
    rng = np.random.default_rng(_FIXED_RNG_SEED)
    for _ in range(ISO_RANDOM_TRIALS):
        coeffs = rng.integers(0, p, size=h)
        cand = np.einsum("i,iab->ab", coeffs, stack) % p
        _, r, _ = rref_array(cand, p)
        if r == dim:
            return cand, True
    if p**h <= exhaustive_cap:
        for coeffs in itertools.product(range(p), repeat=h):
            cand = np.einsum("i,iab->ab", np.array(coeffs, dtype=np.int64), stack) % p
            _, r, _ = rref_array(cand, p)
            if r == dim:
                return cand, True
        return None, True
    return None, False


def is_isomorphic(m: Module, n: Module) -> IsoDecision:
    """Exact isomorphism decision; 'undetermined' is reported, never guessed."""
    if m.algebra is not n.algebra:
        raise ModuleError("modules live over different algebras")
    if m.dim != n.dim:
        return IsoDecision("not_iso")
    if m.dim == 0:
        return IsoDecision("iso", None)
    if m is n:
        return IsoDecision("iso", ModMap.identity(m))
    if iso_fingerprint(m) != iso_fingerprint(n):
        return IsoDecision("not_iso")
    hmn = hom_dim(m, n)
    hnm = hom_dim(n, m)
    hmm = hom_dim(m, m)
    hnn = hom_dim(n, n)
    if not (hmn == hnm == hmm == hnn):
        return IsoDecision("not_iso")
    maps = [f.matrix.a for f in hom_space(m, n)]
    combo, certain = _invertible_combo(maps, m.algebra.p, m.dim)
    if combo is not None:
        return IsoDecision("iso", ModMap(m, n, combo, check=False))
    if certain:
        return IsoDecision("not_iso")
    # compare Krull-Schmidt decompositions
    try:
        parts_m = decompose(m)
        parts_n = decompose(n)
    except UndeterminedError:
        return IsoDecision("undetermined")
    if len(parts_m) == 1 and len(parts_n) == 1:
        return IsoDecision("undetermined")
    remaining = list(parts_n)
    for pm in parts_m:
        matched = None
        for i, pn in enumerate(remaining):
            sub = is_isomorphic(pm, pn)
            if sub.verdict == "undetermined":
                return IsoDecision("undetermined")
            if sub.verdict == "iso":
                matched = i
                break
        if matched is None:
            return IsoDecision("not_iso")
        remaining.pop(matched)
    # all summands matched; rebuild a certificate only on demand (rare path)
    return IsoDecision("iso", None)
