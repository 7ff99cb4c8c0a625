"""The homological toolkit: duals, transpose, Ext, tensor, stable Hom.

Right modules are represented uniformly as left modules over the opposite
algebra.  opposite() is an involution on Algebra objects, so a double dual
lands over the original algebra and the evaluation map is an ordinary ModMap.
"""

from dataclasses import dataclass, field

import numpy as np

from .algebra import opposite
from .errors import HomlabError
from .linalg import Mat, Subspace, kernel_basis, rref_array
from .modules import (
    ModMap,
    Module,
    ProjectiveModule,
    cover_copies,
    decompose,
    direct_sum,
    hom_dim,
    hom_space,
    indec_parts,
    is_projective,
    minimal_resolution,
    projective_cover,
    regular_module,
    submodule,
    syzygy_parts,
    quotient_module,
    zero_module,
)


class _Span:
    """Row span with fast coordinate extraction (for expressing map images
    on a precomputed Hom basis)."""

    def __init__(self, rows, p, ambient):
        self.space = Subspace.from_rows(rows, p, ambient)
        if self.space.dim != len(rows):
            raise HomlabError("expected independent rows")
        # change of basis from the canonical rref rows back to the given rows
        coords = self.space.coordinates_matrix(np.asarray(rows, dtype=np.int64))
        self.from_canonical = Mat(np.asarray(coords), p).inverse().a
        self.p = p

    def coordinates(self, vec):
        c = self.space.coordinates(vec)
        if c is None:
            return None
        return (self.from_canonical.T @ c) % self.p


# ---------------------------------------------------------------------------
# Duality


def algebra_dual(m: Module) -> Module:
    """Hom(M, Lambda) as a left module over the opposite algebra.

    The right action (f.a)(x) = f(x) a becomes a left action of opposite(A).
    """
    key = "algebra_dual"
    if key in m._cache:
        return m._cache[key][0]
    a = m.algebra
    op = opposite(a)
    basis_maps = [f.matrix.a for f in hom_space(m, regular_module(a))]
    s = len(basis_maps)
    if s == 0:
        dual = zero_module(op)
        m._cache[key] = (dual, [], None)
        return dual
    flat = np.stack([f.reshape(-1) for f in basis_maps])
    span = _Span(flat, a.p, a.dim * m.dim)
    acts = np.zeros((op.dim, s, s), dtype=np.int64)
    for i in range(op.dim):
        rmul = a.right_mult_matrix(a.basis_vector(i))
        for t, f in enumerate(basis_maps):
            g = (rmul @ f) % a.p
            coords = span.coordinates(g.reshape(-1))
            if coords is None:
                raise HomlabError("dual action left the Hom space")
            acts[i, :, t] = coords
    dual = Module(op, acts)
    m._cache[key] = (dual, basis_maps, span)
    return dual


def _dual_data(m: Module):
    algebra_dual(m)
    return m._cache["algebra_dual"]


def dual_map(h: ModMap) -> ModMap:
    """Hom(-, Lambda) applied to a map: h*: target* -> source* over the opposite."""
    src_dual, src_basis, src_span = _dual_data(h.source)
    tgt_dual, tgt_basis, _ = _dual_data(h.target)
    s_t, s_s = len(tgt_basis), len(src_basis)
    mat = np.zeros((s_s, s_t), dtype=np.int64)
    for t, g in enumerate(tgt_basis):
        comp = (g @ h.matrix.a) % h.matrix.p
        coords = src_span.coordinates(comp.reshape(-1)) if src_span is not None else None
        if s_s and coords is None:
            raise HomlabError("dualized map escaped the dual basis")
        if s_s:
            mat[:, t] = coords
    return ModMap(tgt_dual, src_dual, mat, check=False)


def linear_dual(m: Module) -> Module:
    """The ordinary duality: linear dual with transposed actions (exact, involutive)."""
    op = opposite(m.algebra)
    acts = m._acts.transpose(0, 2, 1).copy()
    return Module(op, acts, check=False)


def linear_dual_map(h: ModMap) -> ModMap:
    """Ordinary duality on maps: D(h): D(target) -> D(source)."""
    return ModMap(linear_dual(h.target), linear_dual(h.source), h.matrix.a.T, check=False)


def transpose(m: Module) -> Module:
    """Cokernel of the dualized minimal presentation; a module over opposite(A).

    Vanishes on projectives.  The presentation used is cached for audit.
    """
    key = "transpose"
    if key in m._cache:
        return m._cache[key][0]
    a = m.algebra
    if m.dim == 0 or is_projective(m):
        tr = zero_module(opposite(a))
        m._cache[key] = (tr, None)
        return tr
    res = minimal_resolution(m, 1)
    f = res.diff(1)
    fstar = dual_map(f)
    tr, proj = quotient_module(fstar.target, fstar.image())
    m._cache[key] = (tr, (res.terms[0], res.terms[1], f, fstar, proj))
    return tr


@dataclass
class EvaluationReport:
    """Outcome of the canonical evaluation M -> M** (kernel iff torsionless,
    plus cokernel iff reflexive)."""

    module: Module
    sigma: ModMap
    kernel_dim: int
    cokernel_dim: int

    @property
    def torsionless(self):
        return self.kernel_dim == 0

    @property
    def reflexive(self):
        return self.kernel_dim == 0 and self.cokernel_dim == 0


def evaluation_report(m: Module) -> EvaluationReport:
    """sigma_M : M -> M** built from explicit dual bases; exact dims."""
    key = "evaluation_report"
    if key in m._cache:
        return m._cache[key]
    a = m.algebra
    dual, dual_basis, _ = _dual_data(m)
    ddual, ddual_basis, ddual_span = _dual_data(dual)
    if ddual.algebra is not a:
        raise HomlabError("double dual did not land over the original algebra")
    s = len(dual_basis)
    mat = np.zeros((ddual.dim, m.dim), dtype=np.int64)
    for j in range(m.dim):
        # sigma(x_j) sends f to f(x_j): a map dual -> Lambda, columns over the
        # dual basis
        val = np.zeros((a.dim, s), dtype=np.int64)
        for t, f in enumerate(dual_basis):
            val[:, t] = f[:, j]
        if ddual.dim:
            coords = ddual_span.coordinates(val.reshape(-1))
            if coords is None:
                raise HomlabError("evaluation image escaped the double dual")
            mat[:, j] = coords
    sigma = ModMap(m, ddual, mat)
    report = EvaluationReport(m, sigma, sigma.kernel().dim, ddual.dim - sigma.rank())
    m._cache[key] = report
    return report


def is_torsionless(m: Module) -> bool:
    return evaluation_report(m).torsionless


# ---------------------------------------------------------------------------
# Ext via evaluation bases on structured projectives


def _hom_from_projective_dim(proj: ProjectiveModule, n: Module) -> int:
    return sum(n.idempotent_image(j).dim for j in proj.copies)


def _delta_matrix(proj_next: ProjectiveModule, proj: ProjectiveModule, d: ModMap, n: Module):
    """Matrix of Hom(P, N) -> Hom(P', N), phi -> phi o d, on evaluation bases.

    Basis of Hom(P, N): pairs (copy c, basis vector of e_{j_c} N).
    """
    a = proj.algebra
    p = a.p
    spaces = [n.idempotent_image(j) for j in proj.copies]
    spaces_next = [n.idempotent_image(j) for j in proj_next.copies]
    rows = sum(s.dim for s in spaces_next)
    cols = sum(s.dim for s in spaces)
    out = np.zeros((rows, cols), dtype=np.int64)
    row_off = 0
    for cn, jn in enumerate(proj_next.copies):
        sn = spaces_next[cn]
        if sn.dim == 0:
            continue
        w = (d.matrix.a @ proj_next.copy_gen[cn]) % p
        col_off = 0
        for c, j in enumerate(proj.copies):
            sc = spaces[c]
            if sc.dim == 0:
                continue
            lam = (w[proj.offsets[c] : proj.offsets[c] + proj.copy_dims[c]]
                   @ proj.copy_lambda[c]) % p
            if lam.any():
                vals = (n.act(lam) @ sc.basis.a.T) % p  # n.dim x sc.dim
                coords = sn.coordinates_matrix(vals.T)
                if coords is None:
                    raise HomlabError("Hom complex value escaped its idempotent block")
                out[row_off : row_off + sn.dim, col_off : col_off + sc.dim] = coords.T
            col_off += sc.dim
        row_off += sn.dim
    return out


@dataclass
class ExtProfile:
    """dim Ext^i(M, N) for i = 0..bound, with optional certified periodicity."""

    m: Module
    n: Module
    bound: int
    dims: list
    periodicity: tuple | None = None

    def vanishes(self, start=1):
        return all(d == 0 for d in self.dims[start:])

    @property
    def certified_beyond_bound(self):
        """True when the syzygy recurrence pins every dimension above the bound."""
        if self.periodicity is None:
            return False
        i0, per = self.periodicity
        return i0 + per <= self.bound

    def dim_at(self, i):
        if i <= self.bound:
            return self.dims[i]
        if not self.certified_beyond_bound:
            raise HomlabError(f"Ext^{i} not computed and no certified periodicity")
        i0, per = self.periodicity
        return self.dims[i0 + 1 + ((i - i0 - 1) % per)]


def _ext1_of_class(rep: Module, n: Module) -> int:
    """dim Ext^1 for an indecomposable class representative.

    Euler count along 0 -> Hom(M,N) -> Hom(P_0,N) -> Hom(Omega,N) -> Ext^1 -> 0.
    """
    key = ("ext1_class", id(n))
    cached = rep._cache.get(key)
    if cached is not None and cached[0] is n:
        return cached[1]
    if rep.dim == 0 or is_projective(rep):
        out = 0
    else:
        hom_p0 = sum(n.idempotent_image(j).dim for j in cover_copies(rep))
        hom_omega = sum(hom_dim(part, n) for part in syzygy_parts(rep))
        out = hom_omega - hom_p0 + hom_dim(rep, n)
    rep._cache[key] = (n, out)
    return out


def syzygy_class_walk(m: Module, bound: int):
    """Multisets of syzygy classes Omega^0..Omega^bound, plus any repeat.

    Krull-Schmidt makes multiset equality an exact isomorphism test, so a
    repeat (i0, period) certifies the syzygy recurrence.
    """
    key = ("syzygy_walk", bound)
    cached = m._cache.get(key)
    if cached is not None:
        return cached
    levels = [tuple(sorted(indec_parts(m), key=id))]
    seen = {levels[0]: 0}
    periodicity = None
    for i in range(1, bound + 1):
        nxt = []
        for rep in levels[-1]:
            nxt.extend(syzygy_parts(rep))
        level = tuple(sorted(nxt, key=id))
        levels.append(level)
        if periodicity is None:
            if level in seen:
                periodicity = (seen[level], i - seen[level])
            else:
                seen[level] = i
    m._cache[key] = (levels, periodicity)
    return levels, periodicity


def ext_dims(m: Module, n: Module, bound: int):
    """[dim Ext^i(M, N)]_{i=0..bound} by dimension shift along syzygy classes.

    Ext^i(M, N) = Ext^1(Omega^{i-1} M, N) for i >= 1, and Ext^1 is additive
    over the Krull-Schmidt decomposition, so everything reduces to memoized
    per-class quantities.
    """
    if m.dim == 0 or n.dim == 0:
        return [0] * (bound + 1)
    levels, _ = syzygy_class_walk(m, bound)
    dims = [hom_dim(m, n)]
    for i in range(1, bound + 1):
        dims.append(sum(_ext1_of_class(rep, n) for rep in levels[i - 1]))
    return dims


def ext_dims_via_complex(m: Module, n: Module, bound: int):
    """Independent route: ranks of the Hom complex of the minimal resolution."""
    if m.dim == 0 or n.dim == 0:
        return [0] * (bound + 1)
    res = minimal_resolution(m, bound + 1)
    ranks = []
    homdims = []
    for i in range(bound + 1):
        homdims.append(_hom_from_projective_dim(res.terms[i], n))
    for i in range(bound + 1):
        delta = _delta_matrix(res.terms[i + 1], res.terms[i], res.diff(i + 1), n)
        _, r, _ = rref_array(delta, n.algebra.p)
        ranks.append(r)
    dims = [homdims[0] - ranks[0]]
    for i in range(1, bound + 1):
        dims.append(homdims[i] - ranks[i] - ranks[i - 1])
    return dims


def ext_profile(m: Module, n: Module, bound: int) -> ExtProfile:
    key = ("ext_profile", id(n), bound)
    cached = m._cache.get(key)
    if cached is not None and cached[0] is n:
        return cached[1]
    dims = ext_dims(m, n, bound)
    if m.dim == 0 or n.dim == 0:
        periodicity = (0, 1)  # identically zero in every degree
    else:
        _, periodicity = syzygy_class_walk(m, bound)
    prof = ExtProfile(m, n, bound, dims, periodicity)
    m._cache[key] = (n, prof)
    return prof


# ---------------------------------------------------------------------------
# Tensor over the algebra and the tensor-to-Hom comparison map


def tensor_realization(x: Module, n: Module):
    """X tensor_A N for X a right module (left opposite(A)) and N a left module.

    Returns (dim, projection, section): the quotient of X (x)_k N by the
    balancing subspace, with projection @ section = identity on the quotient.
    """
    a = n.algebra
    if x.algebra is not opposite(a):
        raise HomlabError("tensor needs a right module (over the opposite) and a left module")
    p = a.p
    u, v = x.dim, n.dim
    if u == 0 or v == 0:
        return 0, np.zeros((0, u * v), dtype=np.int64), np.zeros((u * v, 0), dtype=np.int64)
    rows = []
    for i in range(a.dim):
        xa = x._acts[i]  # action of b_i on the right factor: m.b_i
        nb = n._acts[i]
        # (m.b) (x) n  -  m (x) (b.n) over all pure tensor basis pairs
        block = (np.kron(xa, np.eye(v, dtype=np.int64)) -
                 np.kron(np.eye(u, dtype=np.int64), nb)) % p
        rows.append(block.T)
    span = Subspace.from_rows(np.vstack(rows), p, u * v)
    pivots = set(span.pivots)
    free = [c for c in range(u * v) if c not in pivots]
    red = np.eye(u * v, dtype=np.int64)
    if span.dim:
        sel = np.zeros((span.dim, u * v), dtype=np.int64)
        for r, c in enumerate(span.pivots):
            sel[r, c] = 1
        red = (red - span.basis.a.T @ sel) % p
    proj = red[free, :]
    section = np.eye(u * v, dtype=np.int64)[:, free]
    return len(free), proj, section


def tensor_dim(x: Module, n: Module) -> int:
    return tensor_realization(x, n)[0]


@dataclass
class TensorHomReport:
    """The natural map X tensor_A N -> Hom_A(X*, N) with exact kernel/cokernel."""

    domain_dim: int
    codomain_dim: int
    kernel_dim: int
    cokernel_dim: int
    matrix: np.ndarray


def tensor_to_hom_map(x: Module, n: Module) -> TensorHomReport:
    """zeta on pure tensors: (x tensor n) maps g to g(x) n; checked balanced."""
    p = n.algebra.p
    tdim, proj, section = tensor_realization(x, n)
    xdual = algebra_dual(x)  # a left module over the original algebra again
    _, xdual_basis, _ = _dual_data(x)
    hom_basis = hom_space(xdual, n)
    hspan = None
    if hom_basis:
        hspan = _Span(np.stack([h.matrix.a.reshape(-1) for h in hom_basis]), p,
                      xdual.dim * n.dim)
    u, v = x.dim, n.dim
    # zeta on the full tensor square, then factor through the balanced quotient
    full = np.zeros((len(hom_basis), u * v), dtype=np.int64)
    for i in range(u):
        for j in range(v):
            val = np.zeros((n.dim, xdual.dim), dtype=np.int64)
            for t, g in enumerate(xdual_basis):
                lam = g[:, i]  # g(x_i) in algebra coordinates
                val[:, t] = n.act(lam)[:, j]
            if hom_basis:
                coords = hspan.coordinates(val.reshape(-1))
                if coords is None:
                    raise HomlabError("zeta image is not an intertwiner")
                full[:, i * v + j] = coords
    mat = (full @ section) % p
    if ((full - mat @ proj) % p).any():
        raise HomlabError("zeta does not vanish on the balancing subspace")
    rank = 0
    if mat.size:
        _, rank, _ = rref_array(mat, p)
    return TensorHomReport(tdim, len(hom_basis), tdim - rank, len(hom_basis) - rank, mat)


# ---------------------------------------------------------------------------
# Projective-summand stripping and stable Hom


def strip_projectives(m: Module):
    """(core, projective part): core has no nonzero projective summand (verified)."""
    if m.dim == 0:
        return m, zero_module(m.algebra)
    parts = decompose(m)
    core_parts = [x for x in parts if not is_projective(x)]
    proj_parts = [x for x in parts if is_projective(x)]
    core = direct_sum(core_parts)[0] if core_parts else zero_module(m.algebra)
    proj = direct_sum(proj_parts)[0] if proj_parts else zero_module(m.algebra)
    if core.dim:
        for x in decompose(core):
            if is_projective(x):
                raise HomlabError("re-decomposition exposed a projective summand in the core")
    return core, proj


def injective_envelope(m: Module) -> ModMap:
    """The envelope M -> I(M) as the dual of the projective cover of D(M)."""
    dm = linear_dual(m)
    cover = projective_cover(dm)
    env = linear_dual_map(cover)  # D(P(DM)) <- ... : M = DD(M) -> D(P(DM))
    return ModMap(m, env.target, env.matrix, check=False)


def stable_hom_dims(m: Module, n: Module):
    """(dim Hom modulo projectives, dim Hom modulo injectives); both exact."""
    p = m.algebra.p
    total = hom_dim(m, n)
    if total == 0:
        return 0, 0
    # through projectives: everything factoring through the cover of N
    cover = projective_cover(n)
    through = [cover.compose(f).matrix.a.reshape(-1) for f in hom_space(m, cover.source)]
    rank_p = 0
    if through:
        _, rank_p, _ = rref_array(np.stack(through), p)
    # through injectives: everything factoring through the envelope of M
    env = injective_envelope(m)
    through_i = [f.compose(env).matrix.a.reshape(-1) for f in hom_space(env.target, n)]
    rank_i = 0
    if through_i:
        _, rank_i, _ = rref_array(np.stack(through_i), p)
    return total - rank_p, total - rank_i


# ---------------------------------------------------------------------------
# Bounded orthogonality and Gorenstein projectivity


@dataclass
class OrthogonalityProfile:
    """Self-orthogonality / Ext-to-algebra / Gorenstein-projectivity flags up to
    a bound, with a certification level ("exact" when periodicity covers every
    higher degree, else "bounded")."""

    module: Module
    bound: int
    selforthogonal: bool
    ext_to_algebra_zero: bool
    gorenstein_projective: bool
    certification: str
    self_ext: list = field(repr=False, default=None)
    ext_to_algebra: list = field(repr=False, default=None)
    dual_ext_to_algebra: list = field(repr=False, default=None)


def orthogonality_profile(m: Module, bound: int) -> OrthogonalityProfile:
    if bound < 1:
        raise HomlabError("orthogonality bound must be at least 1")
    a = m.algebra
    if m.dim == 0 or is_projective(m):
        zero = [0] * (bound + 1)
        hz = ext_dims(m, m, 0) if m.dim else [0]
        selfext = [hz[0]] + [0] * bound
        return OrthogonalityProfile(m, bound, True, True, True, "exact",
                                    selfext, zero, zero)
    op = opposite(a)
    self_prof = ext_profile(m, m, bound)
    to_alg = ext_profile(m, regular_module(a), bound)
    dual = algebra_dual(m)
    dual_to_alg = ext_profile(dual, regular_module(op), bound)
    sigma = evaluation_report(m)
    selfo = self_prof.vanishes()
    extz = to_alg.vanishes()
    gp = sigma.reflexive and extz and dual_to_alg.vanishes()
    certified = (
        to_alg.certified_beyond_bound
        and dual_to_alg.certified_beyond_bound
        and self_prof.certified_beyond_bound
    )
    return OrthogonalityProfile(
        m, bound, selfo, extz, gp, "exact" if certified else "bounded",
        self_prof.dims, to_alg.dims, dual_to_alg.dims,
    )
