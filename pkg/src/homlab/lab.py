"""Theorem predicates and verification suites.

Each predicate encodes one implication as premise flags plus a conclusion;
a suite runs a predicate over enumerated or sampled modules and reports
violations with reproducible witnesses.  For every statement with a proof,
violations == 0 is the master regression property: a nonzero count means an
implementation bug, never a refuted theorem.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .algebra import build_algebra, opposite, spec_from_dict
from .enumeration import enumerate_modules, sample_modules
from .errors import HomlabError, UndeterminedError
from .homology import (
    evaluation_report,
    ext_dims,
    linear_dual,
    orthogonality_profile,
    transpose,
)
from .linalg import Subspace, rref_array
from .modules import (
    END_SCAN_CAP,
    ModMap,
    Module,
    direct_sum,
    hom_space,
    is_faithful,
    is_indecomposable,
    is_isomorphic,
    is_projective,
    minimal_resolution,
    projective_cover,
    regular_module,
    submodule,
    quotient_module,
    simples_and_projectives,
    syzygy,
    zero_module,
)
from .serialize import module_content_hash, module_payload

PREDICATE_IDS = (
    "thm3.4",
    "thm4.1",
    "thm4.6",
    "thm4.7",
    "lem3.2",
    "lem3.3",
    "prop3.5",
    "prop3.6",
    "prop3.7",
    "gnc_bounded",
    "lem2.2_agreement",
)

_PRECONDITIONS = {
    "thm3.4": ("local", "radical_square_zero"),
    "thm4.1": ("commutative", "radical_square_zero"),
    "thm4.6": ("commutative",),
    "thm4.7": ("commutative",),
    "lem3.2": ("radical_square_zero",),
    "lem3.3": ("local", "radical_square_zero"),
    "prop3.5": (),
    "prop3.6": (),
    "prop3.7": (),
    "gnc_bounded": (),
    "lem2.2_agreement": (),
}


def algebra_flags(a):
    return {
        "local": a.is_local(),
        "radical_square_zero": a.is_radical_square_zero(),
        "commutative": a.is_commutative(),
    }


def predicate_applicable(pid, a):
    flags = algebra_flags(a)
    return all(flags[name] for name in _PRECONDITIONS[pid])


def is_simple_module(m: Module) -> bool:
    if m.dim == 0:
        return False
    for s, _ in simples_and_projectives(m.algebra):
        if s.dim == m.dim and is_isomorphic(s, m).verdict == "iso":
            return True
    return False


@dataclass
class PredicateResult:
    predicate_id: str
    applicable: bool
    premises: dict
    conclusion: bool | None
    consistent: bool
    caveats: list = field(default_factory=list)

    @property
    def premises_hold(self):
        return bool(self.premises) and all(self.premises.values())


def _cogenerates_algebra(m: Module) -> bool:
    """Does the regular module embed into a finite power of M?

    Decided by injectivity of the universal evaluation along a Hom basis."""
    a = m.algebra
    maps = hom_space(regular_module(a), m)
    if not maps:
        return a.dim == 0
    stacked = np.vstack([f.matrix.a for f in maps]) % a.p
    _, rank, _ = rref_array(stacked, a.p)
    return rank == a.dim

def _generates_cogenerator(m: Module) -> bool:
    """Is the trace of M in the dual of the opposite regular module everything?"""
    a = m.algebra
    cog = linear_dual(regular_module(opposite(a)))
    maps = hom_space(m, cog)
    if not maps:
        return cog.dim == 0
    stacked = np.vstack([f.matrix.a.T for f in maps]) % a.p
    _, rank, _ = rref_array(stacked, a.p)
    return rank == cog.dim


def evaluate_predicate(pid, m: Module, bound: int, ignore_preconditions=False) -> PredicateResult:
    """Premise flags, conclusion and consistency for one module."""
    if pid not in PREDICATE_IDS:
        raise HomlabError(f"unknown predicate id {pid!r}")
    a = m.algebra
    if not ignore_preconditions and not predicate_applicable(pid, a):
        return PredicateResult(pid, False, {}, None, True)
    caveats = []

    if pid == "lem2.2_agreement":
        faithful, _ = is_faithful(m)
        cogen = _cogenerates_algebra(m)
        gen = _generates_cogenerator(m)
        consistent = faithful == cogen == gen
        return PredicateResult(
            pid, True,
            {"faithful": faithful, "cogenerates_projectives": cogen,
             "generates_injectives": gen},
            consistent, consistent,
        )

    premises = {}
    if pid in ("thm3.4", "thm4.1", "lem3.3"):
        premises["torsionless"] = evaluation_report(m).torsionless
        premises["self_ext1_zero"] = ext_dims(m, m, 1)[1] == 0
        if pid == "lem3.3":
            premises["indecomposable"] = m.dim > 0 and is_indecomposable(m)
    elif pid == "lem3.2":
        premises["indecomposable"] = m.dim > 0 and is_indecomposable(m)
        premises["torsionless"] = evaluation_report(m).torsionless
        premises["not_simple"] = not is_simple_module(m)
    elif pid == "thm4.6":
        premises["torsionless"] = evaluation_report(m).torsionless
        to_alg = ext_dims(m, regular_module(a), 3)
        premises["ext_to_algebra_zero_1_3"] = all(d == 0 for d in to_alg[1:4])
        self_ext = ext_dims(m, m, 2)
        premises["self_ext_zero_1_2"] = all(d == 0 for d in self_ext[1:3])
    elif pid == "thm4.7":
        prof = orthogonality_profile(m, bound)
        premises["gorenstein_projective"] = prof.gorenstein_projective
        premises["selforthogonal"] = prof.selforthogonal
        if prof.certification != "exact":
            caveats.append(f"bounded-certification at B={bound}")
    elif pid == "prop3.5":
        premises["faithful"] = is_faithful(m)[0]
        premises["indecomposable"] = m.dim > 0 and is_indecomposable(m)
        premises["torsionless"] = evaluation_report(m).torsionless
    elif pid == "prop3.6":
        premises["faithful"] = is_faithful(m)[0]
        premises["indecomposable"] = m.dim > 0 and is_indecomposable(m)
        premises["ext1_to_algebra_zero"] = ext_dims(m, regular_module(a), 1)[1] == 0
        tr = transpose(m)
        premises["transpose_self_ext1_zero"] = ext_dims(tr, tr, 1)[1] == 0
    elif pid == "prop3.7":
        premises["simple"] = is_simple_module(m)
        premises["faithful"] = is_faithful(m)[0]
        premises["self_ext1_zero"] = ext_dims(m, m, 1)[1] == 0
        premises["ext1_to_algebra_zero"] = ext_dims(m, regular_module(a), 1)[1] == 0
    elif pid == "gnc_bounded":
        prof = orthogonality_profile(m, bound)
        premises["selforthogonal"] = prof.selforthogonal
        premises["ext_to_algebra_zero"] = prof.ext_to_algebra_zero
        if prof.certification != "exact":
            caveats.append(f"bounded-certification at B={bound}")

    conclusion = is_projective(m)
    consistent = (not all(premises.values())) or conclusion
    if pid == "thm4.7" and conclusion:
        # the converse direction: projective modules must satisfy both premises
        consistent = consistent and premises["gorenstein_projective"] and premises["selforthogonal"]
    return PredicateResult(pid, True, premises, conclusion, consistent, caveats)


# ---------------------------------------------------------------------------
# Universal extensions and approximations


@dataclass
class ExtensionRealization:
    """0 -> M^n -> E -> N -> 0 killing every self-extension class of N by M."""

    base: Module
    coefficient: Module
    n: int
    extension: Module
    inclusion: ModMap
    projection: ModMap
    ext1_E_M_dim: int


def ext1_cocycle_basis(n_mod: Module, m: Module):
    """Representatives of Ext^1(N, M) as maps Omega N -> M.

    Classes are maps from the syzygy modulo those extending to the cover.
    """
    omega, incl, cover = syzygy(n_mod)
    if omega.dim == 0 or m.dim == 0:
        return [], omega, incl, cover
    maps = hom_space(omega, m)
    if not maps:
        return [], omega, incl, cover
    p = m.algebra.p
    restricted = [h.compose(incl).matrix.a.reshape(-1) for h in hom_space(cover.source, m)]
    base = np.zeros((0, m.dim * omega.dim), dtype=np.int64) if not restricted else np.stack(restricted)
    span = Subspace.from_rows(base, p, m.dim * omega.dim)
    reps = []
    current = span
    for h in maps:
        flat = h.matrix.a.reshape(-1)
        if not current.contains(flat):
            reps.append(h)
            current = current.add(Subspace.from_rows(flat, p, flat.shape[0]))
    return reps, omega, incl, cover


def universal_extension(n_mod: Module, m: Module) -> ExtensionRealization:
    """Push out the cover sequence of N along a full basis of Ext^1(N, M).

    Uses a k-basis (not End(M)-module generators), so the realization need not
    be minimal; right_minimal_reduction recovers a minimal one.
    """
    a = n_mod.algebra
    p = a.p
    reps, omega, incl, cover = ext1_cocycle_basis(n_mod, m)
    n = len(reps)
    if n == 0:
        e = n_mod
        return ExtensionRealization(
            n_mod, m, 0, e, ModMap(zero_module(a), e, np.zeros((e.dim, 0), dtype=np.int64), check=False),
            ModMap.identity(n_mod), ext_dims(e, m, 1)[1],
        )
    mn, mn_incls, _ = direct_sum([m] * n)
    p0 = cover.source
    w, w_incls, w_projs = direct_sum([mn, p0])
    # graph of z -> (-phi(z), incl(z)) over the syzygy
    phi = np.vstack([rep.matrix.a for rep in reps])  # (n*dm, omega.dim)
    graph_cols = np.vstack([(-phi) % p, incl.matrix.a]) % p
    graph = Subspace.from_rows(graph_cols.T, p, w.dim)
    e_mod, proj_w = quotient_module(w, graph)
    # section of the quotient for descending maps
    pivots = set(graph.pivots)
    free = [c for c in range(w.dim) if c not in pivots]
    lift = np.eye(w.dim, dtype=np.int64)[:, free]
    incl_e = proj_w.compose(w_incls[0])
    proj_matrix = (cover.matrix.a @ w_projs[1].matrix.a @ lift) % p
    proj_e = ModMap(e_mod, n_mod, proj_matrix)
    # exactness checks
    if incl_e.rank() != mn.dim or not proj_e.is_epi():
        raise HomlabError("universal extension failed exactness at the ends")
    if (proj_e.matrix.a @ incl_e.matrix.a % p).any():
        raise HomlabError("universal extension composite is nonzero")
    if e_mod.dim != mn.dim + n_mod.dim:
        raise HomlabError("universal extension has the wrong dimension")
    ext1 = ext_dims(e_mod, m, 1)[1]
    return ExtensionRealization(n_mod, m, n, e_mod, incl_e, proj_e, ext1)


def check_right_approximation(f: ModMap, test_set):
    """Per test module: is Hom(T, source) -> Hom(T, target) onto (after f)?"""
    out = []
    p = f.matrix.p
    for t in test_set:
        target_dim = len(hom_space(t, f.target))
        through = [f.compose(h).matrix.a.reshape(-1) for h in hom_space(t, f.source)]
        rank = 0
        if through:
            _, rank, _ = rref_array(np.stack(through), p)
        out.append(rank == target_dim)
    return out


def right_minimal_reduction(f: ModMap) -> ModMap:
    """Strip summands of the source on which f is absorbed by an endomorphism.

    Iterates Fitting splittings along non-invertible g with f o g = f until
    every such g is invertible (certified by scan when feasible).
    """
    p = f.matrix.p
    current = f
    while current.source.dim:
        x = current.source
        endos = hom_space(x, x)
        direction = [h.matrix.a for h in endos
                     if not ((current.matrix.a @ h.matrix.a) % p).any()]
        found = _noninvertible_unit_shift(x, direction, p)
        if found is None:
            if p ** len(direction) > END_SCAN_CAP:
                raise UndeterminedError(
                    "right-minimality not certifiable: absorption space too large to scan"
                )
            break
        power = found % p
        for _ in range(x.dim.bit_length() + 1):
            power = (power @ power) % p
        img = Subspace.from_rows(power.T, p, x.dim)
        sub, incl = submodule(x, img)
        current = ModMap(sub, current.target, (current.matrix.a @ incl.matrix.a) % p, check=False)
    return current


def _noninvertible_unit_shift(x, direction, p):
    """Some non-invertible id + h with h in the span, or None (exhaustively
    certified when the span is small, else after seeded random search)."""
    d = x.dim
    ident = np.eye(d, dtype=np.int64)

    def attempt(h):
        g = (ident + h) % p
        _, r, _ = rref_array(g, p)
        return r < d

    for h in direction:
        if attempt(h):
            return (ident + h) % p
    for i in range(len(direction)):
        for j in range(i + 1, len(direction)):
            h = (direction[i] + direction[j]) % p
            if attempt(h):
                return (ident + h) % p
    if direction and p ** len(direction) <= END_SCAN_CAP:
        stack = np.stack(direction)
        for coeffs in itertools.product(range(p), repeat=len(direction)):
            if not any(coeffs):
                continue
            h = np.einsum("i,iab->ab", np.array(coeffs, dtype=np.int64), stack) % p
            if attempt(h):
                return (ident + h) % p
        return None
    if direction:
        rng = np.random.default_rng(0xA11CE)
        stack = np.stack(direction)
        for _ in range(256):
            coeffs = rng.integers(0, p, size=len(direction))
            h = np.einsum("i,iab->ab", coeffs, stack) % p
            if attempt(h):
                return (ident + h) % p
    return None


# ---------------------------------------------------------------------------
# Suites


@dataclass
class EnumerationConfig:
    max_dim: int = 3
    exhaustive: bool | None = None
    budget: int = 1 << 20
    seed: int = 0
    bound: int = 6
    extra_samples: int = 0
    extra_sample_dim: int | None = None

    def to_dict(self):
        return {
            "max_dim": self.max_dim,
            "exhaustive": self.exhaustive,
            "budget": self.budget,
            "seed": self.seed,
            "bound": self.bound,
            "extra_samples": self.extra_samples,
            "extra_sample_dim": self.extra_sample_dim,
        }


@dataclass
class SuiteReport:
    predicate_id: str
    algebra_description: str
    algebra_hash: str
    config: dict
    modules_checked: int
    premises_satisfied: int
    violations: int
    witnesses: list
    caveats: list
    exhaustive: bool
    applicable: bool = True

    def to_payload(self):
        return {
            "predicate_id": self.predicate_id,
            "algebra": self.algebra_description,
            "algebra_hash": self.algebra_hash,
            "applicable": self.applicable,
            "config": self.config,
            "counts": {
                "modules_checked": self.modules_checked,
                "premises_satisfied": self.premises_satisfied,
                "violations": self.violations,
            },
            "witnesses": self.witnesses,
            "caveats": sorted(set(self.caveats)),
            "exhaustive": self.exhaustive,
        }


def suite_modules(a, cfg: EnumerationConfig):
    """The module list a suite runs over, deterministic given the seed."""
    classes = enumerate_modules(a, cfg.max_dim, budget=cfg.budget, seed=cfg.seed,
                                exhaustive=cfg.exhaustive)
    extras = []
    if cfg.extra_samples:
        draws = 0
        target_dim = cfg.extra_sample_dim
        max_dim = max(cfg.max_dim, target_dim or 0)
        budget_draws = max(cfg.extra_samples * 20, 100)
        got = sample_modules(a, max_dim, draws=budget_draws, seed=cfg.seed + 1,
                             exact_dim=target_dim)
        extras = got[: cfg.extra_samples]
        if len(extras) < cfg.extra_samples:
            raise HomlabError(
                f"sampler produced only {len(extras)} of {cfg.extra_samples} requested modules"
            )
    return classes, extras


def _was_exhaustive(a, cfg):
    if cfg.exhaustive is not None:
        return bool(cfg.exhaustive)
    from .enumeration import exhaustive_candidate_count

    return exhaustive_candidate_count(a, cfg.max_dim) <= cfg.budget


def run_suite(a, ids, cfg: EnumerationConfig, workers: int = 1):
    """One SuiteReport per predicate id; violations collect full witnesses."""
    classes, extras = suite_modules(a, cfg)
    mods = classes + extras
    exhaustive = _was_exhaustive(a, cfg)
    reports = []
    for pid in ids:
        if not predicate_applicable(pid, a):
            reports.append(
                SuiteReport(pid, a.describe(), a.content_hash(), cfg.to_dict(),
                            len(mods), 0, 0,
                            [], [f"not applicable: needs {_PRECONDITIONS[pid]}"],
                            exhaustive, applicable=False)
            )
            continue

        def job(m, pid=pid):
            return evaluate_predicate(pid, m, cfg.bound)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(job, mods))
        else:
            results = [job(m) for m in mods]
        premises_satisfied = 0
        violations = []
        caveats = []
        for m, res in zip(mods, results):
            caveats.extend(res.caveats)
            if res.premises_hold:
                premises_satisfied += 1
            if not res.consistent:
                violations.append(
                    {
                        "module": module_payload(m),
                        "module_hash": module_content_hash(m),
                        "premises": res.premises,
                        "conclusion": res.conclusion,
                    }
                )
        reports.append(
            SuiteReport(pid, a.describe(), a.content_hash(), cfg.to_dict(),
                        len(mods), premises_satisfied, len(violations),
                        violations, caveats, exhaustive)
        )
    return reports


# ---------------------------------------------------------------------------
# Counterexample search (exploratory; bounded certificates only)


@dataclass
class SearchConfig:
    predicate_id: str = "thm4.7"
    algebra_kind: str = "quiver_rsz"  # or "commutative_local"
    num_algebras: int = 4
    max_dim: int = 3
    budget: int = 4096
    bound: int = 6
    seed: int = 0


def _sample_algebra_spec(kind, rng):
    p = int(rng.choice([2, 3]))
    if kind == "commutative_local":
        nvars = int(rng.integers(1, 3))
        variables = ["x", "y"][:nvars]
        nil = int(rng.integers(2, 4))
        rels = []
        for v in variables:
            if rng.integers(0, 2):
                rels.append(f"{v}^2")
        return {
            "kind": "commutative_quotient",
            "field": {"p": p},
            "variables": variables,
            "relations": rels,
            "nilpotency_degree": nil,
        }
    if kind == "quiver_rsz":
        nv = int(rng.integers(2, 4))
        narrows = int(rng.integers(1, 4))
        arrows = []
        for i in range(narrows):
            arrows.append(
                {
                    "name": f"a{i}",
                    "from": int(rng.integers(1, nv + 1)),
                    "to": int(rng.integers(1, nv + 1)),
                }
            )
        return {
            "kind": "quiver",
            "field": {"p": p},
            "vertices": nv,
            "arrows": arrows,
            "relations": [],
            "nilpotency_degree": 2,
        }
    raise HomlabError(f"unknown algebra sampler kind {kind!r}")


def search_counterexample(cfg: SearchConfig):
    """Stream SuiteReports over sampled algebras; violations are re-verified
    from scratch at a doubled bound and only ever labeled candidates."""
    if cfg.predicate_id not in ("thm4.7", "gnc_bounded"):
        raise HomlabError("search supports only the open-conjecture predicates")
    rng = np.random.default_rng(np.uint64(cfg.seed))
    for _ in range(cfg.num_algebras):
        spec = _sample_algebra_spec(cfg.algebra_kind, rng)
        try:
            a = build_algebra(spec_from_dict(spec))
        except HomlabError:
            continue
        enum_cfg = EnumerationConfig(max_dim=cfg.max_dim, budget=cfg.budget,
                                     seed=cfg.seed, bound=cfg.bound)
        classes, _ = suite_modules(a, enum_cfg)
        premises_satisfied = 0
        candidates = []
        caveats = []
        for m in classes:
            res = evaluate_predicate(cfg.predicate_id, m, cfg.bound,
                                     ignore_preconditions=True)
            caveats.extend(res.caveats)
            if res.premises_hold:
                premises_satisfied += 1
            if not res.consistent:
                confirmed, certified = _reverify_candidate(cfg.predicate_id, m, cfg.bound)
                if confirmed:
                    tag = "candidate pending unbounded certification"
                    if not certified:
                        tag += " (bounded-certification)"
                    candidates.append(
                        {
                            "module": module_payload(m),
                            "module_hash": module_content_hash(m),
                            "status": tag,
                        }
                    )
        yield SuiteReport(
            cfg.predicate_id, a.describe(), a.content_hash(),
            {"search": True, "max_dim": cfg.max_dim, "seed": cfg.seed,
             "bound": cfg.bound, "budget": cfg.budget, "algebra_kind": cfg.algebra_kind},
            len(classes), premises_satisfied, len(candidates), candidates,
            caveats, _was_exhaustive(a, enum_cfg),
        )


def _reverify_candidate(pid, m, bound):
    """Recompute every premise from a fresh deserialization at doubled bound."""
    from .serialize import module_from_dict, module_to_dict

    fresh = module_from_dict(module_to_dict(m))
    res = evaluate_predicate(pid, fresh, 2 * bound, ignore_preconditions=True)
    prof = orthogonality_profile(fresh, 2 * bound)
    return (not res.consistent), prof.certification == "exact"
