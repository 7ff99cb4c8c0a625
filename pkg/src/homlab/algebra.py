"""Finite-dimensional associative unital algebras over F_p.

An algebra is held as a structure-constant tensor together with a verified
radical basis and a complete list of primitive orthogonal idempotents.  Three
construction routes are supported: path algebras of quivers with admissible
relations, commutative polynomial quotients, and raw structure constants.
Quotient bases are found by linear reduction of words of increasing length;
no Groebner machinery.

Convention: products compose like functions.  For paths, ``a*b`` means
"b first, then a", so a path traversing arrows a1 then a2 is the algebra
element a2*a1.
"""

import hashlib
import itertools
import json
import re

import numpy as np

from .errors import BuildError, SpecError, HomlabError
from .linalg import Mat, Subspace, is_prime, rref_array

WORD_LENGTH_CAP = 32
DIM_CAP = 4096
SEMISIMPLE_SCAN_CAP = 1 << 16


# ---------------------------------------------------------------------------
# Specs and parsing


class AlgebraSpec:
    """Validated description of an algebra, ready for build_algebra."""

    def __init__(self, kind, p, payload, source=None):
        self.kind = kind
        self.p = p
        self.payload = payload
        self.source = source if source is not None else {}

    def __repr__(self):
        return f"AlgebraSpec(kind={self.kind!r}, p={self.p})"


_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_]\w*)|(?P<op>[-+*^]))")


def _tokenize(text, line):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise SpecError(f"unexpected character {rest[0]!r} in expression", line, pos + 1)
        if m.lastgroup is not None:
            out.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup) + 1))
        pos = m.end()
    return out


def parse_poly(text, known, p, line=0):
    """Parse ``2*x*y - y^2`` into a list of (coeff, (ident, ...)) monomials.

    known maps identifier -> anything; unknown identifiers are rejected.
    The constant term must vanish (admissibility), which is checked here.
    """
    toks = _tokenize(text, line)
    if not toks:
        raise SpecError("empty relation", line, 1)
    terms = []
    sign = 1
    i = 0
    if toks[0][0] == "op" and toks[0][1] in "+-":
        sign = -1 if toks[0][1] == "-" else 1
        i = 1
    while i < len(toks):
        coeff = sign
        factors = []
        expect_factor = True
        while i < len(toks):
            kind, val, col = toks[i]
            if kind == "int":
                coeff = (coeff * int(val)) % p
                i += 1
            elif kind == "ident":
                if val not in known:
                    raise SpecError(f"unknown identifier {val!r} in relation", line, col)
                power = 1
                if i + 1 < len(toks) and toks[i + 1][:2] == ("op", "^"):
                    if i + 2 >= len(toks) or toks[i + 2][0] != "int":
                        raise SpecError("exponent must be an integer", line, col)
                    power = int(toks[i + 2][1])
                    i += 2
                factors.extend([val] * power)
                i += 1
            elif kind == "op" and val == "*":
                i += 1
                continue
            elif kind == "op" and val in "+-":
                break
            else:
                raise SpecError(f"unexpected token {val!r}", line, col)
            expect_factor = False
        if expect_factor:
            raise SpecError("dangling operator in relation", line, 1)
        if not factors:
            raise SpecError("relation has a nonzero constant term", line, 1)
        if coeff % p:
            terms.append((coeff % p, tuple(factors)))
        if i < len(toks):
            sign = -1 if toks[i][1] == "-" else 1
            i += 1
            if i == len(toks):
                raise SpecError("dangling operator in relation", line, 1)
    return terms


_KIND_KEYS = {
    "quiver": {"kind", "field", "vertices", "arrows", "relations", "nilpotency_degree"},
    "commutative_quotient": {"kind", "field", "variables", "relations", "nilpotency_degree"},
    "structure_constants": {"kind", "field", "dim", "table", "unit", "radical_basis", "idempotents"},
}


def parse_spec(text: str) -> AlgebraSpec:
    """Parse and validate a UTF-8 algebra description document (JSON)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"invalid JSON: {e.msg}", e.lineno, e.colno) from None
    return spec_from_dict(doc)


def spec_from_dict(doc) -> AlgebraSpec:
    if not isinstance(doc, dict):
        raise SpecError("algebra description must be a JSON object")
    kind = doc.get("kind")
    if kind not in _KIND_KEYS:
        raise SpecError(f"unknown kind {kind!r}; expected one of {sorted(_KIND_KEYS)}")
    unknown = set(doc) - _KIND_KEYS[kind]
    if unknown:
        raise SpecError(f"unknown keys {sorted(unknown)} for kind {kind!r}")
    field = doc.get("field")
    if not isinstance(field, dict) or "p" not in field:
        raise SpecError('missing "field": {"p": <prime>}')
    p = field["p"]
    if not isinstance(p, int) or not is_prime(p):
        raise SpecError(f"field modulus {p!r} is not prime")

    if kind == "commutative_quotient":
        variables = doc.get("variables")
        if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
            raise SpecError('"variables" must be a list of names')
        if len(set(variables)) != len(variables):
            raise SpecError("duplicate variable names")
        relations = doc.get("relations", [])
        known = set(variables)
        parsed = [parse_poly(r, known, p, line=i + 1) for i, r in enumerate(relations)]
        nil = doc.get("nilpotency_degree")
        if nil is not None and (not isinstance(nil, int) or nil < 1):
            raise SpecError("nilpotency_degree must be a positive integer")
        payload = {"variables": list(variables), "relations": parsed, "nilpotency_degree": nil}
    elif kind == "quiver":
        nv = doc.get("vertices")
        if not isinstance(nv, int) or nv < 1:
            raise SpecError('"vertices" must be a positive integer')
        arrows = doc.get("arrows", [])
        names, srcs, tgts = [], [], []
        for a in arrows:
            if not isinstance(a, dict) or set(a) != {"name", "from", "to"}:
                raise SpecError('each arrow needs exactly the keys "name", "from", "to"')
            if a["name"] in names:
                raise SpecError(f"duplicate arrow name {a['name']!r}")
            if not (1 <= a["from"] <= nv and 1 <= a["to"] <= nv):
                raise SpecError(f"arrow {a['name']!r} references a missing vertex")
            names.append(a["name"])
            srcs.append(a["from"] - 1)
            tgts.append(a["to"] - 1)
        known = set(names)
        parsed = []
        for i, r in enumerate(doc.get("relations", [])):
            terms = parse_poly(r, known, p, line=i + 1)
            parsed.append(terms)
        nil = doc.get("nilpotency_degree")
        if nil is not None and (not isinstance(nil, int) or nil < 1):
            raise SpecError("nilpotency_degree must be a positive integer")
        payload = {
            "vertices": nv,
            "arrow_names": names,
            "arrow_src": srcs,
            "arrow_tgt": tgts,
            "relations": parsed,
            "nilpotency_degree": nil,
        }
    else:  # structure_constants
        dim = doc.get("dim")
        if not isinstance(dim, int) or dim < 1:
            raise SpecError('"dim" must be a positive integer')
        table = np.array(doc.get("table"), dtype=np.int64)
        if table.shape != (dim, dim, dim):
            raise SpecError(f'"table" must be a {dim}x{dim}x{dim} coefficient array')
        unit = np.array(doc.get("unit"), dtype=np.int64)
        if unit.shape != (dim,):
            raise SpecError(f'"unit" must be a length-{dim} vector')
        rad = np.array(doc.get("radical_basis", []), dtype=np.int64).reshape(-1, dim)
        idem = np.array(doc.get("idempotents"), dtype=np.int64)
        if idem.ndim != 2 or idem.shape[1] != dim or idem.shape[0] < 1:
            raise SpecError('"idempotents" must be a nonempty list of coordinate vectors')
        payload = {"dim": dim, "table": table % p, "unit": unit % p,
                   "radical_rows": rad % p, "idempotent_rows": idem % p}
    return AlgebraSpec(kind, p, payload, source=doc)


# ---------------------------------------------------------------------------
# The Algebra object


class Algebra:
    """A verified finite-dimensional algebra over F_p.

    table[i, j, k] is the coefficient of basis_k in basis_i * basis_j.
    generators is a list of (name, coordinate vector); every basis element is
    reachable as a product of generators (basis words are recorded so module
    actions can be derived from generator actions alone).
    """

    def __init__(self, p, table, unit, labels, words, generators, idempotent_rows,
                 radical_rows, kind, source=None, relation_words=None, _skip_verify=False):
        self.p = p
        self.table = np.asarray(table, dtype=np.int64) % p
        self.dim = self.table.shape[0]
        self.unit = np.asarray(unit, dtype=np.int64) % p
        self.labels = list(labels)
        self.words = list(words)
        self.generators = list(generators)  # (name, coords) pairs
        self.idempotents = np.asarray(idempotent_rows, dtype=np.int64) % p
        self.radical = Subspace.from_rows(radical_rows, p, self.dim)
        self.kind = kind
        self.source = source
        self.relation_words = relation_words or []
        self._op = None
        self._cache = {}
        if not _skip_verify:
            verify_algebra(self)

    # -- elementwise arithmetic ------------------------------------------------

    def mult(self, u, v):
        """Product of two coordinate vectors."""
        return np.einsum("i,j,ijk->k", u % self.p, v % self.p, self.table) % self.p

    def left_mult_matrix(self, u):
        """Matrix of x -> u*x (columns indexed by basis)."""
        return np.einsum("i,ijk->kj", u % self.p, self.table) % self.p

    def right_mult_matrix(self, v):
        """Matrix of x -> x*v."""
        return np.einsum("j,ijk->ki", v % self.p, self.table) % self.p

    def generator_index(self, name):
        for i, (n, _) in enumerate(self.generators):
            if n == name:
                return i
        raise HomlabError(f"unknown generator {name!r}")

    # -- structural predicates ---------------------------------------------

    def is_commutative(self):
        return bool(np.array_equal(self.table, self.table.swapaxes(0, 1)))

    def is_local(self):
        return self.idempotents.shape[0] == 1

    def is_radical_square_zero(self):
        rb = self.radical.basis.a
        for u in rb:
            for v in rb:
                if self.mult(u, v).any():
                    return False
        return True

    def basis_vector(self, i):
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def describe(self):
        return f"{self.kind} algebra over F_{self.p}, dim {self.dim}"

    def content_hash(self):
        h = self._cache.get("content_hash")
        if h is None:
            blob = json.dumps(
                {
                    "p": self.p,
                    "table": self.table.tolist(),
                    "unit": self.unit.tolist(),
                    "idempotents": self.idempotents.tolist(),
                    "radical": self.radical.basis.a.tolist(),
                },
                sort_keys=True,
                separators=(",", ":"),
            ).encode()
            h = hashlib.sha256(blob).hexdigest()[:16]
            self._cache["content_hash"] = h
        return h

    def __repr__(self):
        return f"Algebra({self.describe()}, hash={self.content_hash()})"


def verify_algebra(a: Algebra):
    """Check every structural law; raise BuildError on the first failure."""
    p, c, d = a.p, a.table, a.dim
    lhs = np.einsum("ijm,mkl->ijkl", c, c) % p
    rhs = np.einsum("jkm,iml->ijkl", c, c) % p
    if not np.array_equal(lhs, rhs):
        raise BuildError("structure constants are not associative")
    for i in range(d):
        b = a.basis_vector(i)
        if not np.array_equal(a.mult(a.unit, b), b) or not np.array_equal(a.mult(b, a.unit), b):
            raise BuildError("unit law fails")
    # idempotents: orthogonal, idempotent, summing to the unit
    idem = a.idempotents
    for i, e in enumerate(idem):
        for j, f in enumerate(idem):
            prod = a.mult(e, f)
            expect = e if i == j else np.zeros(d, dtype=np.int64)
            if not np.array_equal(prod, expect):
                raise BuildError("idempotents are not orthogonal idempotents")
    if not np.array_equal(idem.sum(axis=0) % p, a.unit):
        raise BuildError("idempotents do not sum to the unit")
    # radical: two-sided ideal, nilpotent
    rad = a.radical
    for i in range(d):
        b = a.basis_vector(i)
        for r in rad.basis.a:
            if not rad.contains(a.mult(b, r)) or not rad.contains(a.mult(r, b)):
                raise BuildError("claimed radical is not a two-sided ideal")
    power = rad
    for _ in range(d + 1):
        if power.is_zero():
            break
        rows = [a.mult(u, v) for u in power.basis.a for v in rad.basis.a]
        power = Subspace.from_rows(np.array(rows).reshape(-1, d), p, d)
    else:
        raise BuildError("claimed radical is not nilpotent")
    if not power.is_zero():
        raise BuildError("claimed radical is not nilpotent")
    _verify_semisimple_quotient(a)
    # generator words must reproduce the basis
    for i, w in enumerate(a.words):
        v = a.unit.copy()
        for g in w:
            v = a.mult(a.generators[g][1], v)
        if not np.array_equal(v, a.basis_vector(i)):
            raise BuildError(f"generator word for basis element {a.labels[i]!r} is wrong")


def _verify_semisimple_quotient(a: Algebra):
    """Check that Lambda / radical has zero radical.

    The quotient is tiny in practice, so scan it: a nonzero element whose
    two-sided ideal is nilpotent would witness a nonzero radical.
    """
    p, d = a.p, a.dim
    rad = a.radical
    qdim = d - rad.dim
    if qdim == 0:
        raise BuildError("radical cannot be the whole algebra (unit present)")
    if p**qdim > SEMISIMPLE_SCAN_CAP:
        raise BuildError(
            "semisimple-quotient verification is out of budget "
            f"(p^{qdim} residue classes); supply a smaller quotient"
        )
    pivset = set(rad.pivots)
    free = [i for i in range(d) if i not in pivset]
    lift = np.zeros((qdim, d), dtype=np.int64)
    for k, f in enumerate(free):
        lift[k, f] = 1

    def project(v):
        return rad.reduce(v)[free]

    # each claimed idempotent must be primitive with residue field F_p
    for e in a.idempotents:
        rows = np.array([project(a.mult(a.mult(e, a.basis_vector(j)), e)) for j in range(d)])
        _, corner_rank, _ = rref_array(rows, p)
        if corner_rank != 1:
            raise BuildError(
                "an idempotent is not primitive with residue field F_p; "
                "only split algebras are supported"
            )

    # quotient structure constants
    qtab = np.zeros((qdim, qdim, qdim), dtype=np.int64)
    for i in range(qdim):
        for j in range(qdim):
            qtab[i, j] = project(a.mult(lift[i], lift[j]))

    def qmult(u, v):
        return np.einsum("i,j,ijk->k", u, v, qtab) % p

    basis_pairs = [(lifted_i, lifted_j) for lifted_i in range(qdim) for lifted_j in range(qdim)]
    for coeffs in itertools.product(range(p), repeat=qdim):
        x = np.array(coeffs, dtype=np.int64)
        if not x.any():
            continue
        rows = [x]
        for i, j in basis_pairs:
            ei = np.zeros(qdim, dtype=np.int64)
            ei[i] = 1
            ej = np.zeros(qdim, dtype=np.int64)
            ej[j] = 1
            rows.append(qmult(qmult(ei, x), ej))
        ideal = Subspace.from_rows(np.array(rows), p, qdim)
        power = ideal
        nilpotent = False
        for _ in range(qdim + 1):
            if power.is_zero():
                nilpotent = True
                break
            prods = [qmult(u, v) for u in power.basis.a for v in ideal.basis.a]
            power = Subspace.from_rows(np.array(prods).reshape(-1, qdim), p, qdim)
        if nilpotent:
            raise BuildError("quotient by the claimed radical is not semisimple")


# ---------------------------------------------------------------------------
# Word-reduction engine shared by the quiver and commutative builders


def _stable_basis(columns_by_level, spanning_rows_fn, p, wlen, cap=WORD_LENGTH_CAP):
    """Grow word levels until no word of the top level survives reduction.

    columns_by_level(D) -> ordered list of words of length exactly D.
    spanning_rows_fn(D, index_of) -> ideal spanning rows over words of length <= D.
    wlen(word) -> grading used for pivot preference and the halting test.
    """
    words = []
    for level in range(cap + 1):
        new = columns_by_level(level)
        words.extend(new)
        if len(words) > DIM_CAP:
            raise BuildError("word basis exceeds the dimension cap; quotient looks infinite-dimensional")
        index_of = {w: i for i, w in enumerate(words)}
        # columns ordered so that longer words are eliminated first
        order = sorted(range(len(words)), key=lambda i: (-wlen(words[i]), words[i]))
        rows = spanning_rows_fn(level, index_of)
        mat = np.zeros((max(len(rows), 1), len(words)), dtype=np.int64)
        for r, row in enumerate(rows):
            for idx, coeff in row.items():
                mat[r, idx] = coeff % p
        perm = np.array(order, dtype=np.int64)
        _, _, pivots = rref_array(mat[:, perm], p)
        pivot_words = {words[order[c]] for c in pivots}
        basis = [w for w in words if w not in pivot_words]
        if level > 0 and all(wlen(w) < level for w in basis):
            return basis, level
    raise BuildError(
        f"quotient basis did not stabilize within word length {cap}; "
        "the quotient is infinite-dimensional or needs a nilpotency_degree"
    )


class _Reducer:
    """Normal forms modulo the span of ideal rows over a fixed word list."""

    def __init__(self, words, rows, p, wlen):
        self.words = list(words)
        self.index = {w: i for i, w in enumerate(self.words)}
        self.p = p
        n = len(self.words)
        order = sorted(range(n), key=lambda i: (-wlen(self.words[i]), self.words[i]))
        mat = np.zeros((max(len(rows), 1), n), dtype=np.int64)
        for r, row in enumerate(rows):
            for idx, coeff in row.items():
                mat[r, idx] = coeff % p
        permuted = mat[:, order]
        red, rank, pivots = rref_array(permuted, p)
        self.order = order
        self.red = red[:rank]
        self.pivots = pivots
        pivot_cols = set(pivots)
        self.basis_positions = [order[c] for c in range(n) if c not in pivot_cols]

    def normal_form(self, vec_dict):
        """Coordinates (on surviving words) of a sparse word-combination."""
        n = len(self.words)
        v = np.zeros(n, dtype=np.int64)
        for w, coeff in vec_dict.items():
            v[self.index[w]] = coeff % self.p
        vp = v[self.order]
        if self.red.shape[0]:
            coeffs = vp[list(self.pivots)]
            vp = (vp - coeffs @ self.red) % self.p
        out = np.zeros(n, dtype=np.int64)
        out[self.order] = vp
        return out


# ---------------------------------------------------------------------------
# Builders


def build_algebra(spec: AlgebraSpec) -> Algebra:
    if spec.kind == "commutative_quotient":
        return _build_commutative(spec)
    if spec.kind == "quiver":
        return _build_quiver(spec)
    return _build_structure_constants(spec)


def _monomial_label(variables, expo):
    if not any(expo):
        return "1"
    parts = []
    for v, e in zip(variables, expo):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def _build_commutative(spec: AlgebraSpec) -> Algebra:
    p = spec.p
    variables = spec.payload["variables"]
    nvar = len(variables)
    nil = spec.payload["nilpotency_degree"]
    relations = [
        [(c, _expvec(mono, variables)) for c, mono in rel]
        for rel in spec.payload["relations"]
    ]
    if nil is not None:
        for expo in _monomials_of_degree(nvar, nil):
            relations.append([(1, expo)])
    if not relations and nvar > 0:
        raise BuildError("a commutative quotient needs relations or a nilpotency_degree")

    # words are ('m', exponent-tuple); graded by total degree
    def wlen(w):
        return sum(w[1])

    def columns_by_level(level):
        return [("m", e) for e in _monomials_of_degree(nvar, level)]

    def spanning_rows(level, index_of):
        rows = []
        for rel in relations:
            top = max(sum(e) for _, e in rel)
            for shift_deg in range(0, level - top + 1):
                for shift in _monomials_of_degree(nvar, shift_deg):
                    row = {}
                    for coeff, e in rel:
                        key = ("m", tuple(x + y for x, y in zip(e, shift)))
                        row[index_of[key]] = (row.get(index_of[key], 0) + coeff) % p
                    rows.append(row)
        return rows

    basis_words, _ = _stable_basis(columns_by_level, spanning_rows, p, wlen)
    max_deg = max(sum(w[1]) for w in basis_words)
    reldeg = max((max(sum(e) for _, e in rel) for rel in relations), default=0)
    d2 = max(2 * max_deg, reldeg)
    all_words = [("m", e) for deg in range(d2 + 1) for e in _monomials_of_degree(nvar, deg)]
    index_of = {w: i for i, w in enumerate(all_words)}
    rows = []
    for rel in relations:
        top = max(sum(e) for _, e in rel)
        for shift_deg in range(0, d2 - top + 1):
            for shift in _monomials_of_degree(nvar, shift_deg):
                row = {}
                for coeff, e in rel:
                    key = ("m", tuple(x + y for x, y in zip(e, shift)))
                    row[index_of[key]] = (row.get(index_of[key], 0) + coeff) % p
                rows.append(row)
    reducer = _Reducer(all_words, rows, p, wlen)
    surviving = [all_words[i] for i in sorted(reducer.basis_positions)]
    low = [w for w in surviving if sum(w[1]) <= max_deg]
    if set(low) != set(basis_words):
        raise BuildError("quotient basis is unstable under longer reductions")
    basis = sorted(basis_words, key=lambda w: (sum(w[1]), w[1]))
    basis_pos_in_reduced = {reducer.index[w]: k for k, w in enumerate(basis)}

    def nf(expo):
        full = reducer.normal_form({("m", tuple(expo)): 1})
        out = np.zeros(len(basis), dtype=np.int64)
        nz = np.nonzero(full)[0]
        for i in nz:
            if i not in basis_pos_in_reduced:
                raise BuildError("normal form escaped the stabilized basis")
            out[basis_pos_in_reduced[i]] = full[i]
        return out

    dim = len(basis)
    table = np.zeros((dim, dim, dim), dtype=np.int64)
    for i, wi in enumerate(basis):
        for j, wj in enumerate(basis):
            table[i, j] = nf(tuple(x + y for x, y in zip(wi[1], wj[1])))
    unit = nf((0,) * nvar)
    labels = [_monomial_label(variables, w[1]) for w in basis]
    # generator list: the variables; words expand exponent vectors
    gens = [(v, nf(_expvec((v,), variables))) for v in variables]
    words = []
    for w in basis:
        seq = []
        for vi, e in enumerate(w[1]):
            seq.extend([vi] * e)
        words.append(tuple(seq))
    radical_rows = np.eye(dim, dtype=np.int64)[[i for i, w in enumerate(basis) if sum(w[1]) > 0]]
    idem = unit.reshape(1, -1)
    relation_words = [
        [(c, tuple(variables.index(x) for x in mono)) for c, mono in rel]
        for rel in spec.payload["relations"]
    ]
    try:
        return Algebra(p, table, unit, labels, words, gens, idem, radical_rows,
                       "commutative_quotient", source=spec.source,
                       relation_words=relation_words)
    except BuildError as e:
        raise BuildError(
            f"commutative quotient rejected: {e}. Non-local quotients must be "
            "entered through structure constants."
        ) from e


def _expvec(mono, variables):
    e = [0] * len(variables)
    for x in mono:
        e[variables.index(x)] += 1
    return tuple(e)


def _monomials_of_degree(nvar, degree):
    if degree == 0:
        yield (0,) * nvar
        return
    if nvar == 0:
        return
    for head in range(degree, -1, -1):
        for rest in _monomials_of_degree(nvar - 1, degree - head):
            yield (head,) + rest


def _build_quiver(spec: AlgebraSpec) -> Algebra:
    p = spec.p
    nv = spec.payload["vertices"]
    names = spec.payload["arrow_names"]
    src = spec.payload["arrow_src"]
    tgt = spec.payload["arrow_tgt"]
    nil = spec.payload["nilpotency_degree"]
    arrow_idx = {n: i for i, n in enumerate(names)}

    # relation terms as paths in traversal order; "a*b" composes b first
    relations = []
    for rel in spec.payload["relations"]:
        terms = []
        sig = None
        for coeff, mono in rel:
            if len(mono) < 2:
                raise SpecError(
                    f"relation term {'*'.join(mono)} has length < 2; the ideal must be admissible"
                )
            idxs = [arrow_idx[x] for x in mono]
            traversal = list(reversed(idxs))  # product order -> traversal order
            for a, b in zip(traversal, traversal[1:]):
                if tgt[a] != src[b]:
                    raise SpecError(f"non-composable path {'*'.join(mono)}")
            path = (src[traversal[0]], tuple(traversal))
            endpoints = (src[traversal[0]], tgt[traversal[-1]])
            if sig is None:
                sig = endpoints
            elif sig != endpoints:
                raise SpecError("relation mixes non-parallel paths")
            terms.append((coeff, path))
        relations.append(terms)
    if nil is not None:
        # truncate: kill every path of the given length
        extra = []
        frontier = [(v, ()) for v in range(nv)]
        for _ in range(nil):
            nxt = []
            for v, arrows in frontier:
                last_tgt = tgt[arrows[-1]] if arrows else v
                for a in range(len(names)):
                    if src[a] == last_tgt:
                        nxt.append((v, arrows + (a,)))
            frontier = nxt
        for path in frontier:
            extra.append([(1, path)])
        relations.extend(extra)

    def wlen(w):
        return len(w[1])

    def columns_by_level(level):
        if level == 0:
            return [(v, ()) for v in range(nv)]
        out = []
        for v in range(nv):
            for arrows in itertools.product(range(len(names)), repeat=level):
                ok = src[arrows[0]] == v
                for a, b in zip(arrows, arrows[1:]):
                    ok = ok and tgt[a] == src[b]
                if ok:
                    out.append((v, arrows))
        return out

    def _compose(w1, w2):
        # w1 then w2 (traversal order)
        v1, a1 = w1
        v2, a2 = w2
        end1 = tgt[a1[-1]] if a1 else v1
        if end1 != v2:
            return None
        return (v1, a1 + a2)

    def spanning_rows(level, index_of):
        rows = []
        paths_by_len = {}
        for ln in range(level + 1):
            paths_by_len[ln] = columns_by_level(ln)
        for rel in relations:
            rel_len = max(len(path[1]) for _, path in rel)
            for pre_len in range(0, level - rel_len + 1):
                for post_len in range(0, level - rel_len - pre_len + 1):
                    for pre in paths_by_len[pre_len]:
                        for post in paths_by_len[post_len]:
                            row = {}
                            dead = False
                            for coeff, path in rel:
                                w = _compose(pre, path)
                                w = _compose(w, post) if w is not None else None
                                if w is None:
                                    dead = True
                                    break
                                if len(w[1]) > level:
                                    dead = True
                                    break
                                row[index_of[w]] = (row.get(index_of[w], 0) + coeff) % p
                            if not dead and row:
                                rows.append(row)
        return rows

    basis_words, _ = _stable_basis(columns_by_level, spanning_rows, p, wlen)
    max_len = max(len(w[1]) for w in basis_words)
    rel_len_max = max((max(len(path[1]) for _, path in rel) for rel in relations), default=2)
    d2 = max(2 * max_len, rel_len_max)
    all_words = [w for ln in range(d2 + 1) for w in columns_by_level(ln)]
    index_of = {w: i for i, w in enumerate(all_words)}
    rows = []
    paths_by_len = {ln: columns_by_level(ln) for ln in range(d2 + 1)}
    for rel in relations:
        rel_len = max(len(path[1]) for _, path in rel)
        for pre_len in range(0, d2 - rel_len + 1):
            for post_len in range(0, d2 - rel_len - pre_len + 1):
                for pre in paths_by_len[pre_len]:
                    for post in paths_by_len[post_len]:
                        row = {}
                        dead = False
                        for coeff, path in rel:
                            w = _compose(pre, path)
                            w = _compose(w, post) if w is not None else None
                            if w is None or len(w[1]) > d2:
                                dead = True
                                break
                            row[index_of[w]] = (row.get(index_of[w], 0) + coeff) % p
                        if not dead and row:
                            rows.append(row)
    reducer = _Reducer(all_words, rows, p, wlen)
    surviving = [all_words[i] for i in sorted(reducer.basis_positions)]
    low = [w for w in surviving if len(w[1]) <= max_len]
    if set(low) != set(basis_words):
        raise BuildError("path basis is unstable under longer reductions")
    basis = sorted(basis_words, key=lambda w: (len(w[1]), w))
    basis_pos_in_reduced = {reducer.index[w]: k for k, w in enumerate(basis)}

    def nf_path(w):
        full = reducer.normal_form({w: 1})
        out = np.zeros(len(basis), dtype=np.int64)
        for i in np.nonzero(full)[0]:
            if i not in basis_pos_in_reduced:
                raise BuildError("normal form escaped the stabilized path basis")
            out[basis_pos_in_reduced[i]] = full[i]
        return out

    dim = len(basis)
    table = np.zeros((dim, dim, dim), dtype=np.int64)
    for i, wi in enumerate(basis):
        for j, wj in enumerate(basis):
            # product wi*wj means "wj first, then wi"
            comp = _compose(wj, wi)
            if comp is not None and len(comp[1]) <= d2:
                table[i, j] = nf_path(comp)
    unit = np.zeros(dim, dtype=np.int64)
    labels = []
    for k, (v, arrows) in enumerate(basis):
        if not arrows:
            labels.append(f"e{v + 1}")
            unit[k] = 1
        else:
            labels.append("*".join(names[a] for a in reversed(arrows)))
    # generators: vertex idempotents then arrows
    gen_names = [f"e{v + 1}" for v in range(nv)] + list(names)
    gen_vecs = []
    for v in range(nv):
        gen_vecs.append(nf_path((v, ())))
    for a in range(len(names)):
        gen_vecs.append(nf_path((src[a], (a,))))
    gens = list(zip(gen_names, gen_vecs))
    words = []
    for v, arrows in basis:
        if not arrows:
            words.append((v,))
        else:
            # product order: last traversed arrow multiplies first
            words.append(tuple(nv + a for a in reversed(arrows)))
    idem_rows = np.array([nf_path((v, ())) for v in range(nv)], dtype=np.int64)
    radical_rows = np.eye(dim, dtype=np.int64)[[i for i, w in enumerate(basis) if len(w[1]) > 0]]
    if radical_rows.size == 0:
        radical_rows = np.zeros((0, dim), dtype=np.int64)
    relation_words = []
    for rel in spec.payload["relations"]:
        terms = []
        for coeff, mono in rel:
            terms.append((coeff, tuple(nv + arrow_idx[x] for x in mono)))
        relation_words.append(terms)
    return Algebra(p, table, unit, labels, words, gens, idem_rows, radical_rows,
                   "quiver", source=spec.source, relation_words=relation_words)


def _build_structure_constants(spec: AlgebraSpec) -> Algebra:
    p = spec.p
    d = spec.payload["dim"]
    table = spec.payload["table"]
    unit = spec.payload["unit"]
    labels = [f"b{i}" for i in range(d)]
    words = [(i,) for i in range(d)]
    gens = [(labels[i], np.eye(d, dtype=np.int64)[i]) for i in range(d)]
    return Algebra(p, table, unit, labels, words, gens,
                   spec.payload["idempotent_rows"], spec.payload["radical_rows"],
                   "structure_constants", source=spec.source)


# ---------------------------------------------------------------------------
# Derived constructions


def opposite(a: Algebra) -> Algebra:
    """The opposite algebra; an involution (opposite(opposite(a)) is a)."""
    if a._op is not None:
        return a._op
    words = [tuple(reversed(w)) for w in a.words]
    op = Algebra(
        a.p,
        a.table.swapaxes(0, 1),
        a.unit,
        a.labels,
        words,
        a.generators,
        a.idempotents,
        a.radical.basis.a,
        kind=f"opposite({a.kind})",
        source=None,
        _skip_verify=True,  # transposing the table preserves every verified law
    )
    op._op = a
    a._op = op
    return op


def direct_product(a: Algebra, b: Algebra) -> Algebra:
    """Block-diagonal product algebra A x B over the same prime field."""
    if a.p != b.p:
        raise BuildError("direct product needs a common prime field")
    p = a.p
    d = a.dim + b.dim
    table = np.zeros((d, d, d), dtype=np.int64)
    table[: a.dim, : a.dim, : a.dim] = a.table
    table[a.dim :, a.dim :, a.dim :] = b.table
    unit = np.concatenate([a.unit, b.unit])
    labels = [f"0.{x}" for x in a.labels] + [f"1.{x}" for x in b.labels]
    gens = [(f"0.{n}", np.concatenate([v, np.zeros(b.dim, dtype=np.int64)])) for n, v in a.generators]
    gens += [(f"1.{n}", np.concatenate([np.zeros(a.dim, dtype=np.int64), v])) for n, v in b.generators]
    # words reference generator indices; B-side indices shift by len(a.generators)
    shift = len(a.generators)
    words = [w for w in a.words] + [tuple(shift + g for g in w) for w in b.words]
    # an empty word meant "the block's own unit"; in the product that element
    # is the embedded block unit, which needs a generator of its own
    if any(not w for w in words):
        block_units = [
            np.concatenate([a.unit, np.zeros(b.dim, dtype=np.int64)]),
            np.concatenate([np.zeros(a.dim, dtype=np.int64), b.unit]),
        ]
        unit_gen_idx = [None, None]
        for blk in range(2):
            unit_gen_idx[blk] = len(gens)
            gens.append((f"{blk}.1", block_units[blk]))
        fixed = []
        for i, w in enumerate(words):
            if not w:
                blk = 0 if i < a.dim else 1
                fixed.append((unit_gen_idx[blk],))
            else:
                fixed.append(w)
        words = fixed
    idem = np.zeros((a.idempotents.shape[0] + b.idempotents.shape[0], d), dtype=np.int64)
    idem[: a.idempotents.shape[0], : a.dim] = a.idempotents
    idem[a.idempotents.shape[0] :, a.dim :] = b.idempotents
    rad = np.zeros((a.radical.dim + b.radical.dim, d), dtype=np.int64)
    rad[: a.radical.dim, : a.dim] = a.radical.basis.a
    rad[a.radical.dim :, a.dim :] = b.radical.basis.a
    rel_words = [r for r in a.relation_words]
    rel_words += [[(c, tuple(shift + g for g in w)) for c, w in rel] for rel in b.relation_words]
    # B-side words need no unit fix: each block unit is idempotent, and block
    # generator products stay inside the block.
    prod = Algebra(p, table, unit, labels, words, gens, idem, rad,
                   "product", source=None, relation_words=rel_words)
    return prod


def algebra_to_structure_spec(a: Algebra) -> dict:
    """A structure-constants description that rebuilds an equal algebra."""
    return {
        "kind": "structure_constants",
        "field": {"p": a.p},
        "dim": a.dim,
        "table": a.table.tolist(),
        "unit": a.unit.tolist(),
        "radical_basis": a.radical.basis.a.tolist(),
        "idempotents": a.idempotents.tolist(),
    }
