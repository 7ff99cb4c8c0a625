import json

import numpy as np
import pytest

from homlab import (
    BuildError,
    SpecError,
    algebra_to_structure_spec,
    build_algebra,
    direct_product,
    opposite,
    parse_spec,
    simples_and_projectives,
)
from conftest import SPEC_K2X, SPEC_K2XY, make_algebra


class TestParseSpec:
    def test_well_formed_commutative(self):
        spec = parse_spec(json.dumps(SPEC_K2XY))
        assert spec.kind == "commutative_quotient"
        assert spec.payload["variables"] == ["x", "y"]

    def test_constant_term_rejected(self):
        doc = dict(SPEC_K2X, relations=["x + 1"])
        with pytest.raises(SpecError, match="constant term"):
            parse_spec(json.dumps(doc))

    def test_nonprime_modulus_rejected(self):
        doc = dict(SPEC_K2X, field={"p": 4})
        with pytest.raises(SpecError, match="not prime"):
            parse_spec(json.dumps(doc))

    def test_unknown_identifier_rejected(self):
        doc = dict(SPEC_K2X, relations=["x*z"])
        with pytest.raises(SpecError, match="unknown identifier"):
            parse_spec(json.dumps(doc))

    def test_unknown_keys_rejected(self):
        doc = dict(SPEC_K2X, extra=1)
        with pytest.raises(SpecError, match="unknown keys"):
            parse_spec(json.dumps(doc))

    def test_json_syntax_error_has_position(self):
        with pytest.raises(SpecError, match="line"):
            parse_spec("{not json")

    def test_quiver_bad_vertex(self):
        doc = {
            "kind": "quiver",
            "field": {"p": 2},
            "vertices": 1,
            "arrows": [{"name": "a", "from": 1, "to": 5}],
            "relations": [],
        }
        with pytest.raises(SpecError, match="missing vertex"):
            parse_spec(json.dumps(doc))

    def test_quiver_relation_must_be_admissible(self):
        doc = {
            "kind": "quiver",
            "field": {"p": 2},
            "vertices": 1,
            "arrows": [{"name": "a", "from": 1, "to": 1}],
            "relations": ["a"],
        }
        with pytest.raises(SpecError, match="admissible"):
            build_algebra(parse_spec(json.dumps(doc)))


class TestBuildAlgebra:
    def test_dual_numbers(self, k2x):
        assert k2x.dim == 2
        assert k2x.radical.dim == 1
        assert k2x.is_local()
        assert k2x.is_commutative()
        assert k2x.is_radical_square_zero()

    def test_two_variable_square_zero(self, k2xy):
        assert k2xy.dim == 3
        assert k2xy.radical.dim == 2
        assert k2xy.is_local()
        assert k2xy.is_radical_square_zero()

    def test_cubic_truncation(self, k2x3):
        assert k2x3.dim == 3
        assert k2x3.radical.dim == 2
        assert not k2x3.is_radical_square_zero()

    def test_path_algebra(self, quiver_a2):
        assert quiver_a2.dim == 3
        assert quiver_a2.idempotents.shape[0] == 2
        assert quiver_a2.radical.dim == 1
        assert not quiver_a2.is_commutative()
        assert not quiver_a2.is_local()

    def test_nilpotency_degree_alone(self):
        a = make_algebra(
            {
                "kind": "commutative_quotient",
                "field": {"p": 2},
                "variables": ["x", "y"],
                "relations": [],
                "nilpotency_degree": 2,
            }
        )
        assert a.dim == 3  # same as the explicit (x,y)^2 quotient

    def test_infinite_dimensional_detected(self):
        doc = {
            "kind": "commutative_quotient",
            "field": {"p": 2},
            "variables": ["x"],
            "relations": [],
        }
        with pytest.raises(BuildError):
            build_algebra(parse_spec(json.dumps(doc)))

    def test_nonlocal_quotient_rejected(self):
        doc = {
            "kind": "commutative_quotient",
            "field": {"p": 2},
            "variables": ["x"],
            "relations": ["x^2 - x"],
            "nilpotency_degree": 4,
        }
        with pytest.raises(BuildError):
            build_algebra(parse_spec(json.dumps(doc)))

    def test_loop_quiver_needs_truncation(self):
        doc = {
            "kind": "quiver",
            "field": {"p": 2},
            "vertices": 1,
            "arrows": [{"name": "a", "from": 1, "to": 1}],
            "relations": [],
        }
        with pytest.raises(BuildError):
            build_algebra(parse_spec(json.dumps(doc)))
        doc["nilpotency_degree"] = 2
        a = build_algebra(parse_spec(json.dumps(doc)))
        assert a.dim == 2  # the dual numbers, as a one-loop quiver

    def test_structure_constants_roundtrip(self, k2xy):
        rebuilt = build_algebra(parse_spec(json.dumps(algebra_to_structure_spec(k2xy))))
        assert rebuilt.dim == k2xy.dim
        assert np.array_equal(rebuilt.table, k2xy.table)
        assert rebuilt.radical.dim == k2xy.radical.dim

    def test_structure_constants_bad_radical_rejected(self, k2x):
        doc = algebra_to_structure_spec(k2x)
        doc["radical_basis"] = [k2x.unit.tolist()]  # the unit is not nilpotent
        with pytest.raises(BuildError):
            build_algebra(parse_spec(json.dumps(doc)))


class TestAlgebraLaws:
    def test_associativity_on_all_triples(self, k2xy, quiver_a2, product_algebra):
        for a in (k2xy, quiver_a2, product_algebra):
            c = a.table
            lhs = np.einsum("ijm,mkl->ijkl", c, c) % a.p
            rhs = np.einsum("jkm,iml->ijkl", c, c) % a.p
            assert np.array_equal(lhs, rhs)

    def test_radical_is_nilpotent_ideal(self, k2x3):
        a = k2x3
        rad = a.radical
        # J * J subset J and J^dim = 0
        for u in rad.basis.a:
            for v in rad.basis.a:
                assert rad.contains(a.mult(u, v))
        power = [row for row in rad.basis.a]
        for _ in range(a.dim):
            power = [a.mult(u, v) for u in power for v in rad.basis.a]
        assert all(not p.any() for p in power)

    def test_idempotent_completeness(self, product_algebra, quiver_a2):
        for a in (product_algebra, quiver_a2):
            idem = a.idempotents
            assert np.array_equal(idem.sum(axis=0) % a.p, a.unit)
            total = 0
            for _, proj in simples_and_projectives(a):
                total += proj.dim
            assert total == a.dim


class TestOpposite:
    def test_commutative_unchanged(self, k2xy):
        op = opposite(k2xy)
        assert np.array_equal(op.table, k2xy.table)

    def test_involution_identity(self, quiver_a2):
        assert opposite(opposite(quiver_a2)) is quiver_a2

    def test_projective_dims_swap_for_arrow_reversal(self, quiver_a2):
        dims = [p.dim for _, p in simples_and_projectives(quiver_a2)]
        op_dims = [p.dim for _, p in simples_and_projectives(opposite(quiver_a2))]
        assert dims == [2, 1]
        assert op_dims == [1, 2]

    def test_radical_preserved(self, quiver_a2):
        assert opposite(quiver_a2).radical == quiver_a2.radical


class TestSimplesAndProjectives:
    def test_local_algebra_single_pair(self, k2xy):
        pairs = simples_and_projectives(k2xy)
        assert len(pairs) == 1
        s, p = pairs[0]
        assert (s.dim, p.dim) == (1, 3)

    def test_quiver_pairs(self, quiver_a2):
        pairs = simples_and_projectives(quiver_a2)
        assert [(s.dim, p.dim) for s, p in pairs] == [(1, 2), (1, 1)]
        # S2 is itself projective: P2 = S2
        from homlab import is_isomorphic

        s2, p2 = pairs[1]
        assert is_isomorphic(s2, p2).verdict == "iso"

    def test_product_block_decomposition(self, product_algebra):
        pairs = simples_and_projectives(product_algebra)
        assert sorted(p.dim for _, p in pairs) == [1, 2]


class TestDirectProduct:
    def test_block_structure(self, product_algebra):
        a = product_algebra
        assert a.dim == 3
        assert a.idempotents.shape[0] == 2
        assert a.radical.dim == 1
        assert a.is_commutative()
        assert not a.is_local()

    def test_mismatched_fields_rejected(self, k2x, k3x):
        with pytest.raises(BuildError):
            direct_product(k2x, k3x)
