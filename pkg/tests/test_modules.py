import itertools

import numpy as np
import pytest

from homlab import (
    ModuleError,
    decompose,
    direct_sum,
    enumerate_modules,
    hom_dim,
    hom_space,
    is_faithful,
    is_indecomposable,
    is_isomorphic,
    is_projective,
    make_module,
    minimal_resolution,
    projective_cover,
    regular_module,
    sample_modules,
    simples_and_projectives,
    syzygy,
    top_socle,
    zero_module,
)
from homlab.modules import radical_subspace


class TestMakeModule:
    def test_regular_module_from_generator(self, k2x):
        lam = make_module(k2x, {"x": [[0, 0], [1, 0]]})
        assert lam.dim == 2
        assert is_isomorphic(lam, regular_module(k2x)).verdict == "iso"

    def test_relation_violation(self, k2x):
        with pytest.raises(ModuleError, match="relation"):
            make_module(k2x, {"x": [[1]]})

    def test_trivial_module_two_variables(self, k2xy):
        k = make_module(k2xy, {"x": [[0]], "y": [[0]]})
        assert k.dim == 1

    def test_size_mismatch(self, k2xy):
        with pytest.raises(ModuleError, match="dimension"):
            make_module(k2xy, {"x": [[0]], "y": np.zeros((2, 2), dtype=np.int64)})

    def test_missing_generator(self, k2xy):
        with pytest.raises(ModuleError, match="missing action"):
            make_module(k2xy, {"x": [[0]]})


class TestHomSpaces:
    def test_hom_from_regular_is_evaluation(self, k2x, k2xy, quiver_a2):
        for a in (k2x, k2xy, quiver_a2):
            for m in enumerate_modules(a, 2):
                assert hom_dim(regular_module(a), m) == m.dim

    def test_hom_from_projective_counts_idempotent_block(self, quiver_a2):
        pairs = simples_and_projectives(quiver_a2)
        for m in enumerate_modules(quiver_a2, 2):
            for i, (s, p) in enumerate(pairs):
                e_dim = m.idempotent_image(i).dim
                assert hom_dim(p, m) == e_dim

    def test_socle_hom_values(self, k2x, k2xy):
        k = make_module(k2x, {"x": [[0]]})
        assert hom_dim(k, regular_module(k2x)) == 1
        kk = make_module(k2xy, {"x": [[0]], "y": [[0]]})
        assert hom_dim(kk, regular_module(k2xy)) == 2

    def test_hom_basis_maps_intertwine(self, k2xy):
        kk = make_module(k2xy, {"x": [[0]], "y": [[0]]})
        lam = regular_module(k2xy)
        for f in hom_space(kk, lam):
            f._check_intertwining()  # raises on failure


class TestIsomorphism:
    def test_self_iso_identity_certificate(self, k2x):
        lam = regular_module(k2x)
        dec = is_isomorphic(lam, lam)
        assert dec.verdict == "iso"
        assert dec.certificate.is_iso()

    def test_dim_mismatch(self, k2x):
        k = make_module(k2x, {"x": [[0]]})
        assert is_isomorphic(k, regular_module(k2x)).verdict == "not_iso"

    def test_equal_dims_different_structure(self, k2x):
        ksq = make_module(k2x, {"x": np.zeros((2, 2), dtype=np.int64)})
        lam = regular_module(k2x)
        assert is_isomorphic(ksq, lam).verdict == "not_iso"

    def test_certificate_is_intertwiner(self, k2x):
        lam1 = make_module(k2x, {"x": [[0, 0], [1, 0]]})
        lam2 = make_module(k2x, {"x": [[1, 1], [1, 1]]})  # conjugated copy
        dec = is_isomorphic(lam1, lam2)
        assert dec.verdict == "iso"
        cert = dec.certificate
        assert cert.is_iso()
        cert._check_intertwining()


class TestTopSocle:
    def test_local_regular(self, k2xy):
        top, soc = top_socle(regular_module(k2xy))
        assert top == (1,)
        assert soc == (2,)

    def test_quiver_projective(self, quiver_a2):
        _, p1 = simples_and_projectives(quiver_a2)[0]
        top, soc = top_socle(p1)
        assert top == (1, 0)
        assert soc == (0, 1)

    def test_semisimple_powers(self, k2x):
        k = make_module(k2x, {"x": [[0]]})
        m = direct_sum([k, k, k])[0]
        top, soc = top_socle(m)
        assert top == (3,) and soc == (3,)


class TestProjectiveCover:
    def test_cover_of_simple_is_regular(self, k2xy):
        k = make_module(k2xy, {"x": [[0]], "y": [[0]]})
        cover = projective_cover(k)
        assert cover.source.dim == 3
        assert cover.is_epi()
        assert radical_subspace(cover.source).contains_space(cover.kernel())

    def test_cover_of_projective_is_iso(self, k2x):
        lam = regular_module(k2x)
        cover = projective_cover(lam)
        assert cover.is_iso()

    def test_cover_of_sink_simple(self, quiver_a2):
        s2, p2 = simples_and_projectives(quiver_a2)[1]
        cover = projective_cover(s2)
        assert cover.source.dim == 1 and cover.is_iso()

    def test_dimension_bookkeeping(self, k2x3):
        for m in enumerate_modules(k2x3, 3):
            if m.dim == 0:
                continue
            cover = projective_cover(m)
            assert cover.source.dim - cover.kernel().dim == m.dim


class TestMinimalResolution:
    def test_projective_terminates(self, k2x):
        res = minimal_resolution(regular_module(k2x), 3)
        assert [t.dim for t in res.terms[:4]] == [2, 0, 0, 0]

    def test_periodic_simple(self, k2x):
        k = make_module(k2x, {"x": [[0]]})
        res = minimal_resolution(k, 6)
        assert all(t.dim == 2 for t in res.terms)
        assert res.periodicity == (0, 1)
        # each differential is multiplication by the radical generator
        for i in range(1, 4):
            assert res.diff(i).rank() == 1

    def test_syzygy_doubling(self, k2xy):
        k = make_module(k2xy, {"x": [[0]], "y": [[0]]})
        res = minimal_resolution(k, 4)
        assert [t.dim for t in res.terms] == [3, 6, 12, 24, 48]
        assert [s.dim for s in res.syzygies[:4]] == [1, 2, 4, 8]

    def test_exactness_and_minimality(self, k2x3):
        k = make_module(k2x3, {"x": [[0]]})
        res = minimal_resolution(k, 3)
        assert res.augmentation.is_epi()
        # im d_1 = ker(augmentation), im d_{i+1} = ker d_i
        assert res.diff(1).image() == res.augmentation.kernel()
        for i in range(1, 3):
            assert res.diff(i + 1).image() == res.diff(i).kernel()
        # minimality: differentials land in the radical of the target
        for i in range(1, 4):
            rad = radical_subspace(res.terms[i - 1])
            assert rad.contains_space(res.diff(i).image())
        # minimality corollary: induced maps Hom(P_{i-1}, S) -> Hom(P_i, S) vanish
        for i in range(1, 4):
            for f in hom_space(res.terms[i - 1], k)[:4]:
                comp = f.compose(res.diff(i))
                assert comp.matrix.is_zero()


class TestProjectivity:
    def test_regular_and_summands(self, quiver_a2):
        assert is_projective(regular_module(quiver_a2))
        for _, p in simples_and_projectives(quiver_a2):
            assert is_projective(p)

    def test_simple_not_projective(self, k2x):
        assert not is_projective(make_module(k2x, {"x": [[0]]}))

    def test_projective_sum_with_sink_simple(self, quiver_a2):
        s2 = simples_and_projectives(quiver_a2)[1][0]
        p1 = simples_and_projectives(quiver_a2)[0][1]
        assert is_projective(direct_sum([p1, s2])[0])

    def test_zero_module_is_projective(self, k2x):
        assert is_projective(zero_module(k2x))


class TestIndecomposability:
    def test_simple(self, k2x):
        assert is_indecomposable(make_module(k2x, {"x": [[0]]}))

    def test_semisimple_square_splits(self, k2x):
        k = make_module(k2x, {"x": [[0]]})
        assert not is_indecomposable(direct_sum([k, k])[0])

    def test_local_regular_module(self, k2xy):
        assert is_indecomposable(regular_module(k2xy))

    def test_zero_module_rejected(self, k2x):
        with pytest.raises(ModuleError):
            is_indecomposable(zero_module(k2x))

    def test_krull_schmidt_doubling(self, k2x3):
        for m in enumerate_modules(k2x3, 2):
            if m.dim == 0:
                continue
            parts = decompose(m)
            doubled = decompose(direct_sum([m, m])[0])
            assert len(doubled) == 2 * len(parts)
            assert sorted(x.dim for x in doubled) == sorted(
                d for x in parts for d in (x.dim, x.dim)
            )


class TestFaithfulness:
    def test_regular_is_faithful(self, k2xy):
        ok, ann = is_faithful(regular_module(k2xy))
        assert ok and ann.dim == 0

    def test_simple_annihilator_is_radical(self, k2xy):
        k = make_module(k2xy, {"x": [[0]], "y": [[0]]})
        ok, ann = is_faithful(k)
        assert not ok
        assert ann.dim == 2
        assert ann == k2xy.radical

    def test_faithful_summand_suffices(self, k2xy):
        k = make_module(k2xy, {"x": [[0]], "y": [[0]]})
        m = direct_sum([regular_module(k2xy), k])[0]
        assert is_faithful(m)[0]


def brute_force_classes_dual_numbers():
    """Independent oracle: every X with X^2 = 0 over F_2 up to GL-conjugacy.

    dim 1: X = [0].  dim 2: scan all 16 matrices, keep the square-zero ones,
    and separate orbits by explicit conjugation with all 6 elements of GL_2.
    """
    gl2 = []
    for bits in itertools.product((0, 1), repeat=4):
        g = np.array(bits, dtype=np.int64).reshape(2, 2)
        if (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]) % 2 == 1:
            gl2.append(g)
    assert len(gl2) == 6

    def inv2(g):
        det = (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]) % 2
        assert det == 1
        return np.array([[g[1, 1], g[0, 1]], [g[1, 0], g[0, 0]]], dtype=np.int64) % 2

    square_zero = []
    for bits in itertools.product((0, 1), repeat=4):
        x = np.array(bits, dtype=np.int64).reshape(2, 2)
        if not ((x @ x) % 2).any():
            square_zero.append(x)
    orbits = []
    for x in square_zero:
        found = False
        for rep in orbits:
            for g in gl2:
                if np.array_equal((g @ rep @ inv2(g)) % 2, x):
                    found = True
                    break
            if found:
                break
        if not found:
            orbits.append(x)
    return 1 + len(orbits), len(square_zero)  # dim-1 class plus dim-2 orbits


class TestEnumeration:
    def test_dual_numbers_dim2_against_brute_force(self, k2x):
        oracle_count, candidates = brute_force_classes_dual_numbers()
        assert candidates == 4  # 0, e12, e21, [[1,1],[1,1]]
        assert oracle_count == 3  # k, and the two square-zero orbits k^2, Lambda
        classes = [m for m in enumerate_modules(k2x, 2) if m.dim]
        assert len(classes) == oracle_count
        dims = sorted(m.dim for m in classes)
        assert dims == [1, 2, 2]

    def test_dual_numbers_dim3(self, k2x):
        classes = [m for m in enumerate_modules(k2x, 3) if m.dim]
        assert len(classes) == 5  # k, k^2, k^3, Lambda, Lambda + k

    def test_zero_dim_enumeration(self, k2x):
        classes = enumerate_modules(k2x, 0)
        assert len(classes) == 1 and classes[0].dim == 0

    def test_pairwise_non_isomorphic(self, k2x3):
        classes = [m for m in enumerate_modules(k2x3, 3) if m.dim]
        for i, m in enumerate(classes):
            for n in classes[i + 1 :]:
                assert is_isomorphic(m, n).verdict == "not_iso"

    def test_every_candidate_covered(self, k2x):
        # exhaustive completeness at dim <= 2: all 16 candidate actions land in
        # some enumerated class
        classes = [m for m in enumerate_modules(k2x, 2) if m.dim]
        for bits in itertools.product((0, 1), repeat=4):
            x = np.array(bits, dtype=np.int64).reshape(2, 2)
            if ((x @ x) % 2).any():
                continue
            mod = make_module(k2x, {"x": x})
            assert any(is_isomorphic(mod, c).verdict == "iso" for c in classes)

    def test_sampling_is_seeded(self, k2xy):
        s1 = sample_modules(k2xy, 4, draws=25, seed=42)
        s2 = sample_modules(k2xy, 4, draws=25, seed=42)
        assert len(s1) == len(s2)
        for a, b in zip(s1, s2):
            assert np.array_equal(a._acts, b._acts)

    def test_sampled_modules_are_valid(self, k2x3):
        from homlab.modules import _verify_module

        for m in sample_modules(k2x3, 4, draws=30, seed=9):
            _verify_module(m)


class TestSubquotientPlumbing:
    def test_syzygy_is_submodule_of_cover(self, k2xy):
        k = make_module(k2xy, {"x": [[0]], "y": [[0]]})
        omega, incl, cover = syzygy(k)
        assert omega.dim == 2
        assert incl.is_mono()
        assert (cover.matrix.a @ incl.matrix.a % 2 == 0).all()
