import numpy as np
import pytest

from jetsketch import (
    DirectionStream,
    ExplicitDirections,
    SeededDirections,
    UsageError,
    derive_component,
    normalize_key,
    real_haar_block,
    sample_direction,
)

KEY = normalize_key("ab" * 32)


class TestKeyParsing:
    def test_hex_roundtrip(self):
        assert normalize_key("00" * 32) == b"\x00" * 32
        assert normalize_key("ff" * 32) == b"\xff" * 32

    def test_int_seed(self):
        assert normalize_key(1)[:1] == b"\x01"

    def test_rejects_bad_inputs(self):
        with pytest.raises(UsageError):
            normalize_key("xyz")
        with pytest.raises(UsageError):
            normalize_key(b"short")
        with pytest.raises(UsageError):
            normalize_key(-3)


class TestHaarDirections:
    def test_n1_unit_modulus(self):
        psi = sample_direction(1, DirectionStream(KEY, 0))
        assert abs(abs(psi[0]) - 1.0) <= 1e-12

    def test_unit_norms(self):
        for n in (1, 2, 7, 33):
            src = SeededDirections(KEY, 50, n)
            norms = np.linalg.norm(src.matrix(), axis=1)
            assert np.all(np.abs(norms - 1.0) <= 1e-12)

    def test_first_coordinate_mass(self):
        # coordinates are exchangeable and moduli sum to 1
        src = SeededDirections(KEY, 10**6, 2)
        mass = np.mean(np.abs(src.matrix()[:, 0]) ** 2)
        assert abs(mass - 0.5) <= 0.002

    def test_phase_invariance_off_diagonal(self):
        src = SeededDirections(KEY, 10**6, 2)
        m = src.matrix()
        q = m[:, 0] ** 2 * np.conj(m[:, 1]) ** 2
        se = np.std(q) / np.sqrt(q.size)
        assert abs(np.mean(q)) <= 3 * se

    def test_real_sphere_contrast(self):
        u = real_haar_block(KEY, 10**6, 2)
        val = np.mean(u[:, 0] ** 2 * u[:, 1] ** 2)
        assert abs(val - 0.125) <= 0.002  # exact value is 1/8


class TestSeededDeterminism:
    def test_component_repeatable(self):
        a = derive_component(KEY, 5, 9)
        b = derive_component(KEY, 5, 9)
        assert a == b

    def test_components_distinct(self):
        vals = {derive_component(KEY, 1, j) for j in range(64)}
        assert len(vals) == 64

    def test_row_matches_explicit_roundtrip(self):
        src = SeededDirections(KEY, 6, 4)
        explicit = ExplicitDirections(src.matrix())
        for i in range(6):
            np.testing.assert_array_equal(src.row(i), explicit.row(i))

    def test_block_independent_of_chunking(self):
        src = SeededDirections(KEY, 10, 3)
        whole = src.matrix()
        pieces = np.vstack([src.block(0, 4), src.block(4, 10)])
        np.testing.assert_array_equal(whole, pieces)

    def test_unit_components_match_matrix_columns(self):
        src = SeededDirections(KEY, 8, 5)
        cols = src.unit_components(np.array([1, 3]))
        np.testing.assert_array_equal(cols, src.matrix()[:, [1, 3]])

    def test_row_normalization_uses_full_row(self):
        raw_row = sample_direction(7, DirectionStream(KEY, 2))
        src = SeededDirections(KEY, 3, 7)
        np.testing.assert_array_equal(src.row(2), raw_row)


class TestExplicitValidation:
    def test_rejects_non_unit_rows(self):
        with pytest.raises(UsageError):
            ExplicitDirections(np.array([[0.5 + 0j, 0.0]]))

    def test_accepts_unit_rows(self):
        m = np.array([[1.0 + 0j, 0.0], [0.0, 1j]])
        src = ExplicitDirections(m)
        assert src.k == 2 and src.n == 2
