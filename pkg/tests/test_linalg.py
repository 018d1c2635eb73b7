import itertools
import random
from fractions import Fraction

import pytest

from syzkit import linalg
from syzkit.coeffring import GaussianRational, ONE, ZERO, Poly
from syzkit.randgen import random_poly, random_scalar


def rand_matrix(rng, rows, cols):
    return [[random_scalar(rng) for _ in range(cols)] for _ in range(rows)]


def det_permutation_expansion(m):
    """Independent oracle: Leibniz sum over permutations."""
    n = len(m)
    out = Poly()
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        t = Poly.constant(-1 if inv % 2 else 1)
        for i in range(n):
            t = t * m[i][perm[i]]
        out = out + t
    return out


class TestElimination:
    @pytest.mark.parametrize("seed", range(30))
    def test_bareiss_and_field_ranks_agree(self, seed):
        rng = random.Random(seed)
        rows, cols = rng.randint(1, 6), rng.randint(1, 6)
        m = rand_matrix(rng, rows, cols)
        assert linalg.rank_bareiss(m) == linalg.rank(m)

    @pytest.mark.parametrize("seed", range(20))
    def test_nullspace_vectors_annihilate(self, seed):
        rng = random.Random(100 + seed)
        rows, cols = rng.randint(1, 5), rng.randint(1, 6)
        m = rand_matrix(rng, rows, cols)
        basis = linalg.nullspace(m)
        assert len(basis) == cols - linalg.rank(m)
        for v in basis:
            for row in m:
                assert sum((a * b for a, b in zip(row, v)), ZERO) == ZERO

    @pytest.mark.parametrize("seed", range(20))
    def test_solve_consistency(self, seed):
        rng = random.Random(200 + seed)
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        m = rand_matrix(rng, rows, cols)
        x = [random_scalar(rng) for _ in range(cols)]
        b = [sum((a * v for a, v in zip(row, x)), ZERO) for row in m]
        sol = linalg.solve(m, b)
        assert sol is not None
        for row, bv in zip(m, b):
            assert sum((a * v for a, v in zip(row, sol)), ZERO) == bv

    def test_solve_inconsistent(self):
        m = [[ONE], [ONE]]
        assert linalg.solve(m, [ONE, GaussianRational(2)]) is None

    def test_invert_roundtrip(self):
        rng = random.Random(5)
        for _ in range(10):
            n = rng.randint(1, 4)
            while True:
                m = rand_matrix(rng, n, n)
                if linalg.rank(m) == n:
                    break
            inv = linalg.invert(m)
            prod = linalg.mat_mul(m, inv)
            assert prod == linalg.identity(n)

    def test_bareiss_divisions_exact_on_rationals(self):
        rng = random.Random(9)
        m = [[GaussianRational(Fraction(rng.randint(-3, 3), rng.randint(1, 4)),
                               Fraction(rng.randint(-3, 3), rng.randint(1, 4)))
              for _ in range(5)] for _ in range(4)]
        ech, piv = linalg.bareiss_echelon(m)
        for row in ech:
            for x in row:
                assert x.re.denominator == 1 and x.im.denominator == 1


class TestPolyMatrices:
    @pytest.mark.parametrize("seed", range(20))
    def test_poly_det_vs_permutation_oracle(self, seed):
        rng = random.Random(300 + seed)
        n = rng.randint(1, 4)
        m = [[random_poly(rng, ("r1", "r2"), 1, 2) for _ in range(n)] for _ in range(n)]
        assert linalg.poly_det(m) == det_permutation_expansion(m)

    def test_unit_det_inverse(self):
        r12 = Poly.variable("r12")
        one = Poly.constant(1)
        zero = Poly()
        m = [[one, zero, zero], [zero, one, -r12], [zero, -r12, one + r12 * r12]]
        assert linalg.poly_det(m) == one
        inv = linalg.poly_matrix_inverse_unit_det(m)
        for i in range(3):
            for j in range(3):
                acc = Poly()
                for k in range(3):
                    acc = acc + m[i][k] * inv[k][j]
                assert acc == (one if i == j else zero)

    def test_non_unit_det_rejected(self):
        r1 = Poly.variable("r1")
        with pytest.raises(ArithmeticError):
            linalg.poly_matrix_inverse_unit_det([[r1]])
