import itertools
import random

import pytest

from syzkit.coeffring import Poly
from syzkit.exterior import Form
from syzkit.fourier import SemiflatPair


def brute_perm_sign(perm):
    """Permutation sign by selection-sort swap counting (independent of the
    inversion-counting oracles inside the package)."""
    perm = list(perm)
    target = sorted(perm)
    swaps = 0
    for i in range(len(perm)):
        if perm[i] != target[i]:
            j = perm.index(target[i], i + 1)
            perm[i], perm[j] = perm[j], perm[i]
            swaps += 1
    return -1 if swaps % 2 else 1


def subsets(seq):
    out = []
    for k in range(len(seq) + 1):
        out.extend(itertools.combinations(seq, k))
    return out


@pytest.fixture(scope="session")
def pair3():
    return SemiflatPair(3)


@pytest.fixture(scope="session")
def pair2():
    return SemiflatPair(2)


@pytest.fixture(scope="session")
def pair1():
    return SemiflatPair(1)


@pytest.fixture
def rng():
    return random.Random(20240817)


def iwasawa_omega_check(pair3):
    """The Hermitian (1,1)-form of the three-dimensional example on the
    complex side, in the coordinate order r1, r2, r3: the coefficient matrix
    is [[1,0,0],[0,1+r1^2,-r1],[0,-r1,1]]."""
    f = pair3.frame_xc
    r1 = Poly.variable("r1")
    one = Poly.constant(1)
    w = Form.monomial(f, ["dtc1", "dr1"])
    w = w + Form.monomial(f, ["dtc2", "dr2"], one + r1 * r1)
    w = w + Form.monomial(f, ["dtc2", "dr3"], -r1)
    w = w + Form.monomial(f, ["dtc3", "dr2"], -r1)
    w = w + Form.monomial(f, ["dtc3", "dr3"])
    return w
