import pytest

from stabkit import config
from stabkit.gf2_linalg import BitMatrix, rank
from stabkit.loader import load_classical_code, load_stabilizer_code
from stabkit.pauli import PauliOperator, commutes, eta_int
from stabkit.stabilizer import canonical_completion


def ops(*texts):
    return [PauliOperator.from_string(t) for t in texts]


def random_code(rng, n, r):
    """r independent commuting generators on n qubits, drawn from rng."""

    gens = []
    while len(gens) < r:
        candidate = PauliOperator.from_ints(int(rng.integers(0, 2**n)), int(rng.integers(0, 2**n)), n)
        if any(commutes(candidate, g) for g in gens):
            continue
        etas = [eta_int(g) for g in gens + [candidate]]
        if rank(BitMatrix(tuple(etas), 2 * n)) == len(etas):
            gens.append(candidate)
    return canonical_completion(gens, n=n)


@pytest.fixture
def bitflip():
    return canonical_completion(ops("ZZI", "IZZ"))


@pytest.fixture
def shor9():
    return load_stabilizer_code(config.CODES_DIR / "shor9.code")


@pytest.fixture
def toric2():
    return load_stabilizer_code(config.CODES_DIR / "toric2.code")


@pytest.fixture
def rep3():
    return load_classical_code(config.CODES_DIR / "rep3.txt")


@pytest.fixture
def id2():
    return load_classical_code(config.CODES_DIR / "id2.txt")


@pytest.fixture
def pair3():
    return load_classical_code(config.CODES_DIR / "pair3.txt")
