"""Shared brute-force oracles.

These helpers deliberately avoid the library's fast paths: they build global
Kraus operators with explicit Kronecker products and evaluate traces against
dense Pauli matrices.
"""

from functools import reduce
from itertools import product

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("repo", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("repo")

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}


def dense_pauli(letters: str, phase: int = 0) -> np.ndarray:
    return (1j**phase) * reduce(np.kron, [PAULI[c] for c in letters])


def global_kraus(single_kraus, n):
    """All n-fold products of single-qubit Kraus operators."""
    return [reduce(np.kron, ks) for ks in product(single_kraus, repeat=n)]


def brute_conditional_ptm(u, r_matrix, kraus):
    """PTM of sigma -> U^dag R^dag N(U sigma U^dag) R U by direct summation."""
    k = int(np.log2(u.shape[1]))
    labels = ["".join(t) for t in product("IXYZ", repeat=k)]
    basis = [dense_pauli(s) for s in labels]
    out = np.zeros((len(basis), len(basis)))
    ru = r_matrix @ u
    for b, sb in enumerate(basis):
        rho = u @ sb @ u.conj().T
        noisy = sum(K @ rho @ K.conj().T for K in kraus)
        red = ru.conj().T @ noisy @ ru
        for a, sa in enumerate(basis):
            out[a, b] = np.trace(sa @ red).real / (1 << k)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance PASS/FAIL lines at the end of the run."""
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
