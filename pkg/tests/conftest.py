import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def random_unitary(rng, n):
    d = 1 << n
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def embed(u, targets, n):
    """Dense 2**n matrix of ``u`` acting on ``targets`` (targets[0] = local MSB)."""
    k = len(targets)
    d = 1 << n
    full = np.zeros((d, d), dtype=complex)
    for col in range(d):
        local_in = sum(((col >> t) & 1) << (k - 1 - i) for i, t in enumerate(targets))
        rest = col
        for t in targets:
            rest &= ~(1 << t)
        for local_out in range(1 << k):
            row = rest
            for i, t in enumerate(targets):
                row |= ((local_out >> (k - 1 - i)) & 1) << t
            full[row, col] += u[local_out, local_in]
    return full
