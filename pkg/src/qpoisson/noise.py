"""Single-qubit Kraus channels used for the noise study."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import superoperator

__all__ = [
    "ChannelName",
    "KrausChannel",
    "amplitude_damping",
    "phase_damping",
    "bit_flip",
    "depolarizing",
    "composite",
    "identity_channel",
    "channel_by_name",
    "CHANNEL_CODES",
]


class ChannelName(enum.Enum):
    AMPLITUDE_DAMPING = "AmplitudeDamping"
    PHASE_DAMPING = "PhaseDamping"
    BIT_FLIP = "BitFlip"
    DEPOLARIZING = "Depolarizing"
    COMPOSITE = "Composite"
    IDENTITY = "Identity"


@dataclass(frozen=True, eq=False)
class KrausChannel:
    name: ChannelName
    p: float
    operators: tuple = field(repr=False)

    def __post_init__(self):
        ops = tuple(np.asarray(e, dtype=np.complex128) for e in self.operators)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1] or any(e.shape != shape for e in ops):
            raise ValueError("Kraus operators must be square and share one shape")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def completeness_error(self) -> float:
        """Max-norm distance of ``sum_k E_k^dagger E_k`` from the identity."""
        total = sum(e.conj().T @ e for e in self.operators)
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def is_valid(self, atol: float = 1e-12) -> bool:
        return self.completeness_error() <= atol

    @cached_property
    def superoperator(self) -> np.ndarray:
        return superoperator(self.operators)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=np.complex128)
        return sum(e @ rho @ e.conj().T for e in self.operators)

    def tensor(self, other: "KrausChannel") -> "KrausChannel":
        """Independent action on two qubits; ``self`` on the first listed one."""
        ops = tuple(np.kron(a, b) for a, b in itertools.product(self.operators, other.operators))
        return KrausChannel(self.name, self.p, ops)

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Sequential composition: ``self`` first, then ``other``."""
        ops = tuple(b @ a for a, b in itertools.product(self.operators, other.operators))
        return KrausChannel(ChannelName.COMPOSITE, self.p, ops)


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"error probability must lie in [0, 1], got {p}")
    return p


_I = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def identity_channel() -> KrausChannel:
    return KrausChannel(ChannelName.IDENTITY, 0.0, (_I,))


def amplitude_damping(p: float) -> KrausChannel:
    """Energy loss: ``|1>`` decays to ``|0>`` with probability ``p``."""
    p = _check_p(p)
    e0 = np.array([[1, 0], [0, math.sqrt(1 - p)]])
    e1 = np.array([[0, math.sqrt(p)], [0, 0]])
    return KrausChannel(ChannelName.AMPLITUDE_DAMPING, p, (e0, e1))


def phase_damping(p: float) -> KrausChannel:
    """Dephasing without population change; coherences shrink by ``sqrt(1-p)``."""
    p = _check_p(p)
    e0 = np.array([[1, 0], [0, math.sqrt(1 - p)]])
    e1 = np.array([[0, 0], [0, math.sqrt(p)]])
    return KrausChannel(ChannelName.PHASE_DAMPING, p, (e0, e1))


def bit_flip(p: float) -> KrausChannel:
    """Apply X with probability ``p``.

    ``p`` is the flip probability so that it measures noise intensity the
    same way for every channel.
    """
    p = _check_p(p)
    return KrausChannel(ChannelName.BIT_FLIP, p, (math.sqrt(1 - p) * _I, math.sqrt(p) * _X))


def depolarizing(p: float) -> KrausChannel:
    """``rho -> (1 - p) rho + p I/2`` in operator-sum form."""
    p = _check_p(p)
    s = math.sqrt(p) / 2
    return KrausChannel(
        ChannelName.DEPOLARIZING, p,
        (math.sqrt(1 - 3 * p / 4) * _I, s * _X, s * _Y, s * _Z))


def composite(p: float) -> KrausChannel:
    """All four channels at the same ``p``, applied AD, PD, BF, DP in turn."""
    p = _check_p(p)
    out = amplitude_damping(p).then(phase_damping(p)).then(bit_flip(p)).then(depolarizing(p))
    return KrausChannel(ChannelName.COMPOSITE, p, out.operators)


CHANNEL_CODES = {
    "ad": amplitude_damping,
    "pd": phase_damping,
    "bf": bit_flip,
    "dp": depolarizing,
    "composite": composite,
}


def channel_by_name(code: str, p: float) -> KrausChannel:
    try:
        factory = CHANNEL_CODES[code.lower()]
    except KeyError:
        raise ValueError(f"unknown noise type {code!r}; choose from {sorted(CHANNEL_CODES)}") from None
    return factory(p)
