"""Field states and atom-field gate constructors on a truncated Fock space.

Everything here is a pure function of its parameters.  Gate constructors
return OperatorMatrix instances bound to placeholder register names; call
``.on(...)`` to point them at concrete registers.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .fockspace import OperatorMatrix, TruncationError

# Raw probability mass allowed above the Fock cutoff.
TAIL_MASS_LIMIT = 1e-8


def tail_bound_dim(amplitude: complex) -> int:
    """Smallest Fock dimension with tail mass below 1e-8 for |amplitude>.

    Poisson tail bound: mean + 10 standard deviations comfortably clears
    the 1e-8 mass limit for any coherent amplitude.
    """
    nbar = abs(amplitude) ** 2
    return math.ceil(nbar + 10.0 * math.sqrt(nbar + 1.0))


def coherent_tail_mass(alpha: complex, truncation: int) -> float:
    """Probability mass of |alpha> above the cutoff, before renormalizing."""
    weights = np.abs(_coherent_raw(alpha, truncation)) ** 2
    return max(0.0, 1.0 - float(weights.sum()))


def _coherent_raw(alpha: complex, truncation: int) -> np.ndarray:
    if truncation < 1:
        raise TruncationError("truncation must be at least 1")
    c = np.zeros(truncation, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, truncation):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def coherent_amplitudes(alpha: complex, truncation: int) -> np.ndarray:
    """Fock amplitudes e^{-|a|²/2} aⁿ/√n!, renormalized over the cutoff."""
    c = _coherent_raw(alpha, truncation)
    tail = 1.0 - float(np.sum(np.abs(c) ** 2))
    if tail > TAIL_MASS_LIMIT:
        raise TruncationError(
            f"coherent amplitude {alpha}: tail mass {tail:.3e} above cutoff {truncation} "
            f"(need dimension >= {tail_bound_dim(alpha)})"
        )
    return c / np.linalg.norm(c)

def cat_state(alpha: complex, sign: int, truncation: int) -> np.ndarray:
    """Normalized even (+1) or odd (-1) superposition of |alpha> and |-alpha>.

    The even state has support only on even photon numbers, the odd state
    only on odd ones, so the two are exactly orthogonal.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if sign == -1 and alpha == 0:
        raise ValueError("odd superposition of |0> and |-0> is the zero vector")
    c = coherent_amplitudes(alpha, truncation)
    parity = (-1.0) ** np.arange(truncation)
    vec = c + sign * parity * c
    return vec / np.linalg.norm(vec)


@lru_cache(maxsize=None)
def parity_phase(truncation: int) -> OperatorMatrix:
    """Photon-parity operator, diagonal (-1)ⁿ in the Fock basis."""
    diag = (-1.0) ** np.arange(truncation)
    return OperatorMatrix(("mode",), np.diag(diag.astype(complex)), unitary=True)


@lru_cache(maxsize=None)
def pi_projector(sign: int, truncation: int) -> OperatorMatrix:
    """Signed parity selectors (parity +/- 1)/2 on the Fock basis.

    The + form is the projector onto even photon number.  The - form
    selects odd photon number with eigenvalue -1 (its square is the odd
    projector, i.e. minus itself); that sign is what routes the b/c
    levels in the phi=pi dispersive gate.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    p = parity_phase(truncation).matrix
    eye = np.eye(truncation, dtype=complex)
    return OperatorMatrix(("mode",), (p + sign * eye) / 2.0, unitary=False)


@lru_cache(maxsize=None)
def dispersive_lambda(phi: float, truncation: int) -> OperatorMatrix:
    """Dispersive pass of a three-level atom through a cavity.

    The two lower levels couple through the field's number operator:

        |a>  ->  -e^{i phi n} |a>
        |b>  ->  (e^{i phi n}+1)/2 |b>  +  (e^{i phi n}-1)/2 |c>
        |c>  ->  (e^{i phi n}-1)/2 |b>  +  (e^{i phi n}+1)/2 |c>

    with phi the accumulated phase per photon.  Unitary for every phi; at
    phi = pi the b/c blocks become the photon-parity projectors and the
    field is written into even/odd superpositions of +/-alpha.

    Targets (atom, mode) with the atom axis slow.
    """
    phase = np.exp(1j * phi * np.arange(truncation))
    plus = np.diag((phase + 1.0) / 2.0)
    minus = np.diag((phase - 1.0) / 2.0)
    m = np.zeros((3 * truncation, 3 * truncation), dtype=complex)

    def block(row: int, col: int, op: np.ndarray) -> None:
        m[row * truncation : (row + 1) * truncation, col * truncation : (col + 1) * truncation] = op

    block(0, 0, -np.diag(phase))  # level a
    block(1, 1, plus)             # b -> b
    block(1, 2, minus)            # c -> b
    block(2, 1, minus)            # b -> c
    block(2, 2, plus)             # c -> c
    return OperatorMatrix(("atom", "mode"), m, unitary=True)


def displacement(beta: complex, truncation: int) -> OperatorMatrix:
    """Displacement exp(beta a† - beta* a) on the truncated space.

    Computed from the spectral decomposition of the truncated generator,
    which keeps the matrix exactly unitary.  Accuracy near the cutoff is
    the caller's responsibility via tail_bound_dim.
    """
    a = np.diag(np.sqrt(np.arange(1, truncation, dtype=float)), k=1).astype(complex)
    generator = beta * a.conj().T - np.conj(beta) * a
    # generator is anti-Hermitian; diagonalize iG (Hermitian) and exponentiate
    evals, evecs = np.linalg.eigh(1j * generator)
    u = (evecs * np.exp(-1j * evals)) @ evecs.conj().T
    return OperatorMatrix(("mode",), u, unitary=True)


@lru_cache(maxsize=None)
def jc_unitary(gt: float, truncation: int) -> OperatorMatrix:
    """Resonant two-level/single-mode interaction for a Rabi angle gt.

        |f, n>  ->  cos(gt√n)     |f, n>  -  i sin(gt√n)     |e, n-1>
        |e, n>  ->  cos(gt√(n+1)) |e, n>  -  i sin(gt√(n+1)) |f, n+1>

    |f, 0> is stationary.  The top level |e, truncation-1> has no partner
    inside the cutoff and is held fixed so the matrix stays unitary; states
    obeying the tail-bound rule have negligible weight there.

    Targets (probe, mode) with the probe axis slow.
    """
    if truncation < 2:
        raise TruncationError("jc_unitary needs truncation >= 2")
    n = truncation
    m = np.zeros((2 * n, 2 * n), dtype=complex)

    def f(k: int) -> int:
        return k

    def e(k: int) -> int:
        return n + k

    m[f(0), f(0)] = 1.0
    for k in range(1, n):
        theta = gt * math.sqrt(k)
        m[f(k), f(k)] = math.cos(theta)
        m[e(k - 1), f(k)] = -1j * math.sin(theta)
        m[e(k - 1), e(k - 1)] = math.cos(theta)
        m[f(k), e(k - 1)] = -1j * math.sin(theta)
    m[e(n - 1), e(n - 1)] = 1.0
    return OperatorMatrix(("probe", "mode"), m, unitary=True)
