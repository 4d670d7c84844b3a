"""Core domain types: isometry tuples, words, validation, compression.

A system here is a tuple of complex n x n operators V_1, ..., V_d obeying
the defining relation sum_i V_i V_i* = 1. Equivalently, stacking the adjoints
into a single column gives an isometry from the n-dimensional space into its
d-fold direct sum; every such tuple is the compression of a d-isometry
representation to a co-invariant subspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import ValidationError
from .numerics import as_matrix

__all__ = [
    "Word",
    "PopescuSystem",
    "validate",
    "v_word",
    "words_of_length",
    "words_up_to",
    "random_system",
    "compress",
]

#: A word is a finite tuple of 0-based letters in range(d); () is the empty word.
Word = tuple[int, ...]

DEFAULT_VALIDATE_TOL = 1e-9


@dataclass(frozen=True)
class PopescuSystem:
    """Immutable tuple of d generators on an n-dimensional space.

    Construct through :meth:`from_operators`, which enforces the defining
    relation; the raw constructor is reserved for internal callers that have
    already validated.
    """

    operators: tuple[np.ndarray, ...]
    d: int = field(init=False)
    n: int = field(init=False)

    def __post_init__(self):
        ops = tuple(np.ascontiguousarray(as_matrix(v, "operator")) for v in self.operators)
        if len(ops) < 2:
            raise ValidationError("a system needs at least d = 2 generators")
        n = ops[0].shape[0]
        for v in ops:
            if v.shape != (n, n):
                raise ValidationError(
                    f"all operators must be {n}x{n}, got {v.shape}"
                )
        for v in ops:
            v.flags.writeable = False
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "d", len(ops))
        object.__setattr__(self, "n", n)

    @classmethod
    def from_operators(cls, operators, tol: float = DEFAULT_VALIDATE_TOL) -> "PopescuSystem":
        sys_ = cls(tuple(np.asarray(v, dtype=complex) for v in operators))
        residual = validate(sys_)
        if residual > tol:
            raise ValidationError(
                f"defining relation fails: ||sum V_i V_i* - I|| = {residual:.3e} > {tol:.3e}"
            )
        return sys_

    def __iter__(self):
        return iter(self.operators)


def validate(system: PopescuSystem) -> float:
    """Residual ||sum_i V_i V_i* - I|| of the defining relation."""
    acc = sum(v @ v.conj().T for v in system.operators)
    return float(np.linalg.norm(acc - np.eye(system.n), 2))


def v_word(system: PopescuSystem, word: Word) -> np.ndarray:
    """Ordered product V_{i_1} V_{i_2} ... V_{i_m}; the empty word gives I."""
    out = np.eye(system.n, dtype=complex)
    for letter in word:
        if not 0 <= letter < system.d:
            raise ValueError(f"letter {letter} out of range for d = {system.d}")
        out = out @ system.operators[letter]
    return out


def words_of_length(d: int, length: int) -> list[Word]:
    """All words of exactly the given length, in lexicographic order."""
    return [tuple(w) for w in product(range(d), repeat=length)]


def words_up_to(d: int, max_len: int) -> list[Word]:
    """All words of length <= max_len, ordered by length then lexicographically."""
    out: list[Word] = []
    for m in range(max_len + 1):
        out.extend(words_of_length(d, m))
    return out


def random_system(d: int, n: int, seed: int) -> PopescuSystem:
    """Draw a Haar-ish random system, deterministic in the seed.

    An (n*d) x n complex Gaussian matrix is orthonormalized; its d row-blocks
    B_i then satisfy sum_i B_i* B_i = I, so V_i = B_i* is a valid system with
    validation residual at roundoff level.
    """
    if d < 2 or n < 1:
        raise ValueError("need d >= 2 and n >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n * d, n)) + 1j * rng.standard_normal((n * d, n))
    q, _ = np.linalg.qr(g)
    ops = tuple(q[i * n : (i + 1) * n, :].conj().T for i in range(d))
    return PopescuSystem.from_operators(ops, tol=1e-12)


def _range_basis(e: np.ndarray, rank: int, tol: float) -> np.ndarray:
    # Deterministic orthonormal basis of range(E): Gram-Schmidt over the
    # columns of E ordered by descending diagonal entry (column j of a
    # projection has norm^2 = E_jj), ties broken by index.
    n = e.shape[0]
    order = sorted(range(n), key=lambda j: (-e[j, j].real, j))
    basis: list[np.ndarray] = []
    for j in order:
        v = e[:, j].copy()
        for b in basis:
            v -= b * (b.conj() @ v)
        nrm = np.linalg.norm(v)
        if nrm > max(tol, 1e-12):
            basis.append(v / nrm)
        if len(basis) == rank:
            break
    if len(basis) != rank:
        raise ValidationError("could not extract an orthonormal basis of range(E)")
    return np.column_stack(basis)


def compress(system: PopescuSystem, e, tol: float = 1e-8) -> PopescuSystem:
    """Restrict the system to the range of a co-invariant projection E.

    Requires E Hermitian idempotent and E V_i = E V_i E for all i (the range
    of E is invariant under every V_i*). The compressed operators are E V_i E
    expressed in a deterministic orthonormal basis of range(E). The defining
    relation of the result is re-validated unconditionally: co-invariance of
    a projection that is not the support of an invariant state can still
    produce an invalid compression, and that must surface as an error.
    """
    e = as_matrix(e, "projection")
    n = system.n
    if e.shape != (n, n):
        raise ValidationError(f"projection must be {n}x{n}, got {e.shape}")
    if np.linalg.norm(e - e.conj().T, 2) > tol:
        raise ValidationError("E is not Hermitian within tolerance")
    if np.linalg.norm(e @ e - e, 2) > tol:
        raise ValidationError("E is not idempotent within tolerance")
    for i, v in enumerate(system.operators):
        dev = np.linalg.norm(e @ v - e @ v @ e, 2)
        if dev > tol:
            raise ValidationError(
                f"co-invariance violated for generator {i}: ||EV - EVE|| = {dev:.3e}; "
                "E is not the support of an invariant state"
            )
    rank = int(round(np.trace(e).real))
    if rank == 0:
        raise ValidationError("projection has rank 0; nothing to compress onto")
    basis = _range_basis(e, rank, tol)
    ops = tuple(basis.conj().T @ v @ basis for v in system.operators)
    compressed = PopescuSystem(ops)
    residual = validate(compressed)
    if residual > max(tol, DEFAULT_VALIDATE_TOL):
        raise ValidationError(
            f"compressed system fails the defining relation (residual {residual:.3e}); "
            "E is co-invariant but not the support of an invariant state"
        )
    return compressed
