"""Truncated dilation: a finite-level space carrying approximate d-isometries.

The span of formal vectors I (x) xi, for words I of length <= L and xi in the
base space, carries the semi-inner product determined by the prefix rule

    < I (x) xi, IJ (x) eta > = < xi, V_J eta >,
    < IJ (x) xi, I (x) eta > = < V_J xi, eta >,
    0 otherwise,

which is positive semidefinite whenever sum_i V_i V_i* = 1 (each level adds
sums of squares). Dividing out the null space yields a finite-dimensional
piece of the unique minimal dilation; the shift operators S_i act by
prepending a letter followed by compression back onto the quotient. Because
the quotient is invariant under the exact adjoints S_i*, all adjoint-side
identities hold exactly, and the isometry relations hold below the
truncation boundary: the top word level is a boundary where no claims are
made.

The same data in scalar form is the moment function C(I, J), either from a
unit vector (C = <V_I* Omega, V_J* Omega>) or from a density state
(C = phi(V_I V_J*)), with its two structural properties: positive
semidefiniteness of the C-Gram and the recursion sum_i C(Ii, Ji) = C(I, J).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cpmap import DensityState
from .errors import NumericalHealthError
from .numerics import as_matrix, orthonormal_columns
from .popescu import PopescuSystem, Word, words_up_to

__all__ = [
    "TruncatedDilation",
    "CuntzResiduals",
    "MomentTable",
    "build",
    "cuntz_residuals",
    "moments",
    "moment_checks",
    "moment_psd_with_D",
    "dilation_moments",
]

DEFAULT_NULL_TOL = 1e-10


def _word_products(system: PopescuSystem, max_len: int) -> dict[Word, np.ndarray]:
    prods: dict[Word, np.ndarray] = {(): np.eye(system.n, dtype=complex)}
    for word in words_up_to(system.d, max_len):
        if word not in prods:
            prods[word] = prods[word[:-1]] @ system.operators[word[-1]]
    return prods


def _gram_blocks(
    rows: list[Word],
    cols: list[Word],
    prods: dict[Word, np.ndarray],
    n: int,
) -> np.ndarray:
    """Assemble the prefix-rule Gram over two word lists, n x n block per pair."""
    g = np.zeros((len(rows) * n, len(cols) * n), dtype=complex)
    for a, wi in enumerate(rows):
        for b, wj in enumerate(cols):
            if len(wi) <= len(wj) and wj[: len(wi)] == wi:
                block = prods[wj[len(wi):]]
            elif len(wj) < len(wi) and wi[: len(wj)] == wj:
                block = prods[wi[len(wj):]].conj().T
            else:
                continue
            g[a * n : (a + 1) * n, b * n : (b + 1) * n] = block
    return g


@dataclass(frozen=True)
class TruncatedDilation:
    """Finite-level dilation data.

    ``quotient_map`` sends coefficient vectors over the word basis to
    coordinates in which the semi-inner product is Euclidean; ``operators``
    are the compressed shifts on the quotient; ``base_embedding`` holds the
    quotient coordinates of the embedded base space (empty-word vectors).
    """

    system: PopescuSystem
    level: int
    words: tuple[Word, ...]
    gram: np.ndarray
    quotient_map: np.ndarray
    operators: tuple[np.ndarray, ...]
    base_embedding: np.ndarray

    @property
    def dim(self) -> int:
        return self.quotient_map.shape[0]

    def level_subspace(self, max_len: int) -> np.ndarray:
        """Orthonormal basis (columns) of the image of vectors of length <= max_len."""
        n = self.system.n
        count = sum(1 for w in self.words if len(w) <= max_len) * n
        return orthonormal_columns(self.quotient_map[:, :count])


def build(system: PopescuSystem, level: int, tol: float = DEFAULT_NULL_TOL) -> TruncatedDilation:
    """Construct the truncated dilation at the given word-length level."""
    if level < 1:
        raise ValueError("level must be >= 1")
    n, d = system.n, system.d
    words = words_up_to(d, level)
    prods = _word_products(system, level + 1)
    gram = _gram_blocks(words, words, prods, n)
    vals, vecs = np.linalg.eigh(0.5 * (gram + gram.conj().T))
    vmax = max(float(vals[-1]), 0.0)
    if vmax == 0.0:
        raise NumericalHealthError("dilation Gram matrix vanished")
    if vals[0] < -tol * vmax:
        raise NumericalHealthError(
            f"dilation Gram matrix is indefinite: min eigenvalue {vals[0]:.3e}"
        )
    keep = vals > tol * vmax
    t = (np.sqrt(vals[keep])[:, None]) * vecs[:, keep].conj().T  # (q, N)
    dinv = 1.0 / np.sqrt(vals[keep])
    # compressed shifts: S_i = P (prepend_i) P on the quotient, realized as
    # D^{-1/2} U* M_i U D^{-1/2} with M_i[a, b] = < basis_a, i . basis_b >
    ops = []
    u_kept = vecs[:, keep]
    for i in range(d):
        m_i = _gram_blocks(words, [(i, *w) for w in words], prods, n)
        ops.append((dinv[:, None] * (u_kept.conj().T @ m_i @ u_kept)) * dinv[None, :])
    base = t[:, : n]  # coordinates of the empty-word block
    return TruncatedDilation(
        system=system,
        level=level,
        words=tuple(words),
        gram=gram,
        quotient_map=t,
        operators=tuple(ops),
        base_embedding=base,
    )


@dataclass(frozen=True)
class CuntzResiduals:
    """Deviations from the d-isometry relations below the truncation boundary."""

    isometry_residual: float  # max_ij ||(S_i* S_j - delta_ij I)|restricted||
    completeness_residual: float  # ||(sum_i S_i S_i* - I)|restricted||


def cuntz_residuals(dil: TruncatedDilation) -> CuntzResiduals:
    """Isometry and completeness residuals on the image of sub-boundary vectors.

    At level 1 the restriction is to the embedded base space itself.
    """
    w = dil.level_subspace(dil.level - 1)
    q = dil.dim
    iso = 0.0
    for i, si in enumerate(dil.operators):
        for j, sj in enumerate(dil.operators):
            delta = np.eye(q) if i == j else np.zeros((q, q))
            iso = max(iso, float(np.linalg.norm((si.conj().T @ sj - delta) @ w, 2)))
    comp_op = sum(s @ s.conj().T for s in dil.operators) - np.eye(q)
    comp = float(np.linalg.norm(comp_op @ w, 2))
    return CuntzResiduals(iso, comp)


@dataclass(frozen=True)
class MomentTable:
    """Values C(I, J) over all word pairs up to a maximum length."""

    d: int
    max_len: int
    words: tuple[Word, ...]
    values: np.ndarray  # (W, W), values[a, b] = C(words[a], words[b])

    def index(self, word: Word) -> int:
        return self._index_map[tuple(word)]

    @property
    def _index_map(self) -> dict[Word, int]:
        cached = getattr(self, "_index_cache", None)
        if cached is None:
            cached = {w: a for a, w in enumerate(self.words)}
            object.__setattr__(self, "_index_cache", cached)
        return cached

    def value(self, i_word: Word, j_word: Word) -> complex:
        return complex(self.values[self.index(i_word), self.index(j_word)])


def moments(system: PopescuSystem, source, max_len: int) -> MomentTable:
    """Moment table from a unit vector Omega or a DensityState.

    Vector source: C(I, J) = <V_I* Omega, V_J* Omega>  (so C(I, J) = Omega* V_I V_J* Omega).
    Density source: C(I, J) = phi(V_I V_J*) = trace(rho V_I V_J*).
    """
    words = words_up_to(system.d, max_len)
    prods = _word_products(system, max_len)
    stack = np.stack([prods[w] for w in words])  # (W, n, n)
    if isinstance(source, DensityState):
        b = np.einsum("ij,wjk->wik", source.rho, stack)
        c = b.reshape(len(words), -1) @ stack.reshape(len(words), -1).conj().T
    else:
        omega = np.asarray(source, dtype=complex).reshape(-1)
        if omega.shape != (system.n,):
            raise ValueError(f"Omega must be a vector of length {system.n}")
        if abs(np.linalg.norm(omega) - 1.0) > 1e-8:
            raise ValueError("Omega must be a unit vector")
        cols = np.stack([prods[w].conj().T @ omega for w in words], axis=1)  # V_I* Omega
        c = cols.conj().T @ cols
    return MomentTable(system.d, max_len, tuple(words), c)


@dataclass(frozen=True)
class MomentChecks:
    psd_min_eig: float
    recursion_residual: float


def moment_checks(table: MomentTable, system: PopescuSystem, tol: float = 1e-10) -> MomentChecks:
    """Positivity and recursion diagnostics of a moment table.

    ``psd_min_eig`` is the smallest eigenvalue of the Hermitized C-Gram;
    ``recursion_residual`` is max over |I|, |J| < max_len of
    |sum_i C(Ii, Ji) - C(I, J)|.
    """
    c = 0.5 * (table.values + table.values.conj().T)
    psd_min = float(np.linalg.eigvalsh(c)[0])
    resid = 0.0
    short = [w for w in table.words if len(w) < table.max_len]
    for wi in short:
        for wj in short:
            s = sum(
                table.value((*wi, i), (*wj, i)) for i in range(table.d)
            )
            resid = max(resid, abs(s - table.value(wi, wj)))
    return MomentChecks(psd_min, float(resid))


@dataclass(frozen=True)
class DominationCheck:
    psd: bool
    dominated: bool
    min_eig: float
    dominated_min_eig: float


def moment_psd_with_D(
    system: PopescuSystem,
    omega,
    d_op,
    max_len: int,
    tol: float = 1e-8,
) -> DominationCheck:
    """Positivity of the D-weighted moment form and its domination by the state.

    For Hermitian D fixed by the transfer map, the form
    (I, J) -> <V_I* Omega, D V_J* Omega> is PSD when D >= 0, and the
    difference form with D replaced by I - D is PSD when additionally
    D <= I (the compressed-commutant order interval).
    """
    d_op = as_matrix(d_op, "D")
    if np.linalg.norm(d_op - d_op.conj().T, 2) > tol:
        raise ValueError("D must be Hermitian")
    fixed_resid = np.linalg.norm(
        sum(v @ d_op @ v.conj().T for v in system.operators) - d_op, 2
    )
    if fixed_resid > tol:
        raise ValueError(
            f"D is not fixed by the transfer map: residual {fixed_resid:.3e}"
        )
    omega = np.asarray(omega, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(omega) - 1.0) > 1e-8:
        raise ValueError("Omega must be a unit vector")
    words = words_up_to(system.d, max_len)
    prods = _word_products(system, max_len)
    cols = np.stack([prods[w].conj().T @ omega for w in words], axis=1)
    psd_floor = -max(tol, 1e-10)

    def min_eig(op: np.ndarray) -> float:
        g = cols.conj().T @ op @ cols
        return float(np.linalg.eigvalsh(0.5 * (g + g.conj().T))[0])

    lo = min_eig(d_op)
    hi = min_eig(np.eye(system.n) - d_op)
    return DominationCheck(lo >= psd_floor, lo >= psd_floor and hi >= psd_floor, lo, hi)


def dilation_moments(dil: TruncatedDilation, omega, max_len: int | None = None) -> MomentTable:
    """Vector-state moments <Lambda(0 x Omega), S_I S_J* Lambda(0 x Omega)> of the dilation.

    Independent route to the same table as :func:`moments`; agreement is the
    executable form of the state/system/moment correspondence.
    """
    max_len = dil.level if max_len is None else max_len
    if max_len > dil.level:
        raise ValueError("cannot read moments beyond the truncation level")
    omega = np.asarray(omega, dtype=complex).reshape(-1)
    root = dil.base_embedding @ omega
    words = words_up_to(dil.system.d, max_len)
    # C(I, J) = <S_I* root, S_J* root>, and S_I* applies S_{i_1}* first
    adj = []
    for w in words:
        u = root
        for letter in w:
            u = dil.operators[letter].conj().T @ u
        adj.append(u)
    cols = np.stack(adj, axis=1)
    c = cols.conj().T @ cols
    return MomentTable(dil.system.d, max_len, tuple(words), c)
