"""Classification verdicts assembled from the transfer-map analyses.

Three questions are answered about a system:

* purity of the induced state on the d-isometry algebra, which is
  equivalent to ergodicity of the transfer map (trivial fixed space);
* the order k of the finite circle subgroup formed by the peripheral
  spectrum of the compressed system, which counts the mutually disjoint
  irreducible pieces of the gauge-invariant restriction;
* purity/factoriality of the induced translation-invariant state on the
  two-sided chain, decided by the peripheral spectrum of the transfer map
  restricted to the algebra generated by the operators, under the
  hypotheses (generated algebra is a factor, fixed space equals its
  commutant, state faithful).

Purity of the chain state is computed only when the hypotheses hold;
otherwise the report says so explicitly instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import LocalObservable, clustering_defect
from .cpmap import (
    DensityState,
    OperatorSubspace,
    commutant,
    fixed_points,
    gauge_group_order,
    generated_algebra,
    invariant_state,
    mixed_fixed_points,
    peripheral_spectrum,
    sigma_matrix,
)
from .errors import NumericalHealthError
from .numerics import distinct_values, eig, spectral_sets_match
from .popescu import PopescuSystem, compress, validate

__all__ = ["ChainHypotheses", "ClassificationReport", "classify_od", "classify_chain"]

HYPOTHESES_NOT_MET = "hypotheses not met"


def _dedupe(notes: list[str]) -> tuple[str, ...]:
    seen: set[str] = set()
    out = []
    for note in notes:
        if note not in seen:
            seen.add(note)
            out.append(note)
    return tuple(out)


@dataclass(frozen=True)
class ChainHypotheses:
    """Hypothesis flags for the two-sided chain purity criterion."""

    m_is_factor: bool
    fixed_equals_m_prime: bool
    phi_faithful: bool

    def all_met(self) -> bool:
        return self.m_is_factor and self.fixed_equals_m_prime and self.phi_faithful


@dataclass(frozen=True)
class ClassificationReport:
    """Collected verdicts for one system."""

    validate_residual: float
    ergodic: bool
    od_state_pure: bool
    invariant_state: DensityState
    compressed_ergodic: bool | None
    peripheral: tuple[complex, ...]
    k: int | None
    chain_hypotheses: ChainHypotheses | None = None
    chain_pure: bool | str | None = None
    chain_factor: bool | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)


def _comparable_system(system: PopescuSystem, state: DensityState, notes: list[str]):
    """Compress to the support of the invariant state when it is not faithful."""
    if state.faithful:
        return system, state
    notes.append(
        f"invariant state has rank {state.rank} < {state.n}; "
        "compressed to its support"
    )
    csys = compress(system, state.support)
    cstate = invariant_state(csys)
    return csys, cstate


def _check_semisimple(peripherals, notes: list[str]) -> None:
    bad = [p.value for p in peripherals if not p.semisimple]
    if bad:
        raise NumericalHealthError(
            f"unimodular Jordan block at eigenvalue(s) {bad}: the faithful-state "
            "hypotheses exclude this, so classification is aborted"
        )


def classify_od(
    system: PopescuSystem,
    tol: float = 1e-8,
    tol_peripheral: float = 1e-9,
) -> ClassificationReport:
    """Ergodicity, purity, and gauge-subgroup order of the compressed system.

    Ergodicity (trivial fixed space) is computed twice, independently: from
    the fixed-point space of the transfer map and from the self-intertwiner
    space dimension. The two characterize purity of the same state and must
    agree. When the map is ergodic the system is compressed to the support
    of its unique invariant state, and k is the order of the circle
    subgroup formed by the compressed peripheral spectrum; otherwise k is
    undefined and the peripheral set is informational.
    """
    notes: list[str] = []
    residual = validate(system)
    fixed = fixed_points(system, tol)
    ergodic = fixed.dim == 1
    pure = mixed_fixed_points(system, system, tol).dim == 1
    if pure != ergodic:
        raise NumericalHealthError(
            f"fixed-space dimension ({fixed.dim}) and self-intertwiner dimension "
            "disagree about ergodicity"
        )
    state = invariant_state(system)
    if state.unique is False:
        notes.append(
            "predual fixed space has dimension > 1; reported state is the "
            "canonical Cesaro limit from I/n, not unique"
        )
    if not ergodic:
        peri = tuple(p.value for p in peripheral_spectrum(system, tol_peripheral, tol))
        notes.append("transfer map is not ergodic; k undefined, peripheral set informational")
        return ClassificationReport(
            validate_residual=residual,
            ergodic=False,
            od_state_pure=pure,
            invariant_state=state,
            compressed_ergodic=None,
            peripheral=peri,
            k=None,
            notes=_dedupe(notes),
        )
    csys, _ = _comparable_system(system, state, notes)
    cperi = peripheral_spectrum(csys, tol_peripheral, tol)
    _check_semisimple(cperi, notes)
    compressed_ergodic = fixed_points(csys, tol).dim == 1
    if not compressed_ergodic:
        notes.append("ergodicity was lost under compression to the support")
    values = tuple(p.value for p in cperi)
    k = gauge_group_order(values, tol=tol, max_denominator=csys.n**2)
    return ClassificationReport(
        validate_residual=residual,
        ergodic=True,
        od_state_pure=pure,
        invariant_state=state,
        compressed_ergodic=compressed_ergodic,
        peripheral=values,
        k=k,
        notes=_dedupe(notes),
    )


def _restricted_peripheral(
    system: PopescuSystem, algebra: OperatorSubspace, tol: float, tol_peripheral: float = 1e-9
):
    """Peripheral eigenvalues of the transfer map restricted to an invariant subspace."""
    sig = sigma_matrix(system).matrix
    q = algebra.to_columns()
    image = sig @ q
    leak = np.linalg.norm(image - q @ (q.conj().T @ image), 2)
    if leak > max(tol, 1e-8) * max(1.0, np.linalg.norm(image, 2)):
        raise NumericalHealthError(
            f"transfer map does not leave the generated algebra invariant (leak {leak:.3e})"
        )
    restricted = q.conj().T @ image
    vals = eig(restricted).eigenvalues
    return distinct_values([z for z in vals if abs(1.0 - abs(z)) <= tol_peripheral], tol)


def classify_chain(
    system: PopescuSystem,
    tol: float = 1e-8,
    tol_peripheral: float = 1e-9,
    clustering_check: bool = True,
) -> ClassificationReport:
    """Full report: adds the two-sided chain verdicts to :func:`classify_od`.

    Pipeline: compute the invariant state; if it is not faithful, compress
    to its support and continue there. Form the generated algebra M, the
    commutant M', and the fixed space; test the hypotheses (M a factor,
    fixed space = M', state faithful). When they hold, the chain state is
    pure iff the peripheral spectrum of the transfer map restricted to M is
    {1}, and purity coincides with factoriality in this finite-dimensional
    setting; a clustering probe cross-checks the verdict numerically.
    """
    base = classify_od(system, tol, tol_peripheral)
    notes = list(base.notes)
    wsys, wstate = _comparable_system(system, base.invariant_state, notes)
    algebra = generated_algebra(wsys.operators)
    comm = commutant(wsys.operators, tol)
    fixed = fixed_points(wsys, tol)
    hyp = ChainHypotheses(
        m_is_factor=algebra.intersection_dim(comm, tol) == 1,
        fixed_equals_m_prime=fixed.span_equals(comm, tol),
        phi_faithful=wstate.faithful,
    )
    if not hyp.all_met():
        failing = [
            name
            for name, ok in (
                ("M_is_factor", hyp.m_is_factor),
                ("fixed_equals_M_prime", hyp.fixed_equals_m_prime),
                ("phi_faithful", hyp.phi_faithful),
            )
            if not ok
        ]
        notes.append(f"chain hypotheses failed: {', '.join(failing)}")
        if not hyp.fixed_equals_m_prime and comm.dim < fixed.dim:
            contained = all(fixed.contains(b, tol) for b in comm.basis)
            if contained:
                notes.append(
                    "commutant is strictly smaller than the fixed space: system is a "
                    "non-minimal presentation; consider compressing"
                )
        return ClassificationReport(
            validate_residual=base.validate_residual,
            ergodic=base.ergodic,
            od_state_pure=base.od_state_pure,
            invariant_state=base.invariant_state,
            compressed_ergodic=base.compressed_ergodic,
            peripheral=base.peripheral,
            k=base.k,
            chain_hypotheses=hyp,
            chain_pure=HYPOTHESES_NOT_MET,
            chain_factor=None,
            notes=_dedupe(notes),
        )
    peri_m = _restricted_peripheral(wsys, algebra, tol, tol_peripheral)
    chain_pure = spectral_sets_match(peri_m, [1.0], tol)
    chain_factor = chain_pure
    if clustering_check:
        probe = _clustering_probe(wsys, wstate, chain_pure)
        if probe is not None:
            notes.append(probe)
    return ClassificationReport(
        validate_residual=base.validate_residual,
        ergodic=base.ergodic,
        od_state_pure=base.od_state_pure,
        invariant_state=base.invariant_state,
        compressed_ergodic=base.compressed_ergodic,
        peripheral=base.peripheral,
        k=base.k,
        chain_hypotheses=hyp,
        chain_pure=chain_pure,
        chain_factor=chain_factor,
        notes=_dedupe(notes),
    )


def _clustering_probe(system: PopescuSystem, state: DensityState, chain_pure: bool) -> str | None:
    """Numerical cross-check of purity against two-point clustering.

    Pure direction: a deterministic pseudo-random matrix-unit pair must
    cluster. Non-pure direction: some matrix-unit pair must keep a
    persistent defect. Returns a diagnostic string on contradiction.
    """
    d = system.d
    n_max = min(50 * system.n**2, 400)
    units = [
        (i, j) for i in range(d) for j in range(d)
    ]

    def unit_obs(i: int, j: int) -> LocalObservable:
        m = np.zeros((d, d))
        m[i, j] = 1.0
        return LocalObservable(1, (m,))

    if chain_pure:
        rng = np.random.default_rng(1234)
        i, j = units[rng.integers(len(units))]
        k, l = units[rng.integers(len(units))]
        rep = clustering_defect(system, state, unit_obs(i, j), unit_obs(k, l), n_max)
        if not rep.decayed:
            return (
                f"purity verdict not corroborated by two-point decay within "
                f"n_max={n_max} for matrix units ({i},{j}), ({k},{l})"
            )
        return None
    for i, j in units:
        for k, l in units:
            rep = clustering_defect(system, state, unit_obs(i, j), unit_obs(k, l), n_max)
            if not rep.decayed:
                return None
    return "non-purity verdict but every matrix-unit two-point function clusters"
