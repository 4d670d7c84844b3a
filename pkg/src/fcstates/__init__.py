"""Spectral and algebraic classification of finitely correlated states.

Given d complex n x n operators V_1, ..., V_d with sum_i V_i V_i* = 1, this
package materializes the completely positive transfer map
sigma(X) = sum_i V_i X V_i* and computes the invariants that classify the
states the system induces: ergodicity and purity, the finite circle
subgroup formed by the peripheral spectrum, purity/factoriality and
clustering of the translation-invariant state on the two-sided chain,
truncated dilations with their moment tables, and the modular dual system
with full duality verification.
"""

from .chain import ClusteringReport, LocalObservable, clustering_defect, e_map, expectation, two_point
from .classify import ChainHypotheses, ClassificationReport, classify_chain, classify_od
from .cpmap import (
    CoinvarianceCheck,
    DensityState,
    OperatorSubspace,
    PeripheralEigenvalue,
    Superoperator,
    coinvariance_check,
    commutant,
    fixed_points,
    gauge_group_order,
    generated_algebra,
    invariant_state,
    is_algebra,
    mixed_fixed_points,
    peripheral_eigenunitary,
    peripheral_spectrum,
    predual_matrix,
    sigma_matrix,
    unvec,
    vec,
)
from .dilation import (
    CuntzResiduals,
    MomentTable,
    TruncatedDilation,
    build,
    cuntz_residuals,
    dilation_moments,
    moment_checks,
    moment_psd_with_D,
    moments,
)
from .errors import NumericalHealthError, ValidationError
from .modular import DualComparison, DualityReport, DualSystem, ModularData, compare_duals, dual_system, gns, verify_duality
from .numerics import EigenDecomposition, eig, herm_inv_sqrt, herm_sqrt, kernel, spectral_sets_match
from .popescu import PopescuSystem, Word, compress, random_system, v_word, validate, words_up_to

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "PopescuSystem",
    "Word",
    "validate",
    "v_word",
    "words_up_to",
    "random_system",
    "compress",
    "Superoperator",
    "OperatorSubspace",
    "DensityState",
    "CoinvarianceCheck",
    "PeripheralEigenvalue",
    "sigma_matrix",
    "predual_matrix",
    "fixed_points",
    "is_algebra",
    "commutant",
    "generated_algebra",
    "invariant_state",
    "coinvariance_check",
    "peripheral_spectrum",
    "peripheral_eigenunitary",
    "gauge_group_order",
    "mixed_fixed_points",
    "vec",
    "unvec",
    "ChainHypotheses",
    "ClassificationReport",
    "classify_od",
    "classify_chain",
    "LocalObservable",
    "ClusteringReport",
    "e_map",
    "expectation",
    "two_point",
    "clustering_defect",
    "TruncatedDilation",
    "CuntzResiduals",
    "MomentTable",
    "build",
    "cuntz_residuals",
    "moments",
    "moment_checks",
    "moment_psd_with_D",
    "dilation_moments",
    "ModularData",
    "DualSystem",
    "DualityReport",
    "DualComparison",
    "gns",
    "dual_system",
    "verify_duality",
    "compare_duals",
    "EigenDecomposition",
    "eig",
    "kernel",
    "herm_sqrt",
    "herm_inv_sqrt",
    "spectral_sets_match",
    "ValidationError",
    "NumericalHealthError",
]
