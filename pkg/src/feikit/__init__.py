"""Fourier entropy, influence and certificate complexity of Boolean functions."""

__version__ = "0.1.0"

from .core import (BooleanFunction, FourierSpectrum, MeasureProfile, construct, inverse_wht, kkl_ratio,
                   measures, min_entropy, renyi_entropy, shannon_entropy, tensor, tensor_power, wht)
from .certificates import (CertificateReport, PartialAssignment, certificate, certificate_aggregates,
                           min_parity_certificate, parity_certificate, sensitivity, subspace_fourier_witness,
                           verify_fmei_bound)
from .errors import FeikitError
from .gf2 import AffineConstraintSystem
from .io import format_truth_table, parse_truth_table
from .lp import approx_degree, approx_spectral_norm, canonical_dual_witness, verify_minentropy_vs_norm
from .partitions import (AffinePartition, CertificateDistribution, SubcubePartition, heuristic_partition,
                         min_aUC_exact, verify_entropy_vs_aUC, verify_partition,
                         verify_typical_coefficient_claims)
from .poly import SparsePolynomial
from .dnf import DnfFormula, compile_dnf, mansour_approximate, parse_dnf
from .polyforms import BlockMultilinearForm, bh_quantities, flat_report, level_mass, reconstruct_boolean
from .scan import ScanConfig, ScanReport, scan

__all__ = [name for name in dir() if not name.startswith("_")]
