"""Fourier analysis on finite product spaces and certified bounds for noisy
inner products under pairwise independent column laws."""
from ._accel import BACKEND
from .bounds import BoundCertificate, deg_minus_2, theorem_constant
from .certify import (certify_ap_distinguisher, certify_correlation, certify_holder_truncation,
                      certify_inverse_gowers, certify_main, certify_roth)
from .correlation import (column_moments, nip_bruteforce, nip_fourier, nip_montecarlo,
                          noise_correlation)
from .extract import TheoremViolation, Witness, WitnessFamily, extract_family, extract_witness
from .fourier import (DenseFunction, FourierRepresentation, OrthonormalBasis, default_bases,
                      degree, gram_schmidt_basis, inverse_transform, standard_fourier_basis,
                      transform, truncate)
from .gowers import (check_gowers_inequality, gowers_direct, gowers_norm, gowers_recursive,
                     gowers_via_cube_nip, u2_closed_form)
from .instances import generate_random_lowdeg
from .spaces import (Distribution, FiniteSpace, JointDistribution, ap_distribution,
                     gowers_cube_distribution, is_pairwise_independent, is_r_wise_independent,
                     marginal, random_pairwise_independent, xor_subset_distribution,
                     xor_triple_distribution)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BoundCertificate", "deg_minus_2", "theorem_constant",
    "certify_ap_distinguisher", "certify_correlation", "certify_holder_truncation",
    "certify_inverse_gowers", "certify_main", "certify_roth",
    "column_moments", "nip_bruteforce", "nip_fourier", "nip_montecarlo", "noise_correlation",
    "TheoremViolation", "Witness", "WitnessFamily", "extract_family", "extract_witness",
    "DenseFunction", "FourierRepresentation", "OrthonormalBasis", "default_bases", "degree",
    "gram_schmidt_basis", "inverse_transform", "standard_fourier_basis", "transform", "truncate",
    "check_gowers_inequality", "gowers_direct", "gowers_norm", "gowers_recursive",
    "gowers_via_cube_nip", "u2_closed_form", "generate_random_lowdeg",
    "Distribution", "FiniteSpace", "JointDistribution", "ap_distribution",
    "gowers_cube_distribution", "is_pairwise_independent", "is_r_wise_independent", "marginal",
    "random_pairwise_independent", "xor_subset_distribution", "xor_triple_distribution",
]
