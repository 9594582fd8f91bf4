"""Finite-dimensional quantum channels with privacy and error-correction verifiers."""
from .linops import TOL, DIM_CAP, DimensionError
from .channels import QuantumChannel, apply, compose, validate_cptp
from .subsystems import SubsystemDecomposition, complementary, generalized_conjugate, stinespring
from .privacy import is_operator_private, is_private_subspace, is_private_subsystem, theorem2_certificate
from .qec import genoqecc_verify, kl_check, theorem3_extract

__version__ = "0.1.0"
