"""Exact-arithmetic mirror symmetry for the Grassmannian and Pfaffian
Calabi-Yau threefolds: Picard-Fuchs solutions, the holomorphic anomaly
recursion in polynomial form, and higher-genus Gromov-Witten /
Gopakumar-Vafa invariants.
"""

from .anomaly import AnomalySolver, GenusSchedule, YYStructure, derive_r_of_x
from .exactarith import (
    QQ,
    AlgebraicNumber,
    NumberField,
    Polynomial,
    Rational,
    RationalFunction,
    polynomial,
)
from .gvbridge import bernoulli, constant_map_term, gap_leading_constant, gv_to_gw, gw_to_gv
from .mirrormaps import build_frame, genus0_gw, genus1_gw, quantum_yukawa
from .picardfuchs import (
    CYModel,
    FrobeniusBasis,
    ThetaOperator,
    frobenius_basis,
    indicial_roots,
    localize_operator,
    normalize_frobenius,
)
from .series import LogSeries, TruncatedSeries

__version__ = "0.1.0"

__all__ = [
    "AlgebraicNumber",
    "AnomalySolver",
    "CYModel",
    "FrobeniusBasis",
    "GenusSchedule",
    "LogSeries",
    "NumberField",
    "Polynomial",
    "QQ",
    "Rational",
    "RationalFunction",
    "ThetaOperator",
    "TruncatedSeries",
    "YYStructure",
    "bernoulli",
    "build_frame",
    "constant_map_term",
    "derive_r_of_x",
    "frobenius_basis",
    "gap_leading_constant",
    "genus0_gw",
    "genus1_gw",
    "gv_to_gw",
    "gw_to_gv",
    "indicial_roots",
    "localize_operator",
    "normalize_frobenius",
    "polynomial",
    "quantum_yukawa",
    "__version__",
]
