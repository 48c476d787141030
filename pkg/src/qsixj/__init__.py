"""q-deformed 6j-symbols of su_q(2): explicit sum, three-term recurrence and tridiagonal eigenproblem."""

from .admiss import FourValentSpace, dimension, make_space, nonzero_conditions, triple_admissible
from .eigen import build_trisystem, solve_tridiagonal, tet_table_eigen
from .networks import NetValue, bubble, sixj_kl, sixj_rw, tet_oracle, theta
from .qnum import QContext, Regime, SignedLog, qfact, qint
from .recur import (
    build_coeffs,
    lambda_eig,
    norm_j,
    norm_l,
    tet_column_oracle,
    tet_column_recur,
    tet_table_oracle,
    tet_table_recur,
)

__version__ = "0.1.0"

__all__ = [
    "FourValentSpace",
    "NetValue",
    "QContext",
    "Regime",
    "SignedLog",
    "bubble",
    "build_coeffs",
    "build_trisystem",
    "dimension",
    "lambda_eig",
    "make_space",
    "nonzero_conditions",
    "norm_j",
    "norm_l",
    "qfact",
    "qint",
    "sixj_kl",
    "sixj_rw",
    "solve_tridiagonal",
    "tet_column_oracle",
    "tet_column_recur",
    "tet_oracle",
    "tet_table_eigen",
    "tet_table_oracle",
    "tet_table_recur",
    "theta",
    "triple_admissible",
]
