"""Prolate spheroidal wave functions, supremum bounds, prolate sampling and
prolate filter diagonalization with certified error intervals."""

from .errors import (
    CertificationError,
    ConsistencyError,
    DimensioningError,
    ProlateError,
    UnderflowError,
    ValidationError,
)
from .pswf import BandTimeSpec, PswfBasis, build_basis, eval_xi, eval_xi_deriv, gamma_pair

__version__ = "0.1.0"
from .filter_diag import (
    DiscreteSignal,
    FilterSystem,
    SampledSignal,
    band_sweep,
    prolate_envelope_sup,
    run_fd,
)
from .gep import Gep, solve_gep
