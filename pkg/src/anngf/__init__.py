"""Annealed Green functions of random conductance lattices.

Perturbative construction of the averaged inverse of a divergence-form
operator with small i.i.d. coefficient disorder, the symbol and walk
kernel attached to it, singularity-split quadrature for the annealed
Green function, its large-distance expansion, and Monte Carlo
estimators that cross-check everything against direct simulation.
"""

from .backend import current_backend, use_backend
from .containers import HomogenizedData, MatrixKernel, ScalarKernel, SymbolField
from .errors import (AnngfError, ConfigError, ConvergenceError, NumericalError,
                     StencilError, SymbolVanishesError)
from .lattice import (LatticeField, adjoint_diff, delta_field, field_inner,
                      forward_diff, laplacian, multi_diff)
from .perturbation import (MomentModel, asymmetric_two_point_model,
                           perturbation_kernel, homogenized_matrix, rademacher_model,
                           uniform_model, walk_kernel)
from .quadrature import (GreenEvaluator, QuadratureConfig, annealed_green,
                         free_green, free_green_bessel, green_derivative,
                         periodic_green_reference, split_eval)
from .symbols import (helmholtz_kernel, helmholtz_symbol, nonvanishing_check,
                      nonvanishing_scan, operator_symbol)

__version__ = "0.1.0"
