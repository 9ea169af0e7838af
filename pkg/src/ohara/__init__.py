"""O'Hara knot energies on closed curves.

Evaluation of E^(alpha), its first variation, the split of the variation
into a leading quadratic form and a remainder, fractional Sobolev tools and
a preconditioned gradient flow.
"""

from .curve import (CurveError, EmbeddednessReport, FourierCurve, SampledCurve,
                    embeddedness_constants, is_arclength, length, make_circle,
                    make_fourier_curve, reparametrize_arclength)
from .decomposition import (DecompositionReport, KernelParams, SpectrumReport, G_beta,
                            Q_form, R_form_direct, R_form_kernel, decompose,
                            lower_order_diagnostic, q_coefficients)
from .energy import EnergyParams, EnergyValue, energy, energy_truncated
from .flow import FlowConfig, FlowResult, FlowState, flow_step, minimize
from .io import FormatError, load_curve, write_curve
from .quadrature import ConvergenceError
from .sobolev import (SobolevOrder, c_coefficient, fractional_laplacian, seminorm_double_integral,
                      seminorm_fourier, sobolev_norm, tail_seminorm)
from .variation import (Direction, VariationReport, finite_difference_energy,
                        first_variation_arclength, first_variation_general, l2_gradient,
                        stationarity_residual)

__version__ = "0.1.0"
