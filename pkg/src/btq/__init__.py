"""Berezin-Toeplitz quantization of CP^1 and CP^1 x CP^1, numerically."""
from .geometry import (ChartPoint, ManifoldModel, SmoothFunction, function_library,
                       kaehler_potential, laplacian, manifold, parse_function,
                       poisson_bracket, random_points, standard_function,
                       verify_quantization_condition)
from .quadrature import QuadratureRule, build_rule, integrate
from .operators import (OperatorMatrix, commutator, geometric_quantization_operator,
                        hs_inner, identity, multiply, operator_norm, toeplitz)
from .hilbert import (CoherentVector, SectionSpace, build_section_space, coherent_embedding,
                      coherent_projector, coherent_vector, epsilon_function, two_point_kernel)
from .symbols import (adjointness_check, berezin_transform, contravariant_reconstruct,
                      contravariant_solve, covariant_symbol)
from .asymptotics import (ConvergenceTable, estimate_A1, inequality_battery, sweep_berezin,
                          sweep_dirac, sweep_norm_limit, sweep_product)

__version__ = "0.1.0"
