"""Orbits of the Gelfand-Zeitlin flows on complex matrices.

Exact arithmetic runs over Gaussian rationals (:class:`GaussRat` in
object arrays); float arithmetic uses ``complex128`` with decisions
governed by a :class:`ToleranceContext`.
"""
from .census import (ChoiceVector, FiberClass, Permutation, classify,
                     enumerate_orbits, fiber_class, level_choice,
                     lower_pattern, nil_pattern, nil_permutation, orbit_count,
                     orbit_representative, solution_coordinates)
from .errors import (ClassificationError, GZError, ModeError,
                     NotRegularError, NotSplittingError,
                     NotStronglyRegularError, SchemaError,
                     SingularSystemError, SpectrumMismatchError,
                     ToleranceError)
from .flows import FlowStep, flow, flow_word, vector_field
from .hessenberg import hessenberg_from_spec, is_hessenberg
from .matrices import (JordanFrame, asmat, charpoly, cutoff, is_regular,
                       jordanize_regular, matrix_from_json, matrix_to_json)
from .moment import (GZSpec, SregReport, phi, poisson_bracket_residual,
                     poisson_residuals, sreg_centralizers, sreg_differentials,
                     strong_regularity, tangent_space_dim)
from .scalars import (DEFAULT_TOL, GaussRat, MonicPoly, Spectrum,
                      ToleranceContext, exact, spectrum_from_poly)
from .solution import (Block, BlockChoice, SolutionPoint, StabilizerPattern,
                       ToeplitzElt, assemble, is_free, stabilizer_pattern,
                       xi_charpoly, xi_solve, zi_act)
