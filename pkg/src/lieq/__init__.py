"""lieq: an exact-arithmetic workbench for deformation quantization and
invariant differential operators on Lie algebras with rational structure
constants.

Highlights:

* validated Lie algebra data, subalgebra/character setups, and central
  extensions (`core`);
* the deformed enveloping algebra in PBW normal form, its quotients, and
  invariant-algebra solvers (`enveloping`);
* symmetrization, the Duflo operator, and an exactly associative
  transport star product (`quantization`);
* admissible graphs, graph operators, weight tables, and Monte-Carlo
  weight estimation (`graphs`);
* the reduction differential, its solution spaces, and the
  specialization / character-deformation transforms (`reduction`).
"""

from ._version import __version__
from .core import (CentralExtension, LieAlgebraData, StructuralError,
                   SubalgebraSetup, ValidationError, ValidationReport,
                   adjoint_matrix, build_central_extension, is_nilpotent,
                   lower_central_series, validate_raw)
from .enveloping import (InvariantAlgebraPresentation, PBWElement,
                         QuotientElement, SPresentation, center_of,
                         invariants_up_to_degree, is_commutative,
                         pbw_multiply, pbw_word_count, poisson_center_of,
                         quotient_reduce, s_invariants_up_to_degree)
from .graphs import (KGraph, MissingWeightError, WeightTable,
                     associativity_defect, bernoulli_graph,
                     bernoulli_wheel_graph, default_weight_table,
                     enumerate_admissible, estimate_weight_mc,
                     graph_operator, kontsevich_star_truncated,
                     parse_graph_id, wedge_graphs)
from .io import ArtifactCache, IngestError, RunReport, ingest
from .library import (builtin_algebra, builtin_names, builtin_setup,
                      heisenberg3_center_setup)
from .poly import (DegreeOverflowError, EpsPolynomial, Polynomial,
                   TPolynomial, parse_polynomial, poisson_bracket)
from .quantization import (ConstantCoefficientOperator, CorrectionSeries,
                           beta_inverse, duflo_element, duflo_series,
                           gutt_star, iso_candidate, symmetrize)
from .reduction import (MembershipError, MissingDifferentialError,
                        ReductionDifferential, ReductionSolution,
                        cf_product, d1, differential_from_weight_table,
                        eps_from_t_family, lift_polynomial_family, map_J,
                        membership_check, solve_reduction, specialize_eps1,
                        t_family_from_eps, t_scaled_setup, theorem6_check)

__all__ = [name for name in dir() if not name.startswith("_")]
