"""Finitely presented group computations for an index-3 subgroup tower.

Coset enumeration, Schreier rewriting, Tietze simplification, exact
integer linear algebra (Smith normal form, abelian invariants), a
crystallographic model of the Euclidean (3,3,3) triangle group,
finite-quotient fingerprints, the index-3 chain driver, and exact
surface-tower invariant identities.
"""

from importlib import resources

from .words import (Word, EMPTY, Presentation, WordError, ParseError,
                    free_reduce, invert, concat, conjugate, commutator, power,
                    cyclic_reduce, canonical_cyclic, parse_presentation,
                    load_presentation)
from .coset import (CosetTable, EnumerationLimits, LimitExceeded,
                    todd_coxeter, quotient_order)
from .intmat import (IntMatrix, SNFResult, AbelianInvariants, determinant,
                     smith_normal_form, exponent_matrix, abelian_invariants,
                     mod_p_rank, mod_p_nullspace, lattice_index)
from .rewrite import (SubgroupPresentation, BarePresentation, TietzeBudget,
                      schreier_transversal, reidemeister_schreier,
                      tietze_simplify, simplify_presentation)
from .eisenstein import (EisensteinInt, AffineIsometry, IDENTITY,
                         CANONICAL_X, CANONICAL_Y, evaluate,
                         in_triangle_group, surjectivity_check,
                         find_epi_to_triangle, all_epis_to_triangle)
from .fingerprint import (ProbeGroup, FingerprintReport, default_battery,
                          count_homomorphisms, fingerprint)
from .quotients import (SubgroupRecord, subgroup_record, presentation_record,
                        kernel_table,
                        prime_index_normal_subgroups, invariant_multiset,
                        ChainStep, ChainResult, descend_chain,
                        commutator_subgroup_check, normal_closure_quotient,
                        bounded_quotient_order, prime_quotient_certificate,
                        order3_generation_certificate,
                        Order3Quadruple, order3_quadruples,
                        ConjugacyOutcome, conjugacy_witness_search)
from .tower import (SurfaceInvariants, CoverBranchData, TowerRow,
                    triple_cover_invariants, xtilde_invariants, s_invariants,
                    tower_row, tower_table, bmy_diagnostics,
                    verify_tower_identities)

__version__ = "1.0.0"


def bundled_presentation(name: str) -> Presentation:
    """Load one of the presentations shipped with the package:
    'gamma-bar', 'triangle-333', or 'triangle-prime'."""
    path = resources.files(__package__).joinpath("data", f"{name}.pres")
    return parse_presentation(path.read_text(encoding="utf-8"))
