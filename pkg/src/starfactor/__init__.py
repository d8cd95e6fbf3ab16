"""Strong-factorization rewriting on words of elementary 3x3 integer matrices."""

from .words import (
    E,
    R,
    IntMatrix3,
    ParseError,
    Symbol,
    Word,
    elem_matrix,
    eval_word,
    format_word,
    mirror_word,
    parse_word,
    perm_matrix,
)
from .engine import (
    Always6a,
    Always6b,
    BUDGET_EXCEEDED,
    ChoiceError,
    NotARedexError,
    NotStrongFormError,
    RewriteStep,
    RuleId,
    RunOutcome,
    STOPPED,
    STRONG_FORM,
    Scripted,
    apply_rule,
    factor_run,
    find_redex,
    is_strong_form,
    push_permutations_right,
    split_strong,
    strong_parts,
)
from .enumerator import (
    DiamondForm,
    EnumerationResult,
    Factorization,
    GroupForm,
    REFERENCE_DIAGONAL_COUNTS,
    TheoremReport,
    check_length_bound,
    count_table,
    enumerate_factorizations,
    power_word,
    recognize_diamond,
    verify_theorem_form,
)
from .directed import (
    DirectedSeq,
    Rule8Report,
    check_rule8_commutation,
    directed,
    factor_opposite_directed,
    factor_same_directed_no6b,
    normalize_directed,
)
from .fans import (
    Cone,
    Fan,
    FanError,
    GlobalSequence,
    LocalSubsequence,
    RefinementError,
    RefinementResult,
    UNIT_CONE,
    assembly_subdivision_sequence,
    build_common_refinement,
    extract_local_subsequences,
    fan_from_text,
    fan_to_text,
    interior_star_subdivision,
    local_subdivision_symbol,
    replace_interior_subdivision,
    star_assemble,
    star_subdivide,
    verify_refinement,
)
from .valuations import (
    ContainmentError,
    TieError,
    Valuation,
    ValuationPolicy,
    bary_coords,
    choose_cone_along,
    coords_after_subdivision,
    run_along_valuation,
    sample_valuations,
    search_b_nontermination,
)

__version__ = "0.1.0"
