"""
Workbench for macro tree transducers, attributed tree transducers and the
relabelings that compose with them.
"""
from .analysis import (
    check_fv, find_rho, important_nodes, is_consistent, is_important, is_permanent, occurrence_profiles, top,
)
from .att import Att, att_dependency_graph, att_evaluate, att_is_circular, att_is_circular_on, validate_att
from .constructions import (
    att_to_consistent_mtt, expand_to_consistent, fv_to_att, nondeleting_nf, nonerasing_nf, omega, omega_direct,
    trel_mtt_product,
)
from .difftest import DiffReport, equivalent_up_to
from .dynfv import (
    build_dynfv_att, build_state_annotating_trel, check_dynamic_fv, dynfv_pipeline, equivalence_gadget,
    subtree_growth,
)
from .errors import WorkbenchError
from .formats import format_transducer, load_transducer, parse_rho, parse_transducer, parse_tree
from .mtt import Mtt, is_nondeleting, is_nonerasing, mtt_context_semantics, mtt_state_semantics, mtt_translate, validate_mtt
from .pipeline import Pipeline, pipeline_apply, trrel
from .relabel import Brel, Trel, brel_apply, trel_apply, validate_brel, validate_trel
from .trees import RankedAlphabet, Symbol, Tree, format_tree

__version__ = "0.1.0"
