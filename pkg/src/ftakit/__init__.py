"""Fault tree analysis toolkit.

Static fault trees are analysed through reduced ordered BDDs (minimal
cut sets, unreliability, importance measures, mean time to failure).
Dynamic fault trees are modularised: independent dynamic sub-trees are
solved as continuous-time Markov chains, substituted by tabulated basic
events, and the remaining static tree goes through the BDD path.
"""

from .analysis import (
    ImportanceMeasure,
    birnbaum,
    importance,
    minimal_cut_sets,
    mttf_limit,
    mttf_substitution,
    probabilities_at,
    unreliability,
    unreliability_curve,
)
from .bdd import HAVE_COMPILED_KERNEL, BddManager, BddRef
from .ctmc import Ctmc, build_ctmc, transient_failure_prob
from .curves import TimeCurve
from .errors import (
    AnalysisError,
    FtaError,
    InputError,
    SolutionCapExceeded,
    StateCapExceeded,
    UndefinedMeasureError,
)
from .galileo import GalileoError, parse, parse_path, serialize
from .model import (
    AND,
    BE,
    OR,
    PAND,
    POR,
    SEQ,
    Exponential,
    FaultTree,
    FixedProbability,
    NodeType,
    Tabulated,
    ValidationReport,
    Violation,
    dynamic_nodes,
    is_static,
    make_fault_tree,
    pdep,
    spare,
    sub_tree,
    validate,
    vot,
)
from .modular import (
    DftAnalyzer,
    Module,
    analyze_dft,
    detect_modules,
    module_tree,
    replace_module,
    select_dynamic_modules,
)
from .ordering import VariableOrder, dfs_order, order_from_list, read_order_file, tdlr_order
from .translate import TranslationResult, translate, translate_vot

__version__ = "0.1.0"

__all__ = [
    "AND", "BE", "OR", "PAND", "POR", "SEQ",
    "AnalysisError", "BddManager", "BddRef", "Ctmc", "DftAnalyzer",
    "Exponential", "FaultTree", "FixedProbability", "FtaError",
    "GalileoError", "HAVE_COMPILED_KERNEL", "ImportanceMeasure",
    "InputError", "Module", "NodeType", "SolutionCapExceeded",
    "StateCapExceeded", "Tabulated", "TimeCurve", "TranslationResult",
    "UndefinedMeasureError", "ValidationReport", "VariableOrder",
    "Violation", "analyze_dft", "birnbaum", "build_ctmc", "detect_modules",
    "dfs_order", "dynamic_nodes", "importance", "is_static",
    "make_fault_tree", "minimal_cut_sets", "module_tree", "mttf_limit",
    "mttf_substitution", "order_from_list", "parse", "parse_path", "pdep",
    "probabilities_at", "read_order_file", "replace_module",
    "select_dynamic_modules", "serialize", "spare", "sub_tree", "tdlr_order",
    "transient_failure_prob", "translate", "translate_vot", "unreliability",
    "unreliability_curve", "validate", "vot",
]
