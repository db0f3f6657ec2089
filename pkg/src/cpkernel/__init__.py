"""A constraint-programming microkernel with a finite-domain service,
propagators, a depth-first explorer and micro-benchmarks."""

from .engine import Constraint, Engine
from .fd import IntVar
from .informers import IBS, ImpactTable, Informer, StatisticsMonitor
from .kernel import ALWAYS, P, TRIGGER, VALUE, Failure, Kernel, KernelError, Status
from .model import (AtLeast, Element, Model, ModelError, concretize, eq_reif,
                    flatten, sum_of)
from .propagators import (ElementVarDC, EqualBC, EqualDC, LessEqBC, LinearEqBC,
                          LinearLeqBC, ReifyEqualDC, SumBoolGeq)
from .search import (ObjectiveValueInt, SearchFailure, SearchStats, Solver,
                     label_static, label_with)
from .trail import Trail, TrailedInt

__all__ = [
    "ALWAYS", "AtLeast", "Constraint", "Element", "ElementVarDC", "Engine",
    "EqualBC", "EqualDC", "Failure", "IBS", "ImpactTable", "Informer", "IntVar",
    "Kernel", "KernelError", "LessEqBC", "LinearEqBC", "LinearLeqBC", "Model",
    "ModelError", "ObjectiveValueInt", "P", "ReifyEqualDC", "SearchFailure",
    "SearchStats", "Solver", "StatisticsMonitor", "Status", "SumBoolGeq",
    "TRIGGER", "Trail", "TrailedInt", "VALUE", "concretize", "eq_reif",
    "flatten", "label_static", "label_with", "sum_of",
]
