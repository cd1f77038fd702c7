"""Optimal object-centric alignments between process executions and object-centric Petri nets."""

from .alignment import AlignmentGraph, Cost, Move, MoveKind, alignment_cost, move_cost, validate_alignment
from .errors import InputError, ResourceLimitExceeded
from .log import EventLog, ProcessExecution, extract_process_executions, parse_event_log
from .petri import AcceptingNet, Binding, Marking, ObjectCentricPetriNet, parse_ocpn
from .search import Unalignable, align_execution, search_optimal

__all__ = [
    "AcceptingNet",
    "AlignmentGraph",
    "Binding",
    "Cost",
    "EventLog",
    "InputError",
    "Marking",
    "Move",
    "MoveKind",
    "ObjectCentricPetriNet",
    "ProcessExecution",
    "ResourceLimitExceeded",
    "Unalignable",
    "align_execution",
    "alignment_cost",
    "extract_process_executions",
    "move_cost",
    "parse_event_log",
    "parse_ocpn",
    "search_optimal",
    "validate_alignment",
]

__version__ = "0.1.0"
