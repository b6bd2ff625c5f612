"""Hamiltonian Cycle solvers for graphs of bounded treewidth."""

from .cutcount import cc_decide
from .decomposition import make_nice, min_fill_td, parse_td, validate_td
from .dp_naive import solve_naive
from .dp_rank import ReducePolicy, solve_rank
from .extraction import extract_self_reduce, verify_cycle
from .generator import GenParams, generate
from .graph import Graph, parse_graph, read_graph_file
from .oracle import brute_force_cycle, brute_force_decide
from .solve import solve

__version__ = "0.1.0"
