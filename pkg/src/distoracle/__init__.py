"""Approximate distance oracles over bunches: classic, O(log k) and constant query time."""
from .blackbox import BlackBoxOracle, InflatedOracle, RoundedExactOracle, make_blackbox
from .const_oracle import ConstOracle, build_const_oracle
from .graph import Graph, build_exact_oracle, dijkstra_from, generate_graph, load_graph
from .logk_oracle import LogKOracle, build_logk_oracle
from .tz_core import NotApplicableError, QueryTrace, TZOracle, build_tz_oracle

__all__ = [
    "BlackBoxOracle", "ConstOracle", "Graph", "InflatedOracle", "LogKOracle", "NotApplicableError",
    "QueryTrace", "RoundedExactOracle", "TZOracle", "build_const_oracle", "build_exact_oracle",
    "build_logk_oracle", "build_tz_oracle", "dijkstra_from", "generate_graph", "load_graph",
    "make_blackbox",
]
