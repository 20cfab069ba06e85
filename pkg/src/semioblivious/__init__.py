"""Sparse semi-oblivious routing: path sampling, congestion solvers and lower-bound attacks."""
from .graphs import Graph, GraphError, ParseError, gadget_c, gadget_g, hypercube, min_cut
from .routing_core import Demand, ExplicitRouting, Path, PathSystem, Routing, RoutingError, congestion
from .oblivious import exhaustive_optimal_oblivious, shortest_path_uniform, valiant_routing
from .sampler import alpha_plus_cut_sample, alpha_sample
from .solver import (greedy_cut_weak_route, min_congestion_fractional, optimal_fractional_congestion,
                     optimal_integral_congestion, randomized_round, special_bucket_route, weak_to_strong)
from .lower_bound import adversarial_demand, verify_certificate

__version__ = "0.1.0"
