"""Generalized Laplacian dynamics: centrality, conductance and spectral bisection.

An operator ``(rho, T, W)`` couples an interaction matrix ``W`` with vertex
delays ``T``; its stationary state gives a centrality and its Cheeger
constant a community measure.
"""
from .graph import Graph, GraphError, GraphFormatError, VertexSet, giant_component, load_edge_list, read_edge_list
from .operators import (CONSENSUS, RANDOM_WALK, SPECIAL_CASES, SYMMETRIC, OperatorConfig, OperatorError,
                        OperatorSpec, apply, build_operator, change_basis, make_operator, special_case)
from .spectra import EigenResult, SpectralError, dominant_adjacency_eigenpair, second_eigenpair
from .partition import (CheegerReport, SweepProfile, brute_force_conductance, cheeger_check,
                        generalized_conductance, sweep_partition, sweep_profile)
from .dynamics import (DynamicsError, StateVector, conserved_projection, evolve, generalized_centrality,
                       mixing_bound_check, retention_check, stationary_distribution, trajectory)
from .datasets import DatasetUnavailable, karate_factions, load_football, load_karate

__version__ = "0.1.0"
