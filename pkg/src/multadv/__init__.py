"""Additive and multiplicative adversary bounds for quantum query complexity."""

__version__ = "0.1.0"

from .additive import AdditiveAdversary, adv_value
from .constructions import build
from .dpt import compose_function, dpt_eta_bound, dpt_gamma, dpt_madv, verify_tensor_norm_identity
from .multiplicative import MultiplicativeAdversary, madv2_value, madv_value
from .query import FunctionSpec, builtin, load_function, parse_function
from .simulator import grover_algorithm, random_algorithm, run, trace_progress

__all__ = [
    "AdditiveAdversary", "MultiplicativeAdversary", "FunctionSpec",
    "adv_value", "madv_value", "madv2_value", "build", "builtin", "load_function", "parse_function",
    "compose_function", "dpt_gamma", "dpt_madv", "dpt_eta_bound", "verify_tensor_norm_identity",
    "grover_algorithm", "random_algorithm", "run", "trace_progress",
]
