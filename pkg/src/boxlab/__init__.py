"""Simulation and verification tools for no-signalling boxes and Tsirelson bounds."""

from .boxes import (
    BellFunctional,
    Box,
    bell_bd,
    branch_weights,
    chsh_value,
    evaluate,
    mix,
    no_signalling_report,
    noisy_pr_box,
    pr_box,
    uniform_box,
)
from .dilation import DilationResult, dilate_generic, dilate_local, dilate_pr, extract_box
from .lhv import classical_max, enumerate_strategies
from .protocol import product_test, reveal_protocol
from .seesaw import seesaw_optimize
from .tsirelson import b3_bound, bound_report, c1_lhs, c2_lhs, critical_visibility

__version__ = "0.1.0"
