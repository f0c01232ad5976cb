"""Turing machines, S-machines and the group presentations built from them."""

from .words import Symbol, format_word, free_reduce, inverse, parse_word
from .tm import TuringMachine, bounded_accept, input_configuration, machine_Ma, parse_tm
from .normalize import verify_normal_form
from .smachine import SMachine, SRule, apply_srule, bounded_search, reach, run_history
from .compiler import compile_machine, lift_computation, sigma
from .presentation import GroupPresentation, build_K, build_presentation
from .derivation import disc_witness, trivial_machine_search, verify_witness

__version__ = "0.1.0"
