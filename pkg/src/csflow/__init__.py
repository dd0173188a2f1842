"""Coherent-state operator realizations of semisimple Lie algebras and their flows."""

from .coeffs import CoeffTable, bernoulli_positive, c_coeffs, d_coeffs
from .rootsys import (
    NU_TABLE,
    Root,
    RootSystem,
    StructureTable,
    build_a_series,
    load_custom,
    nu_bound,
    structure_chain,
)
from .symalg import DiffOp, MultiPoly, commutator, op_equal
from .synth import (
    Representation,
    Synthesizer,
    a_series_direct_representation,
    golden_tables,
    su2_representation,
    su_flag_representation,
    synth_cartan,
    synth_lowering_general,
    synth_lowering_simple,
    synth_orthogonal,
    synth_raising,
    verify_homomorphism,
)

__all__ = [
    "CoeffTable",
    "DiffOp",
    "MultiPoly",
    "NU_TABLE",
    "Representation",
    "Root",
    "RootSystem",
    "StructureTable",
    "Synthesizer",
    "a_series_direct_representation",
    "bernoulli_positive",
    "build_a_series",
    "c_coeffs",
    "commutator",
    "d_coeffs",
    "golden_tables",
    "load_custom",
    "nu_bound",
    "op_equal",
    "structure_chain",
    "su2_representation",
    "su_flag_representation",
    "synth_cartan",
    "synth_lowering_general",
    "synth_lowering_simple",
    "synth_orthogonal",
    "synth_raising",
    "verify_homomorphism",
]

__version__ = "0.1.0"
