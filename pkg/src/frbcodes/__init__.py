"""Fractional repetition batch codes and erasure combinatorial batch codes
built from transversal designs and affine planes."""

__version__ = "0.1.0"
