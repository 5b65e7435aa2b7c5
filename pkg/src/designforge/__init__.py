"""Projective 2-design toolkit over complex, finite-field, and quaternionic scalars."""

__version__ = "0.1.0"
