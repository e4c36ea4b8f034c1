"""
greenslab package

Discrete Green's operators of clamped elliptic problems and their positivity.
"""

__all__ = [
    "config",
]
