"""Exact Koszul-duality toolkit: quadratic duals, PBW deformations, the
curved dual dga, the Koszul functors, and their homological consequences,
all in exact arithmetic over Q or F_p."""

__version__ = "0.1.0"
