"""Holonomies of hyperbolic cone surfaces, simple closed curves and stability evidence."""

from .hyp2 import Isometry, IsometryClass, PointH2, classify, dist, translation_length
from .words import Representation, SurfaceSig, Word, cyclic_canonical, modular_torus
from .holonomy import cone_torus, double_polygon_sphere, from_traces_torus, genus_g_one_cone, verify_holonomy
from .curves import EnumConfig, enumerate_scc, farey_words
from .stability import StabilityConfig, stability_scan
from .sbq import sbq_check, simple_length_spectrum, trace_spectrum

__all__ = [
    "Isometry", "IsometryClass", "PointH2", "classify", "dist", "translation_length",
    "Representation", "SurfaceSig", "Word", "cyclic_canonical", "modular_torus",
    "cone_torus", "double_polygon_sphere", "from_traces_torus", "genus_g_one_cone", "verify_holonomy",
    "EnumConfig", "enumerate_scc", "farey_words",
    "StabilityConfig", "stability_scan",
    "sbq_check", "simple_length_spectrum", "trace_spectrum",
]
