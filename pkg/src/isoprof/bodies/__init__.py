"""Convex body families, structural operations and JSON loading."""
from .profile import ConvexProfile, power, linear, tabulated
from .families import (
    Body, HalfSpace, Slab, PolyCone, Polytope, FullSpace, Ball, Ray, Flat,
    Product, Intersection, BallCut, RevolutionBody, PowerBody, CylBounded,
    ExEnvelope, envelope_planes,
)
from .structure import (
    tangent_cone, asymptotic_cone, asymptotic_cylinders, ex_wedge, CylinderReport,
    is_boundary, is_cone,
)
from .io import load_body, body_from_json, body_hash

__all__ = [
    "ConvexProfile", "power", "linear", "tabulated",
    "Body", "HalfSpace", "Slab", "PolyCone", "Polytope", "FullSpace", "Ball", "Ray", "Flat",
    "Product", "Intersection", "BallCut", "RevolutionBody", "PowerBody", "CylBounded",
    "ExEnvelope", "envelope_planes",
    "tangent_cone", "asymptotic_cone", "asymptotic_cylinders", "ex_wedge", "CylinderReport",
    "is_boundary", "is_cone",
    "load_body", "body_from_json", "body_hash",
]
