"""Exact finite models of local nets of symplectic subspaces, their graded
duality, Weyl-phase cohomology and charged sectors."""
from .piecewise import ChargePair, PiecewiseLinear, SpaceTag, TestPair, charges, localization, symplectic_form
from .poset import CausalPoset, IndexElement, build_poset, double_interval, interval
from .nets import AmbientSpace, NetSpec, SymplecticSubspace, additive_extension, dual, materialize
from .weyl import W, WeylElement, weyl_inverse, weyl_mul

__version__ = "0.1.0"
