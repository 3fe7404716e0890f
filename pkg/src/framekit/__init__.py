"""framekit: finite-scale frame theory toolkit.

Hilbert frames, p-approximate Schauder frames, semi-inner products on
finite l^p, metric (Lipschitz) frames, frame multipliers, weak
operator-valued frames, exact vector-space dilations, and Cuntz-isometry
commutator systems.
"""

__version__ = "0.1.0"
