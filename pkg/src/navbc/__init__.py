"""navbc: a compact workbench for studying imitation-learned social navigation.

The package couples a reciprocal-velocity-obstacle crowd simulator with a
from-scratch differentiable network stack so that behaviour-cloning design
choices (action spaces, augmentation, regularisation, weight perturbation)
can be measured end to end in closed loop.
"""

__version__ = "0.1.0"
