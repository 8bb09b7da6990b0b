"""Isometric immersions of constant negative curvature disks.

Builds asymptotic-line (Chebyshev net) surface patches with Gaussian
curvature -1, shoots geodesics in their charts, and integrates the elastic
bending energy of geodesic disks for several immersion families: the
pseudosphere, hyperboloid-type surfaces of revolution, saddle-like
small-slope sheets, and their smooth multiple-wave generalizations.
"""

__version__ = "0.1.0"
