"""polaris: chamber data, reflection developments and billiards for polar
group actions.

The package represents a cohomogeneity-one or -two group action by its
marked orbit space (a constant-curvature chamber whose strata carry
isotropy-group labels), validates the compatibility relations of such
data, develops the associated reflection tiling, classifies torus actions
on 4-manifolds from their boundary weights, performs data-level surgery,
principal-bundle lifts and quotients, and enumerates geodesic billiards
with Morse indices.
"""

__version__ = "0.1.0"
