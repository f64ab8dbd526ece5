"""holodyn: a numerical laboratory for holomorphic dynamics in C^2.

Desk-scale implementations of basin dynamics for the rotated skew product,
conformal-radius scans, the complex-tangential (CR) path distance,
Kobayashi-metric estimates, the quantitative Hopf lemma and derivative
transfer, and the Hopf fibration with circle-map entropy.
"""

from .basin import (AlphaMap, OrbitVerdict, SliceDomain, Verdict, classify,
                    render_slice, retract, step)
from .crmetric import (CRProbe, HorizontalPath, anisotropy_fit, anisotropy_table,
                       ball_members, cr_lower, cr_upper, dilation_check,
                       min_tangential_dilation, probe_boxes)
from .errors import HolodynError
from .fibration import (BlaschkeProduct, EntropyEstimate, FiberCircle,
                        circle_degree, entropy_spanning, fiber_circle,
                        fibration_project, hopf_map, linking_number)
from .geometry import (BoundaryFrame, CVec2, DomainModel, PlanarGrid, PointC2,
                       boundary_frame, levi_form, stream)
from .kobayashi import (Ball, KobayashiValue, arc_diameter, feps_diameter,
                        kobayashi_bounds, kobayashi_exact, psi1,
                        rescale_hausdorff)
from .maps import (BoundaryMap, ball_automorphism, ball_translation,
                   identity_map, rotation_map, unitary_map)
from .radius import (RadiusEstimate, estimate_slice, fiber_radius,
                     green_radius, inner_radius, julia_origin_escape,
                     rotation_scan)
from .rates import (HarmonicProbe, NormalRate, arc_indicator,
                    hopf_bound_check, normal_rate, tangential_transfer_check)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
