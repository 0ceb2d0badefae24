"""actr: adaptive camera-orbit planning over weighted occlusion blocks.

Given per-slice semantic difference maps of a single-view object, the
package builds a weighted 3D block grid inside the estimated bounding box
and picks, from a discretized family of closed orbits, the camera
trajectory that maximizes cumulative weighted visibility of the occluded
regions.  The selected pose sequence is written in a text format ready for
pose-conditioned novel-view generators.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .blocks import (
    BlockGrid,
    BoundingBoxEstimate,
    SemanticBlock,
    build_block_grid,
    grid_from_cells,
)
from .coverage import CoverageReport, SurfaceSamples, coverage, point_visible, sample_surface
from .diffmap import (
    CroppedDifferenceMap,
    cosine_cell_similarity,
    crop_to_mask,
    difference_map,
)
from .geometry import (
    AABB,
    CameraModel,
    RigidTransform,
    SphericalPose,
    angle_to_block,
    pose_to_transform,
    ray_aabb_intersect,
)
from .losses import bbox_loss, camera_alignment_loss, total_loss
from .planner import (
    CandidateSet,
    ScoredTrajectory,
    Trajectory,
    enumerate_candidates,
    random_trajectory,
    score_candidates,
    score_trajectory,
    select_best,
    static_trajectory,
    visible_set,
)
from .shapes import SyntheticShape, make_bowl, make_box, make_l_shape, make_tube

__version__ = "0.1.0"
