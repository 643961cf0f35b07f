"""Exact L1 shortest path maps among polygonal obstacles.

Pipeline: corridor structure -> core propagation -> SPM(M) -> bay/canal
expansion -> SPM(F); plus geodesic Voronoi diagrams, fixed-orientation and
approximate Euclidean paths, all exact over rational arithmetic.
"""
from .geom import Pt, Segment, Rect, Ray, WeightedSite, Bisector, fr, l1_dist, orient, weighted_bisector
from .instance import PolygonalDomain, parse_instance, perturb_to_general_position, render_svg, InstanceError
from .freespace import triangulate_free_space, trapezoid_map, TrapezoidMap, batched_target_points
from .corridors import build_corridor_structure, CorridorStructure, extract_bays_and_canals
from .cores import compute_cores, convert_path
from .spm_ocean import propagate_cores, build_spm_ocean, refine_to_ocean, spm_simple_polygon, Spm
from .spm_expand import gate_front, preprocess_bay, expand_bay, expand_canal, assemble_spm, build_spm_free_space
from .query import build_map, distance, path, shortest_path, LocatorIndex, SpmMap
from .oracle import VisOracle, oracle_distance, oracle_path, oracle_bay_labels
from .extensions import OrientationSet, gvd, c_oriented_shortest_path, approx_euclidean, GvdResult

__version__ = "0.1.0"
