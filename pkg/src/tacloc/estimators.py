"""Contact localization from a tracked motion sequence.

Each estimator turns the kinematic constraint of one contact type into a
small linear-algebra problem over the stacked motion measurements:

* fixed point   — a body point stays put in the world; least squares on
                  the stacked (I - R_k) system.
* fixed direction — a body direction stays put; smallest right singular
                  vector of the stacked (R_k - I) system.
* line contact with slip — the object's contacting face stays on a plane
  pivoting about a fixed environment edge; the edge direction is the
  smallest eigenvector of the summed normal outer products and the edge
  point is the minimum-norm solution of the stacked plane-membership
  system.

All solves use orthogonal factorizations of the stacked systems; normal
equations are never formed, so the condition number reported is that of the
problem itself, not its square.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contact import ConditioningReport, ContactEstimate, ContactKind
from .errors import AmbiguousDirection, IllConditioned, RankDeficientBeyondLine, TooFewFrames
from .motion import MotionSequence, _as_vector3, _readonly, rotation_angle

UNIT_NORM_TOL = 1e-6


@dataclass(frozen=True)
class EstimatorConfig:
    """Thresholds shared by the estimators.

    angle_threshold is the smallest max rotation angle (radians) considered
    informative: below roughly 2 degrees, pivot error exceeds 10% of scale
    at 1% marker noise, so that is the default. rank_tolerance is relative
    to the largest singular value (scale-free).
    """

    angle_threshold: float = 0.035
    cond_threshold: float = 1e6
    rank_tolerance: float = 1e-8
    min_frames: int = 3

    def __post_init__(self):
        if self.angle_threshold <= 0.0 or self.cond_threshold <= 0.0 or self.rank_tolerance <= 0.0:
            raise ValueError("all thresholds must be positive")
        if self.min_frames < 1:
            raise ValueError("min_frames must be at least 1")


@dataclass(frozen=True, eq=False)
class PlaneTrack:
    """The contacting face's plane per frame: unit normals and offsets.

    Each plane is {x : normals[k] . x = offsets[k]}; their common
    intersection is the candidate contact edge.
    """

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        normals = np.array(self.normals, dtype=float)
        offsets = np.array(self.offsets, dtype=float).reshape(-1)
        if normals.ndim != 2 or normals.shape[1] != 3:
            raise ValueError(f"normals must have shape (k, 3), got {normals.shape}")
        if normals.shape[0] != offsets.shape[0]:
            raise ValueError("normals and offsets must have equal length")
        norms = np.linalg.norm(normals, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("plane normals must be unit vectors")
        object.__setattr__(self, "normals", _readonly(normals))
        object.__setattr__(self, "offsets", _readonly(offsets))

    def __len__(self) -> int:
        return self.normals.shape[0]


def _moving_or_raise(motions: MotionSequence, config: EstimatorConfig):
    moving = motions.moving()
    if len(moving) < config.min_frames:
        raise TooFewFrames(f"need at least {config.min_frames} moving frames, got {len(moving)}")
    return moving


def _canonical_sign(vec: np.ndarray) -> np.ndarray:
    """Fix the sign ambiguity: first nonzero component positive."""
    nonzero = np.nonzero(vec)[0]
    if nonzero.size and vec[nonzero[0]] < 0.0:
        return -vec
    return vec


def _unit_or_raise(vec, name: str) -> np.ndarray:
    v = _as_vector3(vec, name)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"{name} must be a unit vector, got norm {norm}")
    return v if abs(norm - 1.0) <= 1e-12 else v / norm


def fixed_point_residuals(motions, point) -> np.ndarray:
    """Per-frame distance the candidate pivot moves, over the moving frames."""
    point = np.asarray(point, dtype=float)
    moving = motions.moving() if isinstance(motions, MotionSequence) else motions
    return np.array([np.linalg.norm(m.rotation @ point + m.translation - point) for m in moving])


def fixed_direction_residuals(motions, direction) -> np.ndarray:
    """Per-frame change of the candidate body direction, over the moving frames."""
    direction = np.asarray(direction, dtype=float)
    moving = motions.moving() if isinstance(motions, MotionSequence) else motions
    return np.array([np.linalg.norm((m.rotation - np.eye(3)) @ direction) for m in moving])


def line_contact_residuals(motions, surface_normal, point) -> np.ndarray:
    """Per-frame out-of-plane displacement of the candidate edge point.

    surface_normal is the contacting face's normal in the initial frame; the
    residual at frame k is the component of the point's motion along the
    rotated normal.
    """
    n0 = np.asarray(surface_normal, dtype=float)
    point = np.asarray(point, dtype=float)
    moving = motions.moving() if isinstance(motions, MotionSequence) else motions
    out = []
    for m in moving:
        nk = m.rotation @ n0
        nk = nk / np.linalg.norm(nk)
        out.append(abs(nk @ (m.rotation @ point + m.translation - point)))
    return np.array(out)


def estimate_fixed_point(motions: MotionSequence, config: EstimatorConfig = EstimatorConfig(),
                         strict: bool = False) -> ContactEstimate:
    """Locate the body point that stays fixed in the world.

    Solves the stacked system (I - R_k) p = t_k in the least-squares sense
    through an SVD of the 3N x 3 stack; singular values below
    rank_tolerance times the largest are truncated, so a rank-deficient
    system (e.g. every point on a line is fixed) yields the minimum-norm
    pivot. The system is singular when all rotations are near the identity,
    so accuracy relies on reasonably large measured rotations; the
    conditioning report captures this and well_posed = False flags, but
    does not suppress, the estimate.

    Raises:
        TooFewFrames: fewer than config.min_frames moving frames.
        IllConditioned: only in strict mode, when the condition number
            exceeds config.cond_threshold.
    """
    moving = _moving_or_raise(motions, config)
    stacked = np.vstack([np.eye(3) - m.rotation for m in moving])
    rhs = np.concatenate([m.translation for m in moving])

    point, _, _, sing = np.linalg.lstsq(stacked, rhs, rcond=config.rank_tolerance)

    smallest = float(sing[-1])
    cond = float(sing[0] / sing[-1]) if smallest > 0.0 else math.inf
    max_angle = max(rotation_angle(m) for m in moving)
    report = ConditioningReport(
        max_rotation_angle=max_angle,
        smallest_singular_value=smallest,
        condition_number=cond,
        well_posed=(max_angle >= config.angle_threshold) and (cond <= config.cond_threshold))
    if strict and cond > config.cond_threshold:
        raise IllConditioned(
            f"fixed-point system condition number {cond:.3g} exceeds {config.cond_threshold:.3g}")

    residuals = fixed_point_residuals(moving, point)
    return ContactEstimate(kind=ContactKind.FIXED_POINT, point=point, direction=None,
                           residual_rms=float(np.sqrt(np.mean(residuals**2))),
                           conditioning=report)


def estimate_fixed_direction(motions: MotionSequence,
                             config: EstimatorConfig = EstimatorConfig()) -> ContactEstimate:
    """Find the body direction that stays fixed in the world.

    The estimate is the right singular vector of the stacked (R_k - I)
    matrix with the smallest singular value, sign-fixed so its first
    nonzero component is positive. The conditioning margin is the
    second-smallest singular value: it must stay away from zero for the
    null space to be one-dimensional.

    Raises:
        TooFewFrames: fewer than config.min_frames moving frames.
        AmbiguousDirection: the null space has dimension >= 2 (e.g. all
            rotations are the identity), so no unique direction exists.
    """
    moving = _moving_or_raise(motions, config)
    stacked = np.vstack([m.rotation - np.eye(3) for m in moving])
    _, sing, vt = np.linalg.svd(stacked)

    if sing[0] <= 0.0 or sing[1] < config.rank_tolerance * sing[0]:
        raise AmbiguousDirection(
            "rotations share no unique fixed direction (null space dimension >= 2)")

    direction = _canonical_sign(vt[2])
    max_angle = max(rotation_angle(m) for m in moving)
    cond = float(sing[0] / sing[1])
    report = ConditioningReport(
        max_rotation_angle=max_angle,
        smallest_singular_value=float(sing[1]),
        condition_number=cond,
        well_posed=(max_angle >= config.angle_threshold) and (cond <= config.cond_threshold))

    residuals = fixed_direction_residuals(moving, direction)
    return ContactEstimate(kind=ContactKind.FIXED_DIRECTION, point=None, direction=direction,
                           residual_rms=float(np.sqrt(np.mean(residuals**2))),
                           conditioning=report)


def propagate_plane(n0, x0_hint, motions: MotionSequence) -> PlaneTrack:
    """Carry the initial contact plane through every motion in the sequence.

    The plane with unit normal n0 through x0_hint is moved rigidly: the
    normal rotates, and the offset follows the transformed through-point.
    """
    n0 = _unit_or_raise(n0, "n0")
    x0 = _as_vector3(x0_hint, "x0_hint")
    normals = []
    offsets = []
    for m in motions:
        nk = m.rotation @ n0
        nk = nk / np.linalg.norm(nk)
        normals.append(nk)
        offsets.append(nk @ (m.rotation @ x0 + m.translation))
    return PlaneTrack(np.array(normals), np.array(offsets))


def estimate_line_direction(track: PlaneTrack,
                            config: EstimatorConfig = EstimatorConfig()) -> np.ndarray:
    """Direction of the edge common to all tracked planes.

    The edge must be perpendicular to every plane normal, so the direction
    is the eigenvector with the smallest eigenvalue of the summed normal
    outer products — computed here as the smallest right singular vector of
    the stacked normals, which is the exact global minimizer (no iteration,
    no initial guess).

    Raises:
        TooFewFrames: fewer than config.min_frames tracked planes.
        AmbiguousDirection: the normals span <= 1 dimension (no rotation
            about any axis perpendicular to the edge occurred), so the two
            smallest eigenvalues coincide within rank_tolerance.
    """
    if len(track) < config.min_frames:
        raise TooFewFrames(f"need at least {config.min_frames} tracked planes, got {len(track)}")
    _, sing, vt = np.linalg.svd(track.normals)
    # rank_tolerance compares eigenvalues of the outer-product sum, i.e. squared singular values
    if sing[1] ** 2 < config.rank_tolerance * sing[0] ** 2:
        raise AmbiguousDirection("plane normals span <= 1 dimension; edge direction ambiguous")
    return _canonical_sign(vt[2])


def estimate_line_point(motions: MotionSequence, track: PlaneTrack, direction,
                        config: EstimatorConfig = EstimatorConfig()) -> np.ndarray:
    """Point pinning down the edge's position.

    Each frame contributes one row n_k^T (R_k - I) with right-hand side
    -n_k^T t_k, stating that the edge point does not move out of the
    contacting plane. The system is rank-deficient along the edge, so the
    minimum-norm least-squares solution is taken and then projected exactly
    onto the plane perpendicular to `direction`: the returned point is the
    point on the estimated edge closest to the origin.

    Raises:
        RankDeficientBeyondLine: the stacked system has rank < 2, so the
            edge position is not determined transverse to its direction.
    """
    direction = _unit_or_raise(direction, "direction")
    if len(track) != len(motions):
        raise ValueError(f"track length {len(track)} != motion count {len(motions)}")

    rows = np.array([(m.rotation - np.eye(3)).T @ nk
                     for m, nk in zip(motions, track.normals)])
    rhs = np.array([-(nk @ m.translation) for m, nk in zip(motions, track.normals)])

    point, _, rank, _ = np.linalg.lstsq(rows, rhs, rcond=config.rank_tolerance)
    if rank < 2:
        raise RankDeficientBeyondLine(
            f"edge-point system rank {rank} < 2; position undetermined beyond the line")
    return point - (point @ direction) * direction


def estimate_line_contact(motions: MotionSequence, n0,
                          config: EstimatorConfig = EstimatorConfig()) -> ContactEstimate:
    """Full slipping-line-contact estimate from the contacting face normal.

    Propagates the initial plane through the sequence, recovers the edge
    direction and then its canonical point. The conditioning margin is the
    second-largest singular value of the edge-point system — the weakest of
    its two determined directions (the third is rank-deficient along the
    edge by construction).
    """
    track = propagate_plane(n0, np.zeros(3), motions)
    direction = estimate_line_direction(track, config)
    point = estimate_line_point(motions, track, direction, config)

    rows = np.array([(m.rotation - np.eye(3)).T @ nk
                     for m, nk in zip(motions, track.normals)])
    sing = np.linalg.svd(rows, compute_uv=False)
    cond = float(sing[0] / sing[1]) if sing[1] > 0.0 else math.inf
    max_angle = motions.max_rotation_angle()
    report = ConditioningReport(
        max_rotation_angle=max_angle,
        smallest_singular_value=float(sing[1]),
        condition_number=cond,
        well_posed=(max_angle >= config.angle_threshold) and (cond <= config.cond_threshold))

    residuals = line_contact_residuals(motions, np.asarray(n0, dtype=float), point)
    return ContactEstimate(kind=ContactKind.LINE, point=point, direction=direction,
                           residual_rms=float(np.sqrt(np.mean(residuals**2))),
                           conditioning=report)
