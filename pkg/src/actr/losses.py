"""Evaluable losses for camera-pose and bounding-box estimates.

These score a predicted world-to-camera transform against the truth by
comparing the transformed copies of a shared point cloud, and a predicted
box against the true edge lengths.  Only the formulas live here; no
estimator does.
"""

from __future__ import annotations

import numpy as np

from .geometry import RigidTransform


def validate_point_cloud(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 1:
        raise ValueError(f"point cloud must be (n, 3) with n >= 1, got {pts.shape}")
    if not np.isfinite(pts).all():
        raise ValueError("point cloud contains NaN or Inf values")
    return pts


def camera_alignment_loss(cloud: np.ndarray, predicted: RigidTransform,
                          truth: RigidTransform, mode: str = "frobenius") -> float:
    """Norm of the residual between the two transformed point clouds.

    ``frobenius`` (default) takes the matrix norm of the (n, 3) residual;
    ``per-point`` sums the per-point Euclidean errors instead.
    """
    pts = validate_point_cloud(cloud)
    residual = predicted.apply(pts) - truth.apply(pts)
    if mode == "frobenius":
        return float(np.linalg.norm(residual))
    if mode == "per-point":
        return float(np.linalg.norm(residual, axis=1).sum())
    raise ValueError(f"unknown loss mode {mode!r}")


def bbox_loss(predicted: tuple[float, float, float],
              truth: tuple[float, float, float]) -> float:
    """Sum of per-axis absolute edge-length errors."""
    pred = np.asarray(predicted, dtype=float)
    true = np.asarray(truth, dtype=float)
    if pred.shape != (3,) or true.shape != (3,):
        raise ValueError("edge lengths must be 3-tuples (width, height, length)")
    if np.any(pred <= 0) or np.any(true <= 0):
        raise ValueError("edge lengths must be positive")
    return float(np.abs(pred - true).sum())


def total_loss(cloud: np.ndarray, predicted: RigidTransform, truth: RigidTransform,
               predicted_edges: tuple[float, float, float],
               true_edges: tuple[float, float, float]) -> float:
    """Combined pose-plus-box loss."""
    return camera_alignment_loss(cloud, predicted, truth) + bbox_loss(
        predicted_edges, true_edges
    )
