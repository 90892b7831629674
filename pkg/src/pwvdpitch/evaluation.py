"""Pitch-track error metrics: MAE, PVE, and F0 frame error (GPE + VDE)."""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .signal_io import PitchTrack

GPE_RATIO = 0.2


class UndefinedMetric(ValueError):
    pass


@dataclass(frozen=True)
class FramePairs:
    times: np.ndarray
    gt_f0: np.ndarray
    est_f0: np.ndarray
    gt_voiced: np.ndarray
    est_voiced: np.ndarray

    def __len__(self):
        return len(self.times)

    @classmethod
    def from_arrays(cls, gt_f0, est_f0, gt_voiced=None, est_voiced=None):
        gt_f0 = np.asarray(gt_f0, dtype=float)
        est_f0 = np.asarray(est_f0, dtype=float)
        gv = np.isfinite(gt_f0) if gt_voiced is None else np.asarray(gt_voiced, bool)
        ev = np.isfinite(est_f0) if est_voiced is None else np.asarray(est_voiced, bool)
        return cls(np.arange(len(gt_f0), dtype=float), gt_f0, est_f0, gv, ev)

    def take(self, idx) -> "FramePairs":
        return FramePairs(self.times[idx], self.gt_f0[idx], self.est_f0[idx],
                          self.gt_voiced[idx], self.est_voiced[idx])


@dataclass(frozen=True)
class EvalReport:
    mae: float
    pve: float
    ffe: float
    gpe_count: int
    vde_count: int
    total_frames: int
    compared_frames: int

    def to_dict(self) -> dict:
        return asdict(self)


def align(gt: PitchTrack, est: PitchTrack) -> FramePairs:
    """Pair every ground-truth frame with the nearest estimate frame.

    Pairs more than half a ground-truth hop apart are dropped.
    """
    if len(gt) == 0 or len(est) == 0:
        raise ValueError("align: empty track")
    pos = np.searchsorted(est.times, gt.times)
    left = np.clip(pos - 1, 0, len(est) - 1)
    right = np.clip(pos, 0, len(est) - 1)
    d_left = np.abs(gt.times - est.times[left])
    d_right = np.abs(est.times[right] - gt.times)
    nearest = np.where(d_right < d_left, right, left)
    dist = np.minimum(d_left, d_right)
    keep = dist <= gt.hop / 2 + 1e-9
    if not np.any(keep):
        warnings.warn("align: tracks do not overlap in time", stacklevel=2)
    g = np.flatnonzero(keep)
    e = nearest[keep]
    return FramePairs(gt.times[g], gt.f0[g], est.f0[e], gt.voiced[g], est.voiced[e])


def mae_pve(pairs: FramePairs) -> tuple[float, float]:
    """Mean and population std of |gt - est| over frames voiced in both."""
    both = pairs.gt_voiced & pairs.est_voiced
    if not np.any(both):
        raise UndefinedMetric("no frames voiced in both tracks")
    err = np.abs(pairs.gt_f0[both] - pairs.est_f0[both])
    return float(np.mean(err)), float(np.std(err))


def ffe(pairs: FramePairs) -> tuple[float, int, int]:
    """F0 frame error in percent, with the GPE and VDE counts."""
    if len(pairs) == 0:
        raise UndefinedMetric("no paired frames")
    vde = pairs.gt_voiced != pairs.est_voiced
    both = pairs.gt_voiced & pairs.est_voiced
    with np.errstate(invalid="ignore"):
        gross = np.abs(pairs.est_f0 - pairs.gt_f0) > GPE_RATIO * pairs.gt_f0
    gpe = both & gross
    n_gpe, n_vde = int(gpe.sum()), int(vde.sum())
    return 100.0 * (n_gpe + n_vde) / len(pairs), n_gpe, n_vde


def evaluate(gt: PitchTrack, est: PitchTrack) -> EvalReport:
    pairs = align(gt, est)
    both = int(np.sum(pairs.gt_voiced & pairs.est_voiced))
    try:
        mae, pve = mae_pve(pairs)
    except UndefinedMetric:
        mae = pve = float("nan")
    score, n_gpe, n_vde = ffe(pairs)
    return EvalReport(mae, pve, score, n_gpe, n_vde, len(pairs), both)
