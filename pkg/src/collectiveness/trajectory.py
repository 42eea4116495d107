"""Trajectory clips: ingestion, per-clip collectiveness, categories, AUC table.

A clip is an ordered list of frames, each holding tracked points with
positions and velocities.  Collectiveness of a clip is the mean graph
collectiveness over its frames, each frame measured on a Euclidean K-NN
graph with velocity-cosine weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyClipError, ParameterError, ParseError, UndefinedMetricError
from .graph import build_knn_graph, clamp_weights
from .metrics import roc_auc
from .ncl import NclConfig, measure

CATEGORIES = ("low", "medium", "high")
CATEGORY_PAIRS = (("high", "low"), ("high", "medium"), ("medium", "low"))


@dataclass(frozen=True)
class TrajectoryFrame:
    index: int
    ids: np.ndarray          # (n,) point ids
    positions: np.ndarray    # (n, 2)
    velocities: np.ndarray   # (n, 2), all nonzero


@dataclass(frozen=True)
class TrajectoryClip:
    clip_id: str
    frames: list[TrajectoryFrame]


@dataclass(frozen=True)
class ClipMeta:
    clip_id: str
    score: float
    voting: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.score <= 20.0:
            raise ParameterError(f"clip score must be in [0, 20], got {self.score}")
        if self.voting is not None and self.voting not in CATEGORIES:
            raise ParameterError(f"voting must be one of {CATEGORIES}, got {self.voting!r}")


def _finish_frame(index, ids, xs, ys, vxs, vys) -> TrajectoryFrame | None:
    """Drop zero-velocity points; drop the frame if < 2 points remain."""
    vel = np.column_stack([vxs, vys])
    keep = ~np.all(vel == 0.0, axis=1)
    if keep.sum() < 2:
        return None
    return TrajectoryFrame(
        index=index,
        ids=np.asarray(ids, dtype=np.int64)[keep],
        positions=np.column_stack([xs, ys])[keep],
        velocities=vel[keep],
    )


def load_trajectory_csv(path, clip_id: str | None = None,
                        derive_velocities: bool = False) -> TrajectoryClip:
    """Parse a ``frame,id,x,y,vx,vy`` CSV into a clip.

    Zero-velocity points are dropped per frame and frames left with fewer
    than 2 usable points are dropped.  With ``derive_velocities`` the vx,vy
    columns may be absent: velocities are forward differences of positions
    of matching point ids in the next frame, so points that vanish before
    the next frame, and the final frame itself, are dropped.
    """
    if clip_id is None:
        import os
        clip_id = os.path.splitext(os.path.basename(str(path)))[0]
    rows = []  # (frame, id, x, y, vx, vy)
    want = 4 if derive_velocities else 6
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if lineno == 1 and line.replace(" ", "").lower().startswith("frame,id,x,y"):
                continue
            parts = line.split(",")
            if len(parts) < want:
                raise ParseError(f"expected {want} columns, got {len(parts)}", lineno)
            try:
                frame = int(parts[0])
                pid = int(parts[1])
                vals = [float(p) for p in parts[2:want]]
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            rows.append((frame, pid, *vals))

    by_frame: dict[int, list[tuple]] = {}
    for row in rows:
        by_frame.setdefault(row[0], []).append(row[1:])

    frames: list[TrajectoryFrame] = []
    frame_ids = sorted(by_frame)
    if derive_velocities:
        for fi, fnext in zip(frame_ids, frame_ids[1:]):
            nxt = {pid: (x, y) for pid, x, y in by_frame[fnext]}
            ids, xs, ys, vxs, vys = [], [], [], [], []
            for pid, x, y in by_frame[fi]:
                if pid in nxt:
                    ids.append(pid)
                    xs.append(x)
                    ys.append(y)
                    vxs.append(nxt[pid][0] - x)
                    vys.append(nxt[pid][1] - y)
            if ids:
                f = _finish_frame(fi, ids, xs, ys, vxs, vys)
                if f is not None:
                    frames.append(f)
    else:
        for fi in frame_ids:
            pts = by_frame[fi]
            ids = [p[0] for p in pts]
            f = _finish_frame(fi, ids, [p[1] for p in pts], [p[2] for p in pts],
                              [p[3] for p in pts], [p[4] for p in pts])
            if f is not None:
                frames.append(f)
    if not frames:
        raise EmptyClipError(f"clip {clip_id!r} has no usable frame")
    return TrajectoryClip(clip_id, frames)


def write_trajectory_csv(clip: TrajectoryClip, path) -> None:
    lines = ["frame,id,x,y,vx,vy"]
    for f in clip.frames:
        for pid, (x, y), (vx, vy) in zip(f.ids, f.positions, f.velocities):
            lines.append(f"{f.index},{pid},{x:.10g},{y:.10g},{vx:.10g},{vy:.10g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def clip_collectiveness(clip: TrajectoryClip, cfg: NclConfig, k: int = 20) -> float:
    """Mean per-frame graph collectiveness of the clip.

    K is capped at points-1 on frames with few points.
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if not clip.frames:
        raise EmptyClipError(f"clip {clip.clip_id!r} has no usable frame")
    phis = []
    for f in clip.frames:
        kk = min(k, len(f.ids) - 1)
        g = clamp_weights(build_knn_graph(f.positions, f.velocities, kk))
        phis.append(measure(g, cfg).capital_phi)
    return float(np.mean(phis))


def categorize_by_score(score: float) -> str:
    """Map a human score in [0, 20] onto low / medium / high."""
    if not 0.0 <= score <= 20.0:
        raise ParameterError(f"score must be in [0, 20], got {score}")
    if score <= 5.0:
        return "low"
    if score < 15.0:
        return "medium"
    return "high"


def read_clip_metadata_csv(path) -> dict[str, ClipMeta]:
    """Parse ``clip,score[,voting]`` rows into a mapping by clip id."""
    metas: dict[str, ClipMeta] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if lineno == 1 and line.replace(" ", "").lower().startswith("clip,score"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) < 2:
                raise ParseError(f"expected at least 2 columns, got {len(parts)}", lineno)
            try:
                score = float(parts[1])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
            voting = parts[2] if len(parts) > 2 and parts[2] else None
            try:
                metas[parts[0]] = ClipMeta(parts[0], score, voting)
            except ParameterError as exc:
                raise ParseError(str(exc), lineno) from None
    return metas


def auc_report(clips: list[tuple[float, ClipMeta]], mode: str = "scores") -> dict[str, float | None]:
    """AUC for the three category pairs, clip collectiveness as the score.

    ``mode`` picks the labeling: "scores" buckets the human score,
    "voting" uses the majority-vote category (clips without one are left
    out).  A pair missing one of its classes gets ``None``.
    """
    if mode not in ("scores", "voting"):
        raise ParameterError(f"mode must be 'scores' or 'voting', got {mode!r}")
    labeled: list[tuple[float, str]] = []
    for value, meta in clips:
        if mode == "scores":
            labeled.append((value, categorize_by_score(meta.score)))
        elif meta.voting is not None:
            labeled.append((value, meta.voting))
    table: dict[str, float | None] = {}
    for hi, lo in CATEGORY_PAIRS:
        scores = [v for v, c in labeled if c in (hi, lo)]
        labels = [1 if c == hi else 0 for v, c in labeled if c in (hi, lo)]
        try:
            table[f"{hi}_{lo}"] = roc_auc(scores, labels) if scores else None
        except UndefinedMetricError:
            table[f"{hi}_{lo}"] = None
    return table


def make_synthetic_clip(kind: str, rng: np.random.Generator, n_points: int = 42,
                        n_frames: int = 5, clip_id: str | None = None) -> TrajectoryClip:
    """Synthetic stand-in clips for pipeline tests.

    "coherent": every point shares one velocity direction.  "mixed": two
    spatially separated halves moving in opposite directions.  "random":
    independent uniform headings per point per frame.
    """
    if kind not in ("coherent", "mixed", "random"):
        raise ParameterError(f"unknown clip kind {kind!r}")
    if n_points < 4:
        raise ParameterError(f"n_points must be >= 4, got {n_points}")
    clip_id = clip_id or kind
    frames = []
    half = n_points // 2
    for fi in range(n_frames):
        if kind == "mixed":
            # two boxes far apart so K-NN never crosses groups
            left = rng.uniform([0.0, 0.0], [10.0, 20.0], size=(half, 2))
            right = rng.uniform([30.0, 0.0], [40.0, 20.0], size=(n_points - half, 2))
            pos = np.vstack([left, right])
            vel = np.vstack([np.tile([1.0, 0.0], (half, 1)),
                             np.tile([-1.0, 0.0], (n_points - half, 1))])
        else:
            pos = rng.uniform([0.0, 0.0], [40.0, 20.0], size=(n_points, 2))
            if kind == "coherent":
                angle = rng.uniform(0.0, 2.0 * np.pi)
                vel = np.tile([np.cos(angle), np.sin(angle)], (n_points, 1))
            else:
                theta = rng.uniform(0.0, 2.0 * np.pi, size=n_points)
                vel = np.column_stack([np.cos(theta), np.sin(theta)])
        frames.append(TrajectoryFrame(fi, np.arange(n_points, dtype=np.int64), pos, vel))
    return TrajectoryClip(clip_id, frames)
