"""Task-embedding pooling, normalization, PCA, and cluster-slice loading.

The eigendecomposition is a cyclic Jacobi rotation on the symmetric sample
covariance: dependency-light, deterministic, and adequate for embedding
dims up to a couple thousand. Convergence is declared when every
off-diagonal magnitude drops below 1e-10, or after 100 sweeps.

Cluster assignments (e.g. from an external density-clustering run) are
imported from a JSONL file, never computed here.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

import numpy as np

JACOBI_OFF_DIAG_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Row-major float64 matrix with one id per row.

    Ids repeat when rows are example-level (one row per example of a
    task); pooling reduces them to unique task ids.
    """

    ids: tuple[str, ...]
    dim: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        if self.values.shape != (len(self.ids), self.dim):
            raise ValueError(
                f"shape {self.values.shape} does not match "
                f"({len(self.ids)}, {self.dim})"
            )
        if self.values.size and not np.isfinite(self.values).all():
            raise ValueError("embedding matrix contains non-finite values")

    @classmethod
    def from_rows(cls, ids: Iterable[str], rows: Iterable[Iterable[float]], dim: int | None = None) -> EmbeddingMatrix:
        ids = tuple(ids)
        values = np.asarray(list(rows), dtype=np.float64)
        if values.size == 0:
            values = values.reshape(0, dim or 0)
        if dim is None:
            dim = values.shape[1]
        return cls(ids=ids, dim=dim, values=values)


@dataclass(frozen=True)
class PcaModel:
    """Centered orthonormal projection fitted by ``pca_fit``."""

    mean: np.ndarray  # (dim,)
    components: np.ndarray  # (out_dim, dim), orthonormal rows
    eigenvalues: np.ndarray  # (out_dim,), non-increasing

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def out_dim(self) -> int:
        return self.components.shape[0]

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> PcaModel:
        return cls(
            mean=np.asarray(d["mean"], dtype=np.float64),
            components=np.asarray(d["components"], dtype=np.float64),
            eigenvalues=np.asarray(d["eigenvalues"], dtype=np.float64),
        )


def load_example_embeddings(fh: IO[str]) -> EmbeddingMatrix:
    """Read the canonical JSONL embedding format.

    Each line is ``{"task_id": ..., "example_index": ..., "vector": [...]}``.
    Rows keep file order; all vectors must share one dimension (the error
    names the offending task).
    """
    ids: list[str] = []
    rows: list[list[float]] = []
    dim: int | None = None
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {lineno}: invalid JSON: {exc}") from exc
        try:
            task_id = raw["task_id"]
            raw["example_index"]
            vector = raw["vector"]
        except (TypeError, KeyError) as exc:
            raise ValueError(
                f"line {lineno}: expected task_id, example_index and vector"
            ) from exc
        if dim is None:
            dim = len(vector)
        elif len(vector) != dim:
            raise ValueError(
                f"task {task_id!r}: vector has dim {len(vector)}, expected {dim}"
            )
        ids.append(str(task_id))
        rows.append(vector)
    return EmbeddingMatrix.from_rows(ids, rows, dim=dim or 0)


def pool_task_embeddings(example_embeddings: EmbeddingMatrix) -> EmbeddingMatrix:
    """Arithmetic mean of each task's example rows.

    Output rows are ordered by first appearance of the task id.
    """
    if len(example_embeddings.ids) == 0:
        return example_embeddings
    order: list[str] = []
    groups: dict[str, list[int]] = {}
    for i, task_id in enumerate(example_embeddings.ids):
        if task_id not in groups:
            groups[task_id] = []
            order.append(task_id)
        groups[task_id].append(i)
    pooled = np.empty((len(order), example_embeddings.dim), dtype=np.float64)
    for row, task_id in enumerate(order):
        pooled[row] = example_embeddings.values[groups[task_id]].mean(axis=0)
    return EmbeddingMatrix(ids=tuple(order), dim=example_embeddings.dim, values=pooled)


def l2_normalize(m: EmbeddingMatrix) -> EmbeddingMatrix:
    """Divide each row by its Euclidean norm; zero rows stay zero (warned)."""
    norms = np.linalg.norm(m.values, axis=1)
    zero = norms == 0.0
    n_zero = int(zero.sum())
    if n_zero:
        warnings.warn(f"{n_zero} zero rows left unnormalized", stacklevel=2)
    safe = np.where(zero, 1.0, norms)
    return EmbeddingMatrix(ids=m.ids, dim=m.dim, values=m.values / safe[:, None])


def _jacobi_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors-as-columns), unsorted.
    """
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.abs(a - np.diag(a.diagonal()))
        if off.max() < JACOBI_OFF_DIAG_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < JACOBI_OFF_DIAG_TOL:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0)
                )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J applied as column then row updates
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return a.diagonal().copy(), v


def _fix_signs(components: np.ndarray) -> np.ndarray:
    """Largest-magnitude coordinate of each component made positive.

    Ties break at the lowest index (argmax returns the first maximum).
    """
    out = components.copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0:
            out[i] = -out[i]
    return out


def pca_fit(m: EmbeddingMatrix, out_dim: int) -> PcaModel:
    """Fit PCA on the sample covariance (divisor n-1) of the rows."""
    n, dim = m.values.shape
    if n < 2:
        raise ValueError("pca_fit needs at least 2 rows")
    if not 1 <= out_dim <= min(dim, n - 1):
        raise ValueError(
            f"out_dim must be in [1, min(dim, rows-1)] = "
            f"[1, {min(dim, n - 1)}], got {out_dim}"
        )
    mean = m.values.mean(axis=0)
    centered = m.values - mean
    cov = (centered.T @ centered) / (n - 1)
    eigenvalues, vectors = _jacobi_eigh(cov)
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order][:out_dim]
    components = _fix_signs(vectors[:, order][:, :out_dim].T)
    if eigenvalues.min(initial=0.0) < -1e-12:
        raise ValueError("covariance eigenvalue below -1e-12; input ill-conditioned")
    return PcaModel(mean=mean, components=components, eigenvalues=eigenvalues)


def pca_project(model: PcaModel, m: EmbeddingMatrix) -> EmbeddingMatrix:
    """Center rows by the fitted mean and project onto the components."""
    if m.dim != model.dim:
        raise ValueError(f"matrix dim {m.dim} != model dim {model.dim}")
    projected = (m.values - model.mean) @ model.components.T
    return EmbeddingMatrix(ids=m.ids, dim=model.out_dim, values=projected)


def load_cluster_assignments(path: Path) -> tuple[dict[str, int], int]:
    """Read ``{task_id, label}`` JSONL; returns (map, duplicate count).

    Labels are integers; -1 marks the noise cluster. Duplicate ids win
    last and each duplicate is warned about.
    """
    out: dict[str, int] = {}
    duplicates = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(raw, dict) or "task_id" not in raw or "label" not in raw:
                raise ValueError(f"line {lineno}: expected keys task_id and label")
            task_id = str(raw["task_id"])
            try:
                label = int(raw["label"])
            except (TypeError, ValueError) as exc:
                raise ValueError(f"line {lineno}: label must be an integer") from exc
            if task_id in out:
                duplicates += 1
                warnings.warn(
                    f"duplicate assignment for {task_id!r} (line {lineno}); "
                    "last one wins",
                    stacklevel=2,
                )
            out[task_id] = label
    return out, duplicates


def write_embeddings(m: EmbeddingMatrix, fh: IO[str]) -> None:
    """Write task-level embeddings as ``{task_id, vector}`` JSONL."""
    for task_id, row in zip(m.ids, m.values):
        fh.write(
            json.dumps(
                {"task_id": task_id, "vector": [float(x) for x in row]},
                ensure_ascii=False,
                separators=(",", ":"),
            )
        )
        fh.write("\n")


def save_embeddings_binary(m: EmbeddingMatrix, fh: IO[bytes]) -> None:
    """Binary format: one JSON header line, then float64-LE rows.

    Header: ``{"dim": D, "count": N, "ids": [...]}``; the ids array keys
    the N rows that follow (N * D little-endian doubles).
    """
    header = {"dim": m.dim, "count": len(m.ids), "ids": list(m.ids)}
    fh.write(json.dumps(header, separators=(",", ":")).encode("utf-8"))
    fh.write(b"\n")
    fh.write(np.ascontiguousarray(m.values, dtype="<f8").tobytes())


def load_embeddings_binary(fh: IO[bytes]) -> EmbeddingMatrix:
    """Read the binary format written by ``save_embeddings_binary``."""
    header_line = fh.readline()
    try:
        header = json.loads(header_line)
        dim = int(header["dim"])
        count = int(header["count"])
        ids = [str(x) for x in header["ids"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise ValueError(f"invalid binary embedding header: {exc}") from exc
    if len(ids) != count:
        raise ValueError(f"header count {count} != {len(ids)} ids")
    data = fh.read(count * dim * 8)
    values = np.frombuffer(data, dtype="<f8", count=count * dim).reshape(count, dim)
    return EmbeddingMatrix(ids=tuple(ids), dim=dim, values=values.astype(np.float64))
