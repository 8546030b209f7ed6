"""Scalar Green kernels and source-to-observer interaction blocks."""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, List, Optional, Union

import numpy as np
from scipy import special
from scipy.sparse.linalg import LinearOperator

from .artifact_writer import atomic_write_bytes, atomic_write_text
from .config import default_workers
from .errors import BlockSizeError, ParameterError, ShapeError, SingularityError
from .geometry import ScenePair

logger = logging.getLogger(__name__)

DEFAULT_DENSE_CAP = 4000 * 4000


@dataclass(frozen=True)
class KernelSpec:
    """Kernel dimensionality and wavenumber."""
    dim: int
    wavenumber: float

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ParameterError(f"Kernel dim must be 2 or 3, got {self.dim}")
        if not (self.wavenumber > 0 and math.isfinite(self.wavenumber)):
            raise ParameterError(f"Wavenumber must be positive, got {self.wavenumber}")

    @classmethod
    def for_scene(cls, scene: ScenePair) -> "KernelSpec":
        return cls(dim=scene.dim, wavenumber=scene.wavenumber)

    def __call__(self, distance: np.ndarray) -> np.ndarray:
        if self.dim == 3:
            return green_3d(self.wavenumber, distance)
        return green_2d(self.wavenumber, distance)


def _check_distance(distance: np.ndarray) -> np.ndarray:
    distance = np.asarray(distance, dtype=float)
    if np.any(distance <= 0):
        raise SingularityError("Kernel evaluated at coincident points")
    return distance


def green_3d(k: float, distance: np.ndarray) -> np.ndarray:
    """exp(-jkR)/R for an array of distances."""
    distance = _check_distance(distance)
    return np.exp(-1j * k * distance) / distance


def green_2d(k: float, distance: np.ndarray) -> np.ndarray:
    """Zeroth-order Hankel function of the second kind, J0(kR) - jY0(kR)."""
    x = k * _check_distance(distance)
    return special.j0(x) - 1j * special.y0(x)


def kernel_3d(k: float, r: np.ndarray, rp: np.ndarray) -> complex:
    """3-D kernel between two points."""
    return complex(green_3d(k, np.linalg.norm(np.subtract(r, rp))))


def kernel_2d(k: float, r: np.ndarray, rp: np.ndarray) -> complex:
    """2-D kernel between two points."""
    return complex(green_2d(k, np.linalg.norm(np.subtract(r, rp))))


class Representation(str, Enum):
    DENSE = "dense"
    OPERATOR = "operator"


@dataclass(frozen=True, eq=False)
class InteractionBlock:
    """Kernel samples between every observer and source point of a scene.

    Entries are raw kernel values with no quadrature weights. A dense block
    holds the matrix; an operator block evaluates kernel rows or columns on
    demand in fixed chunks.
    """
    scene: ScenePair
    kernel: KernelSpec
    representation: Representation
    matrix: Optional[np.ndarray] = None
    chunk_rows: int = 256
    workers: Optional[int] = None

    @property
    def shape(self):
        return self.scene.shape

    @property
    def size(self) -> int:
        rows, cols = self.shape
        return rows * cols

    def rows(self, rows: slice) -> np.ndarray:
        """Kernel values for a slice of observer rows against all sources."""
        r = self.scene.observer.points[rows, None, :] - self.scene.source.points[None, :, :]
        return self.kernel(np.linalg.norm(r, axis=2))

    def columns(self, cols: slice) -> np.ndarray:
        """Kernel values for all observers against a slice of source columns."""
        r = self.scene.observer.points[:, None, :] - self.scene.source.points[None, cols, :]
        return self.kernel(np.linalg.norm(r, axis=2))

    def to_dense(self, dense_cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
        """Dense matrix, assembling it when the block is an operator."""
        if self.matrix is not None:
            return self.matrix
        return assemble_dense(self.scene, dense_cap, self.chunk_rows, self.workers).matrix


def _slices(n: int, step: int) -> List[slice]:
    return [slice(i, min(i + step, n)) for i in range(0, n, step)]


def _ordered_map(func: Callable[[slice], np.ndarray], chunks: List[slice], workers: Optional[int]) -> List[np.ndarray]:
    """Evaluate chunks, in parallel when allowed, returning results in chunk order."""
    workers = workers or default_workers()
    if workers == 1 or len(chunks) == 1:
        return [func(chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
        return list(pool.map(func, chunks))


def operator_block(scene: ScenePair, chunk_rows: int = 256, workers: Optional[int] = None) -> InteractionBlock:
    """Matrix-free block for ``scene``."""
    if chunk_rows < 1:
        raise ParameterError(f"chunk_rows must be positive, got {chunk_rows}")
    return InteractionBlock(
        scene=scene,
        kernel=KernelSpec.for_scene(scene),
        representation=Representation.OPERATOR,
        chunk_rows=chunk_rows,
        workers=workers,
    )


def assemble_dense(
    scene: ScenePair,
    dense_cap: int = DEFAULT_DENSE_CAP,
    chunk_rows: int = 256,
    workers: Optional[int] = None,
) -> InteractionBlock:
    """Assemble the full complex block ``Z[i, j] = K(r_i, r'_j)``.

    Raises:
        BlockSizeError: If ``N_o * N_s`` exceeds ``dense_cap``.
        SingularityError: If an observer coincides with a source.
    """
    block = operator_block(scene, chunk_rows, workers)
    if block.size > dense_cap:
        raise BlockSizeError(
            f"Block {block.shape[0]}x{block.shape[1]} has {block.size} entries, above the dense cap {dense_cap}"
        )
    parts = _ordered_map(block.rows, _slices(block.shape[0], chunk_rows), workers)
    matrix = np.concatenate(parts, axis=0)
    matrix.setflags(write=False)
    logger.info(f"Assembled dense {block.shape[0]}x{block.shape[1]} block (dim={scene.dim}, k={scene.wavenumber:.6g})")
    return InteractionBlock(
        scene=scene,
        kernel=block.kernel,
        representation=Representation.DENSE,
        matrix=matrix,
        chunk_rows=chunk_rows,
        workers=workers,
    )


def assemble_block(
    scene: ScenePair,
    dense_cap: int = DEFAULT_DENSE_CAP,
    chunk_rows: int = 256,
    workers: Optional[int] = None,
) -> InteractionBlock:
    """Dense block when it fits under ``dense_cap``, operator block otherwise."""
    rows, cols = scene.shape
    if rows * cols <= dense_cap:
        return assemble_dense(scene, dense_cap, chunk_rows, workers)
    logger.info(f"Block {rows}x{cols} exceeds the dense cap; using the matrix-free operator")
    return operator_block(scene, chunk_rows, workers)


def _as_vectors(x: np.ndarray, length: int, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim not in (1, 2) or x.shape[0] != length:
        raise ShapeError(f"{name} needs leading dimension {length}, got shape {x.shape}")
    return x


def apply(block: InteractionBlock, x: np.ndarray) -> np.ndarray:
    """Compute ``Z x`` for a vector or a stack of column vectors."""
    n_obs, n_src = block.shape
    x = _as_vectors(x, n_src, "apply")
    if block.matrix is not None:
        return block.matrix @ x
    parts = _ordered_map(lambda rows: block.rows(rows) @ x, _slices(n_obs, block.chunk_rows), block.workers)
    return np.concatenate(parts, axis=0)


def apply_adjoint(block: InteractionBlock, y: np.ndarray) -> np.ndarray:
    """Compute ``Z^H y`` for a vector or a stack of column vectors."""
    n_obs, n_src = block.shape
    y = _as_vectors(y, n_obs, "apply_adjoint")
    if block.matrix is not None:
        return block.matrix.conj().T @ y
    parts = _ordered_map(
        lambda cols: block.columns(cols).conj().T @ y, _slices(n_src, block.chunk_rows), block.workers
    )
    return np.concatenate(parts, axis=0)


def as_linear_operator(block: InteractionBlock) -> LinearOperator:
    """Wrap a block as a scipy LinearOperator."""
    return LinearOperator(
        block.shape,
        matvec=lambda x: apply(block, x),
        rmatvec=lambda y: apply_adjoint(block, y),
        matmat=lambda x: apply(block, x),
        rmatmat=lambda y: apply_adjoint(block, y),
        dtype=np.complex128,
    )


def dump_block(block: InteractionBlock, path: Union[str, Path], dense_cap: int = DEFAULT_DENSE_CAP) -> Path:
    """Write the block as little-endian interleaved complex64 with a JSON sidecar.

    The sidecar sits next to the binary with a ``.json`` suffix and records
    ``rows``, ``cols``, ``k`` and ``dim``.
    """
    path = Path(path)
    matrix = block.to_dense(dense_cap)
    atomic_write_bytes(path, np.ascontiguousarray(matrix, dtype="<c8").tobytes())
    rows, cols = block.shape
    sidecar = {"rows": rows, "cols": cols, "k": block.kernel.wavenumber, "dim": block.kernel.dim}
    atomic_write_text(path.with_suffix(".json"), json.dumps(sidecar, sort_keys=True) + "\n")
    logger.info(f"Dumped {rows}x{cols} block to {path}")
    return path
