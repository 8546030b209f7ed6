"""Singular-value spectra of interaction blocks, rank-at-threshold and knee detection."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Optional, Tuple, Union

import numpy as np
from scipy import linalg

from .errors import (
    ConvergenceError,
    DegenerateKneeError,
    FloorError,
    ParameterError,
)
from .kernel import DEFAULT_DENSE_CAP, InteractionBlock, apply, apply_adjoint

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps

# Thresholds reported for every spectrum.
REPORT_TAUS = (1e-3, 1e-6, 1e-9, 1e-12)

BlockLike = Union[InteractionBlock, np.ndarray]


class SpectrumMethod(str, Enum):
    DENSE = "dense"
    RANDOMIZED = "randomized"


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Descending singular values with optional singular vectors.

    ``tol_floor`` is the smallest ``σ/σ₁`` the method can certify.
    """
    sigmas: np.ndarray
    U_cols: Optional[np.ndarray]
    V_cols: Optional[np.ndarray]
    method: SpectrumMethod
    seed: Optional[int]
    tol_floor: float

    def __post_init__(self):
        sigmas = np.asarray(self.sigmas, dtype=float)
        if sigmas.ndim != 1 or sigmas.size == 0:
            raise ParameterError("A spectrum needs at least one singular value")
        if not sigmas[0] > 0:
            raise ParameterError("The leading singular value must be positive")
        if np.any(np.diff(sigmas) > 0):
            raise ParameterError("Singular values must be non-increasing")
        sigmas.setflags(write=False)
        object.__setattr__(self, "sigmas", sigmas)

    @property
    def size(self) -> int:
        return self.sigmas.size

    @property
    def normalized(self) -> np.ndarray:
        """σ_n / σ_1."""
        return self.sigmas / self.sigmas[0]

    def count_above_floor(self) -> int:
        return int(np.count_nonzero(self.normalized > self.tol_floor))


@dataclass(frozen=True)
class RankReport:
    """Rank at a threshold next to the predicted and detected knee."""
    tau: float
    rank: int
    knee_pred: float
    knee_detected: Optional[int]
    remainder_width: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tau": self.tau,
            "rank": self.rank,
            "knee_pred": self.knee_pred,
            "knee_detected": self.knee_detected,
            "remainder_width": self.remainder_width,
        }


def _matrix_of(block: BlockLike, dense_cap: int) -> np.ndarray:
    if isinstance(block, InteractionBlock):
        return block.to_dense(dense_cap)
    return np.asarray(block)


def _operators(block: BlockLike) -> Tuple[Tuple[int, int], Callable, Callable]:
    """Shape, forward and adjoint products of a block or a plain matrix."""
    if isinstance(block, InteractionBlock):
        return block.shape, lambda x: apply(block, x), lambda y: apply_adjoint(block, y)
    matrix = np.asarray(block)
    return matrix.shape, lambda x: matrix @ x, lambda y: matrix.conj().T @ y


def svd_dense(block: BlockLike, dense_cap: int = DEFAULT_DENSE_CAP) -> SpectrumResult:
    """Full SVD of a dense block.

    Uses LAPACK gesdd and falls back to gesvd when it does not converge.

    Raises:
        BlockSizeError: If an operator block is too large to assemble.
        ConvergenceError: If both drivers fail.
    """
    matrix = _matrix_of(block, dense_cap)
    try:
        u, s, vh = linalg.svd(matrix, full_matrices=False, lapack_driver="gesdd")
    except linalg.LinAlgError:
        logger.warning("gesdd did not converge; retrying with gesvd")
        try:
            u, s, vh = linalg.svd(matrix, full_matrices=False, lapack_driver="gesvd")
        except linalg.LinAlgError as e:
            raise ConvergenceError(f"Dense SVD failed: {e}") from e
    logger.info(f"Dense SVD of {matrix.shape[0]}x{matrix.shape[1]} block: sigma_1={s[0]:.6g}")
    return SpectrumResult(
        sigmas=s,
        U_cols=u,
        V_cols=vh.conj().T,
        method=SpectrumMethod.DENSE,
        seed=None,
        tol_floor=EPS * max(matrix.shape),
    )


def _orthonormalize(y: np.ndarray, basis: Optional[np.ndarray]) -> np.ndarray:
    """Orthonormal basis of ``y`` with the span of ``basis`` projected out twice."""
    if basis is not None and basis.shape[1]:
        for _ in range(2):
            y = y - basis @ (basis.conj().T @ y)
    q, _ = linalg.qr(y, mode="economic")
    return q


def svd_randomized(
    block: BlockLike,
    target_tau: float,
    seed: int = 42,
    block_size: int = 64,
    power_iters: int = 2,
    oversampling: int = 10,
    max_rank: Optional[int] = None,
) -> SpectrumResult:
    """Adaptive blocked randomized SVD.

    Complex Gaussian test vectors are drawn ``block_size`` columns at a time. Each
    block is refined with ``power_iters`` power iterations and orthogonalized
    against the basis found so far. After each block the projected matrix
    ``B = Qᴴ Z`` is decomposed; once its smallest singular value falls below
    ``target_tau / 10`` relative to the largest, one more block of
    ``oversampling`` vectors is added and the result returned.

    Args:
        block: Interaction block or matrix.
        target_tau: Smallest relative singular value that must be resolved.
        seed: Seed of the random generator.
        block_size: Test vectors per block.
        power_iters: Power iterations per block.
        oversampling: Extra vectors after the stopping test passes.
        max_rank: Basis size cap, defaults to ``min(N_o, N_s)``.

    Returns:
        SpectrumResult with ``tol_floor = target_tau``, or machine precision
        when the full range was captured.

    Raises:
        ParameterError: If ``target_tau`` is not in (0, 1).
        ConvergenceError: If ``max_rank`` is reached before the stopping test passes.
    """
    if not 0 < target_tau < 1:
        raise ParameterError(f"target_tau must lie in (0, 1), got {target_tau}")
    (n_obs, n_src), forward, adjoint = _operators(block)
    full_rank = min(n_obs, n_src)
    cap = full_rank if max_rank is None else min(max_rank, full_rank)
    rng = np.random.default_rng(seed)

    q_basis = np.zeros((n_obs, 0), dtype=complex)
    b_rows = np.zeros((0, n_src), dtype=complex)
    converged = False
    extra_done = False

    while q_basis.shape[1] < cap:
        width = oversampling if converged else block_size
        width = min(width, cap - q_basis.shape[1])
        omega = (rng.standard_normal((n_src, width)) + 1j * rng.standard_normal((n_src, width))) / math.sqrt(2)

        y = _orthonormalize(forward(omega), q_basis)
        for _ in range(power_iters):
            w, _ = linalg.qr(adjoint(y), mode="economic")
            y = _orthonormalize(forward(w), q_basis)

        q_basis = np.hstack([q_basis, y])
        b_rows = np.vstack([b_rows, adjoint(y).conj().T])
        s = linalg.svd(b_rows, compute_uv=False)
        logger.debug(f"Randomized SVD basis {q_basis.shape[1]}: sigma_min/sigma_max={s[-1] / s[0]:.3e}")

        if converged:
            extra_done = True
            break
        if s[-1] < target_tau / 10 * s[0]:
            converged = True

    captured_full = q_basis.shape[1] >= full_rank
    if not (extra_done or captured_full or converged):
        raise ConvergenceError(
            f"Randomized SVD reached max_rank={cap} before resolving sigma/sigma_1 = {target_tau}"
        )

    u_b, sigmas, vh = linalg.svd(b_rows, full_matrices=False)
    logger.info(
        f"Randomized SVD of {n_obs}x{n_src} block: basis {q_basis.shape[1]}, sigma_1={sigmas[0]:.6g}"
    )
    return SpectrumResult(
        sigmas=sigmas,
        U_cols=q_basis @ u_b,
        V_cols=vh.conj().T,
        method=SpectrumMethod.RANDOMIZED,
        seed=seed,
        tol_floor=EPS * max(n_obs, n_src) if captured_full else target_tau,
    )


def compute_spectrum(
    block: InteractionBlock,
    target_tau: float = 1e-12,
    seed: int = 42,
    method: str = "auto",
    dense_cap: int = DEFAULT_DENSE_CAP,
    **randomized: int,
) -> SpectrumResult:
    """Spectrum by the requested method; ``auto`` picks dense within the cap."""
    if method == "auto":
        method = "dense" if block.matrix is not None or block.size <= dense_cap else "randomized"
    if method == "dense":
        return svd_dense(block, dense_cap)
    if method == "randomized":
        return svd_randomized(block, target_tau, seed=seed, **randomized)
    raise ParameterError(f"Unknown spectrum method: {method}")


def rank_at(spectrum: SpectrumResult, tau: float) -> int:
    """Number of singular values with σ_n/σ_1 strictly above ``tau``.

    Raises:
        ParameterError: If ``tau`` is not in (0, 1).
        FloorError: If ``tau`` is below what the spectrum can certify.
    """
    if not 0 < tau < 1:
        raise ParameterError(f"tau must lie in (0, 1), got {tau}")
    if tau < spectrum.tol_floor:
        raise FloorError(f"tau={tau:g} is below the spectrum floor {spectrum.tol_floor:g}")
    return int(np.count_nonzero(spectrum.normalized > tau))


def detect_knee(spectrum: SpectrumResult, end_tau: float = 0.1, min_distance: float = 1e-3) -> int:
    """Knee index of the normalized singular-value curve.

    The curve (n, log10 σ_n/σ_1) runs from n = 1 to the rank at ``end_tau``
    (or the last certified value when the floor is higher). The knee is the
    point farthest above the chord joining the ends; ties go to the smaller n.
    With the chord ending one decade down, the farthest point is where the
    plateau ends.

    Raises:
        DegenerateKneeError: If fewer than 10 values are usable or no point
            lies more than ``min_distance`` above the chord.
    """
    if spectrum.tol_floor > end_tau:
        n_end = spectrum.count_above_floor()
    else:
        n_end = rank_at(spectrum, end_tau)
    if n_end < 10:
        raise DegenerateKneeError(f"Knee detection needs at least 10 values, got {n_end}")

    n = np.arange(1, n_end + 1, dtype=float)
    y = np.log10(spectrum.normalized[:n_end])
    dx, dy = n[-1] - n[0], y[-1] - y[0]
    distance = (dx * (y - y[0]) - dy * (n - n[0])) / math.hypot(dx, dy)
    best = int(np.argmax(distance))
    if distance[best] < min_distance:
        raise DegenerateKneeError(
            f"No knee: the curve stays within {distance[best]:.2e} of its chord"
        )
    return best + 1


def remainder_width(spectrum: SpectrumResult, knee_pred: float, tau: float) -> int:
    """Singular values above ``tau`` beyond the predicted knee, clamped at zero."""
    if knee_pred < 0:
        raise ParameterError(f"knee_pred must be non-negative, got {knee_pred}")
    return max(0, rank_at(spectrum, tau) - math.floor(knee_pred + 0.5))


def build_rank_report(
    spectrum: SpectrumResult,
    knee_pred: float,
    tau: float,
    end_tau: float = 0.1,
    min_distance: float = 1e-3,
) -> RankReport:
    """Collect rank, knees and remainder width at one threshold."""
    try:
        knee = detect_knee(spectrum, end_tau, min_distance)
    except DegenerateKneeError as e:
        logger.warning(f"Knee not detected: {e}")
        knee = None
    return RankReport(
        tau=tau,
        rank=rank_at(spectrum, tau),
        knee_pred=knee_pred,
        knee_detected=knee,
        remainder_width=remainder_width(spectrum, knee_pred, tau),
    )


def certified_ranks(spectrum: SpectrumResult) -> Dict[str, Optional[int]]:
    """Ranks at the reported thresholds, None where the floor does not allow it."""
    ranks: Dict[str, Optional[int]] = {}
    for tau in REPORT_TAUS:
        key = f"{tau:g}"
        try:
            ranks[key] = rank_at(spectrum, tau)
        except FloorError:
            ranks[key] = None
    return ranks
