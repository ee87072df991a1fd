from typing import Callable, Optional

import numpy as np


def central_difference(
    func: Callable[[np.ndarray], np.ndarray], x: np.ndarray, step: float
) -> np.ndarray:
    """
    Central differences of ``func`` along every chart axis.

    :param func: callable x -> array of any shape
    :param x: evaluation point
    :param step: difference step, shared by every axis
    :return: array of shape ``(len(x),) + func(x).shape``, derivative along axis ``c``
        at index ``c``
    """
    x = np.asarray(x, dtype=float)
    derivatives = []
    for axis in range(x.shape[0]):
        shift = np.zeros_like(x)
        shift[axis] = step
        forward = np.asarray(func(x + shift), dtype=float)
        backward = np.asarray(func(x - shift), dtype=float)
        derivatives.append((forward - backward) / (2.0 * step))
    if not derivatives:
        return np.zeros((0,) + np.asarray(func(x), dtype=float).shape)
    return np.stack(derivatives)


def gram_matrix(frame: np.ndarray, gram: np.ndarray) -> np.ndarray:
    return frame.T @ gram @ frame


def gram_drift(frame: np.ndarray, gram: np.ndarray) -> float:
    """
    :return: max |<F_A, F_B> - delta_AB| over pairs, measured with ``gram``
    """
    if frame.shape[1] == 0:
        return 0.0
    return float(np.max(np.abs(gram_matrix(frame, gram) - np.eye(frame.shape[1]))))


def inner(gram: np.ndarray, first: np.ndarray, second: np.ndarray) -> float:
    return float(first @ gram @ second)


def modified_gram_schmidt(
    vectors: np.ndarray,
    gram: np.ndarray,
    count: Optional[int] = None,
    dependency_tolerance: Optional[float] = None,
) -> np.ndarray:
    """
    Modified Gram-Schmidt in index order with respect to ``gram``.

    :param vectors: candidate vectors as columns
    :param gram: symmetric positive definite matrix of the inner product
    :param count: stop after this many output vectors (defaults to all columns)
    :param dependency_tolerance: when given, candidates whose residual norm falls under
        ``dependency_tolerance`` times their own norm are skipped instead of normalized
    :return: orthonormal vectors as columns
    """
    count = vectors.shape[1] if count is None else count
    basis = []
    for column in range(vectors.shape[1]):
        if len(basis) == count:
            break
        candidate = np.array(vectors[:, column], dtype=float)
        original_norm = np.sqrt(max(inner(gram, candidate, candidate), 0.0))
        for previous in basis:
            candidate = candidate - inner(gram, candidate, previous) * previous
        norm = np.sqrt(max(inner(gram, candidate, candidate), 0.0))
        if dependency_tolerance is not None and norm <= dependency_tolerance * max(
            original_norm, 1e-300
        ):
            continue
        basis.append(candidate / norm)
    if not basis:
        return np.zeros((vectors.shape[0], 0))
    return np.stack(basis, axis=1)


def antisymmetric_from_upper(upper: np.ndarray, size: int) -> np.ndarray:
    """
    Rebuild antisymmetric matrices from strictly-upper storage (row-major over ``i < j``).
    Leading axes of ``upper`` are kept.
    """
    rows, columns = np.triu_indices(size, k=1)
    matrix = np.zeros(upper.shape[:-1] + (size, size))
    matrix[..., rows, columns] = upper
    matrix[..., columns, rows] = -upper
    return matrix


def upper_from_antisymmetric(matrix: np.ndarray) -> np.ndarray:
    rows, columns = np.triu_indices(matrix.shape[-1], k=1)
    return matrix[..., rows, columns]
