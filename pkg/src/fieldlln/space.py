"""Finite-dimensional stand-in for the Banach space: R^m with a vector norm."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class VecNorm:
    """Euclidean norm (``s is None``) or the l^s norm on R^m."""

    s: float | None = None

    def __post_init__(self):
        if self.s is not None and self.s < 1:
            raise ValueError(f"l^s needs s >= 1, got {self.s}")

    @property
    def kind(self):
        return "euclidean" if self.s is None else "ell_s"

    @property
    def smoothness(self):
        """Smoothness exponent r: 2 for euclidean, min(s, 2) for l^s."""
        return 2.0 if self.s is None else min(float(self.s), 2.0)

    def __call__(self, values):
        """Norm over the last axis."""
        values = np.asarray(values, dtype=float)
        if values.shape[-1] == 1:
            return np.abs(values[..., 0])
        if self.s is None or self.s == 2:
            return np.sqrt(np.sum(values * values, axis=-1))
        if np.isinf(self.s):
            return np.max(np.abs(values), axis=-1)
        return np.sum(np.abs(values) ** self.s, axis=-1) ** (1.0 / self.s)

    def to_json(self):
        return {"kind": "euclidean"} if self.s is None else {"kind": "ell_s", "s": self.s}

    @classmethod
    def from_json(cls, obj):
        if obj["kind"] == "euclidean":
            return cls()
        if obj["kind"] == "ell_s":
            return cls(float(obj["s"]))
        raise ValueError(f"unknown norm kind {obj['kind']!r}")


EUCLIDEAN = VecNorm()


def operator_norm(A, norm=EUCLIDEAN, rtol=1e-8, max_iter=10_000):
    """Induced operator norm of the matrix ``A`` by power iteration.

    Euclidean: power iteration on A^T A.  l^1 and l^inf use the closed
    column/row-sum forms.  Other l^s use Higham's nonlinear power method,
    which converges to a local maximizer (exact for diagonal matrices).
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.any(A):
        return 0.0
    s = norm.s
    if s == 1:
        return float(np.max(np.sum(np.abs(A), axis=0)))
    if s is not None and np.isinf(s):
        return float(np.max(np.sum(np.abs(A), axis=1)))
    if s is None or s == 2:
        M = A.T @ A
        x = np.ones(M.shape[0]) / np.sqrt(M.shape[0]) + 1e-3 * np.arange(M.shape[0])
        lam = 0.0
        for _ in range(max_iter):
            y = M @ x
            lam_new = float(np.linalg.norm(y))
            if lam_new == 0.0:
                return 0.0
            x = y / lam_new
            if abs(lam_new - lam) <= rtol * lam_new:
                break
            lam = lam_new
        return float(np.sqrt(lam_new))

    q = s / (s - 1.0)

    def dual(v, r):
        # vector attaining the dual pairing <dual(v), v> = ||v||_r
        a = np.abs(v)
        nrm = np.sum(a**r) ** (1.0 / r)
        if nrm == 0:
            return np.zeros_like(v)
        return np.sign(v) * (a / nrm) ** (r - 1)

    x = np.ones(A.shape[1]) / A.shape[1] ** (1.0 / s)
    est = 0.0
    for _ in range(max_iter):
        y = A @ x
        new = float(np.sum(np.abs(y) ** s) ** (1.0 / s))
        z = A.T @ dual(y, s)
        if abs(new - est) <= rtol * new:
            est = new
            break
        est = new
        x = dual(z, q)
    return est
