"""Epsilon-insensitive support vector regression via an SMO-style dual solver.

The dual is optimized over beta_i = alpha_i - alpha_i* in the box [-C, C]
with sum(beta) = 0. Each iteration picks the pair with the largest
KKT violation (maximal-gap working-set selection) and solves the 1-D
piecewise-quadratic subproblem along the constraint line exactly, including
the kinks introduced by the insensitive-loss term.
"""

from __future__ import annotations

import numpy as np

from ..errors import ArgumentError, ConvergenceError
from .base import FittedModel, ModelSpec, register

SVR_DEFAULTS = {
    "kernel": "rbf",        # linear / polynomial / rbf / sigmoid
    "C": 1.0,
    "epsilon": 0.1,
    "sigma": None,          # rbf width; default 1 / n_features
    "degree": 3,
    "coef": 1.0,            # polynomial additive constant
    "scale": None,          # sigmoid slope; default 1 / n_features
    "offset": 0.0,          # sigmoid shift
    "tol": 1e-3,
    "max_iter": 100_000,
}

_KERNELS = ("linear", "polynomial", "rbf", "sigmoid")


def kernel_matrix(kind: str, params: dict, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Gram matrix K[i, j] = K(A_i, B_j)."""
    if kind == "linear":
        return A @ B.T
    if kind == "polynomial":
        return (A @ B.T + params["coef"]) ** params["degree"]
    if kind == "rbf":
        d2 = (
            np.sum(A**2, axis=1)[:, None]
            - 2.0 * A @ B.T
            + np.sum(B**2, axis=1)[None, :]
        )
        np.maximum(d2, 0.0, out=d2)
        return np.exp(-params["sigma"] * d2)
    if kind == "sigmoid":
        return np.tanh(params["scale"] * (A @ B.T) + params["offset"])
    raise ArgumentError(f"unknown kernel {kind!r}")


def _pair_gain(delta, f_i, f_j, eta, eps, beta_i, beta_j):
    """Exact dual objective change for beta_i += delta, beta_j -= delta."""
    return (
        delta * (f_i - f_j)
        - 0.5 * eta * delta * delta
        - eps * (abs(beta_i + delta) - abs(beta_i))
        - eps * (abs(beta_j - delta) - abs(beta_j))
    )


def _best_step(f_i, f_j, eta, eps, beta_i, beta_j, lo, hi):
    """Maximize the piecewise-quadratic gain over delta in [lo, hi]."""
    candidates = [lo, hi]
    for kink in (-beta_i, beta_j):
        if lo < kink < hi:
            candidates.append(kink)
    if eta > 0:
        for s_i in (-1.0, 1.0):
            for s_j in (-1.0, 1.0):
                delta = (f_i - f_j - eps * (s_i - s_j)) / eta
                if lo <= delta <= hi:
                    candidates.append(delta)
    best_delta, best_gain = 0.0, 0.0
    for delta in candidates:
        gain = _pair_gain(delta, f_i, f_j, eta, eps, beta_i, beta_j)
        if gain > best_gain + 1e-15:
            best_gain, best_delta = gain, delta
    return best_delta, best_gain


def _kkt_bounds(beta, grad_box_lo, grad_box_hi):
    """Per-sample feasible interval for the bias implied by KKT; see below."""
    return grad_box_lo, grad_box_hi


class SvrModel(FittedModel):
    algorithm = "SVR"

    def __init__(self, spec: ModelSpec, support_vectors: np.ndarray,
                 dual_coef: np.ndarray, bias: float, kernel: str, kernel_params: dict,
                 n_features: int, metadata: dict | None = None):
        super().__init__(spec, n_features, metadata)
        self.support_vectors = np.asarray(support_vectors, dtype=float)
        self.dual_coef = np.asarray(dual_coef, dtype=float)
        self.bias = float(bias)
        self.kernel = kernel
        self.kernel_params = dict(kernel_params)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        K = kernel_matrix(self.kernel, self.kernel_params, X, self.support_vectors)
        return K @ self.dual_coef + self.bias

    def payload(self) -> dict:
        return {
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "bias": self.bias,
            "kernel": self.kernel,
            "kernel_params": self.kernel_params,
            "metadata": self.metadata,
        }

    @classmethod
    def from_payload(cls, spec: ModelSpec, n_features: int, payload: dict):
        return cls(
            spec,
            np.asarray(payload["support_vectors"]),
            np.asarray(payload["dual_coef"]),
            payload["bias"],
            payload["kernel"],
            payload["kernel_params"],
            n_features,
            payload.get("metadata"),
        )


@register("SVR", SVR_DEFAULTS, SvrModel)
def fit_svr(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> SvrModel:
    hp = spec.resolved()
    kind = hp["kernel"]
    if kind not in _KERNELS:
        raise ArgumentError(f"unknown kernel {kind!r}")
    C = float(hp["C"])
    eps = float(hp["epsilon"])
    if C <= 0:
        raise ArgumentError("C must be positive")
    if eps < 0:
        raise ArgumentError("epsilon must be non-negative")
    n, p = X.shape
    params = {
        "sigma": float(hp["sigma"]) if hp["sigma"] is not None else 1.0 / p,
        "degree": int(hp["degree"]),
        "coef": float(hp["coef"]),
        "scale": float(hp["scale"]) if hp["scale"] is not None else 1.0 / p,
        "offset": float(hp["offset"]),
    }
    if kind == "rbf" and params["sigma"] <= 0:
        raise ArgumentError("rbf sigma must be positive")
    if kind == "polynomial" and params["degree"] < 1:
        raise ArgumentError("polynomial degree must be >= 1")

    K = kernel_matrix(kind, params, X, X)
    diag = np.diag(K).copy()
    beta = np.zeros(n)
    Kbeta = np.zeros(n)
    tol = float(hp["tol"])
    max_iter = int(hp["max_iter"])

    violation = np.inf
    for _ in range(max_iter):
        # gradient of the dual (sans the |beta| term) w.r.t. beta_i is
        # y_i - (K beta)_i; the insensitive term contributes -eps * sign
        # on the interior and a subgradient interval at beta_i = 0.
        g = y - Kbeta
        up = np.where(beta > 0, g - eps, g + eps)      # derivative pushing beta up
        down = up.copy()
        at_zero = beta == 0
        up[at_zero] = g[at_zero] - eps
        down[at_zero] = g[at_zero] + eps
        # b must satisfy up_i <= b (for beta_i < C) and down_i >= b (beta_i > -C)
        can_up = beta < C
        can_down = beta > -C
        up_vals = np.where(can_up, up, -np.inf)
        down_vals = np.where(can_down, down, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(down_vals))
        violation = float(up_vals[i] - down_vals[j])
        if violation < tol:
            break
        eta = diag[i] + diag[j] - 2.0 * K[i, j]
        if eta <= 1e-12:
            eta = 1e-12
        lo = max(-C - beta[i], beta[j] - C)
        hi = min(C - beta[i], beta[j] + C)
        delta, gain = _best_step(g[i], g[j], eta, eps, beta[i], beta[j], lo, hi)
        if gain <= 0.0 or delta == 0.0:
            # numerical dead end on this pair; treat as converged at this gap
            break
        beta[i] += delta
        beta[j] -= delta
        Kbeta += delta * (K[:, i] - K[:, j])
    else:
        raise ConvergenceError(
            f"SVR SMO did not converge in {max_iter} iterations "
            f"(KKT violation {violation:.3e}, tol {tol})",
            residual=violation,
        )

    # bias from the KKT interval midpoint
    g = y - Kbeta
    up = np.where(beta > 0, g - eps, g + eps)
    down = up.copy()
    at_zero = beta == 0
    up[at_zero] = g[at_zero] - eps
    down[at_zero] = g[at_zero] + eps
    b_lo = np.max(np.where(beta < C, up, -np.inf))
    b_hi = np.min(np.where(beta > -C, down, np.inf))
    bias = 0.5 * (b_lo + b_hi)

    support = np.flatnonzero(beta != 0.0)
    if support.size == 0:
        support = np.array([0])
    metadata = {
        "n_support": int(np.count_nonzero(beta)),
        "kkt_violation": float(max(b_lo - b_hi, 0.0)),
        "epsilon": eps,
        "C": C,
    }
    return SvrModel(
        spec,
        X[support],
        beta[support],
        bias,
        kind,
        params,
        p,
        metadata,
    )
