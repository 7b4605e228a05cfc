"""The network Wiener filter.

The observed (demeaned) weight matrix ``A`` is filtered as

    U_hat = C_u (C_u + C_n + eps I)^{-1} A

where ``C_u`` is built from profile similarity networks and ``C_n`` is a
:class:`~netwf.noise.NoiseModel`. Both covariances act on ``v x v`` arrays;
the CG route never forms a ``v^2 x v^2`` matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.linalg

from .linalg import CgReport, LinearOperator, conjugate_gradient, sandwich_apply
from .network import WeightedNetwork, relevant_mask
from .noise import Diagonal, NoiseModel
from .similarity import (
    ProfileSimilarity,
    source_profile_similarity,
    target_profile_similarity,
    undirected_profile_similarity,
)

VARIANTS = ("source_target", "source_source")


def impute_missing(net: WeightedNetwork, variances=None):
    """Fill missing noise variances and weights.

    A missing variance becomes the mean observed variance plus the variance
    of the observed weights, so imputed entries are trusted less than any
    typical measurement. Missing weights then become the mean observed
    weight. Statistics are taken over observed off-diagonal entries.

    Returns
    -------
    net : WeightedNetwork
        Fully observed copy of ``net``.
    variances : ndarray or None
        Filled copy of ``variances`` (None if none were given).
    """
    rel = relevant_mask(net)
    if not rel.any():
        raise ValueError("network has no observed off-diagonal weights")
    w_obs = np.asarray(net.weights)[rel]
    w_mean, w_var = float(w_obs.mean()), float(w_obs.var())

    filled_var = None
    if variances is not None:
        var = np.array(variances, dtype=float)
        if var.shape != net.weights.shape:
            raise ValueError(f"variance matrix shape {var.shape} does not match network")
        known = np.isfinite(var)
        var_rel = known & ~np.eye(net.v, dtype=bool)
        if not var_rel.any():
            raise ValueError("no observed noise variances")
        var[~known] = var[var_rel].mean() + w_var
        filled_var = var

    if net.fully_observed:
        return net, filled_var
    return net.with_weights(net.filled(w_mean)), filled_var


def demean(net: WeightedNetwork):
    """Subtract the mean off-diagonal weight from every entry."""
    if not net.fully_observed:
        raise ValueError("demean needs a fully observed network; impute first")
    mean = float(np.asarray(net.weights)[relevant_mask(net)].mean()) if net.v > 1 else 0.0
    return net.with_weights(np.asarray(net.weights) - mean), mean


@dataclass(frozen=True)
class SignalCovarianceOperator:
    """Edge-similarity signal covariance scaled by the signal variance.

    Directed: ``X -> prefactor * S_left X S_right^T``, so that entry
    ``(A, B), (C, D)`` of the covariance is ``S_left[A, C] * S_right[B, D]``.

    Undirected (``symmetric=True``): both endpoint matchings are averaged,
    which on any ``X`` is ``prefactor * S sym(X) S`` with
    ``sym(X) = (X + X^T) / 2``.
    """

    left: ProfileSimilarity
    right: ProfileSimilarity
    prefactor: float
    symmetric: bool

    def __post_init__(self):
        if self.left.node_ids != self.right.node_ids:
            raise ValueError("PSNs are over different node sets")
        if self.prefactor < 0:
            raise ValueError("prefactor must be non-negative")
        if self.symmetric and self.left is not self.right and not np.array_equal(
            self.left.matrix, self.right.matrix
        ):
            raise ValueError("undirected covariance needs one PSN")

    @property
    def v(self) -> int:
        return self.left.v

    def apply(self, X):
        L, R = self.left.matrix, self.right.matrix
        if self.symmetric:
            X = 0.5 * (X + X.T)
        return self.prefactor * sandwich_apply(L, X, R)

    @cached_property
    def _eigen(self):
        # clipped at zero so the shifted inverse stays positive definite
        wl, Ql = np.linalg.eigh(self.left.matrix)
        if self.right is self.left or self.symmetric:
            wr, Qr = wl, Ql
        else:
            wr, Qr = np.linalg.eigh(self.right.matrix)
        return np.clip(wl, 0, None), Ql, np.clip(wr, 0, None), Qr

    def shifted_inverse(self, shift: float):
        """Return ``X -> (C + shift I)^{-1} X`` computed from the PSN eigenvectors.

        Costs O(v^3) per application. ``shift`` must be positive.
        """
        if not shift > 0:
            raise ValueError("shift must be positive")
        wl, Ql, wr, Qr = self._eigen
        gain = self.prefactor * np.outer(wl, wr) + shift

        def solve(X):
            Y = Ql.T @ X @ Qr
            if self.symmetric:
                # the swap-antisymmetric part lies in the null space of C
                sym = 0.5 * (Y + Y.T)
                Y = sym / gain + (Y - sym) / shift
            else:
                Y = Y / gain
            return Ql @ Y @ Qr.T

        return solve

    def to_dense(self) -> np.ndarray:
        """Explicit ``v^2 x v^2`` covariance (row-major vectorisation)."""
        L, R = self.left.matrix, self.right.matrix
        K = np.kron(L, R)
        if self.symmetric:
            v = self.v
            # column (c, d) of the swapped term picks X[d, c]
            perm = np.arange(v * v).reshape(v, v).T.ravel()
            K = 0.5 * (K + K[:, perm])
        return self.prefactor * K


def signal_variance(net: WeightedNetwork) -> float:
    """Variance of the observed off-diagonal weights (shift invariant)."""
    vals = np.asarray(net.weights)[relevant_mask(net)]
    return float(vals.var()) if vals.size else 0.0


def build_signal_covariance(psns, net: WeightedNetwork, variant: str = "source_target"):
    """Assemble the signal covariance operator for ``net``.

    Parameters
    ----------
    psns : ProfileSimilarity or tuple of two
        One undirected PSN, or ``(source, target)`` PSNs for a directed
        network. With ``variant="source_source"`` only the source PSN is
        used, on both endpoints.
    net : WeightedNetwork
        Supplies the node order and the signal variance prefactor.
    """
    if isinstance(psns, ProfileSimilarity):
        psns = (psns,)
    psns = tuple(psns)
    for p in psns:
        if p.node_ids != net.node_ids:
            raise ValueError("PSN node order does not match the network")
    prefactor = signal_variance(net)
    if not net.directed:
        if len(psns) != 1:
            raise ValueError("undirected network takes a single PSN")
        return SignalCovarianceOperator(psns[0], psns[0], prefactor, symmetric=True)
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if len(psns) == 1:
        if variant != "source_source":
            raise ValueError("directed network needs (source, target) PSNs")
        psns = (psns[0], psns[0])
    src, tgt = psns[:2]
    if variant == "source_source":
        tgt = src
    return SignalCovarianceOperator(src, tgt, prefactor, symmetric=False)


def network_psns(net: WeightedNetwork, exclude_pair: bool = False):
    if net.directed:
        return (
            source_profile_similarity(net, exclude_pair),
            target_profile_similarity(net, exclude_pair),
        )
    return (undirected_profile_similarity(net, exclude_pair),)


@dataclass(frozen=True)
class FilterConfig:
    """Solver settings.

    ``epsilon=None`` picks ``1e-6 * (signal variance + mean noise
    variance)``. An explicit ``epsilon=0`` is allowed but leaves the system
    singular whenever ``C_u + C_n`` is. ``precondition`` only changes how
    fast CG converges, not what it converges to.
    """

    epsilon: Optional[float] = None
    cg_tol: float = 1e-8
    cg_max_iter: Optional[int] = None
    mode: str = "cg"
    demean: bool = True
    directed_variant: str = "source_target"
    exclude_pair: bool = False
    max_direct_k: int = 5000
    precondition: bool = True

    def __post_init__(self):
        if self.epsilon is not None and not self.epsilon >= 0:
            raise ValueError("epsilon must be non-negative")
        if self.mode not in ("cg", "direct"):
            raise ValueError(f"mode must be 'cg' or 'direct', got {self.mode!r}")
        if self.directed_variant not in VARIANTS:
            raise ValueError(f"directed_variant must be one of {VARIANTS}")
        if not self.cg_tol > 0:
            raise ValueError("cg_tol must be positive")
        if self.cg_max_iter is not None and self.cg_max_iter <= 0:
            raise ValueError("cg_max_iter must be positive")


@dataclass(frozen=True)
class DenoiseResult:
    denoised: np.ndarray
    global_mean_restored: float
    prefactor_used: float
    epsilon_used: float
    node_ids: tuple
    directed: bool
    cg_report: Optional[CgReport] = None

    def to_network(self) -> WeightedNetwork:
        return WeightedNetwork(self.node_ids, self.denoised, directed=self.directed)


def _setup(net, noise, cfg, signal):
    if not net.fully_observed:
        raise ValueError("network has missing entries; run impute_missing first")
    v = net.v
    var = noise.variances(v)
    if not net.directed and isinstance(noise, Diagonal) and not np.array_equal(var, var.T):
        raise ValueError("undirected network needs symmetric noise variances")
    if cfg.demean:
        centered, mean = demean(net)
    else:
        centered, mean = net, 0.0
    if signal is None:
        signal = build_signal_covariance(network_psns(net, cfg.exclude_pair), net, cfg.directed_variant)
    elif signal.v != v:
        raise ValueError("signal covariance size does not match the network")
    eps = cfg.epsilon
    if eps is None:
        eps = 1e-6 * (signal.prefactor + noise.mean_variance(v)) or np.finfo(float).eps
    return np.asarray(centered.weights), mean, signal, float(eps)


def _finish(U, mean, signal, eps, net, report):
    if not net.directed:
        U = 0.5 * (U + U.T)
    return DenoiseResult(
        denoised=U + mean,
        global_mean_restored=mean,
        prefactor_used=signal.prefactor,
        epsilon_used=eps,
        node_ids=net.node_ids,
        directed=net.directed,
        cg_report=report,
    )


def system_operator(signal: SignalCovarianceOperator, noise: NoiseModel, eps: float) -> LinearOperator:
    """``x -> (C_u + C_n + eps I) x`` on row-major vectorised matrices."""
    v = signal.v

    def apply(x):
        X = x.reshape(v, v)
        return (signal.apply(X) + noise.apply(X) + eps * X).ravel()

    return LinearOperator(v * v, apply)


def netwf_direct(net: WeightedNetwork, noise: NoiseModel, cfg: FilterConfig = FilterConfig(), signal=None):
    """Dense two-step solve: factor ``C_u + C_n + eps I``, then apply ``C_u``."""
    k = net.v**2
    if k > cfg.max_direct_k:
        raise ValueError(
            f"k = v^2 = {k} exceeds the direct-solve cap {cfg.max_direct_k}; use mode='cg'"
        )
    A, mean, signal, eps = _setup(net, noise, cfg, signal)
    Cu = signal.to_dense()
    M = Cu + noise.to_dense(net.v)
    M[np.diag_indices_from(M)] += eps
    x = scipy.linalg.solve(M, A.ravel(), assume_a="sym")
    U = (Cu @ x).reshape(net.v, net.v)
    return _finish(U, mean, signal, eps, net, None)


def _preconditioner(signal, noise, eps):
    """Exact inverse of the signal covariance plus the isotropic part of the noise.

    Exact for homogeneous noise; for low-rank ensemble noise the
    preconditioned system has at most ``rank + 1`` distinct eigenvalues.
    """
    shift = noise.isotropic_part(signal.v) + eps
    if not shift > 0:
        return None
    v = signal.v
    solve = signal.shifted_inverse(shift)
    return LinearOperator(v * v, lambda r: solve(r.reshape(v, v)).ravel())


def netwf_cg(net: WeightedNetwork, noise: NoiseModel, cfg: FilterConfig = FilterConfig(), signal=None):
    """Matrix-free solve with conjugate gradients; O(v^2) working memory."""
    A, mean, signal, eps = _setup(net, noise, cfg, signal)
    op = system_operator(signal, noise, eps)
    precond = _preconditioner(signal, noise, eps) if cfg.precondition else None
    x, report = conjugate_gradient(op, A.ravel(), tol=cfg.cg_tol, max_iter=cfg.cg_max_iter,
                                   preconditioner=precond)
    U = signal.apply(x.reshape(net.v, net.v))
    return _finish(U, mean, signal, eps, net, report)


def netwf(net: WeightedNetwork, noise: NoiseModel, cfg: FilterConfig = FilterConfig(), signal=None):
    """Denoise ``net`` with the solver selected by ``cfg.mode``."""
    if cfg.mode == "direct":
        return netwf_direct(net, noise, cfg, signal)
    return netwf_cg(net, noise, cfg, signal)


def postprocess(result: DenoiseResult, remove_self_links=False, truncate_negative=False):
    U = np.array(result.denoised, dtype=float)
    if remove_self_links:
        np.fill_diagonal(U, 0.0)
    if truncate_negative:
        U[U < 0] = 0.0
    return replace(result, denoised=U)
