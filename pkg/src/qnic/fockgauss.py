"""Gaussian states in the truncated Fock basis.

Covariance conventions: quadrature vector (x1, p1, x2, p2, ...) with vacuum
covariance = identity (variance 1 per quadrature) and a coherent state
``|beta>`` displaced to mean (2*Re(beta), 2*Im(beta)).  A thermal state of
quadrature variance W holds nbar = (W-1)/2 photons.

Two independent routes to the mixture entropies needed by the attack models
are provided and cross-checked in the test suite:

* ``displaced_thermal`` + a Williamson decomposition build each conditional
  Gaussian state as an explicit Fock matrix (primary, feeds the public
  density-matrix interfaces);
* ``classical_register_complement`` evaluates S(sum_k w_k rho_E^k) without
  ever forming Eve's two-mode states, through the purity of the global
  state: the complement of Eve's side is a classical register tensored with
  the channel output, whose blocks are thermal-attenuator images of coherent
  dyadics.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.linalg import sqrtm

from .errors import DomainError
from .qcore import coherent_fock_vector, coherent_overlap, _entropy_of_spectrum

__all__ = [
    "displacement_matrix",
    "displaced_thermal",
    "thermal_photon_entropy",
    "symplectic_eigenvalues_xp",
    "williamson_xp",
    "gaussian_entropy",
    "thermal_attenuator_dyadic",
    "classical_register_complement",
    "mixture_entropy_via_complement",
]


def displacement_matrix(beta: complex, n_max: int) -> np.ndarray:
    """Fock-basis matrix of D(beta) = exp(beta a^dag - conj(beta) a).

    Built column-by-column from the displaced-vacuum recursion
    a D|n> = (beta D + D a)|n>, which is numerically stable for the small
    displacements used here; unitary up to truncation.
    """
    dim = n_max + 1
    D = np.zeros((dim, dim), dtype=complex)
    D[:, 0] = coherent_fock_vector(beta, n_max)
    sq = np.sqrt(np.arange(1, dim))
    for n in range(1, dim):
        # D|n> = (a^dag - conj(beta)) D|n-1> / sqrt(n)
        prev = D[:, n - 1]
        col = np.zeros(dim, dtype=complex)
        col[1:] = sq * prev[:-1]
        col -= np.conj(beta) * prev
        D[:, n] = col / math.sqrt(n)
    return D


def thermal_diagonal(nbar: float, n_max: int) -> np.ndarray:
    """Photon-number probabilities of a thermal state, truncated."""
    if nbar <= 1e-14:
        p = np.zeros(n_max + 1)
        p[0] = 1.0
        return p
    r = nbar / (1.0 + nbar)
    return r ** np.arange(n_max + 1) / (1.0 + nbar)


def displaced_thermal(beta: complex, nbar: float, n_max: int) -> np.ndarray:
    """Fock matrix of D(beta) thermal(nbar) D(beta)^dag."""
    if nbar <= 1e-14:
        v = coherent_fock_vector(beta, n_max)
        return np.outer(v, v.conj())
    D = displacement_matrix(beta, n_max)
    return (D * thermal_diagonal(nbar, n_max)) @ D.conj().T


def thermal_photon_entropy(nbar: float) -> float:
    """g(nbar) = (nbar+1)log2(nbar+1) - nbar log2 nbar, bits."""
    if nbar <= 1e-14:
        return 0.0
    return float((nbar + 1) * np.log2(nbar + 1) - nbar * np.log2(nbar))


def symplectic_eigenvalues_xp(Mx: np.ndarray, Mp: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance block-diagonal in (x, p)."""
    lam = np.linalg.eigvals(Mx @ Mp)
    if np.max(np.abs(lam.imag)) > 1e-9 or np.min(lam.real) < 1 - 1e-7:
        raise DomainError(f"unphysical covariance: eig(Mx Mp) = {lam}")
    return np.sqrt(np.clip(lam.real, 1.0, None))


def gaussian_entropy(Mx: np.ndarray, Mp: np.ndarray) -> float:
    """Von Neumann entropy (bits) of a Gaussian state from its covariance."""
    nus = symplectic_eigenvalues_xp(Mx, Mp)
    return float(sum(thermal_photon_entropy((v - 1.0) / 2.0) for v in nus))


def williamson_xp(Mx: np.ndarray, Mp: np.ndarray):
    """Williamson decomposition of a covariance block-diagonal in (x, p).

    Returns (Sx, Sp, nu) with Mx = Sx diag(nu) Sx^T, Mp = Sp diag(nu) Sp^T
    and Sx Sp^T = I (so S = diag(Sx, Sp) is symplectic).
    """
    Mph = np.real(sqrtm(Mp))
    core = np.real(sqrtm(Mph @ Mx @ Mph))
    Q = np.linalg.solve(Mph, core) @ np.linalg.inv(Mph)  # geometric mean of Mx, Mp^-1
    Qh = np.real(sqrtm(Q))
    A = np.linalg.solve(Qh, Mx) @ np.linalg.inv(Qh)
    nu, O = np.linalg.eigh((A + A.T) / 2.0)
    Sx = Qh @ O
    Sp = np.linalg.solve(Qh, O)
    if (np.max(np.abs(Sx @ np.diag(nu) @ Sx.T - Mx)) > 1e-9
            or np.max(np.abs(Sp @ np.diag(nu) @ Sp.T - Mp)) > 1e-9):
        raise DomainError("Williamson decomposition failed")
    return Sx, Sp, nu


# --------------------------------------------------------------------------
# thermal attenuator on coherent dyadics and the complement route
# --------------------------------------------------------------------------

def thermal_attenuator_dyadic(alpha: complex, beta: complex, T: float,
                              nbar: float, n_max: int, n_gh: int = 28) -> np.ndarray:
    """Fock image of |alpha><beta| under the thermal-loss channel.

    Tr_env[ U_BS(T) (|alpha><beta| (x) thermal(nbar)) U_BS(T)^dag ], the
    beamsplitter environment prepared in a thermal state.  For nbar = 0 the
    pure-loss closed form is used; otherwise the environment's P-function is
    integrated with a 2-D Gauss-Hermite rule (the integrand is an entire
    function times the sampled Gaussian, so convergence is exponential).
    """
    rt, rr = math.sqrt(T), math.sqrt(1.0 - T)
    if nbar <= 1e-14:
        out = np.outer(coherent_fock_vector(rt * alpha, n_max),
                       coherent_fock_vector(rt * beta, n_max).conj())
        return coherent_overlap(rr * beta, rr * alpha) * out
    t, w = hermgauss(n_gh)
    U, V = np.meshgrid(t, t, indexing="ij")
    gam = math.sqrt(nbar) * (U + 1j * V).ravel()
    ww = np.outer(w, w).ravel() / math.pi

    n = np.arange(n_max + 1)
    log_fact = np.cumsum(np.concatenate([[0.0], np.log(np.arange(1, n_max + 1))]))

    def vec_batch(mu):
        # coherent Fock vectors for a batch of amplitudes, (G, n_max+1)
        mu = np.asarray(mu)
        mag = np.abs(mu)
        safe = np.where(mag > 0, mag, 1.0)
        logm = n[None, :] * np.log(safe)[:, None]
        logm = np.where(mag[:, None] > 0, logm, np.where(n[None, :] == 0, 0.0, -np.inf))
        phase = np.exp(1j * n[None, :] * np.angle(mu)[:, None])
        return np.exp(logm - 0.5 * log_fact[None, :]
                      - 0.5 * (mag * mag)[:, None]) * phase

    mu = rt * alpha + rr * gam
    nu = rt * beta + rr * gam
    x_e = -rr * beta + rt * gam
    y_e = -rr * alpha + rt * gam
    ov = np.exp(-0.5 * (np.abs(x_e) ** 2 + np.abs(y_e) ** 2) + np.conj(x_e) * y_e)
    Vm = vec_batch(mu)
    Vn = vec_batch(nu)
    return np.einsum("g,gm,gn->mn", ww * ov, Vm, np.conj(Vn), optimize=True)


def classical_register_complement(amplitudes, weights, T: float, nbar: float,
                                  n_max: int, n_gh: int = 28,
                                  blocks=None) -> np.ndarray:
    """Register-tensor-output state whose entropy equals S(sum w_k rho_E^k).

    The global state |Phi> = sum_k sqrt(w_k) |k> U_BS |alpha_k>|TMSV> is
    pure, so Eve's side (the beamsplitter reflection plus the retained TMSV
    arm) has the same entropy as its complement, the register K plus the
    channel output B.  The returned matrix is rho_KB with blocks
    sqrt(w_k w_k') Lambda(|alpha_k><alpha_k'|).

    ``blocks`` may carry the precomputed dyadic images keyed by (k, k') so
    that sweeps over weight vectors reuse them.
    """
    amps = np.asarray(amplitudes, dtype=complex)
    w = np.asarray(weights, dtype=float)
    nk = len(amps)
    dim = n_max + 1
    rho = np.zeros((nk * dim, nk * dim), dtype=complex)
    for k in range(nk):
        for kp in range(k, nk):
            if blocks is not None:
                blk = blocks[(k, kp)]
            else:
                blk = thermal_attenuator_dyadic(amps[k], amps[kp], T, nbar,
                                                n_max, n_gh)
            fac = math.sqrt(w[k] * w[kp])
            rho[k * dim:(k + 1) * dim, kp * dim:(kp + 1) * dim] = fac * blk
            if kp != k:
                rho[kp * dim:(kp + 1) * dim, k * dim:(k + 1) * dim] = fac * blk.conj().T
    return rho


def dyadic_block_table(amplitudes, T: float, nbar: float, n_max: int,
                       n_gh: int = 28) -> dict:
    """Precompute Lambda(|alpha_k><alpha_k'|) for all k <= k'."""
    amps = np.asarray(amplitudes, dtype=complex)
    table = {}
    for k in range(len(amps)):
        for kp in range(k, len(amps)):
            table[(k, kp)] = thermal_attenuator_dyadic(amps[k], amps[kp], T,
                                                       nbar, n_max, n_gh)
    return table


def mixture_entropy_via_complement(amplitudes, weights, T: float, nbar: float,
                                   n_max: int, n_gh: int = 28,
                                   blocks=None) -> float:
    """S(sum_k w_k rho_E^k) in bits for the thermal-loss complement states."""
    rho = classical_register_complement(amplitudes, weights, T, nbar, n_max,
                                        n_gh, blocks)
    lam = np.linalg.eigvalsh(rho)
    return _entropy_of_spectrum(np.clip(lam, 0.0, None))
