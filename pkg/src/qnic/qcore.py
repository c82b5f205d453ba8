"""Phase-space and Fock-space numerics for QPSK coherent-state links.

Everything downstream (channel models, protocol state machines, security
bounds) consumes the conventions fixed here, so they are spelled out once:

* Amplitudes are in sqrt(snu): a coherent state ``|alpha>`` carries
  ``|alpha|**2`` photons, and ``<a|b> = exp(-(|a|^2+|b|^2)/2 + conj(a)*b)``.
* A heterodyne measurement of a symbol ``alpha`` received through a channel
  of transmittance ``T`` with excess noise ``xi`` (fraction of shot noise)
  and a trusted detector ``(eta, v_el)`` yields a complex outcome

      x ~ CN( sqrt(eta*T)*alpha ,  sigma^2 ),
      sigma^2 = 1 + T*xi/2 + v_el         (total complex variance),

  i.e. unit shot-noise variance for a vacuum input (1/2 per quadrature).
  Excess noise is input-referred and symmetric in the quadratures.  The
  scaling of the mean is calibrated so that rates computed from these laws
  reproduce the reference experiment's key-rate table; it is the unique
  choice consistent with the eavesdropper holding ``sqrt(1-T)*alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, gammaincc

from .errors import DomainError, TruncationError

__all__ = [
    "NoiseModel",
    "DetectorParams",
    "CoherentSymbol",
    "QpskAlphabet",
    "StateEnsemble",
    "FockDensityMatrix",
    "coherent_overlap",
    "gram_matrix",
    "gram_spectrum_entropy",
    "ensemble_to_fock",
    "von_neumann_entropy",
    "binary_entropy",
    "inv_binary_entropy",
    "shannon_entropy",
    "outcome_mean",
    "outcome_variance",
    "heterodyne_pdf",
    "default_nmax",
    "require_finite",
]

LOG2 = math.log(2.0)

# Eigenvalues of a density matrix above this may not be negative; smaller
# negatives are clamped to zero before entropies are taken.
EIGENVALUE_FLOOR = -1e-9


def require_finite(*values):
    """Reject NaN/Inf before they enter any numerical pipeline."""
    for v in values:
        arr = np.asarray(v)
        if not np.all(np.isfinite(arr.view(float) if np.iscomplexobj(arr) else arr)):
            raise DomainError(f"non-finite value encountered: {v!r}")


@dataclass(frozen=True)
class NoiseModel:
    """Untrusted channel parameters: transmittance and excess noise.

    ``xi`` is a fraction of shot noise (0.027 means 2.7 %), estimated per
    quadrature with the worst case taken.
    """

    T: float
    xi: float = 0.0

    def __post_init__(self):
        require_finite(self.T, self.xi)
        if not 0.0 <= self.T <= 1.0:
            raise DomainError(f"transmittance T={self.T} outside [0, 1]")
        if self.xi < 0.0:
            raise DomainError(f"excess noise xi={self.xi} negative")

    @classmethod
    def from_loss_db(cls, loss_db: float, xi: float = 0.0) -> "NoiseModel":
        return cls(T=10.0 ** (-loss_db / 10.0), xi=xi)

    @property
    def loss_db(self) -> float:
        return -10.0 * math.log10(self.T) if self.T > 0 else math.inf


@dataclass(frozen=True)
class DetectorParams:
    """Trusted receiver parameters: efficiency and electronic noise (snu).

    These sit after any eavesdropper interaction point: they shape honest
    statistics but never enter an adversary's conditional states.
    """

    eta: float = 1.0
    v_el: float = 0.0

    def __post_init__(self):
        require_finite(self.eta, self.v_el)
        if not 0.0 < self.eta <= 1.0:
            raise DomainError(f"detector efficiency eta={self.eta} outside (0, 1]")
        if self.v_el < 0.0:
            raise DomainError(f"electronic noise v_el={self.v_el} negative")


IDEAL_DETECTOR = DetectorParams(1.0, 0.0)


@dataclass(frozen=True)
class CoherentSymbol:
    """One constellation point: complex amplitude plus its alphabet index."""

    amplitude: complex
    index: int

    def __post_init__(self):
        require_finite(self.amplitude)
        if self.index not in (0, 1, 2, 3):
            raise DomainError(f"QPSK index {self.index} outside 0..3")


@dataclass(frozen=True)
class QpskAlphabet:
    """The four-state constellation {a*i^k * e^(i*phase0)}, k = 0..3.

    ``amplitudes``/``weights`` admit per-symbol overrides to model slightly
    unequal sending amplitudes and probabilities; defaults are the symmetric
    equal-weight alphabet.
    """

    a: float
    phase0: float = 0.0
    amplitudes: tuple = None
    weights: tuple = field(default=(0.25, 0.25, 0.25, 0.25))

    def __post_init__(self):
        require_finite(self.a, self.phase0)
        if self.a <= 0:
            raise DomainError(f"base amplitude a={self.a} must be positive")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (4,) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise DomainError("weights must be 4 nonnegative numbers summing to 1")
        if self.amplitudes is not None:
            amps = np.asarray(self.amplitudes, dtype=float)
            if amps.shape != (4,) or np.any(amps <= 0):
                raise DomainError("per-symbol amplitudes must be 4 positive numbers")
            object.__setattr__(self, "amplitudes", tuple(float(x) for x in amps))

    def amplitude(self, index: int) -> complex:
        base = self.a if self.amplitudes is None else self.amplitudes[index]
        return base * (1j ** index) * np.exp(1j * self.phase0)

    def all_amplitudes(self) -> np.ndarray:
        return np.array([self.amplitude(k) for k in range(4)])

    def symbol(self, index: int) -> CoherentSymbol:
        return CoherentSymbol(self.amplitude(index), index)

    def prior(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)


class StateEnsemble:
    """A finite mixture of coherent states: pairs (amplitude, weight)."""

    def __init__(self, amplitudes, weights):
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        w = np.asarray(weights, dtype=float).ravel()
        require_finite(amps, w)
        if amps.shape != w.shape:
            raise DomainError("amplitudes and weights must have equal length")
        if np.any(w < 0):
            raise DomainError("ensemble weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise DomainError(f"ensemble weights sum to {w.sum()!r}, not 1")
        self.amplitudes = amps
        self.weights = w

    def __len__(self):
        return len(self.amplitudes)

    @classmethod
    def qpsk(cls, alphabet: QpskAlphabet) -> "StateEnsemble":
        return cls(alphabet.all_amplitudes(), alphabet.prior())


class FockDensityMatrix:
    """Hermitian, unit-trace matrix in the truncated number basis.

    ``dim = n_max + 1`` for a single mode; multimode states are stored
    flattened over the tensor-product basis.  ``truncation_deficit`` records
    the probability mass lost to the cutoff at construction time.
    """

    def __init__(self, matrix, truncation_deficit: float = 0.0, validate: bool = True):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("density matrix must be square")
        if validate:
            herm = np.max(np.abs(m - m.conj().T))
            if herm > 1e-10:
                raise DomainError(f"matrix not Hermitian (deviation {herm:.2e})")
            tr = np.trace(m).real
            if abs(tr - 1.0) > 1e-8:
                raise DomainError(f"trace {tr!r} differs from 1 beyond 1e-8")
        self.matrix = m
        self.truncation_deficit = float(truncation_deficit)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Real spectrum with small negatives clamped to zero."""
        lam = np.linalg.eigvalsh(self.matrix)
        worst = lam.min()
        if worst < EIGENVALUE_FLOOR:
            raise DomainError(
                f"eigenvalue {worst:.3e} below clamping floor; numerics are broken")
        return np.clip(lam, 0.0, None)


# --------------------------------------------------------------------------
# coherent-state algebra
# --------------------------------------------------------------------------

def coherent_overlap(a: complex, b: complex) -> complex:
    """<a|b> = exp(-(|a|^2+|b|^2)/2 + conj(a)*b); |result| <= 1."""
    require_finite(a, b)
    return np.exp(-0.5 * (abs(a) ** 2 + abs(b) ** 2) + np.conj(a) * b)


def gram_matrix(amplitudes) -> np.ndarray:
    """Pairwise overlaps of coherent states.

    ``amplitudes`` may be (n,) for one mode or (n, m) for m-mode product
    states, in which case overlaps multiply across modes.
    """
    a = np.asarray(amplitudes, dtype=complex)
    if a.ndim == 1:
        a = a[:, None]
    G = np.ones((a.shape[0], a.shape[0]), dtype=complex)
    for m in range(a.shape[1]):
        col = a[:, m]
        G *= np.exp(
            -0.5 * (np.abs(col)[:, None] ** 2 + np.abs(col)[None, :] ** 2)
            + np.conj(col)[:, None] * col[None, :])
    return G


def _entropy_of_spectrum(lam: np.ndarray) -> float:
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam))) if lam.size else 0.0


def gram_spectrum_entropy(ensemble: StateEnsemble) -> float:
    """Von Neumann entropy of a coherent-state mixture, in bits.

    Works in the (at most n-dimensional) span of the ensemble: the spectrum
    of rho = sum_k w_k |a_k><a_k| equals the spectrum of the weighted Gram
    matrix sqrt(w_j w_k) <a_j|a_k>.  Exact up to linear algebra, so it serves
    as the truncation-free oracle against the Fock-basis path.
    """
    if len(ensemble) > 64:
        raise DomainError("gram_spectrum_entropy supports at most 64 components")
    return gram_entropy_from_parts(gram_matrix(ensemble.amplitudes), ensemble.weights)


def gram_entropy_from_parts(G: np.ndarray, weights) -> float:
    """Entropy of sqrt(w) G sqrt(w); array-level fast path used internally."""
    w = np.asarray(weights, dtype=float)
    sq = np.sqrt(w)
    M = sq[:, None] * G * sq[None, :]
    lam = np.linalg.eigvalsh(M)
    if lam.min() < EIGENVALUE_FLOOR:
        raise DomainError(f"Gram spectrum eigenvalue {lam.min():.3e} below floor")
    return _entropy_of_spectrum(np.clip(lam, 0.0, None))


def coherent_fock_vector(alpha: complex, n_max: int) -> np.ndarray:
    """Number-basis coefficients exp(-|a|^2/2) a^n / sqrt(n!)."""
    n = np.arange(n_max + 1)
    mag = np.abs(alpha)
    if mag == 0.0:
        vec = np.zeros(n_max + 1, dtype=complex)
        vec[0] = 1.0
        return vec
    log_mag = n * np.log(mag) - 0.5 * gammaln(n + 1) - 0.5 * mag * mag
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def poisson_tail(mean_photons: float, n_max: int) -> float:
    """P(N > n_max) for a Poisson photon-number distribution."""
    if mean_photons == 0.0:
        return 0.0
    # CDF(n) = gammaincc(n+1, mu)
    return float(1.0 - gammaincc(n_max + 1, mean_photons))


def default_nmax(amplitudes, tol: float = 1e-8, n_start: int = 40) -> int:
    """Smallest cutoff >= n_start with Poisson tail below tol for every component."""
    amps = np.atleast_1d(np.asarray(amplitudes, dtype=complex))
    n = n_start
    while any(poisson_tail(abs(a) ** 2, n) > tol for a in amps):
        n += 8
        if n > 4096:
            raise TruncationError("no feasible Fock cutoff below 4096")
    return n


def ensemble_to_fock(ensemble: StateEnsemble, n_max: int) -> FockDensityMatrix:
    """Mixture in the truncated number basis, renormalized to unit trace.

    Raises TruncationError if any component leaves more than 1e-6 of its
    norm above the cutoff.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    worst = max(poisson_tail(abs(a) ** 2, n_max) for a in ensemble.amplitudes)
    if worst > 1e-6:
        raise TruncationError(
            f"component tail mass {worst:.3e} exceeds 1e-6 at n_max={n_max}")
    rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for a, w in zip(ensemble.amplitudes, ensemble.weights):
        if w == 0.0:
            continue
        v = coherent_fock_vector(a, n_max)
        rho += w * np.outer(v, v.conj())
    tr = np.trace(rho).real
    rho /= tr
    return FockDensityMatrix(rho, truncation_deficit=1.0 - tr)


def von_neumann_entropy(rho) -> float:
    """S(rho) = -sum lambda log2 lambda over the clamped spectrum, in bits."""
    if not isinstance(rho, FockDensityMatrix):
        rho = FockDensityMatrix(rho)
    return _entropy_of_spectrum(rho.eigenvalues())


# --------------------------------------------------------------------------
# scalar entropies
# --------------------------------------------------------------------------

def binary_entropy(p: float) -> float:
    """h(p) in bits, with h(0) = h(1) = 0."""
    require_finite(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"binary_entropy argument {p} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


def inv_binary_entropy(y: float) -> float:
    """The unique p in [0, 1/2] with h(p) = y, to |h(p) - y| <= 1e-12."""
    require_finite(y)
    if not 0.0 <= y <= 1.0:
        raise DomainError(f"inv_binary_entropy argument {y} outside [0, 1]")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    p = brentq(lambda q: binary_entropy(q) - y, 0.0, 0.5, xtol=1e-300, rtol=8.9e-16)
    if abs(binary_entropy(p) - y) > 1e-12:
        raise DomainError("binary-entropy inversion failed to converge")
    return p


def shannon_entropy(p) -> float:
    """Entropy in bits of a probability vector (zeros ignored)."""
    arr = np.asarray(p, dtype=float)
    arr = arr[arr > 0]
    return float(-np.sum(arr * np.log2(arr)))


# --------------------------------------------------------------------------
# heterodyne outcome law
# --------------------------------------------------------------------------

def outcome_mean(alpha: complex, noise: NoiseModel,
                 det: DetectorParams = IDEAL_DETECTOR) -> complex:
    """Mean of the heterodyne outcome: sqrt(eta*T)*alpha."""
    return math.sqrt(det.eta * noise.T) * alpha


def outcome_variance(noise: NoiseModel, det: DetectorParams = IDEAL_DETECTOR) -> float:
    """Total complex variance of the heterodyne outcome: 1 + T*xi/2 + v_el."""
    return 1.0 + noise.T * noise.xi / 2.0 + det.v_el


def heterodyne_pdf(x: complex, alpha: complex, noise: NoiseModel,
                   det: DetectorParams = IDEAL_DETECTOR) -> float:
    """Probability density of heterodyne outcome x given sent amplitude alpha.

    (1/(pi*sigma^2)) * exp(-|x - sqrt(eta*T)*alpha|^2 / sigma^2); integrates
    to 1 over the complex plane.
    """
    require_finite(x, alpha)
    s2 = outcome_variance(noise, det)
    mu = outcome_mean(alpha, noise, det)
    return float(np.exp(-abs(x - mu) ** 2 / s2) / (math.pi * s2))
