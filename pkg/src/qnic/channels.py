"""Channel and attack models.

Monte Carlo transmission of QPSK symbols through a lossy, noisy channel into
a trusted heterodyne receiver, and construction of the eavesdropper's
conditional quantum states under the two collective attacks considered:

* beamsplitter: Eve taps the lost fraction, holding pure coherent states
  ``|sqrt(1-T) alpha_k>``;
* entangling cloner: Eve replaces the loss with a beamsplitter fed by one
  arm of a two-mode squeezed vacuum of quadrature variance
  ``W = 1 + T*xi/(1-T)``, so the channel output carries exactly the
  observed excess noise xi while Eve retains a purification.

Trusted-detector placement: ``eta`` and ``v_el`` act after Eve's
interaction point, so they shape honest statistics (``transmit_symbol``)
but never enter Eve's conditional states.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, TruncationError
from .qcore import (CoherentSymbol, DetectorParams, FockDensityMatrix,
                    IDEAL_DETECTOR, NoiseModel, QpskAlphabet,
                    gram_matrix, gram_entropy_from_parts,
                    outcome_mean, outcome_variance, von_neumann_entropy)
from . import fockgauss

__all__ = [
    "AttackModel",
    "EveConditionalStates",
    "transmit_symbol",
    "transmit_amplitudes",
    "eve_states_beamsplitter",
    "eve_states_cloner",
    "holevo_information",
    "cloner_covariance",
    "cloner_env_variance",
]


class AttackModel(enum.Enum):
    BEAMSPLITTER = "beamsplitter"
    ENTANGLING_CLONER = "entangling-cloner"


# --------------------------------------------------------------------------
# Monte Carlo transmission
# --------------------------------------------------------------------------

def transmit_amplitudes(amplitudes, noise: NoiseModel, det: DetectorParams,
                        rng: np.random.Generator) -> np.ndarray:
    """Heterodyne outcomes for a batch of sent amplitudes.

    Each quadrature is drawn from Normal(sqrt(eta*T)*component, sigma^2/2)
    with sigma^2 = 1 + T*xi/2 + v_el; reproducible for a fixed generator
    state.
    """
    amps = np.asarray(amplitudes, dtype=complex)
    scale = math.sqrt(det.eta * noise.T)
    std = math.sqrt(outcome_variance(noise, det) / 2.0)
    z = rng.standard_normal((amps.size, 2))
    out = (scale * amps.ravel()
           + std * (z[:, 0] + 1j * z[:, 1]))
    return out.reshape(amps.shape)


def transmit_symbol(sym: CoherentSymbol, noise: NoiseModel, det: DetectorParams,
                    rng: np.random.Generator) -> complex:
    """Single-symbol heterodyne outcome; see ``transmit_amplitudes``."""
    return complex(transmit_amplitudes(np.array([sym.amplitude]), noise, det, rng)[0])


# --------------------------------------------------------------------------
# eavesdropper conditional states
# --------------------------------------------------------------------------

@dataclass
class EveConditionalStates:
    """Per-symbol conditional states of the adversary with prior weights.

    Exactly one of ``pure_amplitudes`` (coherent conditionals, possibly
    multimode) and ``fock_states`` (truncated density matrices) is set.
    """

    priors: np.ndarray
    pure_amplitudes: np.ndarray = None
    fock_states: list = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.priors, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise DomainError("priors must be nonnegative and sum to 1")
        self.priors = w
        if (self.pure_amplitudes is None) == (self.fock_states is None):
            raise DomainError("exactly one state representation must be given")

    def reweighted(self, weights) -> "EveConditionalStates":
        return EveConditionalStates(np.asarray(weights, float),
                                    pure_amplitudes=self.pure_amplitudes,
                                    fock_states=self.fock_states,
                                    meta=self.meta)


def eve_states_beamsplitter(alphabet: QpskAlphabet, T: float) -> EveConditionalStates:
    """Pure conditional states |sqrt(1-T) alpha_k> with the sending priors."""
    if not 0.0 <= T <= 1.0:
        raise DomainError(f"transmittance T={T} outside [0, 1]")
    taps = math.sqrt(1.0 - T) * alphabet.all_amplitudes()
    return EveConditionalStates(alphabet.prior(), pure_amplitudes=taps,
                                meta={"attack": AttackModel.BEAMSPLITTER, "T": T})


def cloner_env_variance(T: float, xi: float) -> float:
    """TMSV arm variance W making the channel-output excess noise equal xi."""
    if not 0.0 < T < 1.0:
        if T == 1.0 and xi > 0.0:
            raise DomainError("T = 1 with xi > 0 is unphysical for the cloner")
        if T in (0.0, 1.0):
            return 1.0
        raise DomainError(f"transmittance T={T} outside (0, 1)")
    return 1.0 + T * xi / (1.0 - T)


def cloner_covariance(T: float, W: float):
    """(Mx, Mp) blocks of Eve's two-mode conditional covariance.

    Mode 1 is the beamsplitter reflection, mode 2 the retained TMSV arm.
    """
    C = math.sqrt(T) * math.sqrt(max(W * W - 1.0, 0.0))
    v1 = (1.0 - T) + T * W
    Mx = np.array([[v1, C], [C, W]])
    Mp = np.array([[v1, -C], [-C, W]])
    return Mx, Mp


def _displaced_thermal_checked(beta: complex, nbar: float, n_max: int) -> np.ndarray:
    rho = fockgauss.displaced_thermal(beta, nbar, n_max)
    deficit = 1.0 - np.trace(rho).real
    if deficit > 1e-6:
        raise TruncationError(
            f"displaced-thermal tail {deficit:.3e} exceeds 1e-6 at n_max={n_max}")
    return rho


def _cloner_cutoffs(betas, nus, n_max):
    """Per-mode cutoffs: n_max if given, else occupancy-driven."""
    cuts = []
    for m in range(2):
        if n_max is not None:
            cuts.append(n_max)
            continue
        occ = max(abs(b[m]) ** 2 for b in betas) + (nus[m] - 1.0) / 2.0
        cuts.append(int(math.ceil(occ + 9.0 * math.sqrt(occ + 0.25) + 10)))
    return cuts


def eve_states_cloner(alphabet: QpskAlphabet, T: float, xi: float,
                      n_max: int = None) -> EveConditionalStates:
    """Eve's two-mode conditional Gaussian states as truncated Fock matrices.

    The shared covariance is Williamson-decomposed once; each conditional
    state is then a product of displaced thermal states in the Williamson
    frame (a global symbol-independent Gaussian unitary that entropies are
    blind to).  xi = 0 reduces exactly to the beamsplitter tap.
    """
    W = cloner_env_variance(T, xi)
    Mx, Mp = cloner_covariance(T, W)
    Sx, Sp, nus = fockgauss.williamson_xp(Mx, Mp)
    taps = -math.sqrt(1.0 - T) * alphabet.all_amplitudes()
    betas = []
    for e1 in taps:
        dx = np.array([2.0 * e1.real, 0.0])
        dp = np.array([2.0 * e1.imag, 0.0])
        ex = np.linalg.solve(Sx, dx)
        ep = np.linalg.solve(Sp, dp)
        betas.append((ex + 1j * ep) / 2.0)
    cuts = _cloner_cutoffs(betas, nus, n_max)
    states = []
    for b in betas:
        r1 = _displaced_thermal_checked(b[0], (nus[0] - 1.0) / 2.0, cuts[0])
        r2 = _displaced_thermal_checked(b[1], (nus[1] - 1.0) / 2.0, cuts[1])
        rho = np.kron(r1, r2)
        tr = np.trace(rho).real
        states.append(FockDensityMatrix(rho / tr, truncation_deficit=1.0 - tr))
    meta = {"attack": AttackModel.ENTANGLING_CLONER, "T": T, "xi": xi, "W": W,
            "nbar_env": (W - 1.0) / 2.0, "cutoffs": tuple(cuts),
            "conditional_entropy_gaussian": fockgauss.gaussian_entropy(Mx, Mp)}
    return EveConditionalStates(alphabet.prior(), fock_states=states, meta=meta)


def holevo_information(states: EveConditionalStates) -> float:
    """chi = S(sum_k p_k rho_k) - sum_k p_k S(rho_k), in bits.

    Pure coherent conditionals go through the Gram spectrum (conditional
    entropies vanish); Fock-represented conditionals are mixed and
    diagonalized directly.
    """
    p = states.priors
    if states.pure_amplitudes is not None:
        G = gram_matrix(states.pure_amplitudes)
        return gram_entropy_from_parts(G, p)
    mix = sum(w * s.matrix for w, s in zip(p, states.fock_states) if w > 0)
    s_mix = von_neumann_entropy(FockDensityMatrix(mix, validate=False))
    s_cond = sum(w * von_neumann_entropy(s)
                 for w, s in zip(p, states.fock_states) if w > 0)
    chi = s_mix - s_cond
    return max(0.0, chi)
