"""Meromorphic inner functions Theta(z) = exp(i*tau*z) * prod b_lambda(z).

The upper half-plane Blaschke factor is

    b_lambda(z) = (|lambda^2 + 1| / (lambda^2 + 1)) * (z - lambda) / (z - conj(lambda)),

so |b_lambda| = 1 on the real axis and |b_lambda| <= 1 above it.  Only
finite zero lists are representable; an infinite Blaschke sequence has to
be truncated by the caller (all downstream quantities live on a bounded
window, but no truncation-error bound is provided here).

Evaluation helpers are vectorized: ``z`` may be a scalar or any ndarray.
The product formula is a global rational function times an entire factor,
so evaluation is also meaningful below the real axis (the Schwarz
reflection of Theta), except at the poles ``conj(lambda_j)``.  The
modulus bounds of course only hold for Im z >= 0.
"""

import json
from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np

from .errors import ConstantInnerFunctionError, DomainError, PoleError

# above this many factors, products are accumulated in log space to avoid
# underflow near clustered zeros
_LOG_SPACE_LIMIT = 30


def _unimodular_prefactor(lam: complex) -> complex:
    """Normalization |lam^2+1|/(lam^2+1); equals 1 at the 0/0 point lam = i."""
    w = lam * lam + 1.0
    if w == 0:
        return 1.0 + 0.0j
    return abs(w) / w


def blaschke_factor(lam: complex, z):
    """Evaluate the Blaschke factor b_lambda at z (scalar or array).

    Raises PoleError if z hits conj(lam) exactly.
    """
    lam = complex(lam)
    if lam.imag <= 0:
        raise DomainError(f"Blaschke zero must lie in the upper half-plane, got {lam}")
    z = np.asarray(z, dtype=complex)
    pole = np.conj(lam)
    if np.any(z == pole):
        raise PoleError(f"evaluation at the pole conj(lambda) = {pole}")
    out = _unimodular_prefactor(lam) * (z - lam) / (z - pole)
    return out[()] if out.ndim == 0 else out


def blaschke_sum(zero_set) -> float:
    """Sum of Im(lambda)/(1+|lambda|^2) over the zero list (0 for empty)."""
    total = 0.0
    for lam, m in zip(zero_set.zeros, zero_set.multiplicities):
        total += m * lam.imag / (1.0 + abs(lam) ** 2)
    return total


@dataclass(frozen=True)
class ZeroSet:
    """Finite list of upper half-plane zeros with multiplicities."""

    zeros: tuple = ()
    multiplicities: tuple = ()

    def __post_init__(self):
        zeros = tuple(complex(z) for z in self.zeros)
        mults = tuple(int(m) for m in self.multiplicities) if self.multiplicities else ()
        if not mults:
            mults = (1,) * len(zeros)
        if len(mults) != len(zeros):
            raise DomainError("multiplicities must match zeros in length")
        for lam in zeros:
            if not lam.imag > 0:
                raise DomainError(f"zero {lam} is not strictly inside the upper half-plane")
        for m in mults:
            if m < 1:
                raise DomainError(f"multiplicity {m} is not a positive integer")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "multiplicities", mults)

    def __len__(self):
        return len(self.zeros)

    @property
    def total_multiplicity(self) -> int:
        return int(sum(self.multiplicities))

    @property
    def blaschke_sum(self) -> float:
        return blaschke_sum(self)


@dataclass(frozen=True)
class InnerFunction:
    """exp(i*tau*z) times a finite Blaschke product; immutable and pure.

    ``tau`` is the full exponent coefficient: the Paley-Wiener space
    PW_sigma corresponds to ``InnerFunction(tau=2*sigma)``.
    """

    tau: float = 0.0
    zero_set: ZeroSet = field(default_factory=ZeroSet)

    def __post_init__(self):
        if self.tau < 0:
            raise DomainError("tau must be nonnegative")
        object.__setattr__(self, "tau", float(self.tau))

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def from_zeros(zeros, tau: float = 0.0, multiplicities=None) -> "InnerFunction":
        return InnerFunction(tau=tau, zero_set=ZeroSet(tuple(zeros), tuple(multiplicities or ())))

    @staticmethod
    def paley_wiener(sigma: float) -> "InnerFunction":
        """The inner function exp(2*i*sigma*z) attached to PW_sigma."""
        return InnerFunction(tau=2.0 * sigma)

    @property
    def is_constant(self) -> bool:
        return self.tau == 0.0 and len(self.zero_set) == 0

    @property
    def poles(self) -> tuple:
        """Poles of the continuation below the axis: conj of every zero."""
        return tuple(np.conj(lam) for lam in self.zero_set.zeros)

    # -- evaluation ------------------------------------------------------------

    def _factor_data(self, z):
        """Yield (prefactor, lam, pole, mult) per zero, checking for poles."""
        for lam, m in zip(self.zero_set.zeros, self.zero_set.multiplicities):
            pole = np.conj(lam)
            if np.any(z == pole):
                raise PoleError(f"evaluation at the pole conj(lambda) = {pole}")
            yield _unimodular_prefactor(lam), lam, pole, m

    def eval(self, z):
        """Theta(z) for scalar or array z (any z off the pole set)."""
        z = np.asarray(z, dtype=complex)
        if self.zero_set.total_multiplicity > _LOG_SPACE_LIMIT:
            logmag = -self.tau * z.imag
            phase = self.tau * z.real
            for pref, lam, pole, m in self._factor_data(z):
                num = z - lam
                den = z - pole
                with np.errstate(divide="ignore"):
                    logmag = logmag + m * (np.log(np.abs(num)) - np.log(np.abs(den)))
                phase = phase + m * (np.angle(num) - np.angle(den) + np.angle(pref))
            out = np.exp(logmag + 1j * phase)
            out = np.where(np.isneginf(logmag), 0.0, out)
        else:
            out = np.exp(1j * self.tau * z)
            for pref, lam, pole, m in self._factor_data(z):
                out = out * (pref * (z - lam) / (z - pole)) ** m
        return out[()] if out.ndim == 0 else out

    def log_modulus(self, z):
        """log|Theta(z)|, accumulated factorwise for numerical stability.

        Returns -inf exactly at zeros.
        """
        z = np.asarray(z, dtype=complex)
        out = -self.tau * z.imag
        for _, lam, pole, m in self._factor_data(z):
            with np.errstate(divide="ignore"):
                out = out + m * (np.log(np.abs(z - lam)) - np.log(np.abs(z - pole)))
        return out[()] if np.ndim(out) == 0 else out

    def modulus(self, z):
        return np.exp(self.log_modulus(z))

    def boundary_derivative_modulus(self, x):
        """|Theta'(x)| on the real axis: tau + sum 2 m Im(lam)/|x-lam|^2.

        Theta is unimodular on R, so |Theta'| equals the phase derivative,
        which is the Poisson-type sum above.
        """
        if self.is_constant:
            raise ConstantInnerFunctionError("constant inner function has no phase velocity")
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.tau, dtype=float)
        for lam, m in zip(self.zero_set.zeros, self.zero_set.multiplicities):
            out = out + m * 2.0 * lam.imag / np.abs(x - lam) ** 2
        return out[()] if out.ndim == 0 else out

    def log_derivative(self, z):
        """Theta'(z)/Theta(z) = i*tau + sum m (1/(z-lam) - 1/(z-conj(lam)))."""
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, 1j * self.tau, dtype=complex)
        for _, lam, pole, m in self._factor_data(z):
            out = out + m * (1.0 / (z - lam) - 1.0 / (z - pole))
        return out[()] if out.ndim == 0 else out

    def _distance_data(self, z):
        """(log|Theta|, L, L') in a single pass over the factors; the hot
        path of the level-curve projection."""
        z = np.asarray(z, dtype=complex)
        logm = -self.tau * z.imag
        L = np.full(z.shape, 1j * self.tau, dtype=complex)
        Lp = np.zeros(z.shape, dtype=complex)
        for _, lam, pole, m in self._factor_data(z):
            dz = z - lam
            dp = z - pole
            with np.errstate(divide="ignore"):
                logm = logm + m * (np.log(np.abs(dz)) - np.log(np.abs(dp)))
            inv1 = 1.0 / dz
            inv2 = 1.0 / dp
            L = L + m * (inv1 - inv2)
            Lp = Lp - m * (inv1 * inv1 - inv2 * inv2)
        return logm, L, Lp

    def _log_derivative_derivatives(self, z, order: int):
        """[L, L', ..., L^(order)] for L = Theta'/Theta."""
        z = np.asarray(z, dtype=complex)
        outs = [self.log_derivative(z)]
        for k in range(1, order + 1):
            acc = np.zeros(z.shape, dtype=complex)
            coeff = (-1) ** k * factorial(k)
            for _, lam, pole, m in self._factor_data(z):
                acc = acc + m * coeff * (1.0 / (z - lam) ** (k + 1) - 1.0 / (z - pole) ** (k + 1))
            outs.append(acc)
        return outs

    def derivatives(self, z, order: int):
        """[Theta, Theta', ..., Theta^(order)] via Theta^(n+1) = sum C(n,k) L^(k) Theta^(n-k)."""
        z = np.asarray(z, dtype=complex)
        theta = [np.broadcast_to(self.eval(z), z.shape).astype(complex)]
        if order == 0:
            return theta
        lders = self._log_derivative_derivatives(z, order - 1)
        for n in range(order):
            nxt = np.zeros(z.shape, dtype=complex)
            for k in range(n + 1):
                nxt = nxt + comb(n, k) * lders[k] * theta[n - k]
            theta.append(nxt)
        return theta

    # -- serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "zeros": [
                {"re": lam.real, "im": lam.imag, "mult": m}
                for lam, m in zip(self.zero_set.zeros, self.zero_set.multiplicities)
            ],
        }

    @staticmethod
    def from_dict(d: dict) -> "InnerFunction":
        zeros = [complex(e["re"], e["im"]) for e in d.get("zeros", [])]
        mults = [int(e.get("mult", 1)) for e in d.get("zeros", [])]
        return InnerFunction.from_zeros(zeros, tau=float(d.get("tau", 0.0)), multiplicities=mults)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_json(s: str) -> "InnerFunction":
        return InnerFunction.from_dict(json.loads(s))
