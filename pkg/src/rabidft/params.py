"""Parameter containers and error types shared by all modules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class ParameterError(ValueError):
    """Invalid physical or numerical parameter."""


class ConvergenceError(RuntimeError):
    """Fock-cutoff or iterative convergence failed.

    Attributes
    ----------
    trace : list of (n_max, energy) pairs visited before giving up.
    """

    def __init__(self, message: str, trace: list | None = None):
        super().__init__(message)
        self.trace = list(trace or [])


class DegenerateGroundStateError(RuntimeError):
    """Ground state is numerically degenerate, so the inverse map is not unique."""


class BoundaryError(ValueError):
    """Polarization too close to ±1 to be produced by a finite potential."""


class BracketError(RuntimeError):
    """Root bracket could not be established."""


class UnsupportedSizeError(ValueError):
    """Dicke model with more sites than supported."""


class FitError(RuntimeError):
    """Least-squares fit failed; carries the last iterate."""

    def __init__(self, message: str, last: tuple[float, float] | None = None):
        super().__init__(message)
        self.last = last


@dataclass(frozen=True)
class ModelParams:
    """Photon frequency, hopping, coupling and coupling scale."""

    omega: float = 1.0
    t: float = 1.0
    g: float = 0.0
    lam: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ParameterError(f"omega must be > 0, got {self.omega}")
        if not (math.isfinite(self.t) and self.t > 0):
            raise ParameterError(f"t must be > 0, got {self.t}")
        if not (math.isfinite(self.g) and math.isfinite(self.lam)):
            raise ParameterError("g and lambda must be finite")

    @property
    def coupling(self) -> float:
        """Effective coupling lambda * g."""
        return self.lam * self.g

    def with_lambda(self, lam: float) -> "ModelParams":
        return ModelParams(self.omega, self.t, self.g, lam)


@dataclass(frozen=True)
class ExternalPair:
    """Two-level potential ``v`` and photon current ``j``."""

    v: float = 0.0
    j: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.v) and math.isfinite(self.j)):
            raise ParameterError("external pair must be finite")


@dataclass(frozen=True)
class DensityPair:
    """Polarization ``sigma`` and photon displacement ``xi``."""

    sigma: float = 0.0
    xi: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.xi) or not abs(self.sigma) <= 1.0:
            raise ParameterError(f"need |sigma| <= 1 and finite xi, got {self}")


@dataclass(frozen=True)
class DickeParams:
    """N two-level systems sharing one photon mode."""

    t_vec: tuple[float, ...]
    g_vec: tuple[float, ...]
    omega: float = 1.0
    lam: float = 1.0
    N: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "t_vec", tuple(float(x) for x in self.t_vec))
        object.__setattr__(self, "g_vec", tuple(float(x) for x in self.g_vec))
        object.__setattr__(self, "N", len(self.t_vec))
        if len(self.g_vec) != self.N or self.N < 1:
            raise ParameterError("t_vec and g_vec must have equal, non-zero length")
        if self.N > 3:
            raise UnsupportedSizeError(f"N={self.N} not supported (N <= 3)")
        if any(not tk > 0 for tk in self.t_vec):
            raise ParameterError("every hopping must be > 0")
        if not self.omega > 0:
            raise ParameterError("omega must be > 0")


@dataclass(frozen=True)
class ConvergenceOptions:
    """Fock-cutoff doubling schedule and tolerance."""

    n_start: int = 40
    n_limit: int = 1280
    tol_energy: float = 1e-10
