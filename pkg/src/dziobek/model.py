"""Domain types shared by every module.

Masses, configurations, distance and shape matrices, kernel vectors, and the
certificate record emitted by the certification pipeline.  Instances are
immutable after construction (arrays are marked read-only) and safe to hand
to worker processes.

Conventions fixed here and relied on everywhere else:

* potential family exponent ``a`` (Newtonian gravity is ``a = -3/2``, the
  point-vortex / logarithmic case is ``a = -1``),
* gauge ``r_0 = 1`` with the Lagrange multiplier pinned to the total mass,
* body 1 at the origin, echelon rotation frame (body ``k+1`` supported on the
  first ``k`` axes, nonnegative leading coordinate where that entry is
  nonzero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

__all__ = [
    "A_NEWTON",
    "A_VORTEX",
    "DziobekError",
    "NonPositiveMass",
    "ZeroTotalMass",
    "CoincidentBodies",
    "RankDeficient",
    "DegenerateDelta",
    "ZeroVector",
    "NotEmbeddable",
    "NonPositiveShape",
    "NoConvergence",
    "CollapseDetected",
    "OracleRootNotFound",
    "UnsupportedCase",
    "WrongDimension",
    "PotentialParam",
    "MassVector",
    "Gauge",
    "Configuration",
    "DistanceMatrix",
    "ShapeMatrix",
    "DziobekVector",
    "Certificate",
    "CCClass",
    "validate_masses",
    "eval_potential",
]

A_NEWTON = -1.5
A_VORTEX = -1.0


class DziobekError(Exception):
    """Base class for all package errors."""


class NonPositiveMass(DziobekError):
    """A mass is zero, or negative outside formal mode."""


class ZeroTotalMass(DziobekError):
    """The masses sum to zero; the center of mass is undefined."""


class CoincidentBodies(DziobekError):
    """Two bodies share a position (some pairwise distance vanishes)."""


class RankDeficient(DziobekError):
    """A configuration matrix has rank below n-1."""


class DegenerateDelta(DziobekError):
    """The kernel vector is identically zero; no rank-1 fit exists."""


class ZeroVector(DziobekError):
    """The zero vector has no Veronese image."""


class NotEmbeddable(DziobekError):
    """Distance data is not realizable in any Euclidean space."""


class NonPositiveShape(DziobekError):
    """Some 1 + s_ij <= 0; no positive distance recovers this shape entry."""


class NoConvergence(DziobekError):
    """Newton failed to reach the residual tolerance."""


class CollapseDetected(DziobekError):
    """An iterate drove two bodies closer than the collision guard."""


class OracleRootNotFound(DziobekError):
    """The collinear oracle could not bracket a root in (0, 1)."""


class UnsupportedCase(DziobekError):
    """No reference solution is shipped for this (n, a) combination."""


class WrongDimension(DziobekError):
    """Measured affine dimension differs from n-2."""

    def __init__(self, measured: int, expected: int):
        super().__init__(
            f"affine dimension {measured}, expected {expected} for a Dziobek configuration"
        )
        self.measured = measured
        self.expected = expected


def _freeze(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _require_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} must be finite")


@dataclass(frozen=True)
class PotentialParam:
    """Exponent of the homogeneous potential family.

    ``a = -3/2`` is the Newtonian case, ``a = -1`` the vortex (logarithmic)
    case; any nonzero real is accepted.
    """

    a: float

    def __post_init__(self):
        a = float(self.a)
        if not math.isfinite(a):
            raise ValueError("potential exponent must be finite")
        if a == 0.0:
            raise ValueError("potential exponent a = 0 is excluded")
        object.__setattr__(self, "a", a)

    @property
    def label(self) -> str:
        if self.a == A_NEWTON:
            return "newtonian"
        if self.a == A_VORTEX:
            return "vortex"
        return "general"

    def to_dict(self) -> dict:
        return {"a": self.a}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PotentialParam":
        return cls(float(data["a"]))


def _as_a(a) -> float:
    """Accept a PotentialParam or a bare exponent."""
    if isinstance(a, PotentialParam):
        return a.a
    return float(a)


@dataclass(frozen=True, eq=False)
class MassVector:
    """Masses (or circulations) of the n bodies, n >= 3.

    Entries must be nonzero and the total must be nonzero.  Negative entries
    are allowed so formal-mode vectors can be represented; use
    :func:`validate_masses` to enforce positivity for the physical case.
    """

    m: np.ndarray
    M: float = field(init=False)

    def __post_init__(self):
        m = _freeze(self.m)
        if m.ndim != 1 or m.shape[0] < 3:
            raise ValueError("a mass vector needs at least 3 entries")
        _require_finite(m, "masses")
        if np.any(m == 0.0):
            raise NonPositiveMass("zero masses are rejected in every mode")
        total = float(m.sum())
        if total == 0.0:
            raise ZeroTotalMass("masses sum to zero")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "M", total)

    @property
    def n(self) -> int:
        return int(self.m.shape[0])

    @property
    def physical(self) -> bool:
        return bool(np.all(self.m > 0.0))

    @classmethod
    def equal(cls, n: int) -> "MassVector":
        return cls(np.ones(n))

    def to_dict(self) -> dict:
        return {"m": [float(v) for v in self.m]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "MassVector":
        return cls(data["m"])


def validate_masses(values: Sequence[float], formal: bool = False) -> MassVector:
    """Validate a mass vector.

    Physical mode (default) requires every entry positive; formal mode allows
    negative entries.  Zero entries and zero total mass are rejected in both
    modes.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] < 3:
        raise ValueError("a mass vector needs at least 3 entries")
    _require_finite(arr, "masses")
    if np.any(arr == 0.0):
        raise NonPositiveMass("zero masses are rejected in every mode")
    if not formal and np.any(arr < 0.0):
        raise NonPositiveMass("negative masses require formal mode")
    if float(arr.sum()) == 0.0:
        raise ZeroTotalMass("masses sum to zero")
    return MassVector(arr)


@dataclass(frozen=True)
class Gauge:
    """Record of the normalization frame a configuration is expressed in."""

    r0: float = 1.0
    frame: str = "origin-echelon"

    def to_dict(self) -> dict:
        return {"r0": self.r0, "frame": self.frame}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Gauge":
        return cls(float(data["r0"]), str(data["frame"]))


@dataclass(frozen=True, eq=False)
class Configuration:
    """Positions of n bodies, one row per body.

    The nominal Dziobek ambient dimension is ``n - 2``; other ambient
    dimensions are representable so that dimension checks can measure and
    reject them.  ``gauge`` is set once the configuration has been normalized
    to the model frame.
    """

    x: np.ndarray
    gauge: Gauge | None = None

    def __post_init__(self):
        x = _freeze(self.x)
        if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 1:
            raise ValueError("positions must be an (n, dim) array with n >= 2")
        _require_finite(x, "positions")
        diff = x[:, None, :] - x[None, :, :]
        r2 = np.einsum("ijk,ijk->ij", diff, diff)
        iu = np.triu_indices(x.shape[0], k=1)
        if np.any(r2[iu] == 0.0):
            raise CoincidentBodies("two bodies share a position")
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @property
    def ambient_dim(self) -> int:
        return int(self.x.shape[1])

    def to_dict(self) -> dict:
        return {
            "positions": [[float(v) for v in row] for row in self.x],
            "gauge": self.gauge.to_dict() if self.gauge is not None else None,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Configuration":
        gauge = data.get("gauge")
        return cls(
            np.asarray(data["positions"], dtype=float),
            Gauge.from_dict(gauge) if gauge is not None else None,
        )


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric matrix of pairwise distances, zero diagonal."""

    d: np.ndarray

    def __post_init__(self):
        d = _freeze(self.d)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 2:
            raise ValueError("distance matrix must be square with n >= 2")
        _require_finite(d, "distances")
        if not np.array_equal(d, d.T):
            raise ValueError("distance matrix must be exactly symmetric")
        if np.any(np.diag(d) != 0.0):
            raise ValueError("distance matrix diagonal must be zero")
        iu = np.triu_indices(d.shape[0], k=1)
        if np.any(d[iu] <= 0.0):
            raise CoincidentBodies("off-diagonal distances must be positive")
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return int(self.d.shape[0])

    def pair_list(self) -> list[float]:
        """Upper-triangle distances in lexicographic (i, j) order, i < j."""
        iu = np.triu_indices(self.n, k=1)
        return [float(v) for v in self.d[iu]]

    def to_dict(self) -> dict:
        return {"d": [[float(v) for v in row] for row in self.d]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DistanceMatrix":
        return cls(np.asarray(data["d"], dtype=float))


@dataclass(frozen=True, eq=False)
class ShapeMatrix:
    """Dimensionless shape variables s_ij = u_ij^(2a) - 1.

    Off-diagonal entries come from distances; the diagonal is defined by the
    mass-weighted closure and stays NaN until completed.
    """

    s: np.ndarray

    def __post_init__(self):
        s = np.array(self.s, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] < 2:
            raise ValueError("shape matrix must be square with n >= 2")
        off = ~np.eye(s.shape[0], dtype=bool)
        if not np.all(np.isfinite(s[off])):
            raise ValueError("off-diagonal shape entries must be finite")
        if not np.array_equal(
            np.where(np.isnan(s), np.inf, s), np.where(np.isnan(s.T), np.inf, s.T)
        ):
            raise ValueError("shape matrix must be exactly symmetric")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    @property
    def n(self) -> int:
        return int(self.s.shape[0])

    @property
    def diagonal_complete(self) -> bool:
        return bool(np.all(np.isfinite(np.diag(self.s))))

    def to_dict(self) -> dict:
        return {
            "s": [[None if math.isnan(v) else float(v) for v in row] for row in self.s]
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ShapeMatrix":
        rows = [[math.nan if v is None else float(v) for v in row] for row in data["s"]]
        return cls(np.asarray(rows, dtype=float))


@dataclass(frozen=True, eq=False)
class DziobekVector:
    """Kernel vector of the configuration matrix, unit norm.

    Entries sum to zero and at least two are nonzero for genuine Dziobek
    configurations; the sign convention puts the first nonzero entry positive.
    """

    delta: np.ndarray

    def __post_init__(self):
        delta = _freeze(self.delta)
        if delta.ndim != 1 or delta.shape[0] < 3:
            raise ValueError("kernel vector needs at least 3 entries")
        _require_finite(delta, "kernel vector")
        object.__setattr__(self, "delta", delta)

    @property
    def n(self) -> int:
        return int(self.delta.shape[0])

    def to_dict(self) -> dict:
        return {"delta": [float(v) for v in self.delta]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DziobekVector":
        return cls(np.asarray(data["delta"], dtype=float))


@dataclass(frozen=True, eq=False)
class Certificate:
    """Result of certifying one candidate against the algebraic structure.

    ``cc_residual``, ``affine_dim`` and ``isolated`` are None on partial
    (shape-only) certificates, which have no positions to evaluate.
    """

    cc_residual: float | None
    dziobek_residual: float
    kappa: float
    rank1_residual: float
    veronese_residual: float
    degeneracy_index: int
    affine_dim: int | None
    isolated: bool | None
    accepted: bool
    failures: tuple[str, ...]
    tolerances_used: Mapping[str, float]
    details: Mapping[str, Any]

    def to_dict(self) -> dict:
        return {
            "cc_residual": self.cc_residual,
            "dziobek_residual": self.dziobek_residual,
            "kappa": self.kappa,
            "rank1_residual": self.rank1_residual,
            "veronese_residual": self.veronese_residual,
            "degeneracy_index": self.degeneracy_index,
            "affine_dim": self.affine_dim,
            "isolated": self.isolated,
            "accepted": self.accepted,
            "failures": list(self.failures),
            "tolerances_used": dict(self.tolerances_used),
            "details": dict(self.details),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Certificate":
        return cls(
            cc_residual=data["cc_residual"],
            dziobek_residual=data["dziobek_residual"],
            kappa=data["kappa"],
            rank1_residual=data["rank1_residual"],
            veronese_residual=data["veronese_residual"],
            degeneracy_index=data["degeneracy_index"],
            affine_dim=data["affine_dim"],
            isolated=data["isolated"],
            accepted=data["accepted"],
            failures=tuple(data["failures"]),
            tolerances_used=dict(data["tolerances_used"]),
            details=dict(data["details"]),
        )


@dataclass(frozen=True, eq=False)
class CCClass:
    """One similarity class of central configurations.

    Classes are counted modulo rotation, translation, dilation, reflection,
    and mass-preserving body relabeling.  ``canonical_key`` is the pairwise
    distance vector of the representative, minimized lexicographically over
    mass-preserving permutations.
    """

    canonical_key: tuple[float, ...]
    representative: Configuration
    certificate: Certificate | None
    multiplicity_found: int

    def to_dict(self) -> dict:
        return {
            "canonical_key": [float(v) for v in self.canonical_key],
            "representative": self.representative.to_dict(),
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "multiplicity_found": self.multiplicity_found,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CCClass":
        cert = data.get("certificate")
        return cls(
            canonical_key=tuple(float(v) for v in data["canonical_key"]),
            representative=Configuration.from_dict(data["representative"]),
            certificate=Certificate.from_dict(cert) if cert else None,
            multiplicity_found=int(data["multiplicity_found"]),
        )


def _as_positions(x) -> np.ndarray:
    if isinstance(x, Configuration):
        return np.asarray(x.x, dtype=float)
    return np.asarray(x, dtype=float)


def _as_masses(m) -> np.ndarray:
    if isinstance(m, MassVector):
        return np.asarray(m.m, dtype=float)
    return np.asarray(m, dtype=float)


def eval_potential(x, m, a) -> float:
    """Evaluate the homogeneous potential.

    For ``a != -1`` this is ``sum m_i m_j r_ij^(2a+2) / (2a+2)`` over pairs
    i < j; the ``a = -1`` case degenerates to ``sum m_i m_j log r_ij``.

    Parameters
    ----------
    x : Configuration or array_like, shape (n, dim)
    m : MassVector or array_like, shape (n,)
    a : PotentialParam or float
    """
    pos = _as_positions(x)
    masses = _as_masses(m)
    aa = _as_a(a)
    if pos.ndim != 2 or masses.ndim != 1 or pos.shape[0] != masses.shape[0]:
        raise ValueError("positions and masses disagree on the number of bodies")
    n = pos.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    diff = pos[iu] - pos[ju]
    r2 = np.einsum("ij,ij->i", diff, diff)
    if np.any(r2 == 0.0):
        raise CoincidentBodies("two bodies share a position")
    mm = masses[iu] * masses[ju]
    if aa == -1.0:
        return float(np.sum(mm * 0.5 * np.log(r2)))
    p = aa + 1.0
    return float(np.sum(mm * r2**p) / (2.0 * p))
