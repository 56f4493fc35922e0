"""Regular and irregular polarizations of small Dicke models.

A polarization vector is irregular when some non-negative amplitude vector
producing it makes {χ, σ_z^1 χ, ..., σ_z^N χ} linearly dependent.  The rank
of that set is one plus the affine dimension of the cube corners in the
support of χ, so irregular polarizations are exactly the convex hulls of
corner sets lying in a common hyperplane.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .operators import lifted_sigma_z
from .params import ParameterError, UnsupportedSizeError

RANK_RTOL = 1e-10
MEMBER_TOL = 1e-12


def _check_n(n_sites: int) -> None:
    if n_sites > 3:
        raise UnsupportedSizeError(f"N={n_sites} not supported (N <= 3)")
    if n_sites < 1:
        raise ParameterError("N must be >= 1")


def lifted_pauli_z(n_sites: int, k: int) -> np.ndarray:
    """Diagonal sign vector of σ_z on site ``k`` (1-based)."""
    _check_n(n_sites)
    return lifted_sigma_z(n_sites, k)


def corners(n_sites: int) -> np.ndarray:
    """Integer corner coordinates indexed like the two-level basis."""
    _check_n(n_sites)
    return np.column_stack([lifted_sigma_z(n_sites, k) for k in range(1, n_sites + 1)]).astype(int)


@dataclass(frozen=True)
class RegularityReport:
    N: int
    polarization: np.ndarray
    rank: int
    regular_witnessed: bool


def polarization(chi) -> np.ndarray:
    chi = np.asarray(chi, dtype=float)
    n_sites = int(round(math.log2(chi.size)))
    return corners(n_sites).T.astype(float) @ (chi * chi)


def regularity_rank(chi) -> RegularityReport:
    """Numerical rank of {χ, σ_z^k χ}; full rank means no irregularity witness."""
    chi = np.asarray(chi, dtype=float)
    n_sites = int(round(math.log2(chi.size)))
    if 2**n_sites != chi.size:
        raise ParameterError("amplitude vector length must be a power of two")
    _check_n(n_sites)
    if np.any(chi < 0):
        raise ParameterError("amplitudes must be non-negative")
    cols = [chi] + [lifted_sigma_z(n_sites, k) * chi for k in range(1, n_sites + 1)]
    sv = np.linalg.svd(np.column_stack(cols), compute_uv=False)
    rank = int(np.sum(sv > RANK_RTOL * sv[0])) if sv[0] > 0 else 0
    return RegularityReport(n_sites, polarization(chi), rank, rank == n_sites + 1)


@dataclass(frozen=True)
class Face:
    """Convex hull of the listed corners (indices into :func:`corners`)."""

    corners: tuple[int, ...]
    kind: str


@dataclass(frozen=True)
class Census:
    N: int
    corners: list[Face] = field(default_factory=list)
    segments: list[Face] = field(default_factory=list)
    planes: list[Face] = field(default_factory=list)

    def counts(self) -> tuple[int, ...]:
        if self.N == 1:
            return (len(self.corners),)
        if self.N == 2:
            return (len(self.corners), len(self.segments))
        return (len(self.corners), len(self.segments), len(self.planes))

    def maximal(self) -> list[Face]:
        """Faces whose union is the whole irregular set."""
        return {1: self.corners, 2: self.segments, 3: self.planes}[self.N]

    def to_dict(self) -> dict:
        def faces(fs):
            return [{"corners": list(f.corners), "kind": f.kind} for f in fs]

        return {
            "N": self.N,
            "corner_coordinates": corners(self.N).tolist(),
            "counts": list(self.counts()),
            "corners": faces(self.corners),
            "segments": faces(self.segments),
            "planes": faces(self.planes),
        }


def _plane_key(pts: np.ndarray) -> tuple | None:
    normal = np.cross(pts[1] - pts[0], pts[2] - pts[0])
    if not normal.any():
        return None
    div = math.gcd(*(int(abs(x)) for x in normal))
    normal = normal // div
    first = next(x for x in normal if x != 0)
    if first < 0:
        normal = -normal
    return tuple(int(x) for x in normal), int(normal @ pts[0])


def _plane_kind(normal: tuple, count: int) -> str:
    nonzero = sum(1 for x in normal if x != 0)
    if nonzero == 1:
        return "face"
    if nonzero == 2:
        return "diagonal"
    return "triangle" if count == 3 else "other"


def irregular_faces(n_sites: int) -> Census:
    """Exact enumeration of irregular corners, segments and planes."""
    _check_n(n_sites)
    return _census(n_sites)


@lru_cache(maxsize=None)
def _census(n_sites: int) -> Census:
    pts = corners(n_sites)
    idx = range(pts.shape[0])
    census = Census(n_sites)
    census.corners.extend(Face((i,), "corner") for i in idx)
    if n_sites >= 2:
        census.segments.extend(Face(pair, "segment") for pair in itertools.combinations(idx, 2))
    if n_sites == 3:
        seen = {}
        for triple in itertools.combinations(idx, 3):
            key = _plane_key(pts[list(triple)])
            if key is None or key in seen:
                continue
            normal, off = key
            members = tuple(i for i in idx if int(np.dot(normal, pts[i])) == off)
            seen[key] = members
        for (normal, _), members in seen.items():
            census.planes.append(Face(members, _plane_kind(normal, len(members))))
    return census


def _in_triangle(point: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray, tol: float) -> bool:
    """Barycentric membership test for a point in the plane of a triangle."""
    e0, e1, e2 = b - a, c - a, point - a
    d00, d01, d11 = e0 @ e0, e0 @ e1, e1 @ e1
    d20, d21 = e2 @ e0, e2 @ e1
    den = d00 * d11 - d01 * d01
    u = (d11 * d20 - d01 * d21) / den
    w = (d00 * d21 - d01 * d20) / den
    return u >= -tol and w >= -tol and u + w <= 1 + tol


def _segment_distance(point: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    d = b - a
    s = np.clip(np.dot(point - a, d) / np.dot(d, d), 0.0, 1.0)
    return float(np.linalg.norm(point - a - s * d))


@lru_cache(maxsize=None)
def _geometry(n_sites: int):
    pts = corners(n_sites).astype(float)
    planes = []
    if n_sites == 3:
        for face in _census(3).planes:
            verts = pts[list(face.corners)]
            normal = np.cross(verts[1] - verts[0], verts[2] - verts[0])
            planes.append((verts, normal / np.linalg.norm(normal)))
    pairs = []
    if n_sites >= 2:
        pairs = [(pts[i], pts[k]) for i, k in itertools.combinations(range(pts.shape[0]), 2)]
    return pts, pairs, planes


def _in_polygon(point: np.ndarray, verts: np.ndarray, tol: float) -> bool:
    return any(_in_triangle(point, *verts[list(tri)], tol) for tri in itertools.combinations(range(len(verts)), 3))


def census_distance(sigma_vec, n_sites: int) -> float:
    """Euclidean distance from a polarization to the irregular set."""
    _check_n(n_sites)
    point = np.asarray(sigma_vec, dtype=float)
    pts, pairs, planes = _geometry(n_sites)
    best = float(np.min(np.linalg.norm(pts - point, axis=1)))
    for a, b in pairs:
        best = min(best, _segment_distance(point, a, b))
    for verts, normal in planes:
        h = float(np.dot(point - verts[0], normal))
        if abs(h) < best and _in_polygon(point - h * normal, verts, 1e-12):
            best = abs(h)
    return best


def is_regular(sigma_vec, n_sites: int) -> bool:
    """True iff the polarization lies on no irregular face (tolerance 1e-12)."""
    _check_n(n_sites)
    point = np.asarray(sigma_vec, dtype=float)
    if point.shape != (n_sites,) or np.any(np.abs(point) > 1 + MEMBER_TOL):
        raise ParameterError("polarization must be a vector in [-1, 1]^N")
    return census_distance(point, n_sites) > MEMBER_TOL


def support_on_face(chi, n_sites: int, tol: float = 0.0) -> bool:
    """True iff the support of ``chi`` lies within the corner set of one face."""
    support = set(np.flatnonzero(np.asarray(chi) > tol).tolist())
    return any(support <= set(f.corners) for f in irregular_faces(n_sites).maximal())
