"""Atomic measures on the half-plane and disk, Carleson boxes and one-box constants.

Boundary measures (on the real line or the unit circle) carry the ambient
tags ``"line"`` and ``"circle"``; their atoms are treated as sitting at
height ``0+`` so that every box over an interval/arc containing them also
contains them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi

AMBIENTS = ("halfplane", "disk", "line", "circle")
_BOUNDARY = {"halfplane": "line", "disk": "circle"}
_INTERIOR = {"line": "halfplane", "circle": "disk"}


class AmbientMismatch(ValueError):
    """Raised when a region and a measure live on different domains."""


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite list of weighted point masses.

    Parameters
    ----------
    points : array_like of complex
        Atom locations.
    weights : array_like of float
        Nonnegative masses, one per atom.
    ambient : {"halfplane", "disk", "line", "circle"}
    """

    points: np.ndarray
    weights: np.ndarray
    ambient: str = "halfplane"

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=complex)).ravel()
        wts = np.atleast_1d(np.asarray(self.weights, dtype=float)).ravel()
        if pts.shape != wts.shape:
            raise ValueError("points and weights must have the same length")
        if self.ambient not in AMBIENTS:
            raise ValueError(f"unknown ambient {self.ambient!r}")
        if np.any(wts < 0) or not np.all(np.isfinite(wts)):
            raise ValueError("weights must be finite and nonnegative")
        if self.ambient == "halfplane" and np.any(pts.imag <= 0):
            raise ValueError("half-plane atoms need Im z > 0")
        if self.ambient == "disk" and np.any(np.abs(pts) >= 1):
            raise ValueError("disk atoms need |z| < 1")
        if self.ambient == "line" and np.any(pts.imag != 0):
            raise ValueError("line atoms must be real")
        if self.ambient == "circle" and np.any(np.abs(np.abs(pts) - 1) > 1e-12):
            raise ValueError("circle atoms must have modulus 1")
        pts.setflags(write=False)
        wts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    def __len__(self) -> int:
        return self.points.size

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def is_boundary(self) -> bool:
        return self.ambient in ("line", "circle")

    def scaled(self, factor: float) -> "AtomicMeasure":
        return AtomicMeasure(self.points, self.weights * factor, self.ambient)

    def rotated(self, angle: float) -> "AtomicMeasure":
        if self.ambient not in ("disk", "circle"):
            raise AmbientMismatch("rotation only makes sense on the disk or circle")
        return AtomicMeasure(self.points * np.exp(1j * angle), self.weights, self.ambient)

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        if other.ambient != self.ambient:
            raise AmbientMismatch(f"{self.ambient} + {other.ambient}")
        return AtomicMeasure(
            np.concatenate([self.points, other.points]),
            np.concatenate([self.weights, other.weights]),
            self.ambient,
        )

    # -- text format: header ``ambient=<tag>`` then ``re im weight`` per line
    def to_text(self) -> str:
        lines = [f"ambient={self.ambient}"]
        for z, w in zip(self.points, self.weights):
            lines.append(f"{float(z.real)!r} {float(z.imag)!r} {float(w)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "AtomicMeasure":
        rows = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not rows or not rows[0].startswith("ambient="):
            raise ValueError("missing 'ambient=' header")
        ambient = rows[0].split("=", 1)[1].strip()
        data = np.array([[float(t) for t in ln.split()] for ln in rows[1:]]).reshape(-1, 3)
        return cls(data[:, 0] + 1j * data[:, 1], data[:, 2], ambient)


def empty_measure(ambient: str = "halfplane") -> AtomicMeasure:
    return AtomicMeasure(np.zeros(0, complex), np.zeros(0), ambient)


@dataclass(frozen=True)
class Interval:
    left: float
    right: float

    def __post_init__(self):
        if not self.left < self.right:
            raise ValueError("interval needs left < right")

    @property
    def length(self) -> float:
        return self.right - self.left

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x > self.left) & (x < self.right)


@dataclass(frozen=True)
class Arc:
    """Open arc of the unit circle, ``center`` and ``width`` in radians."""

    center: float
    width: float

    def __post_init__(self):
        if not 0 < self.width <= TWO_PI:
            raise ValueError("arc width must lie in (0, 2*pi]")

    @property
    def length(self) -> float:
        return self.width

    def contains_angle(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.width >= TWO_PI:
            return np.ones(theta.shape, dtype=bool)
        d = np.angle(np.exp(1j * (theta - self.center)))
        return np.abs(d) < 0.5 * self.width


@dataclass(frozen=True)
class OpenSetUnion:
    """Finite union of pairwise-disjoint open intervals."""

    intervals: tuple[Interval, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ivs = tuple(sorted(self.intervals, key=lambda iv: iv.left))
        for a, b in zip(ivs, ivs[1:]):
            if b.left < a.right:
                raise ValueError("intervals must be pairwise disjoint")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "OpenSetUnion":
        return cls(tuple(Interval(float(a), float(b)) for a, b in pairs))

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def length(self) -> float:
        return sum(iv.length for iv in self.intervals)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for iv in self.intervals:
            out |= iv.contains(x)
        return out

    def region(self) -> "RegionUnion":
        return RegionUnion(tuple(box_halfplane(iv) for iv in self.intervals))


class Region:
    """Membership predicate over complex points."""

    ambient = "halfplane"

    def contains(self, z) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def contains_boundary(self, z) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass(frozen=True)
class HalfPlaneBox(Region):
    """``R(I) = {x + iy : x in I, 0 < y < |I|/2}``."""

    interval: Interval
    ambient = "halfplane"

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return self.interval.contains(z.real) & (z.imag > 0) & (z.imag < 0.5 * self.interval.length)

    def contains_boundary(self, z):
        return self.interval.contains(np.asarray(z, dtype=complex).real)


@dataclass(frozen=True)
class DiskBox(Region):
    """``S(I) = {r e^{it} : e^{it} in I, 1 - |I|/(2 pi) <= r < 1}``."""

    arc: Arc
    ambient = "disk"

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        inner = 1.0 - self.arc.width / TWO_PI
        return self.arc.contains_angle(np.angle(z)) & (r >= inner) & (r < 1.0)

    def contains_boundary(self, z):
        return self.arc.contains_angle(np.angle(np.asarray(z, dtype=complex)))


@dataclass(frozen=True)
class RegionUnion(Region):
    parts: tuple[Region, ...]

    @property
    def ambient(self):  # type: ignore[override]
        return self.parts[0].ambient if self.parts else "halfplane"

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=bool)
        for p in self.parts:
            out |= p.contains(z)
        return out

    def contains_boundary(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=bool)
        for p in self.parts:
            out |= p.contains_boundary(z)
        return out


def box_halfplane(interval: Interval) -> HalfPlaneBox:
    return HalfPlaneBox(interval)


def box_disk(arc: Arc) -> DiskBox:
    return DiskBox(arc)


def measure_of(mu: AtomicMeasure, region: Region) -> float:
    """Total weight of the atoms of ``mu`` inside ``region``."""
    amb = region.ambient
    if mu.ambient == amb:
        inside = region.contains(mu.points)
    elif _BOUNDARY.get(amb) == mu.ambient:
        inside = region.contains_boundary(mu.points)
    else:
        raise AmbientMismatch(f"measure on {mu.ambient}, region on {amb}")
    return float(mu.weights[inside].sum())


def _family_sup(index, interior, keep, weights):
    sel = interior & keep
    if not np.any(sel):
        return 0.0
    _, inv = np.unique(index[sel], return_inverse=True)
    return float(np.bincount(inv, weights=weights[sel]).max())


def one_box_constant(
    mu: AtomicMeasure,
    exponent: float,
    depth: int,
    base_length: float = 1.0,
) -> float:
    """Dyadic lower estimate of ``sup_I mu(box(I)) / |I|**exponent``.

    Scans dyadic intervals (arcs on the disk) of generations ``0..depth`` in
    two families, the standard grid and one shifted by a third of the
    generation length. Generation 0 has length ``base_length`` on the line and
    is the whole circle on the disk. Intervals are open, so atoms sitting on a
    grid point are only seen by the other family.

    The value increases with ``depth`` towards the supremum over all boxes
    (up to the usual dyadic covering factor).
    """
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if len(mu) == 0:
        return 0.0
    w = mu.weights
    best = 0.0
    if mu.ambient in ("halfplane", "line"):
        x = mu.points.real
        y = mu.points.imag
        for k in range(depth + 1):
            ell = base_length * 2.0 ** (-k)
            keep = np.ones(x.shape, bool) if mu.is_boundary else (y < 0.5 * ell)
            for off in (0.0, ell / 3.0):
                u = (x - off) / ell
                j = np.floor(u)
                m = _family_sup(j.astype(np.int64), u != j, keep, w)
                best = max(best, m / ell**exponent)
    else:
        theta = np.mod(np.angle(mu.points), TWO_PI)
        r = np.abs(mu.points)
        for k in range(depth + 1):
            width = TWO_PI * 2.0 ** (-k)
            keep = np.ones(r.shape, bool) if mu.is_boundary else (r >= 1.0 - 2.0 ** (-k))
            if k == 0:
                best = max(best, float(w[keep].sum()) / width**exponent)
                continue
            for off in (0.0, width / 3.0):
                u = np.mod(theta - off, TWO_PI) / width
                j = np.floor(u)
                m = _family_sup(np.mod(j, 2**k).astype(np.int64), u != j, keep, w)
                best = max(best, m / width**exponent)
    return best


def cantor_left_endpoints(ratio: float, levels: int) -> np.ndarray:
    """Left endpoints of the level-``levels`` cells of the ``ratio`` Cantor set on [0, 1]."""
    if not 0 < ratio < 0.5:
        raise ValueError("ratio must lie in (0, 1/2)")
    if levels < 0:
        raise ValueError("levels must be nonnegative")
    lefts = np.zeros(1)
    length = 1.0
    for _ in range(levels):
        lefts = np.concatenate([lefts, lefts + (1.0 - ratio) * length])
        length *= ratio
    return np.sort(lefts)


def cantor_measure(ratio: float, levels: int, ambient: str = "line") -> AtomicMeasure:
    """Uniform measure on the level-``levels`` Cantor cells, atoms at left endpoints.

    ``ambient="line"`` places the set in [0, 1]; ``ambient="circle"`` maps
    ``x -> exp(2 pi i x)``. Total mass is 1.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    x = cantor_left_endpoints(ratio, levels)
    w = np.full(x.size, 2.0**-levels)
    if ambient == "line":
        return AtomicMeasure(x.astype(complex), w, "line")
    if ambient == "circle":
        return AtomicMeasure(np.exp(1j * TWO_PI * x), w, "circle")
    raise ValueError("cantor_measure ambient must be 'line' or 'circle'")


def critical_ratio(exponent: float) -> float:
    """Cantor ratio whose set has dimension ``exponent``: ``log 2 / log(1/r) = exponent``."""
    if not 0 < exponent < 1:
        raise ValueError("dimension must lie in (0, 1)")
    return 2.0 ** (-1.0 / exponent)


def cantor_cover(ratio: float, level: int, margin: float = 0.01) -> OpenSetUnion:
    """Open cover of the level-``level`` Cantor cells, each cell widened by ``margin`` of its length."""
    lefts = cantor_left_endpoints(ratio, level)
    ell = ratio**level
    return OpenSetUnion.from_pairs((a - margin * ell, a + (1 + margin) * ell) for a in lefts)


def cantor_heights(ratio: float, terms: int, fraction: float = 1.0 / 3.0) -> np.ndarray:
    """Stack heights ``fraction * ratio**m``, m = 1..terms (a third of the level-m cell length)."""
    return fraction * ratio ** np.arange(1, terms + 1, dtype=float)


@dataclass(frozen=True)
class StackParams:
    base: AtomicMeasure
    heights: np.ndarray
    terms: int

    def __post_init__(self):
        g = np.asarray(self.heights, dtype=float).ravel()
        if self.terms < 1:
            raise ValueError("terms must be >= 1")
        if g.size < self.terms:
            raise ValueError("need at least `terms` heights")
        g = g[: self.terms]
        if np.any(g <= 0):
            raise ValueError("heights must be positive")
        if np.any(np.diff(g) >= 0):
            raise ValueError("heights must be strictly decreasing")
        if self.base.ambient not in ("line", "circle"):
            raise ValueError("stack base must be a line or circle measure")
        if self.base.ambient == "circle" and g[0] >= 1:
            raise ValueError("disk stack heights must be < 1")
        object.__setattr__(self, "heights", g)


def stacked_measure(params: StackParams) -> AtomicMeasure:
    """``sum_m m**-2 * (base x delta_{gamma_m})`` for m = 1..terms.

    A line base yields a half-plane measure (atom ``x + i gamma_m``); a circle
    base yields the disk analogue (atom ``(1 - gamma_m) e^{i theta}``). Atoms
    are ordered by stack index, so a longer stack extends a shorter one.
    """
    base = params.base
    pts, wts = [], []
    for m, gamma in enumerate(params.heights, start=1):
        if base.ambient == "line":
            pts.append(base.points.real + 1j * gamma)
        else:
            pts.append((1.0 - gamma) * base.points)
        wts.append(base.weights / m**2)
    ambient = _INTERIOR[base.ambient]
    return AtomicMeasure(np.concatenate(pts), np.concatenate(wts), ambient)


def stacked_cantor(
    ratio: float,
    levels: int,
    terms: int,
    ambient: str = "halfplane",
) -> AtomicMeasure:
    """Convenience wrapper: Cantor base at ``levels`` stacked ``terms`` times at the default heights."""
    base = cantor_measure(ratio, levels, _BOUNDARY[ambient])
    return stacked_measure(StackParams(base, cantor_heights(ratio, terms), terms))
