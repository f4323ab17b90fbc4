"""Geometry of the discrete cylinder: a d-dimensional torus of side N
crossed with the integers.

Sites are (torus residues, height).  The module is pure: points, blocks
(height slabs around level j*N), axis-aligned lattice planes, neighborhoods
and boundaries, with no simulation state anywhere.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

# block kinds, nested core < inner < outer around each level j*N:
#   core  : heights in [ceil((j-3/4)N), floor((j+3/4)N)]   (span ~ 3N/2)
#   inner : heights in [(j-1)N, (j+1)N]                    (span 2N; returns
#           of the walk are counted into this one)
#   outer : heights in [(j-2)N+1, (j+2)N-1]                (span ~ 4N;
#           departures are counted out of this one)
BLOCK_KINDS = ("core", "inner", "outer")


@dataclass(frozen=True)
class CylinderPoint:
    """A site of the cylinder: d torus residues in [0, N) plus a height."""

    torus: tuple[int, ...]
    z: int

    @property
    def d(self) -> int:
        return len(self.torus)

    def as_tuple(self) -> tuple[int, ...]:
        return self.torus + (self.z,)


def project(x, N: int) -> CylinderPoint:
    """Reduce an integer (d+1)-vector onto the cylinder.

    The first d coordinates are reduced mod N, the last one is kept as the
    height.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    x = tuple(int(v) for v in x)
    return CylinderPoint(tuple(v % N for v in x[:-1]), x[-1])


def neighbors(p: CylinderPoint, N: int) -> list[CylinderPoint]:
    """Nearest neighbors (Euclidean distance 1, torus-aware).

    For N >= 3 this is exactly 2(d+1) distinct points.  For N <= 2 torus
    directions collide and the list is de-duplicated; the walk sampler does
    NOT use this list, it always draws among 2(d+1) signed directions.
    """
    d = p.d
    out = []
    for a in range(d):
        for s in (1, -1):
            t = list(p.torus)
            t[a] = (t[a] + s) % N
            out.append(CylinderPoint(tuple(t), p.z))
    out.append(CylinderPoint(p.torus, p.z + 1))
    out.append(CylinderPoint(p.torus, p.z - 1))
    if N <= 2:
        seen: dict[CylinderPoint, None] = {}
        for q in out:
            if q != p:
                seen.setdefault(q)
        return list(seen)
    return out


def star_neighbors(p: CylinderPoint, N: int) -> list[CylinderPoint]:
    """All 3^(d+1) - 1 sites at l-infinity distance 1 (requires N >= 3 so
    the ball embeds injectively in the torus)."""
    if N < 3:
        raise ValueError("star neighborhoods need N >= 3")
    d = p.d
    out = []
    for offs in itertools.product((-1, 0, 1), repeat=d + 1):
        if all(o == 0 for o in offs):
            continue
        t = tuple((p.torus[a] + offs[a]) % N for a in range(d))
        out.append(CylinderPoint(t, p.z + offs[d]))
    return out


def boundary(U, N: int) -> set[CylinderPoint]:
    """Outer boundary: sites outside U having a nearest neighbor in U."""
    U = set(U)
    out: set[CylinderPoint] = set()
    for y in U:
        for x in neighbors(y, N):
            if x not in U:
                out.add(x)
    return out


@dataclass(frozen=True)
class BlockSpec:
    """A height slab around level j*N, of one of the three nested kinds."""

    j: int
    N: int
    kind: str

    def __post_init__(self):
        if self.kind not in BLOCK_KINDS:
            raise ValueError(f"unknown block kind {self.kind!r}")
        if self.N < 2:
            raise ValueError("blocks need N >= 2")


def block_z_range(spec: BlockSpec) -> tuple[int, int]:
    """Inclusive height interval [lo, hi] of the block."""
    j, N = spec.j, spec.N
    if spec.kind == "core":
        return j * N - (3 * N) // 4, j * N + (3 * N) // 4
    if spec.kind == "inner":
        return (j - 1) * N, (j + 1) * N
    return (j - 2) * N + 1, (j + 2) * N - 1


def block_contains(spec: BlockSpec, p: CylinderPoint) -> bool:
    lo, hi = block_z_range(spec)
    return lo <= p.z <= hi


def core_range(j: int, N: int) -> tuple[int, int]:
    return block_z_range(BlockSpec(j, N, "core"))


def inner_range(j: int, N: int) -> tuple[int, int]:
    return block_z_range(BlockSpec(j, N, "inner"))


def outer_range(j: int, N: int) -> tuple[int, int]:
    return block_z_range(BlockSpec(j, N, "outer"))


@dataclass(frozen=True)
class LatticePlane:
    """An axis-aligned affine sublattice of the cylinder.

    ``axes`` are the swept canonical directions (0..d-1 torus, d vertical);
    ``base`` is the canonical representative: zero along every swept axis,
    torus coordinates reduced mod N elsewhere.  Two planes are equal iff
    they are the same site set, which for N >= 2 coincides with equality of
    the canonical forms.
    """

    axes: frozenset[int]
    base: tuple[int, ...]
    N: int

    @property
    def d(self) -> int:
        return len(self.base) - 1

    @property
    def m(self) -> int:
        return len(self.axes)

    def contains(self, p: CylinderPoint) -> bool:
        for a in range(self.d):
            if a not in self.axes and p.torus[a] != self.base[a]:
                return False
        if self.d not in self.axes and p.z != self.base[self.d]:
            return False
        return True


def make_plane(axes, base, N: int) -> LatticePlane:
    axes = frozenset(int(a) for a in axes)
    d = len(base) - 1
    canon = []
    for a in range(d):
        canon.append(0 if a in axes else int(base[a]) % N)
    canon.append(0 if d in axes else int(base[d]))
    return LatticePlane(axes, tuple(canon), N)


def enumerate_planes(j: int, m: int, N: int, d: int):
    """Yield every m-dimensional axis plane meeting the core block at level
    j, each exactly once (canonical form).

    Planes not sweeping the vertical axis exist at one height apiece, so
    only heights inside the core block qualify; planes sweeping the
    vertical axis meet every block.
    """
    if not 1 <= m <= d + 1:
        raise ValueError("m out of range")
    lo, hi = core_range(j, N)
    for axes in itertools.combinations(range(d + 1), m):
        axset = frozenset(axes)
        free_torus = [a for a in range(d) if a not in axset]
        z_values = [0] if d in axset else range(lo, hi + 1)
        for fixed in itertools.product(range(N), repeat=len(free_torus)):
            base = [0] * (d + 1)
            for a, v in zip(free_torus, fixed):
                base[a] = v
            for z in z_values:
                base[d] = z
                yield make_plane(axset, base, N)


@dataclass(frozen=True)
class SegmentSpec:
    """An axis-aligned segment: base + k*direction for 0 <= k <= length."""

    base: CylinderPoint
    axis: int
    sign: int
    length: int

    def sites(self, N: int) -> list[CylinderPoint]:
        out = []
        d = self.base.d
        for k in range(self.length + 1):
            if self.axis < d:
                t = list(self.base.torus)
                t[self.axis] = (t[self.axis] + self.sign * k) % N
                out.append(CylinderPoint(tuple(t), self.base.z))
            else:
                out.append(CylinderPoint(self.base.torus, self.base.z + self.sign * k))
        return out


def seg_sites(K: float, N: int) -> int:
    """floor(K * ln N): the step count of the probe segments (natural log)."""
    return int(math.floor(K * math.log(N)))


def offsets_count(N: int) -> int:
    """Number of anchor offsets scanned per direction: ceil(sqrt(N))."""
    return int(math.ceil(math.sqrt(N)))
