"""Spin-1/2 lattice models: coupling tensors, local fields, and edge terms.

Conventions used throughout the package: spin operators are S^a = sigma^a / 2
(hbar = 1), and a model's Hamiltonian is a pure sum of two-site edge terms

    H = sum_{(i,j)} H_ij,
    H_ij = sum_{a,b} J_ij^{ab} S_i^a S_j^b
           + sum_a (h_i^a S_i^a + h_j^a S_j^a),

where every site's local field vector has been folded whole into exactly one
edge term incident to that site.  Folding fields into edges keeps the
Hamiltonian strictly two-local, which is what lets an edge coloring partition
it into internally commuting classes.
"""
from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field as dc_field
from enum import Enum

import numpy as np

from .jsonutil import dump_json

ISOTROPY_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
ID2 = np.eye(2, dtype=complex)


class LatticeKind(str, Enum):
    CHAIN = "chain"
    SQUARE = "square"
    HEXAGONAL = "hexagonal"
    CUSTOM = "custom"


class Boundary(str, Enum):
    OPEN = "open"
    PERIODIC = "periodic"


def _as_readonly(a: np.ndarray, shape: tuple[int, ...], name: str) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    if arr.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CouplingTensor:
    """Real 3x3 exchange tensor J^{ab} coupling S_i^a to S_j^b."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_readonly(self.matrix, (3, 3), "coupling tensor"))

    @classmethod
    def heisenberg(cls, j: float = 1.0) -> "CouplingTensor":
        return cls(j * np.eye(3))

    @classmethod
    def diagonal(cls, jx: float, jy: float, jz: float) -> "CouplingTensor":
        return cls(np.diag([jx, jy, jz]))

    @property
    def isotropic(self) -> bool:
        """True iff J = j * identity within tolerance."""
        return bool(np.max(np.abs(self.matrix - self.matrix[0, 0] * np.eye(3))) <= ISOTROPY_TOL)

    @property
    def norm(self) -> float:
        """Spectral norm of the 3x3 tensor; the per-edge interaction strength."""
        return float(np.linalg.norm(self.matrix, 2))


@dataclass(frozen=True, eq=False)
class EdgeTerm:
    """One two-site term H_ij, including the field shares folded into it.

    ``h_i`` and ``h_j`` are the portions of the local field vectors of sites
    i and j carried by this particular edge; a site's whole field lives in
    exactly one edge term so the per-edge Hamiltonians sum to the full H.
    """

    i: int
    j: int
    coupling: CouplingTensor
    h_i: np.ndarray = dc_field(default_factory=lambda: np.zeros(3))
    h_j: np.ndarray = dc_field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not (0 <= self.i < self.j):
            raise ValueError(f"edge must satisfy 0 <= i < j, got ({self.i}, {self.j})")
        if not isinstance(self.coupling, CouplingTensor):
            raise TypeError(
                f"coupling must be a CouplingTensor, got {type(self.coupling).__name__}"
            )
        object.__setattr__(self, "h_i", _as_readonly(self.h_i, (3,), "h_i"))
        object.__setattr__(self, "h_j", _as_readonly(self.h_j, (3,), "h_j"))

    @property
    def sites(self) -> tuple[int, int]:
        return (self.i, self.j)


@dataclass(frozen=True, eq=False)
class TimeProfile:
    """Global time-dependence of the couplings as per-step scale factors.

    ``constant`` means H(t) = H.  A piecewise profile scales the whole
    Hamiltonian by ``factors[p]`` during Trotter step p; sampling is at the
    left endpoint of each step, and the table length must match the step
    count it is used with.
    """

    kind: str = "constant"
    factors: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("constant", "piecewise"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.kind == "piecewise":
            if not self.factors:
                raise ValueError("piecewise profile requires a non-empty factor table")
            facs = tuple(float(f) for f in self.factors)
            if not all(np.isfinite(facs)):
                raise ValueError("profile factors must be finite")
            object.__setattr__(self, "factors", facs)
        elif self.factors is not None:
            raise ValueError("constant profile takes no factor table")

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def factor(self, step: int, m: int) -> float:
        """Scale factor for Trotter step ``step`` out of ``m``."""
        if self.is_constant:
            return 1.0
        if len(self.factors) != m:
            raise ValueError(
                f"profile table has {len(self.factors)} entries but the plan has {m} steps"
            )
        return self.factors[step]

    def factor_at_fraction(self, frac: float) -> float:
        """Scale factor at normalized time frac in [0, 1); left-endpoint sampling."""
        if self.is_constant:
            return 1.0
        idx = min(int(frac * len(self.factors)), len(self.factors) - 1)
        return self.factors[idx]


CONSTANT_PROFILE = TimeProfile()


@dataclass(frozen=True, eq=False)
class SpinModel:
    """A spin-1/2 system as a list of edge terms on n sites."""

    n: int
    edges: tuple[EdgeTerm, ...]
    lattice: LatticeKind = LatticeKind.CUSTOM
    boundary: Boundary = Boundary.OPEN
    profile: TimeProfile = CONSTANT_PROFILE

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"model needs at least 2 sites, got n={self.n}")
        object.__setattr__(self, "edges", tuple(self.edges))
        seen: set[tuple[int, int]] = set()
        for e in self.edges:
            if e.j >= self.n:
                raise ValueError(f"edge ({e.i}, {e.j}) out of range for n={self.n}")
            if e.sites in seen:
                raise ValueError(f"duplicate edge ({e.i}, {e.j})")
            seen.add(e.sites)
        if not self.edges:
            raise ValueError("model has no edges")

    @functools.cached_property
    def j_max(self) -> float:
        """Largest per-edge interaction strength (max spectral norm of J tensors)."""
        return max(e.coupling.norm for e in self.edges)

    @functools.cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for e in self.edges:
            deg[e.i] += 1
            deg[e.j] += 1
        return tuple(deg)

    @property
    def max_degree(self) -> int:
        return max(self.degrees)

    def edge_pairs(self) -> list[tuple[int, int]]:
        return [e.sites for e in self.edges]


def term_hamiltonian(term: EdgeTerm) -> np.ndarray:
    """Dense 4x4 Hamiltonian of one edge term, ordered (site i, site j).

    Always Hermitian: the coupling tensor and field shares are real and the
    S^a S^b products are built from Hermitian factors.
    """
    spins = [p / 2 for p in PAULIS]
    h4 = np.zeros((4, 4), dtype=complex)
    jmat = term.coupling.matrix
    for a in range(3):
        for b in range(3):
            if jmat[a, b] != 0.0:
                h4 += jmat[a, b] * np.kron(spins[a], spins[b])
        if term.h_i[a] != 0.0:
            h4 += term.h_i[a] * np.kron(spins[a], ID2)
        if term.h_j[a] != 0.0:
            h4 += term.h_j[a] * np.kron(ID2, spins[a])
    return h4


def assign_fields(
    n: int, pairs: list[tuple[int, int]], site_fields: np.ndarray
) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Fold per-site field vectors into per-edge (h_i, h_j) shares.

    Each site's whole field goes to the first sorted edge in which the site
    is the lower endpoint; a site that is never a lower endpoint (e.g. the
    last site of a chain) uses the first sorted edge it appears in at all.
    On a chain this reproduces the usual convention of housing h_i in
    H_{i,i+1} and the last site's field in the final bond.

    Args:
        n: number of sites.
        pairs: sorted list of (i, j) edges with i < j.
        site_fields: (n, 3) array of field vectors.

    Returns:
        Mapping from edge index to its (h_i, h_j) share vectors.

    Raises:
        ValueError: if a site with a nonzero field touches no edge.
    """
    site_fields = np.asarray(site_fields, dtype=float)
    if site_fields.shape != (n, 3):
        raise ValueError(f"site_fields must have shape ({n}, 3), got {site_fields.shape}")
    owner: dict[int, int] = {}
    for s in range(n):
        low = [idx for idx, (i, _) in enumerate(pairs) if i == s]
        if low:
            owner[s] = low[0]
            continue
        any_edge = [idx for idx, (i, j) in enumerate(pairs) if j == s]
        if any_edge:
            owner[s] = any_edge[0]
        elif np.any(site_fields[s] != 0.0):
            raise ValueError(f"site {s} has a nonzero field but touches no edge")
    shares = {idx: (np.zeros(3), np.zeros(3)) for idx in range(len(pairs))}
    for s, idx in owner.items():
        i, j = pairs[idx]
        hi, hj = shares[idx]
        if s == i:
            shares[idx] = (hi + site_fields[s], hj)
        else:
            shares[idx] = (hi, hj + site_fields[s])
    return shares


def _norm_pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


def _chain_pairs(n: int, boundary: Boundary) -> list[tuple[int, int]]:
    if n < 2:
        raise ValueError("chain needs n >= 2")
    pairs = [(i, i + 1) for i in range(n - 1)]
    if boundary is Boundary.PERIODIC:
        if n < 3:
            raise ValueError("periodic chain needs n >= 3")
        pairs.append((0, n - 1))
    return sorted(pairs)


def _square_pairs(rows: int, cols: int, boundary: Boundary) -> list[tuple[int, int]]:
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError("square lattice needs at least 2 sites")
    periodic = boundary is Boundary.PERIODIC
    if periodic and (rows < 3 or cols < 3):
        # wrap bonds on a 1- or 2-wide direction would duplicate existing bonds
        raise ValueError("periodic square lattice needs both dimensions >= 3")
    idx = lambda r, c: r * cols + c
    pairs = set()
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                pairs.add(_norm_pair(idx(r, c), idx(r, c + 1)))
            elif periodic:
                pairs.add(_norm_pair(idx(r, c), idx(r, 0)))
            if r + 1 < rows:
                pairs.add(_norm_pair(idx(r, c), idx(r + 1, c)))
            elif periodic:
                pairs.add(_norm_pair(idx(r, c), idx(0, c)))
    return sorted(pairs)


def _honeycomb_pairs(lx: int, ly: int, boundary: Boundary) -> list[tuple[int, int]]:
    # two-site unit cell: site = 2*(y*lx + x) + s, sublattice s in {0: A, 1: B}
    if lx < 1 or ly < 1:
        raise ValueError("honeycomb lattice needs at least 1x1 cells")
    periodic = boundary is Boundary.PERIODIC
    if periodic and (lx < 2 or ly < 2):
        raise ValueError("periodic honeycomb lattice needs both cell dimensions >= 2")
    a = lambda x, y: 2 * (y * lx + x)
    b = lambda x, y: 2 * (y * lx + x) + 1
    pairs = set()
    for y in range(ly):
        for x in range(lx):
            pairs.add(_norm_pair(a(x, y), b(x, y)))
            if x > 0:
                pairs.add(_norm_pair(a(x, y), b(x - 1, y)))
            elif periodic:
                pairs.add(_norm_pair(a(x, y), b(lx - 1, y)))
            if y > 0:
                pairs.add(_norm_pair(a(x, y), b(x, y - 1)))
            elif periodic:
                pairs.add(_norm_pair(a(x, y), b(x, ly - 1)))
    return sorted(pairs)


def _parse_dims(kind: LatticeKind, dims) -> tuple[int, ...]:
    if isinstance(dims, int):
        dims = (dims,)
    dims = tuple(int(d) for d in dims)
    want = 1 if kind is LatticeKind.CHAIN else 2
    if len(dims) != want:
        raise ValueError(f"{kind.value} lattice takes {want} dimension(s), got {dims}")
    return dims


def build_lattice(
    kind: LatticeKind | str,
    dims,
    boundary: Boundary | str = Boundary.OPEN,
    coupling: CouplingTensor | None = None,
    field=None,
    profile: TimeProfile = CONSTANT_PROFILE,
) -> SpinModel:
    """Build a uniform-coupling model on a named lattice.

    Args:
        kind: chain, square, or hexagonal (honeycomb).
        dims: site count for a chain; (rows, cols) for square; unit-cell
            grid (lx, ly) for honeycomb, which has 2 sites per cell.
        boundary: open or periodic.  Periodic chains need n >= 3, periodic
            squares both dims >= 3, periodic honeycombs both cell dims >= 2,
            so that wrap bonds never duplicate bulk bonds.
        coupling: J tensor applied to every edge (default: Heisenberg J=1).
        field: uniform 3-vector local field applied to every site, folded
            into edge terms via :func:`assign_fields`.  Default: none.
        profile: global time profile (default constant).
    """
    kind = LatticeKind(kind)
    boundary = Boundary(boundary)
    if kind is LatticeKind.CUSTOM:
        raise ValueError("custom models are built with from_edges, not build_lattice")
    dims = _parse_dims(kind, dims)
    if kind is LatticeKind.CHAIN:
        n = dims[0]
        pairs = _chain_pairs(n, boundary)
    elif kind is LatticeKind.SQUARE:
        n = dims[0] * dims[1]
        pairs = _square_pairs(dims[0], dims[1], boundary)
    else:
        n = 2 * dims[0] * dims[1]
        pairs = _honeycomb_pairs(dims[0], dims[1], boundary)
    coupling = coupling if coupling is not None else CouplingTensor.heisenberg(1.0)
    site_fields = np.zeros((n, 3))
    if field is not None:
        site_fields[:] = np.asarray(field, dtype=float)
    shares = assign_fields(n, pairs, site_fields)
    edges = tuple(
        EdgeTerm(i, j, coupling, shares[idx][0], shares[idx][1])
        for idx, (i, j) in enumerate(pairs)
    )
    return SpinModel(n=n, edges=edges, lattice=kind, boundary=boundary, profile=profile)


def from_edges(
    n: int,
    couplings: list[tuple[int, int, CouplingTensor]],
    site_fields=None,
    profile: TimeProfile = CONSTANT_PROFILE,
) -> SpinModel:
    """Build a custom model from explicit edge couplings and per-site fields."""
    by_pair: dict[tuple[int, int], CouplingTensor] = {}
    for i, j, J in couplings:
        pair = _norm_pair(i, j)
        if pair in by_pair:
            raise ValueError(f"duplicate edge {pair}")
        by_pair[pair] = J
    pairs = sorted(by_pair)
    fields = np.zeros((n, 3)) if site_fields is None else np.asarray(site_fields, dtype=float)
    shares = assign_fields(n, pairs, fields)
    edges = tuple(
        EdgeTerm(i, j, by_pair[(i, j)], shares[idx][0], shares[idx][1])
        for idx, (i, j) in enumerate(pairs)
    )
    return SpinModel(n=n, edges=edges, lattice=LatticeKind.CUSTOM, boundary=Boundary.OPEN,
                     profile=profile)


# --- JSON serialization -----------------------------------------------------

def model_to_json(model: SpinModel) -> str:
    """Serialize a model losslessly (floats rendered with 17 significant digits)."""
    doc = {
        "n": model.n,
        "lattice": model.lattice.value,
        "boundary": model.boundary.value,
        "edges": [
            {
                "i": e.i,
                "j": e.j,
                "J": [[float(v) for v in row] for row in e.coupling.matrix],
                "hi": [float(v) for v in e.h_i],
                "hj": [float(v) for v in e.h_j],
            }
            for e in model.edges
        ],
        "profile": (
            {"kind": "constant"}
            if model.profile.is_constant
            else {"kind": "piecewise", "factors": list(model.profile.factors)}
        ),
    }
    return dump_json(doc)


def model_from_json(text: str) -> SpinModel:
    doc = json.loads(text)
    try:
        prof_doc = doc.get("profile", {"kind": "constant"})
        profile = (
            CONSTANT_PROFILE
            if prof_doc["kind"] == "constant"
            else TimeProfile("piecewise", tuple(prof_doc["factors"]))
        )
        edges = tuple(
            EdgeTerm(
                int(e["i"]),
                int(e["j"]),
                CouplingTensor(np.array(e["J"], dtype=float)),
                np.array(e.get("hi", [0, 0, 0]), dtype=float),
                np.array(e.get("hj", [0, 0, 0]), dtype=float),
            )
            for e in doc["edges"]
        )
        return SpinModel(
            n=int(doc["n"]),
            edges=edges,
            lattice=LatticeKind(doc.get("lattice", "custom")),
            boundary=Boundary(doc.get("boundary", "open")),
            profile=profile,
        )
    except KeyError as exc:
        raise ValueError(f"model document is missing field {exc}") from exc
