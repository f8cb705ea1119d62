"""Edge colorings: partition a model's bonds into commuting classes.

Edges that share no site carry commuting Hamiltonian terms, so a proper edge
coloring splits H into K internally-commuting groups H_1..H_K that can each
be exponentiated in a single parallel layer.  Built-in lattices get their
natural direction-based colorings (chain 2, square 4, honeycomb 3 classes);
arbitrary graphs go through Misra-Gries, which never needs more than
max-degree + 1 classes.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from .jsonutil import dump_json
from .model import Boundary, LatticeKind, SpinModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EdgeColoring:
    """Partition of edge indices into vertex-disjoint classes.

    ``classes[k]`` holds the indices (into ``model.edges``) of class k+1;
    class labels are 1-based in schedules.  Classes are never empty.
    """

    n: int
    classes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(tuple(c) for c in self.classes))
        if any(len(c) == 0 for c in self.classes):
            raise ValueError("coloring contains an empty class")

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def class_of(self) -> dict[int, int]:
        """Edge index -> 0-based class index."""
        out: dict[int, int] = {}
        for k, cls in enumerate(self.classes):
            for e in cls:
                out[e] = k
        return out


def validate(model: SpinModel, coloring: EdgeColoring) -> None:
    """Check a coloring against a model; raises ValueError on the first defect.

    A valid coloring covers every edge exactly once, keeps the edges within
    each class vertex-disjoint, and uses at most max_degree + 1 classes.
    """
    if coloring.n != model.n:
        raise ValueError(f"coloring is for n={coloring.n}, model has n={model.n}")
    seen: dict[int, int] = {}
    for k, cls in enumerate(coloring.classes):
        touched: dict[int, int] = {}
        for idx in cls:
            if not (0 <= idx < len(model.edges)):
                raise ValueError(f"class {k + 1} references unknown edge index {idx}")
            if idx in seen:
                raise ValueError(f"edge {idx} appears in classes {seen[idx] + 1} and {k + 1}")
            seen[idx] = k
            for site in model.edges[idx].sites:
                if site in touched:
                    raise ValueError(
                        f"class {k + 1} is not vertex-disjoint: edges {touched[site]} and "
                        f"{idx} share site {site}"
                    )
                touched[site] = idx
    missing = [idx for idx in range(len(model.edges)) if idx not in seen]
    if missing:
        raise ValueError(f"edge {missing[0]} is not covered by any class")
    if coloring.num_classes > model.max_degree + 1:
        raise ValueError(
            f"{coloring.num_classes} classes exceeds max degree + 1 = {model.max_degree + 1}"
        )


def _classes_from_labels(labels: dict[int, int]) -> tuple[tuple[int, ...], ...]:
    """Group edge indices by label, dropping empty labels, preserving label order."""
    buckets: dict[int, list[int]] = {}
    for edge_idx in sorted(labels):
        buckets.setdefault(labels[edge_idx], []).append(edge_idx)
    return tuple(tuple(buckets[label]) for label in sorted(buckets))


def color_builtin(model: SpinModel) -> EdgeColoring:
    """Direction-based coloring for a built-in lattice.

    Chain: even/odd bonds (K=2).  Square: horizontal/vertical split by
    position parity (K=4).  Honeycomb: the three bond orientations (K=3).
    Periodic cases whose parity classes cannot close up (odd rings, odd
    periodic square dimensions) fall back to the general colorer.
    """
    if model.lattice is LatticeKind.CUSTOM:
        raise ValueError("color_builtin needs a built-in lattice; use color_general")
    periodic = model.boundary is Boundary.PERIODIC
    pairs = model.edge_pairs()

    if model.lattice is LatticeKind.CHAIN:
        if periodic and model.n % 2 == 1:
            logger.info(
                "odd periodic chain (n=%d) has no 2-class bond coloring; "
                "falling back to the general colorer", model.n,
            )
            return color_general(model)
        labels = {}
        for idx, (i, j) in enumerate(pairs):
            # bond b joins sites (b, b+1 mod n); the wrap bond (0, n-1) is bond n-1
            bond = i if j == i + 1 else j
            labels[idx] = bond % 2
        return EdgeColoring(model.n, _classes_from_labels(labels))

    if model.lattice is LatticeKind.SQUARE:
        cols = _square_cols(model)
        rows = model.n // cols
        if periodic and (rows % 2 or cols % 2):
            logger.info(
                "periodic square lattice %dx%d has an odd dimension; "
                "falling back to the general colorer", rows, cols,
            )
            return color_general(model)
        labels = {}
        for idx, (i, j) in enumerate(pairs):
            ri, ci = divmod(i, cols)
            rj, cj = divmod(j, cols)
            if ri == rj:
                col = ci if (cj == ci + 1) else cj  # wrap bond sits at the last column
                labels[idx] = 0 + (col % 2)
            else:
                row = ri if (rj == ri + 1) else rj
                labels[idx] = 2 + (row % 2)
        return EdgeColoring(model.n, _classes_from_labels(labels))

    # honeycomb: classify each A-B bond by its orientation in the unit cell
    labels = {}
    for idx, (i, j) in enumerate(pairs):
        a_site, b_site = (i, j) if i % 2 == 0 else (j, i)
        cell_a, cell_b = a_site // 2, b_site // 2
        if cell_a == cell_b:
            labels[idx] = 0
        else:
            lx = _honeycomb_lx(model)
            xa, ya = cell_a % lx, cell_a // lx
            xb, yb = cell_b % lx, cell_b // lx
            labels[idx] = 1 if ya == yb else 2
    return EdgeColoring(model.n, _classes_from_labels(labels))


def _square_cols(model: SpinModel) -> int:
    """Recover the column count of a square lattice from its bond structure."""
    # the smallest vertical-bond stride equals the number of columns
    strides = sorted({j - i for i, j in model.edge_pairs() if j - i > 1})
    if not strides:
        # single-row lattice: every bond is horizontal
        return model.n
    for s in strides:
        if s > 1 and model.n % s == 0:
            return s
    raise ValueError("cannot infer square lattice shape from edges")


def _honeycomb_lx(model: SpinModel) -> int:
    """Recover the cell-grid width of a honeycomb lattice from its bonds."""
    cells = model.n // 2
    # horizontal neighbor bonds join cells differing by 1 (or wrap by lx-1)
    diffs = sorted({abs(j // 2 - i // 2) for i, j in model.edge_pairs() if j // 2 != i // 2})
    for d in diffs:
        if d > 1 and cells % d == 0:
            return d
    return cells  # single-row cell grid


def color_general(model: SpinModel) -> EdgeColoring:
    """Proper edge coloring of an arbitrary simple graph via Misra-Gries.

    Uses at most max_degree + 1 colors.  Deterministic: edges are processed
    in sorted order and free colors are always the smallest available.
    """
    pairs = model.edge_pairs()
    palette = model.max_degree + 1
    # vertex -> {color: neighbor}, edge (i,j) -> color
    at: list[dict[int, int]] = [dict() for _ in range(model.n)]
    color_of: dict[tuple[int, int], int] = {}

    def free(v: int) -> int:
        for c in range(palette):
            if c not in at[v]:
                return c
        raise AssertionError("no free color; degree bookkeeping is broken")

    def is_free(v: int, c: int) -> bool:
        return c not in at[v]

    def set_color(u: int, v: int, c: int) -> None:
        # callers must uncolor first; silently overwriting would corrupt `at`
        key = (u, v) if u < v else (v, u)
        assert key not in color_of
        color_of[key] = c
        at[u][c] = v
        at[v][c] = u

    def uncolor(u: int, v: int) -> None:
        key = (u, v) if u < v else (v, u)
        old = color_of.pop(key)
        del at[u][old]
        del at[v][old]

    def get_color(u: int, v: int) -> int | None:
        return color_of.get((u, v) if u < v else (v, u))

    for (u, v) in pairs:
        # maximal fan of u starting at v: each next leaf's edge color is free
        # on the previous leaf
        fan = [v]
        in_fan = {v}
        while True:
            ext = None
            for c, w in sorted(at[u].items()):
                if w not in in_fan and is_free(fan[-1], c):
                    ext = w
                    break
            if ext is None:
                break
            fan.append(ext)
            in_fan.add(ext)
        c = free(u)
        d = free(fan[-1])
        if c != d:
            # invert the maximal path from u alternating colors d, c, d, ...
            prev, cur, want = u, at[u].get(d), d
            chain = []
            while cur is not None:
                chain.append((prev, cur, want))
                want = c if want == d else d
                nxt = at[cur].get(want)
                if nxt == prev:
                    nxt = None
                prev, cur = cur, nxt
            for a, b, col in chain:
                uncolor(a, b)
            for a, b, col in chain:
                set_color(a, b, d if col == c else c)
        # w: last fan prefix vertex (post-inversion) with d free on it
        w_idx = None
        for idx, w in enumerate(fan):
            if idx > 0:
                ec = get_color(u, fan[idx])
                if ec is None or not is_free(fan[idx - 1], ec):
                    break  # fan property broken past here
            if is_free(w, d):
                w_idx = idx
        if w_idx is None:
            raise AssertionError("fan rotation target not found; invariant broken")
        # rotate: shift each fan edge's color down one slot, then color (u, w)
        # with d; uncolor everything first so no color aliases two edges at u
        rot = [get_color(u, fan[idx + 1]) for idx in range(w_idx)]
        for idx in range(w_idx + 1):
            if get_color(u, fan[idx]) is not None:
                uncolor(u, fan[idx])
        for idx in range(w_idx):
            set_color(u, fan[idx], rot[idx])
        set_color(u, fan[w_idx], d)

    labels = {idx: color_of[pair] for idx, pair in enumerate(pairs)}
    return EdgeColoring(model.n, _classes_from_labels(labels))


def color_model(model: SpinModel) -> EdgeColoring:
    """Best available coloring: builtin structure when present, else general."""
    if model.lattice is LatticeKind.CUSTOM:
        return color_general(model)
    return color_builtin(model)


# --- JSON serialization -----------------------------------------------------

def coloring_to_json(coloring: EdgeColoring) -> str:
    return dump_json({
        "n": coloring.n,
        "K": coloring.num_classes,
        "classes": [list(c) for c in coloring.classes],
    })


def coloring_from_json(text: str) -> EdgeColoring:
    doc = json.loads(text)
    try:
        coloring = EdgeColoring(int(doc["n"]), tuple(tuple(c) for c in doc["classes"]))
    except KeyError as exc:
        raise ValueError(f"coloring document is missing field {exc}") from exc
    if doc.get("K") is not None and int(doc["K"]) != coloring.num_classes:
        raise ValueError("coloring document K does not match its class list")
    return coloring
