"""Two-qubit synthesis: Cartan decomposition and CNOT-counted templates.

Any 4x4 unitary factors as

    U = (v1 x v2) exp(-i (alpha XX + beta YY + gamma ZZ) / 4) (u1 x u2)

with the interaction coefficients canonical in the cell
pi >= alpha >= beta >= |gamma| (gamma >= 0 when alpha = pi) and the global
phase folded into v1.  The decomposition works in the magic (Bell) basis,
where the interaction core is diagonal and the local factors become real
orthogonal, so extracting them reduces to simultaneously diagonalizing the
commuting real and imaginary parts of a complex symmetric matrix.

Two templates consume the result: a six-CNOT circuit for an arbitrary
interaction core, and a three-CNOT circuit for the isotropic exchange
exp(-i alpha S.S).  The latter is built around the bridge
CX(a,b) (I x H) CX(b,a), which is itself CNOT-equivalent; its one-CNOT
dressing is computed here at import time from the module's own
decomposition, so the template contains no hand-tuned constants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, Gate, GateKind
from .coloring import EdgeColoring
from .model import EdgeTerm, SpinModel, term_hamiltonian
from .trotter import ProductFormula, expand

KAK_UNITARITY_TOL = 1e-10
KAK_RECONSTRUCTION_TOL = 1e-8
ZERO_ANGLE_TOL = 1e-12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_PAULIS = (_X, _Y, _Z)

_XX = np.kron(_X, _X)
_YY = np.kron(_Y, _Y)
_ZZ = np.kron(_Z, _Z)

# columns are Bell-type states; the interaction core is diagonal here
_MAGIC = np.array(
    [
        [1, 0, 0, 1j],
        [0, 1j, 1, 0],
        [0, 1j, -1, 0],
        [1, 0, 0, -1j],
    ],
    dtype=complex,
) / math.sqrt(2.0)

_CX12 = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CX21 = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)


def _rz(t: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]])


def _rx(t: float) -> np.ndarray:
    c, s = math.cos(t / 2.0), math.sin(t / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _expm_herm(h: np.ndarray, factor: complex = -1j) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(factor * w)) @ v.conj().T


def canonical_core_unitary(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """exp(-i (alpha XX + beta YY + gamma ZZ) / 4)."""
    return _expm_herm((alpha * _XX + beta * _YY + gamma * _ZZ) / 4.0)


@dataclass(frozen=True, eq=False)
class CartanCoefficients:
    """Canonical interaction coefficients and local factors of a 4x4 unitary.

    Reconstruction: (v1 x v2) @ core(alpha, beta, gamma) @ (u1 x u2).
    The global phase lives in v1; u2, v2 have unit determinant.
    """

    alpha: float
    beta: float
    gamma: float
    u1: np.ndarray
    u2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        for name in ("u1", "u2", "v1", "v2"):
            m = np.asarray(getattr(self, name), dtype=complex).copy()
            m.flags.writeable = False
            object.__setattr__(self, name, m)

    @property
    def angles(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


def cartan_unitary(c: CartanCoefficients) -> np.ndarray:
    """Rebuild the unitary a CartanCoefficients describes."""
    core = canonical_core_unitary(c.alpha, c.beta, c.gamma)
    return np.kron(c.v1, c.v2) @ core @ np.kron(c.u1, c.u2)


# --- magic-basis machinery -------------------------------------------------

def _simdiag_sym(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Common eigenbasis of commuting real symmetric a, b.

    Diagonalizes a fixed sequence of mixtures until both residuals clear
    1e-10; the fixed angles keep the output deterministic.
    """
    for t in (0.0, 0.7853981, 0.3183098861, 1.234567, 2.71828):
        m = math.cos(t) * a + math.sin(t) * b
        _, p = np.linalg.eigh(m)
        da = p.T @ a @ p
        db = p.T @ b @ p
        if (
            np.max(np.abs(da - np.diag(np.diag(da)))) < 1e-10
            and np.max(np.abs(db - np.diag(np.diag(db)))) < 1e-10
        ):
            return p
    raise RuntimeError("failed to find a simultaneous eigenbasis")


def _kak_standard(u: np.ndarray):
    """u = e^{ig} (L1 x L2) exp(i k . (XX, YY, ZZ)) (R1 x R2), k not yet canonical.

    Returns (g, left, k, right) with left/right still in product form.
    """
    g = np.angle(np.linalg.det(u)) / 4.0
    usu = u * np.exp(-1j * g)
    m = _MAGIC.conj().T @ usu @ _MAGIC
    gram = m.T @ m
    p = _simdiag_sym(gram.real, gram.imag)
    if np.linalg.det(p) < 0:
        p[:, -1] = -p[:, -1]
    lam = np.angle(np.diag(p.T @ gram @ p))
    d = np.exp(1j * lam / 2.0)
    if np.real(np.prod(d)) < 0:  # det of the diagonal must be +1
        d[0] = -d[0]
    left_o = m @ p @ np.diag(1.0 / d)
    if np.max(np.abs(left_o.imag)) > 1e-8:
        raise RuntimeError("left factor failed to come out real orthogonal")
    left_o = left_o.real
    # magic-basis phases decompose over the global phase and the three
    # interaction coefficients; solve the 4x4 linear pattern for them
    pattern = np.array(
        [
            [1, 1, -1, 1],
            [1, 1, 1, -1],
            [1, -1, -1, -1],
            [1, -1, 1, 1],
        ],
        dtype=float,
    )
    sol = np.linalg.solve(pattern, np.angle(d))
    g2, k = sol[0], sol[1:]
    left = _MAGIC @ left_o @ _MAGIC.conj().T
    right = _MAGIC @ p.T @ _MAGIC.conj().T
    return g + g2, left, k, right


def split_local(m4: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor a product-form m4 = A x B into 2x2 pieces, deterministically.

    A comes out special unitary with its largest entry rotated to positive
    real part; the compensating scalar lands in B.
    """
    km = m4.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    ii, jj = np.unravel_index(np.argmax(np.abs(km)), km.shape)
    row = km[ii, :]
    col = km[:, jj] / row[jj]
    a = col.reshape(2, 2)
    b = row.reshape(2, 2)
    det_a = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    root = np.sqrt(det_a)
    a = a / root
    b = b * root
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    piv = a[idx]
    if piv.real < 0 or (abs(piv.real) < 1e-12 and piv.imag < 0):
        a, b = -a, -b
    if np.max(np.abs(np.kron(a, b) - m4)) > KAK_RECONSTRUCTION_TOL:
        raise RuntimeError("operator is not a product of single-qubit factors")
    return a, b


_AXIS_SWAP = {
    frozenset((0, 1)): _S,
    frozenset((0, 2)): _H,
    frozenset((1, 2)): _rx(-math.pi / 2.0),
}


def _canonicalize(g, left, right, k):
    """Drive k into pi/4 >= k0 >= k1 >= |k2| while tracking the locals."""
    l1, l2 = split_local(left)
    r1, r2 = split_local(right)
    k = np.array(k, dtype=float)

    def shift(a: int, sgn: int) -> None:
        # k[a] += sgn*pi/2 is compensated by sigma_a x sigma_a on the left
        # and a global phase
        nonlocal g, l1, l2
        k[a] += sgn * math.pi / 2.0
        sig = _PAULIS[a]
        l1 = l1 @ sig
        l2 = l2 @ sig
        g += -sgn * math.pi / 2.0

    def negate(a: int, b: int) -> None:
        # conjugating by sigma_c (c the third axis) on one qubit flips the
        # signs of k[a] and k[b] together
        nonlocal l1, r1
        sig = _PAULIS[3 - a - b]
        l1 = l1 @ sig
        r1 = sig @ r1
        k[a] = -k[a]
        k[b] = -k[b]

    def swap(a: int, b: int) -> None:
        nonlocal l1, l2, r1, r2
        w = _AXIS_SWAP[frozenset((a, b))]
        l1 = l1 @ w.conj().T
        l2 = l2 @ w.conj().T
        r1 = w @ r1
        r2 = w @ r2
        k[a], k[b] = k[b], k[a]

    def into_band(a: int) -> None:
        while k[a] > math.pi / 4.0 + 1e-12:
            shift(a, -1)
        while k[a] <= -math.pi / 4.0 - 1e-12:
            shift(a, +1)

    for a in range(3):
        into_band(a)
    if abs(k[0]) < abs(k[1]):
        swap(0, 1)
    if abs(k[1]) < abs(k[2]):
        swap(1, 2)
    if abs(k[0]) < abs(k[1]):
        swap(0, 1)
    if k[0] < 0:
        negate(0, 2)
    if k[1] < 0:
        negate(1, 2)
    into_band(2)
    if k[0] > math.pi / 4.0 - 1e-12 and k[2] < -1e-15:
        # boundary of the cell: prefer k2 >= 0 when k0 = pi/4
        negate(0, 2)
        into_band(0)
    return g, l1, l2, k, r1, r2


def _kak_canonical(u: np.ndarray):
    g, left, k, right = _kak_standard(u)
    g, l1, l2, k, r1, r2 = _canonicalize(g, left, right, k)
    core = _expm_herm(k[0] * _XX + k[1] * _YY + k[2] * _ZZ, 1j)
    rec = np.exp(1j * g) * np.kron(l1, l2) @ core @ np.kron(r1, r2)
    err = float(np.max(np.abs(rec - u)))
    if err > KAK_RECONSTRUCTION_TOL:
        raise RuntimeError(f"decomposition failed to reconstruct its input ({err:.2e})")
    if not (math.pi / 4.0 + 1e-9 >= k[0] >= k[1] >= abs(k[2]) - 1e-12):
        raise RuntimeError(f"interaction coefficients left the canonical cell: {k}")
    return g, l1, l2, k, r1, r2


def kak_decompose(u: np.ndarray) -> CartanCoefficients:
    """Canonical Cartan form of a two-qubit unitary.

    Raises ValueError if the input deviates from unitarity by more than
    1e-10 (the measured deviation is reported).
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {u.shape}")
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(4))))
    if dev > KAK_UNITARITY_TOL:
        raise ValueError(f"matrix deviates from unitary by {dev:.3e}")
    # decompose the adjoint: its canonical form has the conjugated locals
    # on the convenient sides and flips the core's sign convention to the
    # exp(-i . /4) used here
    g, l1, l2, k, r1, r2 = _kak_canonical(u.conj().T)
    alpha, beta, gamma = (4.0 * k).tolist()
    c = CartanCoefficients(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        u1=l1.conj().T,
        u2=l2.conj().T,
        v1=np.exp(-1j * g) * r1.conj().T,
        v2=r2.conj().T,
    )
    rec = cartan_unitary(c)
    err = float(np.max(np.abs(rec - u)))
    if err > KAK_RECONSTRUCTION_TOL:
        raise RuntimeError(f"decomposition failed to reconstruct its input ({err:.2e})")
    return c


# --- templates -------------------------------------------------------------

Fragment = list[list[Gate]]
"""A run of layers on one edge, ready for positional merging."""


def _core_template(alpha: float, beta: float, gamma: float, a: int, b: int) -> Fragment:
    """Six-CNOT realization of canonical_core_unitary on qubits (a, b).

    Each coefficient becomes one CNOT-conjugated rz on qubit b; Hadamards
    map the ZZ rotation onto XX, an extra x-axis quarter turn onto YY.
    """
    half = math.pi / 2.0
    return [
        [Gate(GateKind.H, (a,)), Gate(GateKind.H, (b,))],
        [Gate(GateKind.CX, (a, b))],
        [Gate(GateKind.RZ, (b,), angle=alpha / 2.0)],
        [Gate(GateKind.CX, (a, b))],
        [Gate(GateKind.RX, (a,), angle=-half), Gate(GateKind.RX, (b,), angle=-half)],
        [Gate(GateKind.CX, (a, b))],
        [Gate(GateKind.RZ, (b,), angle=beta / 2.0)],
        [Gate(GateKind.CX, (a, b))],
        [Gate(GateKind.RX, (a,), angle=half), Gate(GateKind.RX, (b,), angle=half)],
        [Gate(GateKind.H, (a,)), Gate(GateKind.H, (b,))],
        [Gate(GateKind.CX, (a, b))],
        [Gate(GateKind.RZ, (b,), angle=gamma / 2.0)],
        [Gate(GateKind.CX, (a, b))],
    ]


def synth_two_qubit(u: np.ndarray, qubits: tuple[int, int] = (0, 1)) -> Fragment:
    """Synthesize an arbitrary two-qubit unitary with at most 6 CNOTs.

    When every interaction coefficient is below 1e-12 the core is dropped
    and the locals merge into a single layer of one-qubit unitaries.
    """
    a, b = qubits
    c = kak_decompose(u)
    if all(abs(x) < ZERO_ANGLE_TOL for x in c.angles):
        return [[
            Gate(GateKind.U1Q, (a,), matrix=c.v1 @ c.u1),
            Gate(GateKind.U1Q, (b,), matrix=c.v2 @ c.u2),
        ]]
    frag: Fragment = [[
        Gate(GateKind.U1Q, (a,), matrix=c.u1),
        Gate(GateKind.U1Q, (b,), matrix=c.u2),
    ]]
    frag.extend(_core_template(c.alpha, c.beta, c.gamma, a, b))
    frag.append([
        Gate(GateKind.U1Q, (a,), matrix=c.v1),
        Gate(GateKind.U1Q, (b,), matrix=c.v2),
    ])
    return frag


def _one_cnot_dressing(u: np.ndarray):
    """Locals (a1, a2, b1, b2) with u = (a1 x a2) CX (b1 x b2).

    Valid exactly when u lies in the CNOT equivalence class; both u and
    CX are put in canonical form and the cores cancelled against each other.
    """
    cu = kak_decompose(u)
    if not np.allclose(cu.angles, (math.pi, 0.0, 0.0), atol=1e-9):
        raise RuntimeError(f"operator is not CNOT-equivalent: {cu.angles}")
    cc = kak_decompose(_CX12)
    a1 = cu.v1 @ cc.v1.conj().T
    a2 = cu.v2 @ cc.v2.conj().T
    b1 = cc.u1.conj().T @ cu.u1
    b2 = cc.u2.conj().T @ cu.u2
    rec = np.kron(a1, a2) @ _CX12 @ np.kron(b1, b2)
    if np.max(np.abs(rec - u)) > 1e-9:
        raise RuntimeError("one-CNOT dressing failed to reconstruct")
    return a1, a2, b1, b2


# bridge for the exchange template; its dressing is derived once at import
_BRIDGE = _CX12 @ np.kron(_I2, _H) @ _CX21
_BR_A1, _BR_A2, _BR_B1, _BR_B2 = _one_cnot_dressing(_BRIDGE)


def synth_exchange(alpha: float, qubits: tuple[int, int] = (0, 1)) -> Fragment:
    """exp(-i alpha S.S) on (a, b) with exactly 3 CNOTs, phase included.

    alpha below 1e-12 yields an empty fragment (the gate is the identity).
    """
    a, b = qubits
    if abs(alpha) < ZERO_ANGLE_TOL:
        return []
    return [
        [
            Gate(GateKind.U1Q, (a,), matrix=_BR_B1),
            Gate(GateKind.U1Q, (b,), matrix=_BR_B2),
        ],
        [Gate(GateKind.CX, (a, b))],
        [
            Gate(GateKind.U1Q, (a,), matrix=_BR_A1),
            Gate(GateKind.U1Q, (b,), matrix=_rz(-alpha / 2.0) @ _BR_A2),
        ],
        [Gate(GateKind.CX, (a, b))],
        [
            Gate(GateKind.RZ, (a,), angle=alpha / 2.0),
            Gate(GateKind.U1Q, (b,), matrix=_H @ _rz(alpha / 2.0)),
        ],
        [Gate(GateKind.CX, (b, a))],
    ]


def _fragment_circuit(frag: Fragment, n: int = 2) -> Circuit:
    return Circuit(n=n, layers=tuple(tuple(layer) for layer in frag))


def synth_general(term: EdgeTerm, tau: float) -> Circuit:
    """Two-qubit circuit for exp(-i tau H_ij) via the six-CNOT template.

    Field shares are absorbed into the outer one-qubit unitaries by
    decomposing the full 4x4 exponential.  Qubit 0 plays site i, qubit 1
    site j.  All six CNOTs are emitted whenever any interaction
    coefficient survives, even if others vanish.
    """
    if not math.isfinite(tau):
        raise ValueError("tau must be finite")
    u = _expm_herm(term_hamiltonian(term), -1j * tau)
    return _fragment_circuit(synth_two_qubit(u, (0, 1)))


def synth_heisenberg(alpha: float) -> Circuit:
    """Two-qubit circuit for exp(-i alpha S.S) via the three-CNOT template."""
    if not math.isfinite(alpha):
        raise ValueError("alpha must be finite")
    return _fragment_circuit(synth_exchange(alpha, (0, 1)))


# --- Trotter circuit assembly ----------------------------------------------

MODES = ("decomposed", "scaled", "heisenberg")


def _is_plain_exchange(term: EdgeTerm) -> bool:
    return (
        term.coupling.isotropic
        and not np.any(term.h_i)
        and not np.any(term.h_j)
    )


def _synth_edge(term: EdgeTerm, hterm: np.ndarray, tau: float) -> Fragment:
    if _is_plain_exchange(term):
        return synth_exchange(tau * float(term.coupling.matrix[0, 0]), (term.i, term.j))
    u = _expm_herm(hterm, -1j * tau)
    return synth_two_qubit(u, (term.i, term.j))


def build_trotter_circuit(
    model: SpinModel,
    coloring: EdgeColoring,
    formula: ProductFormula,
    m: int,
    t: float,
    mode: str = "decomposed",
) -> Circuit:
    """Compile m product-formula steps into a layered circuit.

    ``scaled`` keeps each edge exponential as one native uij gate, so every
    stage is a single layer.  ``decomposed`` lowers each edge to CNOTs and
    one-qubit gates, picking the 3-CNOT exchange template when a coupling
    is isotropic with no field share and the 6-CNOT template otherwise;
    fragments of the edges in a class run in parallel, aligned from the
    stage's first layer.  ``heisenberg`` is ``decomposed`` plus a check
    that every edge actually qualifies for the exchange template.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if formula.num_classes != coloring.num_classes:
        raise ValueError(
            f"formula has K={formula.num_classes} but coloring has {coloring.num_classes}"
        )
    if mode == "heisenberg":
        bad = [e.sites for e in model.edges if not _is_plain_exchange(e)]
        if bad:
            raise ValueError(
                f"heisenberg mode needs isotropic field-free couplings; edge {bad[0]} is not"
            )
    hterms = [term_hamiltonian(term) for term in model.edges]
    layers: list[tuple[Gate, ...]] = []
    for stage in expand(formula, m, t, model.profile):
        cls = coloring.classes[stage.k - 1]
        if mode == "scaled":
            gates = []
            for ei in cls:
                term = model.edges[ei]
                gates.append(
                    Gate(
                        GateKind.UIJ,
                        (term.i, term.j),
                        matrix=_expm_herm(hterms[ei], -1j * stage.tau),
                        edge=(term.i, term.j),
                        tau=stage.tau,
                    )
                )
            layers.append(tuple(gates))
        else:
            frags = [
                _synth_edge(model.edges[ei], hterms[ei], stage.tau) for ei in cls
            ]
            depth = max((len(f) for f in frags), default=0)
            for p in range(depth):
                gates = [g for f in frags if p < len(f) for g in f[p]]
                if gates:
                    layers.append(tuple(gates))
    return Circuit(n=model.n, layers=tuple(layers))
