"""Quantum-circuit front end: QASM-subset parsing, gate tensors, built-in
circuit generators, and diagram-based simulation / functionality building.

Wire indices are versioned per qubit, so gate application never renames
anything: a gate on qubit q consumes the current live index and introduces
the next version.  The order is qubit-major (all of the top qubit's wires
precede the next qubit's), with newer versions nearer the root; for
functionality diagrams each qubit's block is (out versions..., in), which
interleaves output/input pairs per qubit.
"""

from __future__ import annotations

import cmath
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dd import DDManager
from .dense import DenseTensor, dense_transpose

ONE_QUBIT = ("x", "y", "z", "h", "s", "sdg", "t", "tdg")
TWO_QUBIT = ("cx", "cz", "cp")
SUPPORTED = ONE_QUBIT + TWO_QUBIT


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple
    angle: Fraction | None = None  # multiple of pi, parametric kinds only

    def __str__(self):
        a = f"({self.angle}*pi)" if self.angle is not None else ""
        return f"{self.kind}{a} {','.join('q[%d]' % q for q in self.qubits)}"


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple

    @property
    def n_gates(self):
        return len(self.gates)

    def to_qasm(self):
        lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{self.n}];"]
        for g in self.gates:
            if g.angle is not None:
                num, den = g.angle.numerator, g.angle.denominator
                if num == 1:
                    a = "pi" if den == 1 else f"pi/{den}"
                elif num == -1:
                    a = "-pi" if den == 1 else f"-pi/{den}"
                else:
                    a = f"{num}*pi" if den == 1 else f"{num}*pi/{den}"
                args = ",".join(f"q[{q}]" for q in g.qubits)
                lines.append(f"{g.kind}({a}) {args};")
            else:
                args = ",".join(f"q[{q}]" for q in g.qubits)
                lines.append(f"{g.kind} {args};")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# QASM parsing

_ANGLE_RE = re.compile(
    r"^\s*(?:(-?\d+)\s*\*\s*)?(-)?pi(?:\s*/\s*(\d+))?\s*$")
_QARG_RE = re.compile(r"^\s*(\w+)\s*\[\s*(\d+)\s*\]\s*$")


def _parse_angle(text, line, col):
    if text.strip() == "0":
        return Fraction(0)
    m = _ANGLE_RE.match(text)
    if not m:
        raise CircuitError(
            f"line {line}, col {col}: angle {text!r} is not a rational "
            f"multiple of pi (expected k*pi/m, pi/m, or -pi/m)")
    k = int(m.group(1)) if m.group(1) else 1
    if m.group(2):
        k = -k
    den = int(m.group(3)) if m.group(3) else 1
    return Fraction(k, den)


def parse_qasm(text):
    """Parse the OPENQASM 2.0 subset {x,y,z,h,s,sdg,t,tdg,cx,cz,cp(theta)}.

    Single qreg; cregs are accepted and ignored.  Errors carry line and
    column positions.
    """
    qreg_name = None
    n = 0
    gates = []
    seen_header = False
    pos = 0
    line_no = 0
    for raw in text.splitlines():
        line_no += 1
        line = raw.split("//")[0].strip()
        if not line:
            continue
        if not line.endswith(";"):
            raise CircuitError(f"line {line_no}, col {len(raw)}: missing ';'")
        for stmt in filter(None, (s.strip() for s in line.split(";"))):
            col = raw.find(stmt[:8]) + 1 if stmt else 1
            if stmt.startswith("OPENQASM"):
                if not stmt.startswith("OPENQASM 2"):
                    raise CircuitError(f"line {line_no}, col {col}: "
                                       f"unsupported version {stmt!r}")
                seen_header = True
                continue
            if stmt.startswith("include"):
                continue
            m = re.match(r"^qreg\s+(\w+)\s*\[\s*(\d+)\s*\]$", stmt)
            if m:
                if qreg_name is not None:
                    raise CircuitError(
                        f"line {line_no}, col {col}: multiple qregs")
                qreg_name, n = m.group(1), int(m.group(2))
                continue
            if re.match(r"^creg\s", stmt):
                continue
            m = re.match(r"^(\w+)\s*(?:\(([^)]*)\))?\s+(.*)$", stmt)
            if not m:
                raise CircuitError(
                    f"line {line_no}, col {col}: malformed statement {stmt!r}")
            kind, angle_text, args = m.group(1), m.group(2), m.group(3)
            if kind not in SUPPORTED:
                raise CircuitError(
                    f"line {line_no}, col {col}: unsupported gate {kind!r}")
            if qreg_name is None:
                raise CircuitError(
                    f"line {line_no}, col {col}: gate before qreg declaration")
            angle = None
            if kind == "cp":
                if angle_text is None:
                    raise CircuitError(
                        f"line {line_no}, col {col}: cp needs an angle")
                angle = _parse_angle(angle_text, line_no, col)
            elif angle_text is not None:
                raise CircuitError(
                    f"line {line_no}, col {col}: {kind} takes no angle")
            qubits = []
            for arg in args.split(","):
                qm = _QARG_RE.match(arg)
                if not qm or qm.group(1) != qreg_name:
                    raise CircuitError(
                        f"line {line_no}, col {col}: bad operand {arg.strip()!r}")
                q = int(qm.group(2))
                if q >= n:
                    raise CircuitError(
                        f"line {line_no}, col {col}: qubit {q} out of range")
                qubits.append(q)
            want = 2 if kind in TWO_QUBIT else 1
            if len(qubits) != want or len(set(qubits)) != len(qubits):
                raise CircuitError(
                    f"line {line_no}, col {col}: {kind} needs {want} distinct "
                    f"operand(s)")
            gates.append(Gate(kind, tuple(qubits), angle))
    if not seen_header:
        raise CircuitError("line 1, col 1: missing OPENQASM 2.0 header")
    if qreg_name is None:
        raise CircuitError("line 1, col 1: no qreg declared")
    return Circuit(n, tuple(gates))


# ---------------------------------------------------------------------------
# gate matrices

_S2 = 1.0 / math.sqrt(2.0)


def gate_matrix(kind, angle=None):
    """The unitary of a supported gate (2x2 or 4x4, |control target>)."""
    if kind == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if kind == "z":
        return np.diag([1, -1]).astype(complex)
    if kind == "h":
        return np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
    if kind == "s":
        return np.diag([1, 1j]).astype(complex)
    if kind == "sdg":
        return np.diag([1, -1j]).astype(complex)
    if kind == "t":
        return np.diag([1, cmath.exp(1j * math.pi / 4)]).astype(complex)
    if kind == "tdg":
        return np.diag([1, cmath.exp(-1j * math.pi / 4)]).astype(complex)
    if kind == "cx":
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = [[0, 1], [1, 0]]
        return m
    if kind == "cz":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if kind == "cp":
        return np.diag([1, 1, 1, cmath.exp(1j * math.pi * float(angle))]).astype(complex)
    raise CircuitError(f"unsupported gate kind {kind!r}")


def gate_tensor(gate, wires):
    """The gate as a DenseTensor over (out, in) index pairs.

    `wires` maps each operand qubit to its (out_name, in_name) pair; the
    tensor indices come back sorted by the wire map's order.
    """
    u = gate_matrix(gate.kind, gate.angle)
    if len(gate.qubits) == 1:
        q = gate.qubits[0]
        out, inn = wires[q]
        t = DenseTensor((out, inn), u.reshape(-1))
        return t
    c, tq = gate.qubits
    c_out, c_in = wires[c]
    t_out, t_in = wires[tq]
    arr = u.reshape(2, 2, 2, 2)  # (c_out, t_out, c_in, t_in)
    return DenseTensor((c_out, c_in, t_out, t_in),
                       np.transpose(arr, (0, 2, 1, 3)).reshape(-1))


# ---------------------------------------------------------------------------
# wire bookkeeping

class WireMap:
    """Per-qubit live wire names with qubit-major order registration."""

    def __init__(self, mgr, n, with_inputs=False):
        self.mgr = mgr
        self.n = n
        self.version = [0] * n
        self.with_inputs = with_inputs
        for q in range(n):
            mgr.order.register(self._name(q, 0), key=(n - 1 - q, 0, 0))
            if with_inputs:
                mgr.order.register(f"q{q}_in", key=(n - 1 - q, 1, 0))

    @staticmethod
    def _name(q, v):
        return f"q{q}w{v}"

    def live(self, q):
        return self._name(q, self.version[q])

    def input_name(self, q):
        return f"q{q}_in"

    def advance(self, q):
        """Register and return (new_out, old_live) for applying a gate."""
        old = self.live(q)
        self.version[q] += 1
        v = self.version[q]
        name = self._name(q, v)
        self.mgr.order.register(name, key=(self.n - 1 - q, 0, -v))
        return name, old

    def live_indices(self):
        return tuple(self.live(q) for q in reversed(range(self.n)))


def _sorted_tensor(mgr, t):
    names = sorted(t.indices, key=lambda n: mgr.order.get(n).key)
    return dense_transpose(t, tuple(names))


def _apply_gates(mgr, circ, state, wires):
    for gate in circ.gates:
        pairs = {}
        consumed = []
        for q in gate.qubits:
            out, old = wires.advance(q)
            pairs[q] = (out, old)
            consumed.append(old)
        gt = _sorted_tensor(mgr, gate_tensor(gate, pairs))
        gdd = mgr.generate(gt)
        state = mgr.contract(state, gdd, consumed)
        mgr.checkpoint(state)
    return state


def basis_state(mgr, wires, bits):
    """Product-state diagram for a basis bitstring (bits[q] per qubit q)."""
    f = mgr.scalar_diagram(1.0)
    zero = mgr.zero_diagram()
    for q in range(wires.n):
        x = wires.live(q)
        if bits[q]:
            f = mgr.loc_norm(x, zero, f)
        else:
            f = mgr.loc_norm(x, f, zero)
    return f


def simulate(circ, input_bits, mgr):
    """Diagram of the output state for a basis input, gate by gate.

    `input_bits` is a string or sequence over {0,1}, qubit n-1 first
    (matching ket notation |q_{n-1} ... q_0>).
    """
    bits = [int(b) for b in input_bits]
    if len(bits) != circ.n:
        raise CircuitError(f"input needs {circ.n} bits, got {len(bits)}")
    bits_by_q = list(reversed(bits))
    wires = WireMap(mgr, circ.n)
    state = basis_state(mgr, wires, bits_by_q)
    mgr.checkpoint(state)
    state = _apply_gates(mgr, circ, state, wires)
    return state, wires


def identity_functionality(mgr, wires):
    f = mgr.scalar_diagram(1.0)
    zero = mgr.zero_diagram()
    for q in range(wires.n):
        out = wires.live(q)
        inn = wires.input_name(q)
        a0 = mgr.loc_norm(inn, f, zero)
        a1 = mgr.loc_norm(inn, zero, f)
        f = mgr.loc_norm(out, a0, a1)
    return f


def functionality(circ, mgr):
    """Diagram of the circuit unitary over interleaved (out, in) pairs."""
    wires = WireMap(mgr, circ.n, with_inputs=True)
    func = identity_functionality(mgr, wires)
    mgr.checkpoint(func)
    func = _apply_gates(mgr, circ, func, wires)
    return func, wires


# ---------------------------------------------------------------------------
# dense reference simulation (the oracle side; no diagrams involved)

def statevector(circ, input_bits):
    """Dense simulation by matrix application; qubit n-1 is the top bit."""
    n = circ.n
    if n > 12:
        raise CircuitError("dense reference capped at 12 qubits")
    bits = [int(b) for b in input_bits]
    vec = np.zeros(2 ** n, dtype=complex)
    i = 0
    for b in bits:
        i = (i << 1) | b
    vec[i] = 1.0
    psi = vec.reshape((2,) * n)
    for gate in circ.gates:
        u = gate_matrix(gate.kind, gate.angle)
        axes = [n - 1 - q for q in gate.qubits]
        if len(axes) == 1:
            psi = np.tensordot(u, psi, axes=([1], [axes[0]]))
            psi = np.moveaxis(psi, 0, axes[0])
        else:
            u4 = u.reshape(2, 2, 2, 2)
            psi = np.tensordot(u4, psi, axes=([2, 3], axes))
            psi = np.moveaxis(psi, [0, 1], axes)
    return psi.reshape(-1)


def unitary_matrix(circ):
    """Dense circuit unitary; capped at 6 qubits."""
    n = circ.n
    if n > 6:
        raise CircuitError("dense unitary capped at 6 qubits")
    u = np.eye(2 ** n, dtype=complex)
    for gate in circ.gates:
        g = gate_matrix(gate.kind, gate.angle)
        full = _embed(g, gate.qubits, n)
        u = full @ u
    return u


def _embed(g, qubits, n):
    if len(qubits) == 1:
        q = qubits[0]
        out = np.array([[1.0]], dtype=complex)
        for k in reversed(range(n)):
            out = np.kron(out, g if k == q else np.eye(2))
        return out
    m = np.zeros((2 ** n, 2 ** n), dtype=complex)
    c, t = qubits
    g4 = g.reshape(2, 2, 2, 2)
    for i in range(2 ** n):
        ci, ti = (i >> c) & 1, (i >> t) & 1
        for co in range(2):
            for to in range(2):
                amp = g4[co, to, ci, ti]
                if amp != 0:
                    j = i & ~(1 << c) & ~(1 << t)
                    j |= (co << c) | (to << t)
                    m[j, i] += amp
    return m


# ---------------------------------------------------------------------------
# built-in circuit generators

def gen_ghz(n):
    """H on the top qubit, then a CX ladder downwards."""
    gates = [Gate("h", (n - 1,))]
    for q in range(n - 1, 0, -1):
        gates.append(Gate("cx", (q, q - 1)))
    return Circuit(n, tuple(gates))


def gen_qft(n):
    """Textbook QFT from {H, CP}, no final swaps."""
    gates = []
    for k in range(n - 1, -1, -1):
        gates.append(Gate("h", (k,)))
        for j in range(k - 1, -1, -1):
            gates.append(Gate("cp", (j, k), Fraction(1, 2 ** (k - j))))
    return Circuit(n, tuple(gates))


def gen_fig9(n):
    """Maximally entangled pairs on 2n wires, then QFT on the lower half."""
    gates = []
    for q in range(2 * n - 1, n - 1, -1):
        gates.append(Gate("h", (q,)))
    for i in range(n - 1, -1, -1):
        gates.append(Gate("cx", (n + i, i)))
    qft = gen_qft(n)
    gates.extend(qft.gates)
    return Circuit(2 * n, tuple(gates))


def gen_remark2(n):
    """H on every qubit, then CP_{2^{k-1}} between qubits k and 1 (1-based).

    CP_M adds the phase e^{2 pi i / M} on |11>, i.e. cp(2*pi/M).
    """
    gates = [Gate("h", (q,)) for q in range(n - 1, -1, -1)]
    for k in range(2, n + 1):
        gates.append(Gate("cp", (k - 1, 0), Fraction(2, 2 ** (k - 1))))
    return Circuit(n, tuple(gates))


CLIFFORD_T_SET = ("x", "y", "z", "s", "h", "cx", "t")


def gen_random_cliffordt(n, gates, t_prob, seed):
    """Random circuit over {X,Y,Z,S,H,CX,T} with a fixed T-gate probability."""
    rng = random.Random(seed)
    out = []
    others = [k for k in CLIFFORD_T_SET if k != "t"]
    for _ in range(gates):
        kind = "t" if rng.random() < t_prob else rng.choice(others)
        if kind == "cx":
            a, b = rng.sample(range(n), 2)
            out.append(Gate("cx", (a, b)))
        else:
            out.append(Gate(kind, (rng.randrange(n),)))
    return Circuit(n, tuple(out))


def gen_random_from_set(n, gates, kinds, seed, angles=None):
    """Random circuit over an explicit gate set; cp kinds take an angle."""
    rng = random.Random(seed)
    out = []
    for _ in range(gates):
        kind = rng.choice(kinds)
        if kind in TWO_QUBIT:
            if n < 2:
                continue
            a, b = rng.sample(range(n), 2)
            ang = (angles or {}).get(kind)
            out.append(Gate(kind, (a, b), ang))
        else:
            out.append(Gate(kind, (rng.randrange(n),)))
    return Circuit(n, tuple(out))


GENERATORS = {
    "ghz": gen_ghz,
    "qft": gen_qft,
    "fig9": gen_fig9,
    "remark2": gen_remark2,
}


def build_circuit(gen_name, n, **kw):
    if gen_name == "cliffordt":
        return gen_random_cliffordt(n, kw.get("gates", 400),
                                    kw.get("t_prob", 0.02),
                                    kw.get("seed", 0))
    try:
        return GENERATORS[gen_name](n)
    except KeyError:
        raise CircuitError(f"unknown generator {gen_name!r}") from None
