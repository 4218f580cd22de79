"""Circuit intermediate representation.

A :class:`Circuit` is an immutable, ordered list of :class:`Gate` objects over
named qubit registers. Every synthesis backend in this package emits one.

Conventions used throughout the package:

* little-endian basis indexing: qubit ``k`` of the flattened layout is bit ``k``
  of a basis-state integer, and inside a register qubit ``j`` is bit ``j`` of the
  register value;
* ``RZ(t) = diag(exp(-i t/2), exp(i t/2))`` with ``t`` normalised to ``(-pi, pi]``;
* global phase is never tracked.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

__all__ = [
    "CircuitError",
    "LayoutError",
    "NonDyadicAngleError",
    "MustLowerError",
    "Register",
    "QubitRef",
    "Gate",
    "Circuit",
    "GateMetrics",
    "normalize_angle",
    "h",
    "x",
    "rz",
    "cx",
    "mcx",
    "mcz",
    "lower",
    "inverse",
    "metrics",
    "export",
    "import_circuit",
]

PRIMITIVE_KINDS = frozenset({"h", "x", "rz", "cx"})
ALL_KINDS = PRIMITIVE_KINDS | {"mcx", "mcz"}

DYADIC_TOL = 1e-9
DYADIC_MAX_M = 40


class CircuitError(ValueError):
    """Base class for circuit errors."""


class LayoutError(CircuitError):
    """A gate operand does not resolve in the circuit layout."""


class NonDyadicAngleError(CircuitError):
    """An RZ angle is not a dyadic multiple of pi."""


class MustLowerError(CircuitError):
    """A composite gate reached an exporter that only accepts primitives."""


def normalize_angle(theta: float) -> float:
    """Map an angle to the half-open interval (-pi, pi]."""
    t = math.fmod(theta, 2.0 * math.pi)
    if t <= -math.pi:
        t += 2.0 * math.pi
    elif t > math.pi:
        t -= 2.0 * math.pi
    return t


@dataclass(frozen=True, order=True)
class QubitRef:
    register: str
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise LayoutError(f"negative qubit index {self.index}")

    def __repr__(self):
        return f"{self.register}[{self.index}]"


@dataclass(frozen=True)
class Register:
    name: str
    size: int

    def __post_init__(self):
        if self.size < 0:
            raise LayoutError(f"register {self.name!r} has negative size")

    def __getitem__(self, i: int) -> QubitRef:
        if isinstance(i, slice):
            return [QubitRef(self.name, j) for j in range(self.size)[i]]
        if not 0 <= i < self.size:
            raise LayoutError(f"{self.name}[{i}] out of range (size {self.size})")
        return QubitRef(self.name, i)

    def __iter__(self) -> Iterator[QubitRef]:
        return (QubitRef(self.name, j) for j in range(self.size))

    def __len__(self):
        return self.size

    def qubits(self) -> list[QubitRef]:
        return list(self)


@dataclass(frozen=True)
class Gate:
    """One gate instruction.

    ``qubits`` holds every operand. For ``cx`` and ``mcx`` the last operand is the
    target and the others are controls; ``mcz`` operands are stored sorted since
    the gate is symmetric.
    """

    kind: str
    qubits: tuple[QubitRef, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        qs = tuple(self.qubits)
        if len(set(qs)) != len(qs):
            raise CircuitError(f"repeated operand in {self.kind} gate: {qs}")
        arity = {"h": 1, "x": 1, "rz": 1, "cx": 2}.get(self.kind)
        if arity is not None and len(qs) != arity:
            raise CircuitError(f"{self.kind} takes {arity} operand(s), got {len(qs)}")
        if not qs:
            raise CircuitError(f"{self.kind} gate needs at least one operand")
        if self.kind == "mcz":
            qs = tuple(sorted(qs))
        object.__setattr__(self, "qubits", qs)
        if self.kind == "rz":
            if self.angle is None:
                raise CircuitError("rz gate needs an angle")
            object.__setattr__(self, "angle", normalize_angle(float(self.angle)))
        elif self.angle is not None:
            raise CircuitError(f"{self.kind} gate takes no angle")

    @property
    def controls(self) -> tuple[QubitRef, ...]:
        if self.kind in ("cx", "mcx"):
            return self.qubits[:-1]
        return ()

    @property
    def target(self) -> QubitRef:
        return self.qubits[-1]

    @property
    def is_primitive(self) -> bool:
        return self.kind in PRIMITIVE_KINDS

    def inverse(self) -> "Gate":
        if self.kind == "rz":
            return Gate("rz", self.qubits, -self.angle)
        return self

    def __repr__(self):
        ops = ", ".join(map(repr, self.qubits))
        if self.kind == "rz":
            return f"rz({self.angle:.6g}) {ops}"
        return f"{self.kind} {ops}"


def h(q: QubitRef) -> Gate:
    return Gate("h", (q,))


def x(q: QubitRef) -> Gate:
    return Gate("x", (q,))


def rz(q: QubitRef, angle: float) -> Gate:
    return Gate("rz", (q,), angle)


def cx(control: QubitRef, target: QubitRef) -> Gate:
    return Gate("cx", (control, target))


def mcx(controls: Sequence[QubitRef], target: QubitRef) -> Gate:
    return Gate("mcx", (*controls, target))


def mcz(qubits: Sequence[QubitRef]) -> Gate:
    return Gate("mcz", tuple(qubits))


@dataclass(frozen=True)
class Circuit:
    """Immutable gate list over an ordered register layout."""

    layout: tuple[Register, ...]
    gates: tuple[Gate, ...] = ()
    _offsets: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        layout = tuple(self.layout)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "gates", tuple(self.gates))
        offsets, total = {}, 0
        for reg in layout:
            if reg.name in offsets:
                raise LayoutError(f"duplicate register {reg.name!r}")
            offsets[reg.name] = (total, reg.size)
            total += reg.size
        object.__setattr__(self, "_offsets", offsets)
        for g in self.gates:
            for q in g.qubits:
                self._resolve(q)

    def _resolve(self, q: QubitRef) -> int:
        try:
            off, size = self._offsets[q.register]
        except KeyError:
            raise LayoutError(f"register {q.register!r} not in layout") from None
        if q.index >= size:
            raise LayoutError(f"{q!r} out of range (size {size})")
        return off + q.index

    def index_of(self, q: QubitRef) -> int:
        """Flat little-endian position of ``q`` in the layout."""
        return self._resolve(q)

    def register(self, name: str) -> Register:
        for reg in self.layout:
            if reg.name == name:
                return reg
        raise LayoutError(f"register {name!r} not in layout")

    def offset(self, name: str) -> int:
        return self._offsets[name][0]

    @property
    def num_qubits(self) -> int:
        return sum(r.size for r in self.layout)

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def with_gates(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.layout, tuple(gates))

    def then(self, *others: "Circuit") -> "Circuit":
        """Concatenate circuits; registers are merged by name."""
        layout = merge_layouts(self.layout, *(o.layout for o in others))
        gates = list(self.gates)
        for o in others:
            gates.extend(o.gates)
        return Circuit(layout, gates)

    def on(self, layout: Sequence[Register]) -> "Circuit":
        """Re-home this circuit onto a wider layout."""
        return Circuit(merge_layouts(tuple(layout), self.layout), self.gates)

    @property
    def is_lowered(self) -> bool:
        return all(g.is_primitive for g in self.gates)


def merge_layouts(*layouts: Sequence[Register]) -> tuple[Register, ...]:
    merged: dict[str, Register] = {}
    for layout in layouts:
        for reg in layout:
            seen = merged.get(reg.name)
            if seen is None:
                merged[reg.name] = reg
            elif seen.size != reg.size:
                raise LayoutError(
                    f"register {reg.name!r} declared with sizes {seen.size} and {reg.size}"
                )
    return tuple(merged.values())


# --------------------------------------------------------------------------- lowering


def _toffoli(c0: QubitRef, c1: QubitRef, t: QubitRef) -> list[Gate]:
    # textbook 6-CNOT / 7-T decomposition; T = RZ(pi/4) up to global phase
    q = math.pi / 4
    return [
        h(t),
        cx(c1, t), rz(t, -q),
        cx(c0, t), rz(t, q),
        cx(c1, t), rz(t, -q),
        cx(c0, t), rz(c1, q), rz(t, q),
        h(t),
        cx(c0, c1), rz(c0, q), rz(c1, -q),
        cx(c0, c1),
    ]


def _mcz_by_phase_synthesis(qubits: Sequence[QubitRef]) -> list[Gate]:
    from .synthesis.network import gray_synthesize_diagonal  # circular at import time

    m = len(qubits)
    phis = [0.0] * (1 << m)
    phis[-1] = math.pi
    return list(gray_synthesize_diagonal(phis, list(qubits)).gates)


def _lower_gate(g: Gate) -> list[Gate]:
    if g.is_primitive:
        return [g]
    if g.kind == "mcx":
        *ctrls, t = g.qubits
        if not ctrls:
            return [x(t)]
        if len(ctrls) == 1:
            return [cx(ctrls[0], t)]
        if len(ctrls) == 2:
            return _toffoli(ctrls[0], ctrls[1], t)
        return [h(t), *_mcz_by_phase_synthesis([*ctrls, t]), h(t)]
    # mcz
    qs = g.qubits
    if len(qs) == 1:
        return [rz(qs[0], math.pi)]
    if len(qs) == 2:
        return [h(qs[1]), cx(qs[0], qs[1]), h(qs[1])]
    if len(qs) == 3:
        # CCZ is the Toffoli without the two H gates on its target
        return [g for g in _toffoli(qs[0], qs[1], qs[2]) if g.kind != "h"]
    return _mcz_by_phase_synthesis(qs)


def lower(circuit: Circuit) -> Circuit:
    """Rewrite composite gates into the primitive set {h, x, rz, cx}.

    The result is unitarily equivalent to the input up to global phase.
    Circuits without composite gates come back unchanged.
    """
    if circuit.is_lowered:
        return circuit
    out: list[Gate] = []
    for g in circuit.gates:
        out.extend(_lower_gate(g))
    return Circuit(circuit.layout, out)


def inverse(circuit: Circuit) -> Circuit:
    """Reverse gate order and invert each gate (only RZ changes)."""
    return Circuit(circuit.layout, [g.inverse() for g in reversed(circuit.gates)])


# --------------------------------------------------------------------------- metrics


@dataclass(frozen=True)
class GateMetrics:
    cnot_count: int
    u_count: int
    tm_histogram: dict[int, int]
    t_order: int
    qubit_count: int

    @property
    def tm_total(self) -> int:
        return sum(self.tm_histogram.values())

    def __add__(self, other: "GateMetrics") -> "GateMetrics":
        hist = Counter(self.tm_histogram)
        hist.update(other.tm_histogram)
        return GateMetrics(
            self.cnot_count + other.cnot_count,
            self.u_count + other.u_count,
            dict(hist),
            max(self.t_order, other.t_order),
            max(self.qubit_count, other.qubit_count),
        )


def dyadic_decomposition(theta: float) -> tuple[int, int]:
    """Write ``theta`` as ``pi * a / 2**m`` with ``a`` odd, ``m`` minimal.

    Returns ``(a, m)``; ``(0, 0)`` for a zero angle.

    Raises:
        NonDyadicAngleError: no ``m <= 40`` fits within 1e-9.
    """
    if not math.isfinite(theta):
        raise NonDyadicAngleError(f"angle {theta!r} is not finite")
    t = normalize_angle(theta)
    if abs(t) <= DYADIC_TOL:
        return 0, 0
    for m in range(DYADIC_MAX_M + 1):
        a = round(t * (1 << m) / math.pi)
        if a != 0 and abs(t - math.pi * a / (1 << m)) <= DYADIC_TOL:
            return a, m
    raise NonDyadicAngleError(f"angle {theta!r} is not a dyadic multiple of pi")


def tm_contributions(theta: float) -> Counter:
    """T_m gates needed for one RZ: each set bit j of |a| adds one T_(m-j)."""
    a, m = dyadic_decomposition(theta)
    a = abs(a)
    out: Counter = Counter()
    j = 0
    while a:
        if a & 1:
            out[m - j] += 1
        a >>= 1
        j += 1
    return out


def metrics(circuit: Circuit) -> GateMetrics:
    """Gate counts for a lowered circuit.

    Raises:
        MustLowerError: the circuit still contains composite gates.
        NonDyadicAngleError: an RZ angle is not of the form pi*a/2^m.
    """
    cnots = singles = 0
    hist: Counter = Counter()
    for g in circuit.gates:
        if g.kind == "cx":
            cnots += 1
        elif g.kind in ("h", "x", "rz"):
            singles += 1
            if g.kind == "rz":
                hist.update(tm_contributions(g.angle))
        else:
            raise MustLowerError(f"metrics needs a lowered circuit, found {g.kind}")
    return GateMetrics(
        cnot_count=cnots,
        u_count=singles,
        tm_histogram=dict(sorted(hist.items())),
        t_order=max(hist) if hist else 0,
        qubit_count=circuit.num_qubits,
    )


# --------------------------------------------------------------------------- serialization


def _circuit_to_dict(circuit: Circuit) -> dict:
    gates = []
    for g in circuit.gates:
        d = {"kind": g.kind, "qubits": [[q.register, q.index] for q in g.qubits]}
        if g.angle is not None:
            d["angle"] = g.angle
        gates.append(d)
    return {
        "registers": [{"name": r.name, "size": r.size} for r in circuit.layout],
        "gates": gates,
    }


def _circuit_to_qasm(circuit: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    lines += [f"qreg {r.name}[{r.size}];" for r in circuit.layout if r.size]
    for g in circuit.gates:
        if not g.is_primitive:
            raise MustLowerError(f"qasm2 export needs a lowered circuit, found {g.kind}")
        ops = ",".join(f"{q.register}[{q.index}]" for q in g.qubits)
        if g.kind == "rz":
            lines.append(f"rz({g.angle!r}) {ops};")
        else:
            lines.append(f"{g.kind} {ops};")
    return "\n".join(lines) + "\n"


def export(circuit: Circuit, format: str = "json") -> bytes:
    """Serialize a circuit as ``json`` or ``qasm2`` bytes."""
    if format == "json":
        return json.dumps(_circuit_to_dict(circuit), indent=1).encode()
    if format == "qasm2":
        return _circuit_to_qasm(circuit).encode()
    raise ValueError(f"unknown export format {format!r}")


def import_circuit(data: bytes | str | dict) -> Circuit:
    """Inverse of ``export(..., "json")``."""
    if isinstance(data, (bytes, str)):
        data = json.loads(data)
    layout = [Register(r["name"], int(r["size"])) for r in data["registers"]]
    gates = [
        Gate(d["kind"], tuple(QubitRef(r, int(i)) for r, i in d["qubits"]), d.get("angle"))
        for d in data["gates"]
    ]
    return Circuit(layout, gates)
