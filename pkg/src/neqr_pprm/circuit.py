"""NEQR gate lists, MCNOT cost models and OpenQASM 3 text export.

Every data gate of an NEQR circuit is a multi-controlled X on one grayscale
qubit. A gate is stored as a pair of control masks over the ``m = 2n``
coordinate variables: ``positive`` (control on |1>) and ``negative``
(control on |0>). Variable ``x_i`` is coordinate qubit ``coord[i]``; the
low ``n`` variables carry X, the high ``n`` carry Y.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

import numpy as np

from .bitplane import ImagePlanes
from .rm_transform import pprm_forward


class NegativeControlCount(ValueError):
    pass


class QasmParseError(ValueError):
    pass


class CostModel(enum.Enum):
    PLAIN = "plain"  # ancilla-free MCNOT, 3*2^m - 4
    RESET = "reset"  # MCNOT with two reset ancillas, 19m - 32


class Form(enum.Enum):
    ESOP = "esop"
    PPRM = "pprm"


def qc_gate(m_controls: int, model: CostModel) -> int:
    """Quantum cost of one X gate with ``m_controls`` controls."""
    if m_controls < 0:
        raise NegativeControlCount(f"control count must be >= 0, got {m_controls}")
    if m_controls <= 1:
        return 1
    if model is CostModel.PLAIN:
        return 3 * (1 << m_controls) - 4
    return 19 * m_controls - 32


@dataclass(frozen=True)
class ProductTerm:
    positive_mask: int
    negative_mask: int = 0

    def __post_init__(self):
        if self.positive_mask < 0 or self.negative_mask < 0:
            raise ValueError("masks must be non-negative")
        if self.positive_mask & self.negative_mask:
            raise ValueError("a variable cannot be both a positive and a negative control")

    @property
    def controls(self) -> int:
        return (self.positive_mask | self.negative_mask).bit_count()

    def matches(self, assignment: int) -> bool:
        return (assignment & self.positive_mask) == self.positive_mask and not (
            assignment & self.negative_mask
        )


def _masks(values) -> np.ndarray:
    return np.array(values, dtype=np.uint64).reshape(-1)


@dataclass(frozen=True, eq=False)
class Circuit:
    """Per-plane gate lists; gates are held as ascending (positive, negative) mask arrays."""

    n: int
    q: int
    form: Form
    positive: tuple[np.ndarray, ...]
    negative: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.positive) != self.q or len(self.negative) != self.q:
            raise ValueError(f"expected {self.q} gate lists")
        full = np.uint64((1 << self.m) - 1)
        pos_all, neg_all = [], []
        for pos, neg in zip(self.positive, self.negative):
            pos, neg = _masks(pos), _masks(neg)
            if pos.shape != neg.shape:
                raise ValueError("positive and negative mask arrays differ in length")
            if np.any((pos | neg) & ~full):
                raise ValueError(f"control mask exceeds {self.m} coordinate variables")
            if np.any(pos & neg):
                raise ValueError("overlapping positive and negative controls")
            if pos.size > 1 and not np.all(
                (pos[1:] > pos[:-1]) | ((pos[1:] == pos[:-1]) & (neg[1:] >= neg[:-1]))
            ):
                order = np.lexsort((neg, pos))
                pos, neg = pos[order], neg[order]
            if self.form is Form.ESOP and np.any((pos | neg) != full):
                raise ValueError("ESOP gates must be full-polarity minterms")
            if self.form is Form.PPRM:
                if np.any(neg):
                    raise ValueError("PPRM gates take positive controls only")
                if pos.size > 1 and np.any(pos[1:] == pos[:-1]):
                    raise ValueError("PPRM product terms must be distinct within a plane")
            pos.flags.writeable = False
            neg.flags.writeable = False
            pos_all.append(pos)
            neg_all.append(neg)
        object.__setattr__(self, "positive", tuple(pos_all))
        object.__setattr__(self, "negative", tuple(neg_all))

    @property
    def m(self) -> int:
        return 2 * self.n

    def gates(self, plane: int) -> list[ProductTerm]:
        return [
            ProductTerm(int(p), int(g))
            for p, g in zip(self.positive[plane].tolist(), self.negative[plane].tolist())
        ]

    def gate_counts(self) -> list[int]:
        return [int(p.size) for p in self.positive]

    @property
    def gate_count(self) -> int:
        return sum(self.gate_counts())

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            (self.n, self.q, self.form) == (other.n, other.q, other.form)
            and all(np.array_equal(a, b) for a, b in zip(self.positive, other.positive))
            and all(np.array_equal(a, b) for a, b in zip(self.negative, other.negative))
        )


def synthesize_esop(planes: ImagePlanes) -> Circuit:
    """One fully-controlled X per set minterm (the unoptimised NEQR circuit)."""
    full = np.uint64((1 << planes.m) - 1)
    pos = tuple(p.support() for p in planes.planes)
    neg = tuple(~k & full for k in pos)
    return Circuit(planes.n, planes.q, Form.ESOP, pos, neg)


def synthesize_pprm(planes: ImagePlanes) -> Circuit:
    """One positive-control X per nonzero Reed-Muller coefficient."""
    pos = tuple(pprm_forward(p).support() for p in planes.planes)
    neg = tuple(np.zeros_like(k) for k in pos)
    return Circuit(planes.n, planes.q, Form.PPRM, pos, neg)


def cost_of_control_counts(counts: np.ndarray, model: CostModel) -> int:
    """Exact total cost of gates with the given control counts."""
    hist = np.bincount(np.asarray(counts, dtype=np.int64), minlength=1)
    return sum(int(c) * qc_gate(k, model) for k, c in enumerate(hist.tolist()) if c)


def circuit_cost(c: Circuit, model: CostModel, count_polarity_x: bool = False) -> int:
    """Sum of per-gate costs.

    With ``count_polarity_x`` each negative control adds two X gates
    (conjugation around the MCNOT).
    """
    total = 0
    for pos, neg in zip(c.positive, c.negative):
        total += cost_of_control_counts(np.bitwise_count(pos | neg), model)
        if count_polarity_x:
            total += 2 * int(np.bitwise_count(neg).sum())
    return total


# --- OpenQASM 3 ---------------------------------------------------------------

QASM_HEADER = 'OPENQASM 3.0;\ninclude "stdgates.inc";\n'


def _gate_line(pos: int, neg: int, m: int, target: int) -> str:
    negs = [i for i in reversed(range(m)) if neg >> i & 1]
    poss = [i for i in reversed(range(m)) if pos >> i & 1]
    mods = []
    if negs:
        mods.append("negctrl @ " if len(negs) == 1 else f"negctrl({len(negs)}) @ ")
    if poss:
        mods.append("ctrl @ " if len(poss) == 1 else f"ctrl({len(poss)}) @ ")
    args = [f"coord[{i}]" for i in negs + poss] + [f"gray[{target}]"]
    return f"{''.join(mods)}x {', '.join(args)};"


def export_qasm(c: Circuit) -> str:
    """Render ``c`` as OpenQASM 3 text.

    Layout: header, a ``// neqr`` comment carrying form and sizes, the
    ``coord`` and ``gray`` registers, one ``h`` per coordinate qubit, then
    gates plane by plane in ascending mask order. Negative controls come
    first as ``negctrl`` arguments, each group in descending qubit index.
    """
    m = c.m
    lines = [
        QASM_HEADER.rstrip("\n"),
        f"// neqr form={c.form.value} n={c.n} q={c.q}",
        f"// coord[i] = x_i; coord[0..{c.n - 1}] = X bits, coord[{c.n}..{m - 1}] = Y bits",
        f"qubit[{m}] coord;",
        f"qubit[{c.q}] gray;",
    ]
    lines += [f"h coord[{i}];" for i in range(m)]
    for plane in range(c.q):
        for p, g in zip(c.positive[plane].tolist(), c.negative[plane].tolist()):
            lines.append(_gate_line(p, g, m, plane))
    return "\n".join(lines) + "\n"


_META = re.compile(r"^// neqr form=(esop|pprm) n=(\d+) q=(\d+)$")
_GATE = re.compile(
    r"^(?P<neg>negctrl(?:\((?P<nneg>\d+)\))? @ )?"
    r"(?P<pos>ctrl(?:\((?P<npos>\d+)\))? @ )?"
    r"x (?P<args>(?:coord\[\d+\], )*)gray\[(?P<target>\d+)\];$"
)
_QUBIT = re.compile(r"coord\[(\d+)\]")


def parse_qasm(text: str) -> Circuit:
    """Read back text produced by :func:`export_qasm`."""
    meta = None
    gates: dict[int, list[tuple[int, int]]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        hit = _META.match(line)
        if hit:
            meta = (Form(hit[1]), int(hit[2]), int(hit[3]))
            continue
        if line.startswith(("//", "OPENQASM", "include", "qubit", "h ")):
            continue
        hit = _GATE.match(line)
        if not hit:
            raise QasmParseError(f"line {lineno}: unrecognised statement {line!r}")
        n_neg = int(hit["nneg"] or 1) if hit["neg"] else 0
        n_pos = int(hit["npos"] or 1) if hit["pos"] else 0
        controls = [int(i) for i in _QUBIT.findall(hit["args"])]
        if len(controls) != n_neg + n_pos or len(set(controls)) != len(controls):
            raise QasmParseError(f"line {lineno}: control list does not match modifiers")
        pos = sum(1 << i for i in controls[n_neg:])
        neg = sum(1 << i for i in controls[:n_neg])
        gates.setdefault(int(hit["target"]), []).append((pos, neg))
    if meta is None:
        raise QasmParseError("missing '// neqr form=... n=... q=...' line")
    form, n, q = meta
    if any(t >= q for t in gates):
        raise QasmParseError(f"gate targets a grayscale qubit beyond gray[{q - 1}]")
    pos = tuple(np.array([g[0] for g in gates.get(i, [])], dtype=np.uint64) for i in range(q))
    neg = tuple(np.array([g[1] for g in gates.get(i, [])], dtype=np.uint64) for i in range(q))
    return Circuit(n, q, form, pos, neg)
