"""Reader and writer for a small OpenQASM 2 subset.

Supported statements::

    OPENQASM 2.0;  include "qelib1.inc";      (accepted and ignored)
    qreg q[n];  creg c[m];
    h|x|y|z q[i];  rx|ry|rz(expr) q[i];
    cx|cz|swap q[i],q[j];  cp(expr) q[i],q[j];
    unitary1(re,im,...) q[i];  unitary2(re,im,...) q[i],q[j];
    measure q[i] -> c[j];  measure q -> c;
    if(c==v) <gate>;  if(c[j]==v) <gate>;
    // line comments

``unitary1``/``unitary2`` carry explicit matrices as interleaved real and
imaginary parts in row-major order. ``if(c==v)`` is only accepted for
single-bit registers. Angle expressions may use numbers, ``pi``, ``+ - * /``
and parentheses.
"""

from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass

import numpy as np

from qcsim.circuit.ir import ARITY, Circuit, Gate, Measure, MeasureAll, Op


class QasmError(ValueError):
    """Parse failure; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


_GATE_NAMES = {
    "h": "H", "x": "X", "y": "Y", "z": "Z", "rx": "RX", "ry": "RY", "rz": "RZ",
    "cx": "CX", "cz": "CZ", "cp": "CP", "swap": "SWAP", "unitary1": "U1", "unitary2": "U2",
}
_QASM_NAMES = {v: k for k, v in _GATE_NAMES.items()}

_REG_RE = re.compile(r"^(qreg|creg)\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_IF_RE = re.compile(r"^if\s*\(\s*([A-Za-z_]\w*)\s*(?:\[\s*(\d+)\s*\])?\s*==\s*(\d+)\s*\)\s*(.+)$", re.S)
_MEASURE_RE = re.compile(r"^measure\s+(.+?)\s*->\s*(.+)$")
_GATE_RE = re.compile(r"^([A-Za-z_]\w*)\s*(?:\((.*)\))?\s+(.+)$", re.S)
_ARG_RE = re.compile(r"^([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _eval_expr(text: str, line: int) -> float:
    def walk(node: ast.AST) -> float:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](walk(node.operand))
        raise QasmError(f"unsupported expression {text!r}", line)

    try:
        return walk(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise QasmError(f"bad expression {text!r}: {exc}", line) from None


@dataclass
class _Reg:
    offset: int
    size: int


def _statements(text: str):
    """Yield ``(line_number, statement)`` with comments stripped."""
    line = 1
    buf: list[str] = []
    start = None
    for raw_line in text.splitlines():
        code = raw_line.split("//", 1)[0]
        for ch in code:
            if ch == ";":
                stmt = "".join(buf).strip()
                if stmt:
                    yield start, stmt
                elif start is not None or buf:
                    raise QasmError("empty statement", line)
                buf, start = [], None
            else:
                if start is None and not ch.isspace():
                    start = line
                buf.append(ch)
        buf.append("\n")
        line += 1
    if "".join(buf).strip():
        raise QasmError("missing ';' at end of statement", start)


def parse_qasm_subset(text: str, name: str = "qasm") -> Circuit:
    """Parse QASM-subset text into a :class:`Circuit`.

    Raises:
        QasmError: On unknown gates, malformed statements or references to
            undeclared registers. The message carries the line number.
    """
    qregs: dict[str, _Reg] = {}
    cregs: dict[str, _Reg] = {}
    n_q = n_c = 0
    ops: list[Op] = []

    def qubit(arg: str, line: int) -> int:
        m = _ARG_RE.match(arg.strip())
        if not m:
            raise QasmError(f"expected qubit reference like q[0], got {arg.strip()!r}", line)
        reg, idx = m.group(1), int(m.group(2))
        if reg not in qregs:
            raise QasmError(f"undeclared qreg {reg!r}", line)
        if idx >= qregs[reg].size:
            raise QasmError(f"index {idx} out of range for qreg {reg}[{qregs[reg].size}]", line)
        return qregs[reg].offset + idx

    def clbit(reg: str, idx: int, line: int) -> int:
        if reg not in cregs:
            raise QasmError(f"undeclared creg {reg!r}", line)
        if idx >= cregs[reg].size:
            raise QasmError(f"index {idx} out of range for creg {reg}[{cregs[reg].size}]", line)
        return cregs[reg].offset + idx

    def gate(stmt: str, line: int, condition: tuple[int, int] | None) -> Gate:
        m = _GATE_RE.match(stmt)
        if not m:
            raise QasmError(f"malformed statement {stmt!r}", line)
        qname, params, args = m.group(1), m.group(2), m.group(3)
        if qname not in _GATE_NAMES:
            raise QasmError(f"unknown gate {qname!r}", line)
        kind = _GATE_NAMES[qname]
        targets = tuple(qubit(a, line) for a in args.split(","))
        if len(targets) != ARITY[kind]:
            raise QasmError(f"{qname} takes {ARITY[kind]} qubit argument(s), got {len(targets)}", line)
        values = [_eval_expr(p, line) for p in params.split(",")] if params and params.strip() else []
        theta = unitary = None
        if kind in ("U1", "U2"):
            dim = 2 ** ARITY[kind]
            if len(values) != 2 * dim * dim:
                raise QasmError(f"{qname} needs {2 * dim * dim} parameters, got {len(values)}", line)
            pairs = np.asarray(values).reshape(dim * dim, 2)
            unitary = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(dim, dim)
        elif kind in ("RX", "RY", "RZ", "CP"):
            if len(values) != 1:
                raise QasmError(f"{qname} needs exactly one angle", line)
            theta = values[0]
        elif values or params is not None:
            raise QasmError(f"{qname} takes no parameters", line)
        try:
            return Gate(kind, targets, theta=theta, unitary=unitary, condition=condition)
        except ValueError as exc:
            raise QasmError(str(exc), line) from None

    for line, stmt in _statements(text):
        stmt = " ".join(stmt.split()) if not stmt.startswith("if") else stmt.strip()
        low = stmt.lower()
        if low.startswith("openqasm") or low.startswith("include"):
            continue
        if m := _REG_RE.match(stmt):
            kind, reg, size = m.group(1), m.group(2), int(m.group(3))
            if reg in qregs or reg in cregs:
                raise QasmError(f"register {reg!r} declared twice", line)
            if size < 1:
                raise QasmError(f"register {reg!r} must have positive size", line)
            if kind == "qreg":
                qregs[reg] = _Reg(n_q, size)
                n_q += size
            else:
                cregs[reg] = _Reg(n_c, size)
                n_c += size
            continue
        if m := _IF_RE.match(stmt):
            reg, idx, value = m.group(1), m.group(2), int(m.group(3))
            if reg not in cregs:
                raise QasmError(f"condition on undeclared creg {reg!r}", line)
            if idx is None and cregs[reg].size != 1:
                raise QasmError(f"if({reg}==v) needs a 1-bit register; use {reg}[k]", line)
            if value not in (0, 1):
                raise QasmError(f"condition value must be 0 or 1, got {value}", line)
            bit = clbit(reg, int(idx or 0), line)
            ops.append(gate(" ".join(m.group(4).split()), line, (bit, value)))
            continue
        if m := _MEASURE_RE.match(stmt):
            src, dst = m.group(1).strip(), m.group(2).strip()
            if src in qregs and dst in cregs:
                ops.append(MeasureAll())
                continue
            q = qubit(src, line)
            dm = _ARG_RE.match(dst)
            if not dm:
                raise QasmError(f"expected classical bit like c[0], got {dst!r}", line)
            ops.append(Measure(q, clbit(dm.group(1), int(dm.group(2)), line)))
            continue
        if not qregs:
            raise QasmError("gate before any qreg declaration", line)
        ops.append(gate(stmt, line, None))

    if not qregs:
        raise QasmError("no qreg declared")
    return Circuit(n_q, tuple(ops), n_clbits=n_c, name=name)


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_qasm(circuit: Circuit) -> str:
    """Write ``circuit`` in the subset read by :func:`parse_qasm_subset`."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.n_qubits}];"]
    has_measure_all = any(isinstance(op, MeasureAll) for op in circuit.ops)
    if circuit.n_clbits or has_measure_all:
        lines.append(f"creg c[{max(circuit.n_clbits, 1)}];")
    for op in circuit.ops:
        if isinstance(op, Measure):
            lines.append(f"measure q[{op.qubit}] -> c[{op.clbit}];")
            continue
        if isinstance(op, MeasureAll):
            lines.append("measure q -> c;")
            continue
        name = _QASM_NAMES[op.kind]
        if op.theta is not None:
            name += f"({_fmt(op.theta)})"
        elif op.unitary is not None:
            flat = op.unitary.reshape(-1)
            name += "(" + ",".join(f"{_fmt(z.real)},{_fmt(z.imag)}" for z in flat) + ")"
        args = ",".join(f"q[{t}]" for t in op.targets)
        prefix = f"if(c[{op.condition[0]}]=={op.condition[1]}) " if op.condition else ""
        lines.append(f"{prefix}{name} {args};")
    return "\n".join(lines) + "\n"
