"""
Reader and writer for the parenthesised formula language.

    expr := var | const | "(not " expr ")" | "(and " expr+ ")" | "(or " expr+ ")"
          | "(tbl" ARITY " " TABLE " " expr{ARITY} ")"
          | "(mv" ARITY " " GATENAME " " expr{ARITY} ")"
          | "(dnf" ARITY " " TERMS " " expr{ARITY} ")"
    var  := "x" NONNEG-INT

``;`` starts a comment running to the end of the line. TABLE digits are symbol
indices of the formula alphabet. TERMS is ``0,1|0,2|1,2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from rof.errors import AlphabetMismatch, ArityError, FormulaSyntaxError
from rof.formula.builder import Node, build_formula
from rof.models import BOOLEAN, Alphabet, Formula, Gate, GateKind

_VAR_RE = re.compile(r"^x(\d+)$")
_HEAD_RE = re.compile(r"^(tbl|mv|dnf)(\d+)$")

Token = Tuple[str, int]


def _skip_whitespace(text: str, pos: int) -> int:
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
        elif ch == ";":
            while pos < len(text) and text[pos] != "\n":
                pos += 1
        else:
            break
    return pos


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = _skip_whitespace(text, 0)
    while pos < len(text):
        ch = text[pos]
        if ch in "()":
            tokens.append((ch, pos))
            pos += 1
        else:
            start = pos
            while pos < len(text) and not text[pos].isspace() and text[pos] not in "();":
                pos += 1
            tokens.append((text[start:pos], start))
        pos = _skip_whitespace(text, pos)
    return tokens


@dataclass
class _Frame:
    gate: Gate
    node: Node
    pos: int


def _detect_alphabet(tokens: List[Token]) -> Alphabet:
    from rof.lowerbound.gates import builtin_gate

    found: Optional[Alphabet] = None
    for i, (tok, pos) in enumerate(tokens):
        m = _HEAD_RE.match(tok)
        if m and m.group(1) == "mv" and i + 1 < len(tokens):
            name = tokens[i + 1][0]
            try:
                alphabet, _, _ = builtin_gate(name)
            except ValueError as e:
                raise FormulaSyntaxError(str(e), tokens[i + 1][1]) from None
            if found is not None and found != alphabet:
                raise AlphabetMismatch("bal4 and bal5 gates cannot be mixed in one formula")
            found = alphabet
    return found or BOOLEAN


def _parse_leaf(tok: str, pos: int, alphabet: Alphabet) -> Gate:
    m = _VAR_RE.match(tok)
    if m:
        return Gate.variable(int(m.group(1)))
    if tok in alphabet.symbols:
        return Gate.constant(alphabet.index(tok))
    raise FormulaSyntaxError(f"unexpected token {tok!r}", pos)


def _parse_table(tok: str, pos: int, arity: int, alphabet: Alphabet) -> Tuple[int, ...]:
    if not tok.isdigit():
        raise FormulaSyntaxError(f"table must be a digit string, got {tok!r}", pos)
    table = tuple(int(ch) for ch in tok)
    if any(d >= alphabet.size for d in table):
        raise FormulaSyntaxError(f"table digit outside alphabet of size {alphabet.size}", pos)
    if len(table) != alphabet.size ** arity:
        raise ArityError(
            f"table for arity {arity} needs {alphabet.size ** arity} digits, got {len(table)}"
            f" (at offset {pos})"
        )
    return table


def _parse_terms(tok: str, pos: int, arity: int) -> Gate:
    try:
        terms = [frozenset(int(p) for p in part.split(",")) for part in tok.split("|")]
    except ValueError:
        raise FormulaSyntaxError(f"malformed mDNF terms {tok!r}", pos) from None
    return Gate.mdnf(arity, terms)


def _parse_head(tokens: List[Token], i: int, alphabet: Alphabet) -> Tuple[Gate, int]:
    """Parse the head after ``(``; returns the gate and the next token index."""
    if i >= len(tokens):
        raise FormulaSyntaxError("unexpected end of input after '('", tokens[-1][1])
    tok, pos = tokens[i]
    if tok == "not":
        return Gate.not_(), i + 1
    if tok == "and":
        return Gate.and_(0), i + 1
    if tok == "or":
        return Gate.or_(0), i + 1
    m = _HEAD_RE.match(tok)
    if not m:
        raise FormulaSyntaxError(f"unknown operator {tok!r}", pos)
    arity = int(m.group(2))
    if i + 1 >= len(tokens) or tokens[i + 1][0] in "()":
        raise FormulaSyntaxError(f"{tok} expects a parameter", pos)
    param, ppos = tokens[i + 1]
    if m.group(1) == "tbl":
        return Gate.tbl(arity, _parse_table(param, ppos, arity, alphabet)), i + 2
    if m.group(1) == "dnf":
        return _parse_terms(param, ppos, arity), i + 2
    from rof.lowerbound.gates import builtin_gate

    _, gate_arity, table = builtin_gate(param)
    if arity != gate_arity:
        raise ArityError(f"{param} has arity {gate_arity}, not {arity} (at offset {pos})")
    return Gate.multi(param, arity, table), i + 2


def _close(frame: _Frame) -> Node:
    gate = frame.gate
    n = len(frame.node.children)
    if gate.kind in (GateKind.AND, GateKind.OR):
        if n == 0:
            raise FormulaSyntaxError(f"{gate.kind.value} needs at least one argument", frame.pos)
        gate = Gate(gate.kind, arity=n)
    elif gate.kind is GateKind.NOT:
        if n != 1:
            raise FormulaSyntaxError("not takes exactly one argument", frame.pos)
        child = frame.node.children[0]
        if child.gate.kind is GateKind.VARIABLE:
            return Node(Gate.negated(child.gate.var))
    elif n != gate.arity:
        raise ArityError(
            f"{gate.kind.value}{gate.arity} got {n} arguments (at offset {frame.pos})"
        )
    frame.node.gate = gate
    return frame.node


def parse_formula(text: str, n_vars: Optional[int] = None) -> Formula:
    """Parse formula source text into a preorder-numbered Formula."""
    tokens = tokenize(text)
    if not tokens:
        raise FormulaSyntaxError("empty formula", 0)
    alphabet = _detect_alphabet(tokens)

    stack: List[_Frame] = []
    result: Optional[Node] = None
    i = 0
    while i < len(tokens):
        tok, pos = tokens[i]
        if result is not None:
            raise FormulaSyntaxError(f"trailing input {tok!r}", pos)
        if tok == "(":
            gate, i = _parse_head(tokens, i + 1, alphabet)
            stack.append(_Frame(gate, Node(gate), pos))
            continue
        if tok == ")":
            if not stack:
                raise FormulaSyntaxError("unbalanced ')'", pos)
            node = _close(stack.pop())
        else:
            node = Node(_parse_leaf(tok, pos, alphabet))
        if stack:
            stack[-1].node.children.append(node)
        else:
            result = node
        i += 1
    if stack:
        raise FormulaSyntaxError("unclosed '('", stack[-1].pos)
    assert result is not None
    return build_formula(result, alphabet, n_vars)


def serialize(f: Formula, v: Optional[int] = None) -> str:
    """Write the subtree at ``v`` (default: root) in the formula language."""
    out: List[str] = []
    stack: List[Tuple[bool, object]] = [(False, f.root if v is None else v)]
    while stack:
        is_text, item = stack.pop()
        if is_text:
            out.append(item)  # type: ignore[arg-type]
            continue
        u = item  # type: ignore[assignment]
        gate = f.gate(u)  # type: ignore[arg-type]
        kind = gate.kind
        if kind is GateKind.VARIABLE:
            out.append(f"x{gate.var}")
            continue
        if kind is GateKind.NEGATED:
            out.append(f"(not x{gate.var})")
            continue
        if kind is GateKind.CONSTANT:
            out.append(f.alphabet.symbol(gate.symbol))
            continue
        if kind is GateKind.TABLE:
            head = f"(tbl{gate.arity} " + "".join(str(d) for d in gate.table)
        elif kind is GateKind.MULTI:
            head = f"(mv{gate.arity} {gate.name}"
        elif kind is GateKind.MDNF:
            terms = "|".join(",".join(str(p) for p in sorted(t)) for t in gate.terms)
            head = f"(dnf{gate.arity} {terms}"
        else:
            head = f"({kind.value}"
        stack.append((True, ")"))
        for c in reversed(f.children(u)):  # type: ignore[arg-type]
            stack.append((False, c))
            stack.append((True, " "))
        stack.append((True, head))
    return "".join(out)
