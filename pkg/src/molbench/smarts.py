"""Query-pattern language subset and subgraph matcher.

Supported atom primitives: element symbols (aliphatic uppercase, aromatic
lowercase, two-letter halogens), #n atomic numbers, ``*`` wildcards, ``a``/
``A`` aromaticity, ring membership (R, Rn), total hydrogen count (Hn), total
connection count (Xn), formal charge and single-level recursive patterns
``$(...)``.  Bond primitives: ``- = # : ~`` plus the implicit
single-or-aromatic default.  Expressions combine with ``!`` (not), ``&`` or
juxtaposition (strong and), ``,`` (or) and ``;`` (weak and).

Stereo marks, isotopes, atom maps and component grouping are rejected with
:class:`UnsupportedPatternFeatureError`; shipped filter banks strip stereo
from patterns before compiling, so matching is constitution-level.

A pattern containing explicit ``[H]`` atoms is matched against the
hydrogen-expanded copy of the molecule, so wildcards at substitution sites
also accept implicit hydrogens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .elements import SYMBOL_BY_NUMBER
from .molgraph import Molecule

_AROMATIC_ELEMENTS = {"b": "B", "c": "C", "n": "N", "o": "O", "p": "P", "s": "S"}
_TWO_LETTER = ("Cl", "Br", "Si", "Sn")
_UPPER_ELEMENTS = "HBCNOPSFI"


class UnsupportedPatternFeatureError(ValueError):
    """Pattern uses a token outside the supported grammar subset."""


class PatternSyntaxError(ValueError):
    """Malformed pattern text."""


# Expression trees are nested tuples:
#   ("and", [e...]) ("or", [e...]) ("not", e) ("prim", kind, value)


@dataclass
class PatternGraph:
    """Compiled query graph."""

    text: str
    atoms: list  # expression tree per query atom
    bonds: list[tuple[int, int, tuple]]  # (a, b, bond expression)
    needs_explicit_h: bool = False

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)


def compile_pattern(text: str) -> PatternGraph:
    """Compile pattern ``text``; the query graph must be connected."""
    if not text or not text.strip():
        raise PatternSyntaxError("empty pattern")
    parser = _PatternParser(text.strip())
    pattern = parser.parse()
    _check_connected(pattern)
    return pattern


def _check_connected(pattern: PatternGraph) -> None:
    n = pattern.n_atoms
    if n == 0:
        raise PatternSyntaxError("pattern has no atoms")
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for a, b, _ in pattern.bonds:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        cur = stack.pop()
        for nbr in adj[cur]:
            if nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    if len(seen) != n:
        raise UnsupportedPatternFeatureError(
            "disconnected pattern (component-level grouping is unsupported)"
        )


_BOND_CHARS = set("-=#:~")
_BOND_EXPR_CHARS = _BOND_CHARS | set("!&,;")


class _PatternParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.atoms: list = []
        self.bonds: list[tuple[int, int, tuple]] = []
        self.needs_explicit_h = False

    def parse(self) -> PatternGraph:
        prev: Optional[int] = None
        pending: Optional[tuple] = None
        stack: list[int] = []
        ring_open: dict[int, tuple[int, Optional[tuple]]] = {}
        text = self.text

        def add_atom(expr) -> None:
            nonlocal prev, pending
            self.atoms.append(expr)
            idx = len(self.atoms) - 1
            if prev is not None:
                self.bonds.append((prev, idx, pending if pending else ("prim", "default", None)))
            elif pending is not None:
                raise PatternSyntaxError("bond with no preceding atom")
            prev = idx
            pending = None

        def close_ring(number: int) -> None:
            nonlocal pending
            if prev is None:
                raise PatternSyntaxError("ring closure before any atom")
            if number in ring_open:
                other, other_expr = ring_open.pop(number)
                expr = pending if pending is not None else other_expr
                self.bonds.append(
                    (other, prev, expr if expr else ("prim", "default", None))
                )
                pending = None
            else:
                ring_open[number] = (prev, pending)
                pending = None

        while self.pos < len(text):
            ch = text[self.pos]
            if ch == "[":
                end = self._find_bracket_end(self.pos)
                body = text[self.pos + 1 : end]
                expr, is_h = _parse_atom_expr(body)
                if is_h:
                    self.needs_explicit_h = True
                add_atom(expr)
                self.pos = end + 1
            elif ch == "(":
                if prev is None:
                    raise PatternSyntaxError("branch before any atom")
                stack.append(prev)
                self.pos += 1
            elif ch == ")":
                if not stack:
                    raise PatternSyntaxError("unmatched ')'")
                prev = stack.pop()
                self.pos += 1
            elif ch in _BOND_EXPR_CHARS:
                if pending is not None:
                    raise PatternSyntaxError("two bond expressions in a row")
                pending = self._parse_bond_expr()
            elif ch.isdigit():
                close_ring(int(ch))
                self.pos += 1
            elif ch == "%":
                if self.pos + 2 >= len(text) or not text[self.pos + 1 : self.pos + 3].isdigit():
                    raise PatternSyntaxError("'%' ring closure needs two digits")
                close_ring(int(text[self.pos + 1 : self.pos + 3]))
                self.pos += 3
            elif ch == "*":
                add_atom(("prim", "any", None))
                self.pos += 1
            elif ch == ".":
                raise UnsupportedPatternFeatureError("component grouping ('.')")
            elif ch in ("/", "\\", "@"):
                raise UnsupportedPatternFeatureError(f"stereo mark {ch!r}")
            else:
                matched = False
                for sym in _TWO_LETTER:
                    if text.startswith(sym, self.pos):
                        add_atom(("and", [("prim", "element", sym), ("prim", "aromatic", False)]))
                        self.pos += 2
                        matched = True
                        break
                if matched:
                    continue
                if ch in _UPPER_ELEMENTS:
                    add_atom(("and", [("prim", "element", ch), ("prim", "aromatic", False)]))
                    self.pos += 1
                elif ch in _AROMATIC_ELEMENTS:
                    add_atom(
                        ("and", [("prim", "element", _AROMATIC_ELEMENTS[ch]), ("prim", "aromatic", True)])
                    )
                    self.pos += 1
                elif ch == "a":
                    add_atom(("prim", "aromatic", True))
                    self.pos += 1
                elif ch == "A":
                    add_atom(("prim", "aromatic", False))
                    self.pos += 1
                else:
                    raise PatternSyntaxError(f"unexpected character {ch!r} at {self.pos}")

        if stack:
            raise PatternSyntaxError("unmatched '('")
        if ring_open:
            raise PatternSyntaxError(f"unclosed ring closures: {sorted(ring_open)}")
        if pending is not None:
            raise PatternSyntaxError("dangling bond at end of pattern")
        return PatternGraph(self.text, self.atoms, self.bonds, self.needs_explicit_h)

    def _find_bracket_end(self, start: int) -> int:
        # Brackets may nest through $(...) recursion.
        depth = 0
        i = start
        text = self.text
        while i < len(text):
            if text[i] == "[":
                depth += 1
            elif text[i] == "]":
                depth -= 1
                if depth == 0:
                    return i
            elif text[i] == "(" and i > start and text[i - 1] == "$":
                close = _matching_paren(text, i)
                i = close
            i += 1
        raise PatternSyntaxError("unterminated bracket atom")

    def _parse_bond_expr(self) -> tuple:
        text = self.text
        start = self.pos
        # Consume the contiguous bond-expression span, stopping before digits
        # (ring closures bind to the expression) and atoms.
        end = start
        while end < len(text) and text[end] in _BOND_EXPR_CHARS:
            end += 1
        span = text[start:end]
        self.pos = end
        return _parse_bond_span(span)


def _matching_paren(text: str, open_idx: int) -> int:
    depth = 0
    for i in range(open_idx, len(text)):
        if text[i] == "(":
            depth += 1
        elif text[i] == ")":
            depth -= 1
            if depth == 0:
                return i
    raise PatternSyntaxError("unterminated '(' in recursive pattern")


def _parse_bond_span(span: str) -> tuple:
    """Parse a bond expression with ;/,/&/! precedence."""

    def parse_weak(s: str) -> tuple:
        parts = s.split(";")
        exprs = [parse_or(p) for p in parts if p != ""]
        if not exprs:
            raise PatternSyntaxError("empty bond expression")
        return exprs[0] if len(exprs) == 1 else ("and", exprs)

    def parse_or(s: str) -> tuple:
        parts = s.split(",")
        exprs = [parse_and(p) for p in parts if p != ""]
        if not exprs:
            raise PatternSyntaxError("empty bond alternative")
        return exprs[0] if len(exprs) == 1 else ("or", exprs)

    def parse_and(s: str) -> tuple:
        exprs = []
        i = 0
        while i < len(s):
            if s[i] == "&":
                i += 1
                continue
            negate = False
            while i < len(s) and s[i] == "!":
                negate = not negate
                i += 1
            if i >= len(s) or s[i] not in _BOND_CHARS:
                raise PatternSyntaxError(f"bad bond primitive in {s!r}")
            prim = ("prim", {"-": "single", "=": "double", "#": "triple",
                             ":": "aromatic", "~": "anybond"}[s[i]], None)
            exprs.append(("not", prim) if negate else prim)
            i += 1
        if not exprs:
            raise PatternSyntaxError("empty bond conjunction")
        return exprs[0] if len(exprs) == 1 else ("and", exprs)

    return parse_weak(span)


def _parse_atom_expr(body: str) -> tuple[tuple, bool]:
    """Parse a bracket atom body; returns (expression, is_explicit_hydrogen)."""
    if not body:
        raise PatternSyntaxError("empty bracket atom")
    if body == "H":
        return ("prim", "element", "H"), True

    def parse_weak(s: str):
        parts = _split_top(s, ";")
        exprs = [parse_or(p) for p in parts]
        return exprs[0] if len(exprs) == 1 else ("and", exprs)

    def parse_or(s: str):
        parts = _split_top(s, ",")
        exprs = [parse_and(p) for p in parts]
        return exprs[0] if len(exprs) == 1 else ("or", exprs)

    def parse_and(s: str):
        exprs = []
        i = 0
        first = True
        while i < len(s):
            if s[i] == "&":
                i += 1
                continue
            negate = False
            while i < len(s) and s[i] == "!":
                negate = not negate
                i += 1
            prim, i = _parse_primitive(s, i, first_primitive=first and not negate)
            first = False
            exprs.append(("not", prim) if negate else prim)
        if not exprs:
            raise PatternSyntaxError(f"empty atom expression in [{body}]")
        return exprs[0] if len(exprs) == 1 else ("and", exprs)

    return parse_weak(body), False


def _split_top(s: str, sep: str) -> list[str]:
    """Split on ``sep`` outside $(...) groups."""
    parts = []
    depth = 0
    cur = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
        i += 1
    parts.append("".join(cur))
    return [p for p in parts if p != ""]


def _parse_primitive(s: str, i: int, first_primitive: bool) -> tuple[tuple, int]:
    ch = s[i]
    if ch == "*":
        return ("prim", "any", None), i + 1
    if ch == "$":
        if i + 1 >= len(s) or s[i + 1] != "(":
            raise PatternSyntaxError("'$' must introduce '$(...)'")
        close = _matching_paren(s, i + 1)
        inner = s[i + 2 : close]
        sub = compile_pattern(inner)
        if sub.needs_explicit_h:
            raise UnsupportedPatternFeatureError(
                "explicit hydrogens inside recursive patterns"
            )
        return ("prim", "recursive", sub), close + 1
    if ch == "@":
        raise UnsupportedPatternFeatureError("stereo mark '@'")
    if ch == "#":
        j = i + 1
        digits = ""
        while j < len(s) and s[j].isdigit():
            digits += s[j]
            j += 1
        if not digits:
            raise PatternSyntaxError("'#' needs an atomic number")
        number = int(digits)
        if number not in SYMBOL_BY_NUMBER:
            raise UnsupportedPatternFeatureError(f"atomic number {number}")
        return ("prim", "element", SYMBOL_BY_NUMBER[number]), j
    for sym in _TWO_LETTER:
        if s.startswith(sym, i):
            return ("and", [("prim", "element", sym), ("prim", "aromatic", False)]), i + 2
    if ch == "H":
        # Leading H is the hydrogen element; elsewhere it is an H-count test.
        j = i + 1
        digits = ""
        while j < len(s) and s[j].isdigit():
            digits += s[j]
            j += 1
        if first_primitive and i == 0 and not digits:
            raise PatternSyntaxError("bare [H...] combinations are not supported")
        return ("prim", "h_count", int(digits) if digits else 1), j
    if ch == "X":
        j = i + 1
        digits = ""
        while j < len(s) and s[j].isdigit():
            digits += s[j]
            j += 1
        if not digits:
            raise PatternSyntaxError("'X' needs a connection count")
        return ("prim", "connections", int(digits)), j
    if ch == "D":
        j = i + 1
        digits = ""
        while j < len(s) and s[j].isdigit():
            digits += s[j]
            j += 1
        if not digits:
            raise PatternSyntaxError("'D' needs a degree")
        return ("prim", "heavy_degree", int(digits)), j
    if ch == "R":
        j = i + 1
        digits = ""
        while j < len(s) and s[j].isdigit():
            digits += s[j]
            j += 1
        return ("prim", "ring_count", int(digits) if digits else None), j
    if ch == "r":
        raise UnsupportedPatternFeatureError("ring-size primitive 'r'")
    if ch in "+-":
        sign = 1 if ch == "+" else -1
        j = i + 1
        run = 1
        while j < len(s) and s[j] == ch:
            run += 1
            j += 1
        digits = ""
        while j < len(s) and s[j].isdigit():
            digits += s[j]
            j += 1
        charge = sign * int(digits) if digits else sign * run
        return ("prim", "charge", charge), j
    if ch == "a":
        return ("prim", "aromatic", True), i + 1
    if ch == "A":
        return ("prim", "aromatic", False), i + 1
    if ch in _UPPER_ELEMENTS:
        return ("and", [("prim", "element", ch), ("prim", "aromatic", False)]), i + 1
    if ch in _AROMATIC_ELEMENTS:
        return (
            ("and", [("prim", "element", _AROMATIC_ELEMENTS[ch]), ("prim", "aromatic", True)]),
            i + 1,
        )
    raise UnsupportedPatternFeatureError(f"atom primitive {ch!r}")


# -- evaluation -------------------------------------------------------------


def _h_count(mol: Molecule, i: int) -> int:
    explicit = sum(1 for nbr, _ in mol.neighbors(i) if mol.element(nbr) == "H")
    return mol.total_h(i) + explicit


def _eval_atom(expr, mol: Molecule, i: int) -> bool:
    tag = expr[0]
    if tag == "and":
        return all(_eval_atom(e, mol, i) for e in expr[1])
    if tag == "or":
        return any(_eval_atom(e, mol, i) for e in expr[1])
    if tag == "not":
        return not _eval_atom(expr[1], mol, i)
    kind, value = expr[1], expr[2]
    if kind == "any":
        return True
    if kind == "element":
        return mol.element(i) == value
    if kind == "aromatic":
        return mol.is_aromatic_atom(i) == value
    if kind == "charge":
        return mol.charge(i) == value
    if kind == "h_count":
        return _h_count(mol, i) == value
    if kind == "connections":
        return mol.degree(i) + mol.total_h(i) == value
    if kind == "heavy_degree":
        heavy = sum(1 for nbr, _ in mol.neighbors(i) if mol.element(nbr) != "H")
        return heavy == value
    if kind == "ring_count":
        count = mol.ring_count(i)
        return count >= 1 if value is None else count == value
    if kind == "recursive":
        return _match_rooted(mol, value, i)
    raise AssertionError(f"unknown primitive {kind}")


def atom_matches(pattern: PatternGraph, q: int, mol: Molecule, i: int) -> bool:
    """Public predicate evaluation; used by tests' brute-force oracle too."""
    return _eval_atom(pattern.atoms[q], mol, i)


def _eval_bond(expr, mol: Molecule, bidx: int) -> bool:
    tag = expr[0]
    if tag == "and":
        return all(_eval_bond(e, mol, bidx) for e in expr[1])
    if tag == "or":
        return any(_eval_bond(e, mol, bidx) for e in expr[1])
    if tag == "not":
        return not _eval_bond(expr[1], mol, bidx)
    kind = expr[1]
    aromatic = mol.is_aromatic_bond(bidx)
    order = mol.bond_order(bidx)
    if kind == "anybond":
        return True
    if kind == "single":
        return order == 1 and not aromatic
    if kind == "double":
        return order == 2 and not aromatic
    if kind == "triple":
        return order == 3
    if kind == "aromatic":
        return aromatic
    if kind == "default":
        return aromatic or order == 1
    raise AssertionError(f"unknown bond primitive {kind}")


def bond_matches(expr, mol: Molecule, bidx: int) -> bool:
    return _eval_bond(expr, mol, bidx)


def _match_order(pattern: PatternGraph):
    """Query atom visit order: BFS so each atom anchors to a mapped neighbor."""
    n = pattern.n_atoms
    adj: dict[int, list[tuple[int, tuple]]] = {i: [] for i in range(n)}
    for a, b, expr in pattern.bonds:
        adj[a].append((b, expr))
        adj[b].append((a, expr))
    order = [0]
    anchor: dict[int, Optional[int]] = {0: None}
    seen = {0}
    queue = [0]
    while queue:
        cur = queue.pop(0)
        for nbr, _ in adj[cur]:
            if nbr not in seen:
                seen.add(nbr)
                anchor[nbr] = cur
                order.append(nbr)
                queue.append(nbr)
    return order, anchor, adj


def _backtrack(
    target: Molecule,
    pattern: PatternGraph,
    order: Sequence[int],
    anchor: dict,
    adj: dict,
    root_candidates: Sequence[int],
) -> bool:
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        q = order[k]
        if anchor[q] is None:
            candidates = root_candidates
        else:
            candidates = [nbr for nbr, _ in target.neighbors(mapping[anchor[q]])]
        for t in candidates:
            if t in used or not _eval_atom(pattern.atoms[q], target, t):
                continue
            ok = True
            for qn, expr in adj[q]:
                if qn in mapping:
                    bidx = target.bond_between(t, mapping[qn])
                    if bidx is None or not _eval_bond(expr, target, bidx):
                        ok = False
                        break
            if not ok:
                continue
            mapping[q] = t
            used.add(t)
            if extend(k + 1):
                return True
            del mapping[q]
            used.discard(t)
        return False

    return extend(0)


def _match_rooted(mol: Molecule, pattern: PatternGraph, root: int) -> bool:
    order, anchor, adj = _match_order(pattern)
    return _backtrack(mol, pattern, order, anchor, adj, [root])


def has_match(mol: Molecule, pattern: PatternGraph) -> bool:
    """True iff some subgraph of ``mol`` satisfies every pattern predicate."""
    target = mol.with_explicit_h() if pattern.needs_explicit_h else mol
    if pattern.n_atoms > target.n_atoms:
        return False
    order, anchor, adj = _match_order(pattern)
    return _backtrack(target, pattern, order, anchor, adj, range(target.n_atoms))
