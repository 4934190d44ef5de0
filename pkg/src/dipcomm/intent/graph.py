"""Rooted, labelled intent graphs in PENMAN notation.

A graph maps variables to concepts and carries role-labelled edges whose
targets are variables or :class:`Literal` constants. The empty graph (no
nodes, no root) stands for a message with no move-relevant content and is
written ``()``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

from dipcomm.errors import DanglingReference, DuplicateVariable, GraphSyntaxError, UnbalancedText


@dataclass(frozen=True, order=True)
class Literal:
    """A constant edge target such as ``"Brest"``, ``-`` or ``2``."""

    value: str
    quoted: bool = True

    def render(self) -> str:
        if not self.quoted:
            return self.value
        return '"' + self.value.replace("\\", "\\\\").replace('"', '\\"') + '"'


Target = Union[str, Literal]


class Edge(NamedTuple):
    source: str
    role: str
    target: Target


class Triple(NamedTuple):
    """One Smatch triple. ``kind`` is instance, attribute or relation."""

    kind: str
    source: str
    relation: str
    target: str


def _edge_key(e: Edge):
    t = e.target
    return (e.source, e.role, 1 if isinstance(t, Literal) else 0, t.render() if isinstance(t, Literal) else t)


@dataclass(frozen=True)
class IntentGraph:
    nodes: Mapping[str, str] = field(default_factory=dict)
    edges: tuple[Edge, ...] = ()
    root: str | None = None

    def __post_init__(self):
        nodes = dict(self.nodes)
        edges = tuple(sorted({Edge(*e) for e in self.edges}, key=_edge_key))
        object.__setattr__(self, "nodes", MappingProxyType(nodes))
        object.__setattr__(self, "edges", edges)
        if not nodes:
            if self.root is not None or edges:
                raise GraphSyntaxError("the empty graph has no root and no edges")
            return
        if self.root not in nodes:
            raise DanglingReference(f"root {self.root!r} is not a declared variable")
        for e in edges:
            if e.source not in nodes:
                raise DanglingReference(f"edge source {e.source!r} is not declared")
            if not isinstance(e.target, Literal) and e.target not in nodes:
                raise DanglingReference(f"edge target {e.target!r} is not declared")
            if not e.role or e.role.startswith(":"):
                raise GraphSyntaxError(f"bad role label {e.role!r}")
        seen = {self.root}
        stack = [self.root]
        adj: dict[str, set[str]] = {v: set() for v in nodes}
        for e in edges:
            if not isinstance(e.target, Literal):
                adj[e.source].add(e.target)
                adj[e.target].add(e.source)
        while stack:
            for n in adj[stack.pop()]:
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
        if len(seen) != len(nodes):
            raise GraphSyntaxError(f"nodes unreachable from root: {sorted(set(nodes) - seen)}")

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def empty(cls) -> "IntentGraph":
        return cls()

    @property
    def is_empty(self) -> bool:
        return not self.nodes

    def concept(self, var: str) -> str:
        return self.nodes[var]

    def out(self, var: str, role: str | None = None) -> list[Edge]:
        return [e for e in self.edges if e.source == var and (role is None or e.role == role)]

    def target(self, var: str, role: str) -> Target | None:
        for e in self.edges:
            if e.source == var and e.role == role:
                return e.target
        return None

    def incoming(self, var: str) -> list[Edge]:
        return [e for e in self.edges if e.target == var]

    def variables_with(self, concept: str) -> list[str]:
        return sorted(v for v, c in self.nodes.items() if c == concept)

    def name_of(self, var: str) -> str | None:
        """The joined ``:opN`` strings of ``var``'s ``:name`` node, if any."""
        n = self.target(var, "name")
        if n is None or isinstance(n, Literal):
            return n.value if isinstance(n, Literal) else None
        ops = sorted((e for e in self.out(n) if e.role.startswith("op") and isinstance(e.target, Literal)),
                     key=lambda e: _role_key(e.role))
        return " ".join(e.target.value for e in ops) or None

    def rename(self, mapping: Mapping[str, str]) -> "IntentGraph":
        def r(v):
            return mapping.get(v, v) if not isinstance(v, Literal) else v

        return IntentGraph({r(v): c for v, c in self.nodes.items()},
                           tuple(Edge(r(e.source), e.role, r(e.target)) for e in self.edges),
                           r(self.root) if self.root is not None else None)

    def __str__(self) -> str:
        return serialize_graph(self)


# -- triples -----------------------------------------------------------------------


def to_triples(g: IntentGraph) -> set[Triple]:
    """Instance, attribute and relation triples, plus ``(root, TOP, concept)``."""
    out: set[Triple] = set()
    if g.is_empty:
        return out
    for v, c in g.nodes.items():
        out.add(Triple("instance", v, "instance", c))
    for e in g.edges:
        if isinstance(e.target, Literal):
            out.add(Triple("attribute", e.source, e.role, e.target.value))
        else:
            out.add(Triple("relation", e.source, e.role, e.target))
    out.add(Triple("attribute", g.root, "TOP", g.nodes[g.root]))
    return out


# -- isomorphism ---------------------------------------------------------------------


def is_isomorphic(a: IntentGraph, b: IntentGraph) -> bool:
    """True when a variable bijection maps ``a`` exactly onto ``b``."""
    if len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return False
    if a.is_empty:
        return b.is_empty
    if sorted(a.nodes.values()) != sorted(b.nodes.values()):
        return False
    target = set(b.edges)
    va = sorted(a.nodes, key=lambda v: (v != a.root, v))

    def sig(g, v):
        return (g.nodes[v],
                tuple(sorted((e.role, e.target.render() if isinstance(e.target, Literal) else "") for e in g.out(v))),
                tuple(sorted(e.role for e in g.incoming(v))))

    sig_b: dict[tuple, list[str]] = {}
    for v in b.nodes:
        sig_b.setdefault(sig(b, v), []).append(v)

    def consistent(m):
        for e in a.edges:
            s = m.get(e.source)
            t = e.target if isinstance(e.target, Literal) else m.get(e.target)
            if s is None or t is None:
                continue
            if Edge(s, e.role, t) not in target:
                return False
        return True

    def search(i, m, used):
        if i == len(va):
            return {Edge(m[e.source], e.role, e.target if isinstance(e.target, Literal) else m[e.target])
                    for e in a.edges} == target
        v = va[i]
        cands = [b.root] if v == a.root else sig_b.get(sig(a, v), [])
        for w in cands:
            if w in used:
                continue
            m[v] = w
            used.add(w)
            if consistent(m) and search(i + 1, m, used):
                return True
            used.discard(w)
            del m[v]
        return False

    if sig(a, a.root) != sig(b, b.root):
        return False
    return search(0, {}, set())


# -- parsing ------------------------------------------------------------------------

_TOKEN = re.compile(r'\s*(?:(?P<lp>\()|(?P<rp>\))|(?P<slash>/)|(?P<str>"(?:[^"\\]|\\.)*")'
                    r'|(?P<role>:[^\s()"]+)|(?P<sym>[^\s()"/:][^\s()"]*))')
_VAR_LIKE = re.compile(r"^[a-z][0-9]*$")


def _tokenize(text: str) -> list[tuple[str, str]]:
    text = text.replace("“", '"').replace("”", '"').replace("``", '"').replace("''", '"')
    out, pos = [], 0
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if m is None or m.end() == pos:
            raise GraphSyntaxError(f"unexpected character {stripped[pos]!r} at offset {pos}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


def parse_graph_text(text: str) -> IntentGraph:
    """Parse one PENMAN graph. ``()`` (or blank text) is the empty graph."""
    lines = [ln for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    toks = _tokenize("\n".join(lines))
    if not toks or [k for k, _ in toks] == ["lp", "rp"]:
        return IntentGraph.empty()
    depth = 0
    for k, _ in toks:
        depth += 1 if k == "lp" else -1 if k == "rp" else 0
        if depth < 0:
            raise UnbalancedText("closing parenthesis without an opening one")
    if depth != 0:
        raise UnbalancedText(f"{depth} unclosed parenthesis(es)")

    nodes: dict[str, str] = {}
    edges: list[Edge] = []
    refs: list[tuple[str, str, str]] = []  # (source, role, bare token) resolved after the walk
    pos = 0

    def take(kind: str) -> str:
        nonlocal pos
        if pos >= len(toks) or toks[pos][0] != kind:
            got = toks[pos][1] if pos < len(toks) else "end of text"
            raise GraphSyntaxError(f"expected {kind}, got {got!r}")
        pos += 1
        return toks[pos - 1][1]

    def node() -> str:
        nonlocal pos
        take("lp")
        var = take("sym")
        if var in nodes:
            raise DuplicateVariable(f"variable {var!r} introduced twice")
        take("slash")
        nodes[var] = take("sym")
        while pos < len(toks) and toks[pos][0] == "role":
            role = take("role")[1:]
            if pos >= len(toks):
                raise GraphSyntaxError(f"role :{role} has no target")
            kind, val = toks[pos]
            if kind == "lp":
                child = node()
                _add(var, role, child, edges)
            elif kind == "str":
                pos += 1
                _add(var, role, Literal(_unquote(val)), edges)
            elif kind == "sym":
                pos += 1
                refs.append((var, role, val))
            else:
                raise GraphSyntaxError(f"role :{role} has no target")
        take("rp")
        return var

    root = node()
    if pos != len(toks):
        raise UnbalancedText("text continues after the graph closes")
    for src, role, tok in refs:
        if tok in nodes:
            _add(src, role, tok, edges)
        elif _VAR_LIKE.match(tok):
            raise DanglingReference(f"{tok!r} looks like a variable but is never introduced")
        else:
            _add(src, role, Literal(tok, quoted=False), edges)
    return IntentGraph(nodes, tuple(edges), root)


def _add(src: str, role: str, tgt: Target, edges: list[Edge]) -> None:
    if role.endswith("-of") and role not in ("consist-of", "prep-out-of") and not isinstance(tgt, Literal):
        edges.append(Edge(tgt, role[:-3], src))
    else:
        edges.append(Edge(src, role, tgt))


def parse_graph_blocks(text: str) -> list[tuple[str | None, IntentGraph]]:
    """Split a graph file into blank-line separated blocks.

    A ``# ::id ID`` comment line names the block; unnamed blocks get None.
    """
    out = []
    for block in re.split(r"\n\s*\n", text):
        if not block.strip():
            continue
        ident = None
        for ln in block.splitlines():
            m = re.match(r"\s*#\s*::id\s+(\S+)", ln)
            if m:
                ident = m.group(1)
        body = "\n".join(ln for ln in block.splitlines() if not ln.lstrip().startswith("#"))
        if not body.strip():
            continue
        out.append((ident, parse_graph_text(body)))
    return out


# -- serialization ----------------------------------------------------------------


def _role_key(role: str):
    m = re.fullmatch(r"ARG(\d+)", role)
    if m:
        return (0, "", int(m.group(1)))
    m = re.fullmatch(r"([a-zA-Z-]+?)(\d+)", role)
    if m:
        return (1, m.group(1), int(m.group(2)))
    return (1, role, -1)


def serialize_graph(g: IntentGraph) -> str:
    """Deterministic PENMAN text: ARG roles by number, then other roles
    alphabetically; nodes whose edges are all constants fit on one line."""
    if g.is_empty:
        return "()"
    placed: set[str] = set()
    done: set[Edge] = set()
    forward = {g.root}
    stack = [g.root]
    while stack:
        for e in g.out(stack.pop()):
            if not isinstance(e.target, Literal) and e.target not in forward:
                forward.add(e.target)
                stack.append(e.target)

    def entries(v: str) -> list[tuple[str, Target, Edge]]:
        out = []
        for e in g.out(v):
            out.append((e.role, e.target, e))
        for e in g.incoming(v):
            if e.source != v and e.source not in forward:
                out.append((e.role + "-of", e.source, e))
        out.sort(key=lambda x: (_role_key(x[0]), x[1].render() if isinstance(x[1], Literal) else x[1]))
        return out

    def emit(v: str, indent: int) -> str:
        placed.add(v)
        items = [(role, tgt, e) for role, tgt, e in entries(v) if e not in done]
        for _, _, e in items:
            done.add(e)
        head = f"({v} / {g.nodes[v]}"
        if all(isinstance(t, Literal) or t in placed for _, t, _ in items):
            return head + "".join(f" :{r} {_text(t)}" for r, t, _ in items) + ")"
        pad = " " * (4 * (indent + 1))
        parts = [head]
        for role, tgt, _ in items:
            if isinstance(tgt, Literal) or tgt in placed:
                parts.append(f"\n{pad}:{role} {_text(tgt)}")
            else:
                parts.append(f"\n{pad}:{role} " + emit(tgt, indent + 1))
        return "".join(parts) + ")"

    return emit(g.root, 0)


def _text(t: Target) -> str:
    return t.render() if isinstance(t, Literal) else t


def graphs_to_text(graphs: Iterable[tuple[str | None, IntentGraph]]) -> str:
    blocks = []
    for ident, g in graphs:
        head = f"# ::id {ident}\n" if ident else ""
        blocks.append(head + serialize_graph(g))
    return "\n\n".join(blocks) + "\n"


def iter_nodes(g: IntentGraph) -> Iterator[tuple[str, str]]:
    return iter(sorted(g.nodes.items()))
