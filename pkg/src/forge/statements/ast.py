"""Expression trees: arithmetic over features and integers, logic on top.

Nodes are immutable and hashable, so trees can be shared freely and used as
cache keys.  Typing is enforced at construction time: arithmetic operators
and ``Equals`` take arithmetic children, logical connectives take Boolean
children.  A *statement* is any Boolean-rooted tree.
"""

from __future__ import annotations

from dataclasses import dataclass

#: Feature variables, in canonical order: ranks, nullities, then the matrix
#: dimensions (h1 = vertex count, w1 = h2 = edge count, w2 = triangle count).
FEATURES = ("r1", "r2", "n1", "n2", "h1", "w1", "h2", "w2")
FEATURE_INDEX = {name: i for i, name in enumerate(FEATURES)}

ARITH_OPS = ("+", "-", "*")
LOGIC_RENDER = {"and": "∧", "implies": "⟹", "not": "¬"}


class StatementTypeError(TypeError):
    """An expression node was built with children of the wrong kind."""


class Node:
    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class Feature(Node):
    name: str

    def __post_init__(self) -> None:
        if self.name not in FEATURE_INDEX:
            raise StatementTypeError(f"unknown feature variable {self.name!r}")


@dataclass(frozen=True, slots=True)
class Const(Node):
    value: int

    def __post_init__(self) -> None:
        if not isinstance(self.value, int) or isinstance(self.value, bool):
            raise StatementTypeError("constants must be plain integers")


@dataclass(frozen=True, slots=True)
class Arith(Node):
    op: str
    left: Node
    right: Node

    def __post_init__(self) -> None:
        if self.op not in ARITH_OPS:
            raise StatementTypeError(f"unknown arithmetic operator {self.op!r}")
        for child in (self.left, self.right):
            if not is_arith(child):
                raise StatementTypeError(
                    f"arithmetic node '{self.op}' has Boolean child {child}"
                )


@dataclass(frozen=True, slots=True)
class Equals(Node):
    left: Node
    right: Node

    def __post_init__(self) -> None:
        for child in (self.left, self.right):
            if not is_arith(child):
                raise StatementTypeError(f"'=' has Boolean child {child}")


@dataclass(frozen=True, slots=True)
class And(Node):
    left: Node
    right: Node

    def __post_init__(self) -> None:
        _require_boolean("∧", self.left, self.right)


@dataclass(frozen=True, slots=True)
class Implies(Node):
    left: Node
    right: Node

    def __post_init__(self) -> None:
        _require_boolean("⟹", self.left, self.right)


@dataclass(frozen=True, slots=True)
class Not(Node):
    child: Node

    def __post_init__(self) -> None:
        _require_boolean("¬", self.child)


def _require_boolean(op: str, *children: Node) -> None:
    for child in children:
        if not is_boolean(child):
            raise StatementTypeError(f"'{op}' has arithmetic child {child}")


def is_arith(node: Node) -> bool:
    return isinstance(node, (Feature, Const, Arith))


def is_boolean(node: Node) -> bool:
    return isinstance(node, (Equals, And, Implies, Not))


def tree_size(node: Node) -> int:
    """Node count, leaves included; ``(= h1 2)`` has size 3."""
    if isinstance(node, (Feature, Const)):
        return 1
    if isinstance(node, Not):
        return 1 + tree_size(node.child)
    return 1 + tree_size(node.left) + tree_size(node.right)


def tree_depth(node: Node) -> int:
    if isinstance(node, (Feature, Const)):
        return 1
    if isinstance(node, Not):
        return 1 + tree_depth(node.child)
    return 1 + max(tree_depth(node.left), tree_depth(node.right))


def render(node: Node) -> str:
    """Canonical prefix rendering; ``parse(render(s))`` reproduces ``s``."""
    if isinstance(node, Feature):
        return node.name
    if isinstance(node, Const):
        return str(node.value)
    if isinstance(node, Arith):
        return f"({node.op} {render(node.left)} {render(node.right)})"
    if isinstance(node, Equals):
        return f"(= {render(node.left)} {render(node.right)})"
    if isinstance(node, And):
        return f"({LOGIC_RENDER['and']} {render(node.left)} {render(node.right)})"
    if isinstance(node, Implies):
        return f"({LOGIC_RENDER['implies']} {render(node.left)} {render(node.right)})"
    if isinstance(node, Not):
        return f"({LOGIC_RENDER['not']} {render(node.child)})"
    raise StatementTypeError(f"not an expression node: {node!r}")


def iter_nodes(node: Node):
    """Pre-order traversal."""
    stack = [node]
    while stack:
        cur = stack.pop()
        yield cur
        if isinstance(cur, Not):
            stack.append(cur.child)
        elif isinstance(cur, (Arith, Equals, And, Implies)):
            stack.append(cur.right)
            stack.append(cur.left)


def operator_classes(node: Node) -> frozenset[str]:
    """Usage-class labels present in a tree: ``op:*`` / ``feat:*`` keys."""
    classes: set[str] = set()
    nested_not = False
    for cur in iter_nodes(node):
        if isinstance(cur, Feature):
            classes.add(f"feat:{cur.name}")
        elif isinstance(cur, Arith):
            classes.add(f"op:{cur.op}")
        elif isinstance(cur, Equals):
            classes.add("op:=")
        elif isinstance(cur, And):
            classes.add("op:and")
        elif isinstance(cur, Implies):
            classes.add("op:implies")
        elif isinstance(cur, Not):
            classes.add("op:not")
            if isinstance(cur.child, Not):
                nested_not = True
    if nested_not:
        classes.add("nested_not")
    return frozenset(classes)
