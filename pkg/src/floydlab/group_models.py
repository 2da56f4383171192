"""Group arithmetic with canonical normal forms, and Cayley ball enumeration.

Every model exposes the same small contract: an identity element, a fixed
symmetric generator list, multiplication by a single generator, and an
injective byte-string key for deduplication. Word lengths are never computed
from closed formulas; they emerge from the breadth-first enumeration.

Generator conventions are fixed per model (documented on each class) since
Floyd geometry depends on the generating set.
"""

from __future__ import annotations

import string
from abc import ABC, abstractmethod
from typing import Any

from .errors import BallTooLarge, ModelAxiomViolation
from .graph_core import GraphBall, single_vertex_ball

DEFAULT_VERTEX_CAP = 5_000_000

_AXIOM_CHECK_LIMIT = 512


class GroupModel(ABC):
    """Pluggable group arithmetic driving Cayley ball generation."""

    name: str

    @abstractmethod
    def identity(self) -> Any: ...

    @abstractmethod
    def generator_labels(self) -> tuple[str, ...]: ...

    @abstractmethod
    def inverse_label(self, label: str) -> str: ...

    @abstractmethod
    def multiply(self, element: Any, label: str) -> Any: ...

    @abstractmethod
    def canonical_key(self, element: Any) -> bytes: ...


class FreeAbelian(GroupModel):
    """Z^n with generators e1..en and inverses E1..En; elements are int tuples."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("rank must be >= 1")
        self.n = n
        self.name = f"zn:{n}"
        self._labels = tuple(f"e{i + 1}" for i in range(n)) + tuple(
            f"E{i + 1}" for i in range(n))

    def identity(self):
        return (0,) * self.n

    def generator_labels(self):
        return self._labels

    def inverse_label(self, label):
        return label[0].swapcase() + label[1:]

    def multiply(self, element, label):
        i = int(label[1:]) - 1
        step = 1 if label[0] == "e" else -1
        return element[:i] + (element[i] + step,) + element[i + 1:]

    def canonical_key(self, element):
        return ",".join(map(str, element)).encode()


class Free(GroupModel):
    """Free group on k letters; elements are reduced words of signed ints.

    Letter i+1 carries label string.ascii_lowercase[i]; its inverse is the
    uppercase letter.
    """

    def __init__(self, k: int):
        if not 1 <= k <= 26:
            raise ValueError("rank must be in 1..26")
        self.k = k
        self.name = f"free:{k}"
        letters = string.ascii_lowercase[:k]
        self._labels = tuple(letters) + tuple(letters.upper())

    def identity(self):
        return ()

    def generator_labels(self):
        return self._labels

    def inverse_label(self, label):
        return label.swapcase()

    def _signed(self, label):
        low = label.lower()
        i = ord(low) - ord("a") + 1
        return i if label.islower() else -i

    def multiply(self, element, label):
        s = self._signed(label)
        if element and element[-1] == -s:
            return element[:-1]
        return element + (s,)

    def canonical_key(self, element):
        return ",".join(map(str, element)).encode()

    def word(self, text: str) -> tuple[int, ...]:
        """Convenience: evaluate a letter string like 'aaB' to an element."""
        el = self.identity()
        for ch in text:
            el = self.multiply(el, ch)
        return el


class Heisenberg(GroupModel):
    """Integer Heisenberg group: triples with (x,y,z)*(x',y',z') =
    (x+x', y+y', z+z'+x*y'); generators a=(1,0,0), b=(0,1,0) and inverses.
    """

    name = "heis"

    _STEPS = {"a": (1, 0, 0), "A": (-1, 0, 0), "b": (0, 1, 0), "B": (0, -1, 0)}

    def identity(self):
        return (0, 0, 0)

    def generator_labels(self):
        return ("a", "A", "b", "B")

    def inverse_label(self, label):
        return label.swapcase()

    def multiply(self, element, label):
        x, y, z = element
        gx, gy, gz = self._STEPS[label]
        return (x + gx, y + gy, z + gz + x * gy)

    def canonical_key(self, element):
        return ",".join(map(str, element)).encode()


class DirectProduct(GroupModel):
    """A x B with generators of A acting on the left slot and B on the right."""

    def __init__(self, a: GroupModel, b: GroupModel):
        self.a = a
        self.b = b
        self.name = f"prod:{a.name},{b.name}"
        self._labels = tuple(f"l.{g}" for g in a.generator_labels()) + tuple(
            f"r.{g}" for g in b.generator_labels())

    def identity(self):
        return (self.a.identity(), self.b.identity())

    def generator_labels(self):
        return self._labels

    def inverse_label(self, label):
        side, inner = label.split(".", 1)
        factor = self.a if side == "l" else self.b
        return f"{side}.{factor.inverse_label(inner)}"

    def multiply(self, element, label):
        side, inner = label.split(".", 1)
        ea, eb = element
        if side == "l":
            return (self.a.multiply(ea, inner), eb)
        return (ea, self.b.multiply(eb, inner))

    def canonical_key(self, element):
        ka = self.a.canonical_key(element[0])
        kb = self.b.canonical_key(element[1])
        return f"{len(ka)}:".encode() + ka + kb


class FreeProduct(GroupModel):
    """A * B with alternating-syllable normal forms.

    An element is a tuple of (factor_index, factor_element) syllables with
    no identity syllables and no equal consecutive factor indices; the
    normal form theorem makes the key injective.
    """

    def __init__(self, a: GroupModel, b: GroupModel):
        self.a = a
        self.b = b
        self.factors = (a, b)
        self.name = f"freeprod:{a.name},{b.name}"
        self._labels = tuple(f"l.{g}" for g in a.generator_labels()) + tuple(
            f"r.{g}" for g in b.generator_labels())
        self._id_keys = (a.canonical_key(a.identity()), b.canonical_key(b.identity()))

    def identity(self):
        return ()

    def generator_labels(self):
        return self._labels

    def inverse_label(self, label):
        side, inner = label.split(".", 1)
        factor = self.a if side == "l" else self.b
        return f"{side}.{factor.inverse_label(inner)}"

    def multiply(self, element, label):
        side, inner = label.split(".", 1)
        fi = 0 if side == "l" else 1
        factor = self.factors[fi]
        if element and element[-1][0] == fi:
            merged = factor.multiply(element[-1][1], inner)
            if factor.canonical_key(merged) == self._id_keys[fi]:
                return element[:-1]
            return element[:-1] + ((fi, merged),)
        return element + ((fi, factor.multiply(factor.identity(), inner)),)

    def canonical_key(self, element):
        parts = []
        for fi, el in element:
            k = self.factors[fi].canonical_key(el)
            parts.append(f"{fi}#{len(k)}:".encode() + k)
        return b"".join(parts)


def _spot_check(model: GroupModel, element, labels) -> None:
    key = model.canonical_key(element)
    for g in labels:
        image = model.multiply(element, g)
        back = model.multiply(image, model.inverse_label(g))
        if model.canonical_key(back) != key:
            raise ModelAxiomViolation(
                f"{model.name}: multiply by {g} then its inverse does not return "
                f"to the same element")


def _enumerate_ball(model: GroupModel, radius: int, vertex_cap: int):
    """BFS over canonical keys; returns (elements, dist, edges)."""
    labels = model.generator_labels()
    for g in labels:
        if model.inverse_label(g) not in labels:
            raise ModelAxiomViolation(
                f"{model.name}: generator set not closed under inverses ({g})")
    identity = model.identity()
    index = {model.canonical_key(identity): 0}
    elements = [identity]
    dist = [0]
    edges: set[tuple[int, int]] = set()
    frontier = [0]
    for layer in range(radius + 1):
        if not frontier:
            break
        next_frontier: list[int] = []
        for i in frontier:
            el = elements[i]
            if i < _AXIOM_CHECK_LIMIT:
                _spot_check(model, el, labels)
            for g in labels:
                image = model.multiply(el, g)
                key = model.canonical_key(image)
                j = index.get(key)
                if j is None:
                    if layer == radius:
                        continue
                    j = len(elements)
                    if j >= vertex_cap:
                        raise BallTooLarge(
                            f"{model.name} ball of radius {radius} exceeds vertex "
                            f"cap {vertex_cap}")
                    index[key] = j
                    elements.append(image)
                    dist.append(layer + 1)
                    next_frontier.append(j)
                if i == j:
                    raise ModelAxiomViolation(
                        f"{model.name}: generator {g} fixes an element")
                edges.add((min(i, j), max(i, j)))
        frontier = next_frontier
    return elements, dist, edges


def cayley_ball_labeled(model: GroupModel, radius: int,
                        vertex_cap: int = DEFAULT_VERTEX_CAP):
    """Cayley ball plus the group element carried by each vertex index."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if radius == 0:
        return single_vertex_ball(), (model.identity(),)
    elements, dist, edges = _enumerate_ball(model, radius, vertex_cap)
    adjacency: list[list[int]] = [[] for _ in elements]
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    ball = GraphBall(
        vertex_count=len(elements),
        base=0,
        radius=radius,
        adjacency=tuple(tuple(sorted(n)) for n in adjacency),
        dist_to_base=tuple(dist),
    )
    return ball, tuple(elements)


def cayley_ball(model: GroupModel, radius: int,
                vertex_cap: int = DEFAULT_VERTEX_CAP) -> GraphBall:
    """All elements of word length <= radius with generator edges between them."""
    ball, _ = cayley_ball_labeled(model, radius, vertex_cap)
    return ball


def growth_series(model: GroupModel, radius: int,
                  vertex_cap: int = DEFAULT_VERTEX_CAP) -> list[int]:
    """Sphere sizes |S_0|, |S_1|, ..., |S_radius| of the Cayley ball."""
    ball, _ = cayley_ball_labeled(model, radius, vertex_cap)
    counts = [0] * (radius + 1)
    for d in ball.dist_to_base:
        counts[d] += 1
    return counts


def vertex_of(model: GroupModel, elements: tuple, element) -> int:
    """Index of a group element inside a labeled ball (KeyError if absent)."""
    key = model.canonical_key(element)
    for i, el in enumerate(elements):
        if model.canonical_key(el) == key:
            return i
    raise KeyError(f"element {element!r} not in ball")


def parse_model(spec: str) -> GroupModel:
    """Parse a CLI model string.

    Grammar: ``zn:<n>``, ``free:<k>``, ``heis``, ``prod:<m1>,<m2>``,
    ``freeprod:<m1>,<m2>``. Composite factors must themselves be simple
    (zn/free/heis).
    """
    if spec == "heis":
        return Heisenberg()
    kind, sep, rest = spec.partition(":")
    if not sep:
        raise ValueError(f"unknown model spec {spec!r}")
    if kind == "zn":
        return FreeAbelian(_positive_int(rest, spec))
    if kind == "free":
        return Free(_positive_int(rest, spec))
    if kind in ("prod", "freeprod"):
        factors = _split_factors(rest, spec)
        cls = DirectProduct if kind == "prod" else FreeProduct
        return cls(*factors)
    raise ValueError(f"unknown model spec {spec!r}")


def _positive_int(text: str, spec: str) -> int:
    if not text.isdigit() or int(text) < 1:
        raise ValueError(f"bad rank in model spec {spec!r}")
    return int(text)


def _split_factors(rest: str, spec: str) -> tuple[GroupModel, GroupModel]:
    for pos in range(len(rest)):
        if rest[pos] != ",":
            continue
        left, right = rest[:pos], rest[pos + 1:]
        try:
            fa, fb = parse_model(left), parse_model(right)
        except ValueError:
            continue
        if isinstance(fa, (DirectProduct, FreeProduct)) or isinstance(
                fb, (DirectProduct, FreeProduct)):
            raise ValueError(f"nested composite factors not supported: {spec!r}")
        return fa, fb
    raise ValueError(f"cannot split factors in model spec {spec!r}")
