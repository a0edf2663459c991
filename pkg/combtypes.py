# combtypes.py

"""Tipos combinatórios de curvas tropicais abstratas racionais com n marcas.

Um tipo é guardado como um conjunto de splits compatíveis. A árvore marcada
é sempre derivada dos splits, nunca o contrário.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable

import networkx as nx

from extensions import parallel_map

logger = logging.getLogger(__name__)

ROOT = ("v", ())


class SplitError(ValueError):
    """Split ou tipo combinatório inválido."""


@dataclass(frozen=True, order=True)
class Split:
    """Bipartição das marcas, guardada pelo lado que não contém n."""

    n: int
    members: tuple[int, ...]

    @classmethod
    def of(cls, n: int, labels: Iterable[int]) -> Split:
        labels = frozenset(int(x) for x in labels)
        if not labels or not labels <= frozenset(range(1, n + 1)):
            raise SplitError(f"Marcas fora de 1..{n}: {sorted(labels)}")
        if n in labels:
            labels = frozenset(range(1, n + 1)) - labels
        if not 2 <= len(labels) <= n - 2:
            raise SplitError(f"Split degenerado para n={n}: {sorted(labels)}")
        return cls(n, tuple(sorted(labels)))

    @cached_property
    def label_set(self) -> frozenset[int]:
        return frozenset(self.members)

    @cached_property
    def complement(self) -> frozenset[int]:
        return frozenset(range(1, self.n + 1)) - self.label_set

    def side_of(self, label: int) -> frozenset[int]:
        """O lado (como conjunto completo) que contém `label`."""
        return self.label_set if label in self.label_set else self.complement

    def to_json(self) -> list[int]:
        return list(self.members)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"


def splits_compatible(first: Split, second: Split) -> bool:
    """Dois splits são compatíveis se algum lado de um está contido em algum lado do outro."""
    if first.n != second.n:
        raise SplitError(f"Splits de espaços diferentes: n={first.n} e n={second.n}")
    a, b = first.label_set, second.label_set
    return a <= b or b <= a or not (a & b) or len(a | b) == first.n


@lru_cache(maxsize=None)
def _all_splits(n: int) -> tuple[Split, ...]:
    found = []
    for size in range(2, n - 1):
        for labels in combinations(range(1, n), size):
            found.append(Split(n, labels))
    return tuple(sorted(found))


def all_splits(n: int) -> list[Split]:
    """Todos os splits canônicos de {1..n}, em ordem lexicográfica."""
    return list(_all_splits(n))


@dataclass(frozen=True, order=True)
class CombType:
    """Cone de M_{0,n}: conjunto de splits dois a dois compatíveis."""

    n: int
    splits: tuple[Split, ...] = field(default=())

    @classmethod
    def of(cls, n: int, splits: Iterable) -> CombType:
        parsed = set()
        for s in splits:
            parsed.add(s if isinstance(s, Split) else Split.of(n, s))
        for s in parsed:
            if s.n != n:
                raise SplitError(f"Split {s} não pertence a M_0,{n}")
        ordered = tuple(sorted(parsed))
        for a, b in combinations(ordered, 2):
            if not splits_compatible(a, b):
                raise SplitError(f"Splits incompatíveis: {a} e {b}")
        if len(ordered) > max(n - 3, 0):
            raise SplitError(f"Mais de n-3 splits para n={n}")
        return cls(n, ordered)

    @classmethod
    def star(cls, n: int) -> CombType:
        return cls(n, ())

    @property
    def dim(self) -> int:
        return len(self.splits)

    @cached_property
    def split_set(self) -> frozenset[Split]:
        return frozenset(self.splits)

    def with_split(self, split: Split) -> CombType:
        return CombType(self.n, tuple(sorted(self.splits + (split,))))

    def without(self, split: Split) -> CombType:
        return CombType(self.n, tuple(s for s in self.splits if s != split))

    def to_json(self) -> dict:
        return {"n": self.n, "splits": [s.to_json() for s in self.splits]}

    @classmethod
    def from_json(cls, data: dict) -> CombType:
        return cls.of(int(data["n"]), data.get("splits", []))

    def __str__(self) -> str:
        return "[" + " ".join(str(s) for s in self.splits) + "]"


@lru_cache(maxsize=None)
def _compatibility_masks(n: int) -> tuple[int, ...]:
    # bit j da máscara i: split j > i compatível com split i
    splits = _all_splits(n)
    masks = []
    for i, a in enumerate(splits):
        mask = 0
        for j in range(i + 1, len(splits)):
            if splits_compatible(a, splits[j]):
                mask |= 1 << j
        masks.append(mask)
    return tuple(masks)


def _extend(n: int, chosen: tuple[int, ...], candidates: int, remaining: int) -> list[tuple[int, ...]]:
    if remaining == 0:
        return [chosen]
    masks = _compatibility_masks(n)
    found = []
    while candidates:
        low = candidates & -candidates
        i = low.bit_length() - 1
        candidates ^= low
        found.extend(_extend(n, chosen + (i,), candidates & masks[i], remaining - 1))
    return found


@lru_cache(maxsize=64)
def _enumerate(n: int, dim: int) -> tuple[CombType, ...]:
    splits = _all_splits(n)
    if dim == 0:
        return (CombType(n),)
    masks = _compatibility_masks(n)
    # a primeira escolha separa trabalhos independentes; a concatenação preserva a ordem
    branches = parallel_map(lambda i: _extend(n, (i,), masks[i], dim - 1), range(len(splits)))
    return tuple(
        CombType(n, tuple(splits[i] for i in chosen))
        for branch in branches
        for chosen in branch
    )


def enumerate_types(n: int, dim: int) -> list[CombType]:
    """Todos os tipos de dimensão `dim` em M_0,n, em ordem canônica."""
    if n < 3:
        raise SplitError(f"n deve ser >= 3, recebeu {n}")
    if not 0 <= dim <= n - 3:
        raise SplitError(f"Dimensão {dim} fora de 0..{n - 3}")
    types = list(_enumerate(n, dim))
    logger.debug(f"M_0,{n}: {len(types)} tipos de dimensão {dim}")
    return types


def codim1_faces(ctype: CombType) -> list[CombType]:
    """Faces de codimensão 1: o tipo sem cada uma de suas arestas."""
    if not ctype.splits:
        raise SplitError("O cone de dimensão 0 não tem faces próprias")
    return sorted(ctype.without(s) for s in ctype.splits)


def resolutions(ctype: CombType, by: int = 1) -> list[CombType]:
    """Tipos com `by` arestas a mais que contêm `ctype` como face."""
    if ctype.dim + by > ctype.n - 3:
        raise SplitError(f"Não cabem mais {by} splits em {ctype}")
    candidates = [
        s for s in _all_splits(ctype.n)
        if s not in ctype.split_set and all(splits_compatible(s, t) for t in ctype.splits)
    ]
    found = set()
    for extra in combinations(candidates, by):
        if all(splits_compatible(a, b) for a, b in combinations(extra, 2)):
            found.add(CombType(ctype.n, tuple(sorted(ctype.splits + extra))))
    return sorted(found)


@dataclass(eq=False)
class MarkedTree:
    """Árvore marcada derivada de um tipo combinatório.

    Vértices internos são ("v", membros do split abaixo deles), a raiz é
    ("v", ()) e contém a marca n; folhas são ("x", i).
    """

    ctype: CombType
    graph: nx.Graph

    @property
    def n(self) -> int:
        return self.ctype.n

    def vertices(self) -> list[tuple]:
        return sorted(v for v in self.graph if v[0] == "v")

    def valence(self, vertex: tuple) -> int:
        return self.graph.degree(vertex)

    def vertex_of_label(self, label: int) -> tuple:
        return next(iter(self.graph[("x", label)]))

    def labels_at(self, vertex: tuple) -> list[int]:
        return sorted(u[1] for u in self.graph[vertex] if u[0] == "x")

    def bounded_edges(self) -> list[tuple[tuple, tuple, Split]]:
        return sorted(
            (a, b, data["split"]) if a < b else (b, a, data["split"])
            for a, b, data in self.graph.edges(data=True)
            if "split" in data
        )

    def labels_behind(self, vertex: tuple, neighbor: tuple) -> frozenset[int]:
        """Marcas do lado de `neighbor` quando a aresta {vertex, neighbor} é cortada."""
        if neighbor[0] == "x":
            return frozenset([neighbor[1]])
        if vertex[0] == "x":
            return frozenset(range(1, self.n + 1)) - {vertex[1]}
        split = self.graph.edges[vertex, neighbor]["split"]
        child = vertex if vertex[1] == split.members else neighbor
        return split.label_set if neighbor == child else split.complement

    def marking_sets(self, vertex: tuple) -> list[frozenset[int]]:
        return sorted((self.labels_behind(vertex, u) for u in self.graph[vertex]), key=sorted)

    def four_valent_vertex(self) -> tuple:
        found = [v for v in self.vertices() if self.valence(v) == 4]
        excess = sum(self.valence(v) - 3 for v in self.vertices())
        if len(found) != 1 or excess != 1:
            raise SplitError(f"{self.ctype} não tem codimensão 1")
        return found[0]

    def distance(self, i: int, j: int) -> int:
        if i == j:
            return 0
        return nx.shortest_path_length(self.graph, ("x", i), ("x", j)) - 2


@lru_cache(maxsize=4096)
def tree_from_splits(ctype: CombType) -> MarkedTree:
    """Árvore com folhas ("x", i) e vértices ("v", membros) reconstruída dos splits."""
    n = ctype.n
    graph = nx.Graph()
    graph.add_node(ROOT)
    # os lados canônicos evitam n, logo formam uma família laminar: o pai de
    # cada split é o menor split que o contém, ou a raiz
    by_size = sorted(ctype.splits, key=lambda s: (len(s.members), s.members))
    for split in by_size:
        graph.add_node(("v", split.members))
    for k, split in enumerate(by_size):
        parent = next(
            (("v", t.members) for t in by_size[k + 1:] if split.label_set < t.label_set),
            ROOT,
        )
        graph.add_edge(("v", split.members), parent, split=split)
    for label in range(1, n + 1):
        owner = next(
            (("v", s.members) for s in by_size if label in s.label_set),
            ROOT,
        )
        graph.add_edge(owner, ("x", label), label=label)
    return MarkedTree(ctype, graph)


def resolved_vertex(ctype: CombType, split: Split) -> tuple:
    """Vértice da árvore de `ctype` que o split extra resolve."""
    containing = [s for s in ctype.splits if split.label_set < s.label_set]
    if not containing:
        return ROOT
    return ("v", min(containing, key=lambda s: len(s.members)).members)


def type_from_tree(n: int, graph: nx.Graph) -> CombType:
    """Lê os splits de uma árvore cujas folhas são ("x", i)."""
    splits = []
    for a, b in graph.edges():
        if a[0] == "x" or b[0] == "x":
            continue
        pruned = graph.copy()
        pruned.remove_edge(a, b)
        side = {u[1] for u in nx.node_connected_component(pruned, b) if u[0] == "x"}
        splits.append(Split.of(n, side))
    return CombType.of(n, splits)


def random_type(n: int, dim: int, rng: random.Random) -> CombType:
    """Tipo aleatório: árvore trivalente por inserção de folhas, depois contrações."""
    if not 0 <= dim <= n - 3:
        raise SplitError(f"Dimensão {dim} fora de 0..{n - 3}")
    graph = nx.Graph()
    center = ("v", 0)
    for label in (1, 2, 3):
        graph.add_edge(center, ("x", label))
    for label in range(4, n + 1):
        a, b = rng.choice(sorted(graph.edges(), key=lambda e: (str(e[0]), str(e[1]))))
        middle = ("v", label)
        graph.remove_edge(a, b)
        graph.add_edge(a, middle)
        graph.add_edge(middle, b)
        graph.add_edge(middle, ("x", label))
    top = type_from_tree(n, graph)
    kept = rng.sample(list(top.splits), dim)
    return CombType.of(n, kept)
