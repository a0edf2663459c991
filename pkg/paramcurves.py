# paramcurves.py

"""Curvas tropicais planas parametrizadas e rotuladas.

Grau Δ, propagação de direções, matriz de avaliação, multiplicidades (índice
de reticulado direto e fórmulas fechadas dos tipos A/B/C), regiões e strings,
e os ciclos de pontos em posição especial (v1) e (v2) como push-forward.

Convenção de rótulos: marcas 1..n são contraídas, n+i carrega a direção v_i.
"""

from __future__ import annotations

import logging
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property, lru_cache, reduce
from itertools import combinations, permutations, product
from math import factorial, gcd, prod
from typing import Iterable, Sequence

import networkx as nx

from combtypes import (
    CombType,
    MarkedTree,
    Split,
    enumerate_types,
    random_type,
    tree_from_splits,
    type_from_tree,
)
from exactlin import IntMatrix, d_of, in_span_q, rank_q, rational_row_basis, solve_in_span_q
from extensions import parallel_map
from modulifan import Cycle, add_cycles, psi, skeleton

logger = logging.getLogger(__name__)

ZERO = (0, 0)


class DegreeError(ValueError):
    """Grau inválido (direção nula ou soma diferente de zero)."""


class PreconditionError(ValueError):
    """Tipo fora das hipóteses da operação (codimensão, número de marcas)."""


class ClassificationError(ValueError):
    """Tipo sem classificação A/B/C."""


def _add(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return (a[0] + b[0], a[1] + b[1])


def _neg(a: tuple[int, int]) -> tuple[int, int]:
    return (-a[0], -a[1])


@dataclass(frozen=True)
class Degree:
    vectors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        vectors = tuple((int(a), int(b)) for a, b in self.vectors)
        object.__setattr__(self, "vectors", vectors)
        if not vectors:
            raise DegreeError("Grau vazio")
        if any(v == ZERO for v in vectors):
            raise DegreeError(f"Direção nula no grau {vectors}")
        total = reduce(_add, vectors, ZERO)
        if total != ZERO:
            raise DegreeError(f"As direções do grau somam {total}, não (0,0)")

    @classmethod
    def shorthand(cls, d: int) -> Degree:
        if d < 1:
            raise DegreeError(f"Grau projetivo inválido: {d}")
        return cls(((1, 1),) * d + ((-1, 0),) * d + ((0, -1),) * d)

    @classmethod
    def parse(cls, text: str) -> Degree:
        """Aceita "d:<k>" ou pares explícitos "a,b;c,d;..."."""
        text = text.strip()
        try:
            if text.startswith("d:"):
                return cls.shorthand(int(text[2:]))
            pairs = []
            for chunk in text.split(";"):
                a, b = chunk.split(",")
                pairs.append((int(a), int(b)))
        except ValueError as e:
            if isinstance(e, DegreeError):
                raise
            raise DegreeError(f"Grau mal formado: '{text}'") from e
        return cls(tuple(pairs))

    @property
    def m(self) -> int:
        return len(self.vectors)

    def to_json(self) -> list[list[int]]:
        return [list(v) for v in self.vectors]


@dataclass(frozen=True, order=True)
class ParamType:
    n: int
    degree: Degree = field(compare=False)
    ctype: CombType

    def __post_init__(self):
        if self.n < 0:
            raise PreconditionError(f"Número de marcas negativo: n={self.n}")
        if self.ctype.n != self.n + self.degree.m:
            raise PreconditionError(
                f"Tipo em M_0,{self.ctype.n} não corresponde a n={self.n} marcas e {self.degree.m} fins"
            )

    @classmethod
    def of(cls, degree: Degree, splits: Iterable, n: int | None = None) -> ParamType:
        n = degree.m - 1 if n is None else n
        return cls(n, degree, CombType.of(n + degree.m, splits))

    @property
    def total(self) -> int:
        return self.n + self.degree.m

    @property
    def codim(self) -> int:
        return self.total - 3 - self.ctype.dim

    @property
    def tree(self) -> MarkedTree:
        return tree_from_splits(self.ctype)

    def is_contracted(self, label: int) -> bool:
        return label <= self.n

    def end_direction(self, label: int) -> tuple[int, int]:
        return ZERO if label <= self.n else self.degree.vectors[label - self.n - 1]

    def direction_behind(self, labels: Iterable[int]) -> tuple[int, int]:
        return reduce(_add, (self.end_direction(x) for x in labels), ZERO)

    def outgoing(self, vertex: tuple, neighbor: tuple) -> tuple[int, int]:
        """v(E, vertex): direção da aresta {vertex, neighbor} saindo de `vertex`."""
        return self.direction_behind(self.tree.labels_behind(vertex, neighbor))

    def marked_vertices(self) -> frozenset:
        return frozenset(self.tree.vertex_of_label(i) for i in range(1, self.n + 1))

    def to_json(self) -> dict:
        return {"n": self.n, "degree": self.degree.to_json(), "splits": self.ctype.to_json()["splits"]}


def enumerate_param_types(degree: Degree, codim: int = 1, n: int | None = None) -> list[ParamType]:
    """Todos os tipos de codimensão `codim` em M_0,n+|Δ| com o grau `degree`."""
    n = degree.m - 1 if n is None else n
    total = n + degree.m
    return [ParamType(n, degree, c) for c in enumerate_types(total, total - 3 - codim)]


def sample_param_types(degree: Degree, count: int, rng: random.Random, codim: int = 1) -> list[ParamType]:
    """Tipos aleatórios sem filtro; em graus altos quase todos são não injetivos."""
    n = degree.m - 1
    total = n + degree.m
    return [ParamType(n, degree, random_type(total, total - 3 - codim, rng)) for _ in range(count)]


# --- Amostragem de tipos injetivos ---

def _region_tree(n: int, hub: int | None, rng: random.Random) -> tuple[int, dict[int, list[int]]]:
    # cada marca liga 2 regiões (3 para `hub`); as regiões formam uma árvore
    regions = 1
    incident = {}
    for i in rng.sample(range(1, n + 1), n):
        extra = 2 if i == hub else 1
        incident[i] = [rng.randrange(regions)] + list(range(regions, regions + extra))
        regions += extra
    return regions, incident


def _region_edges(region: int, leaves: list[tuple], rng: random.Random, four_valent: bool) -> list[tuple]:
    leaves = list(leaves)
    rng.shuffle(leaves)
    if len(leaves) == 2:
        return [tuple(leaves)]
    graph = nx.Graph()
    center = ("r", region, 0)
    for leaf in leaves[:3]:
        graph.add_edge(center, leaf)
    for k, leaf in enumerate(leaves[3:], start=1):
        a, b = rng.choice(sorted(graph.edges(), key=lambda e: (str(e[0]), str(e[1]))))
        middle = ("r", region, k)
        graph.remove_edge(a, b)
        graph.add_edges_from([(a, middle), (middle, b), (middle, leaf)])
    if four_valent:
        inner = sorted(((a, b) for a, b in graph.edges() if a[0] == "r" and b[0] == "r"), key=str)
        a, b = rng.choice(inner)
        graph = nx.contracted_nodes(graph, a, b, self_loops=False)
    return list(graph.edges())


def _structured_type(degree: Degree, kind: str, rng: random.Random) -> ParamType | None:
    """Monta um tipo com a estrutura de regiões de `kind`; None se o sorteio não comporta a forma."""
    n = degree.m - 1
    hub = rng.randint(1, n) if kind == "A" else None
    regions, incident = _region_tree(n, hub, rng)
    attachments = defaultdict(list)
    for i in sorted(incident):
        for r in incident[i]:
            attachments[r].append(("m", i))
    wanted = [1] * regions
    roomy = [r for r in range(regions) if len(attachments[r]) >= 2]
    four_region = None
    if kind == "A":
        if not roomy:
            return None
        wanted[rng.choice(roomy)] = 0
    elif kind == "C":
        if len(roomy) < 2:
            return None
        bounded, four_region = rng.sample(roomy, 2)
        wanted[bounded], wanted[four_region] = 0, 2
    else:
        crowded = [r for r in range(regions) if len(attachments[r]) >= 3]
        if not crowded:
            return None
        four_region = rng.choice(crowded)

    labels = list(range(n + 1, n + degree.m + 1))
    rng.shuffle(labels)
    graph = nx.Graph()
    for i in range(1, n + 1):
        graph.add_edge(("m", i), ("x", i))
    for r in range(regions):
        ends = [("x", labels.pop()) for _ in range(wanted[r])]
        graph.add_edges_from(_region_edges(r, ends + attachments[r], rng, r == four_region))
    return ParamType(n, degree, type_from_tree(n + degree.m, graph))


def sample_injective_param_types(
    degree: Degree, count: int, rng: random.Random, max_draws: int | None = None
) -> list[ParamType]:
    """Tipos de codimensão 1 com ev injetiva.

    Cada sorteio monta a árvore a partir das regiões (marcas ligando regiões com
    um fim cada, mais a região limitada ou o vértice 4-valente de A, B ou C) e é
    descartado se a matriz de avaliação não tiver posto completo.
    """
    max_draws = 50 * count if max_draws is None else max_draws
    found = []
    draws = 0
    while len(found) < count:
        if draws >= max_draws:
            raise PreconditionError(
                f"Só {len(found)} tipos injetivos em {draws} sorteios para Δ={degree.to_json()}"
            )
        draws += 1
        ptype = _structured_type(degree, rng.choice("ABC"), rng)
        if ptype is None:
            continue
        matrix = ev_matrix(ptype).matrix
        if rank_q(matrix) == matrix.cols:
            found.append(ptype)
    logger.info(f"Amostra injetiva para Δ={degree.to_json()}: {count} tipos em {draws} sorteios")
    return found


def far_side(split: Split, root: int) -> frozenset[int]:
    """Lado do split que não contém a marca `root`."""
    return split.complement if root in split.label_set else split.label_set


def _check_root(ptype: ParamType, root: int):
    if not 1 <= root <= ptype.n:
        raise PreconditionError(f"A raiz deve ser uma marca contraída 1..{ptype.n}, recebeu {root}")


def directions(ptype: ParamType, root: int = 1) -> dict[Split, tuple[int, int]]:
    """Direção u_e de cada aresta limitada, orientada para longe do vértice de `root`."""
    _check_root(ptype, root)
    tree = ptype.tree
    for vertex in tree.vertices():
        total = reduce(_add, (ptype.outgoing(vertex, u) for u in tree.graph[vertex]), ZERO)
        if total != ZERO:
            raise DegreeError(f"Balanceamento violado no vértice {vertex}: soma {total}")
    return {e: ptype.direction_behind(far_side(e, root)) for e in ptype.ctype.splits}


def vertex_mult(w1: Sequence[int], w2: Sequence[int]) -> int:
    """|det(w1, w2)|."""
    return abs(w1[0] * w2[1] - w1[1] * w2[0])


def edge_weight(direction: Sequence[int]) -> int:
    """w(E): mdc das coordenadas (0 para a direção nula)."""
    return gcd(abs(direction[0]), abs(direction[1]))


def vertex_multiplicity(ptype: ParamType, vertex: tuple) -> int:
    """Multiplicidade do vértice a partir de duas arestas não contraídas."""
    tree = ptype.tree
    neighbors = [u for u in sorted(tree.graph[vertex]) if not (u[0] == "x" and ptype.is_contracted(u[1]))]
    if len(neighbors) < 2:
        return 0
    return vertex_mult(ptype.outgoing(vertex, neighbors[0]), ptype.outgoing(vertex, neighbors[1]))


@dataclass(frozen=True)
class EvaluationMatrix:
    matrix: IntMatrix
    edges: tuple[Split, ...]
    root: int


def ev_matrix(ptype: ParamType, root: int = 1) -> EvaluationMatrix:
    """Linhas: coordenadas de x_1..x_n; colunas: posição da raiz e comprimentos."""
    dirs = directions(ptype, root)
    edges = ptype.ctype.splits
    rows = []
    for i in range(1, ptype.n + 1):
        for axis in (0, 1):
            row = [int(axis == 0), int(axis == 1)]
            row += [dirs[e][axis] if i in far_side(e, root) else 0 for e in edges]
            rows.append(row)
    return EvaluationMatrix(IntMatrix.from_rows(rows, 2 + len(edges)), edges, root)


def _check_codim1(ptype: ParamType):
    if ptype.n != ptype.degree.m - 1:
        raise PreconditionError(f"Exige n = |Δ|-1, recebeu n={ptype.n} e |Δ|={ptype.degree.m}")
    if ptype.codim != 1:
        raise PreconditionError(f"Exige tipo de codimensão 1, recebeu codimensão {ptype.codim}")


def mult_direct(ptype: ParamType, root: int = 1) -> int:
    """Multiplicidade pelo índice de reticulado da matriz de avaliação."""
    _check_codim1(ptype)
    return d_of(ev_matrix(ptype, root).matrix)


def _edge_key(a: tuple, b: tuple) -> tuple:
    return (a, b) if a < b else (b, a)


def _region_graph(ptype: ParamType, removed: tuple | None = None) -> nx.Graph:
    # nós ("vtx", v) para vértices sem marca; nós ("edge", e) para arestas
    # limitadas e fins não contraídos
    tree = ptype.tree
    marked = ptype.marked_vertices()
    graph = nx.Graph()
    for v in tree.vertices():
        if v not in marked and v != removed:
            graph.add_node(("vtx", v))
    for a, b in tree.graph.edges():
        leaf = a if a[0] == "x" else b if b[0] == "x" else None
        if leaf is not None and ptype.is_contracted(leaf[1]):
            continue
        key = ("edge", _edge_key(a, b))
        graph.add_node(key)
        for endpoint in (a, b):
            if endpoint[0] == "v" and endpoint not in marked and endpoint != removed:
                graph.add_edge(key, ("vtx", endpoint))
    return graph


def _end_label(edge: tuple) -> int | None:
    a, b = edge
    for node in (a, b):
        if node[0] == "x":
            return node[1]
    return None


@dataclass(frozen=True)
class Region:
    vertices: tuple[tuple, ...]
    edges: tuple[tuple, ...]
    ends: tuple[int, ...]

    @property
    def bounded(self) -> bool:
        return not self.ends


def _regions_of(graph: nx.Graph) -> list[Region]:
    regions = []
    for component in nx.connected_components(graph):
        vertices = tuple(sorted(node[1] for node in component if node[0] == "vtx"))
        edges = tuple(sorted(node[1] for node in component if node[0] == "edge"))
        ends = tuple(sorted(x for x in map(_end_label, edges) if x is not None))
        regions.append(Region(vertices, edges, ends))
    return sorted(regions, key=lambda r: (r.edges, r.vertices))


@dataclass(frozen=True)
class RegionDecomposition:
    regions: tuple[Region, ...]
    marked_vertices: frozenset
    four_valent_vertex: tuple | None
    classification: str
    ptype: ParamType = field(repr=False, compare=False)

    @property
    def strings(self) -> list[Region]:
        return [r for r in self.regions if len(r.ends) >= 2]

    @property
    def has_string(self) -> bool:
        return bool(self.strings)

    @property
    def bounded_regions(self) -> list[Region]:
        return [r for r in self.regions if r.bounded]

    @cached_property
    def free(self) -> dict:
        """(vértice, vizinho) -> True se a aresta é livre (alcança um fim sem passar pelo vértice)."""
        return _free_flags(self.ptype)


def _free_flags(ptype: ParamType) -> dict:
    tree = ptype.tree
    flags = {}
    for vertex in tree.vertices():
        graph = _region_graph(ptype, removed=vertex)
        for neighbor in sorted(tree.graph[vertex]):
            if neighbor[0] == "x" and ptype.is_contracted(neighbor[1]):
                continue
            component = nx.node_connected_component(graph, ("edge", _edge_key(vertex, neighbor)))
            flags[(vertex, neighbor)] = any(
                node[0] == "edge" and _end_label(node[1]) is not None for node in component
            )
    return flags


def analyze_regions(ptype: ParamType) -> RegionDecomposition:
    """Regiões de Γ sem os vértices marcados e a classificação A/B/C do tipo."""
    regions = tuple(_regions_of(_region_graph(ptype)))
    marked = ptype.marked_vertices()
    four = None
    if ptype.codim != 1:
        classification = "Interior"
    else:
        four = ptype.tree.four_valent_vertex()
        classification = _classify(ptype, regions, marked, four)
    return RegionDecomposition(regions, marked, four, classification, ptype)


def _classify(ptype: ParamType, regions, marked, four) -> str:
    matrix = ev_matrix(ptype).matrix
    if rank_q(matrix) < matrix.cols:
        return "NonInjective"
    bounded = [r for r in regions if r.bounded]
    if four in marked:
        if len(bounded) != 1:
            raise ClassificationError(f"Tipo {ptype.ctype}: vértice 4-valente marcado com {len(bounded)} regiões limitadas")
        return "A"
    if all(len(r.ends) == 1 for r in regions):
        return "B"
    home = next(r for r in regions if four in r.vertices)
    others = [r for r in regions if r is not home]
    if len(home.ends) == 2 and len(bounded) == 1 and all(len(r.ends) == 1 for r in others if not r.bounded):
        return "C"
    raise ClassificationError(f"Tipo {ptype.ctype} não se encaixa em A, B ou C")


def _marked_edges(region_edges: Iterable[tuple], marked: frozenset) -> list[tuple]:
    return [e for e in region_edges if e[0] in marked or e[1] in marked]


def _gcd_all(values: Iterable[int]) -> int:
    return reduce(gcd, values, 0)


def _edge_weight_of(ptype: ParamType, edge: tuple) -> int:
    a, b = edge
    if a[0] == "x":
        a, b = b, a
    return edge_weight(ptype.outgoing(a, b))


def mult_closed(ptype: ParamType, decomposition: RegionDecomposition | None = None) -> int:
    """Multiplicidade pelas fórmulas fechadas dos tipos A, B e C."""
    _check_codim1(ptype)
    decomposition = decomposition or analyze_regions(ptype)
    kind = decomposition.classification
    if kind not in ("A", "B", "C"):
        raise ClassificationError(f"Sem fórmula fechada para a classificação {kind}")
    tree = ptype.tree
    marked = decomposition.marked_vertices
    four = decomposition.four_valent_vertex
    vertex_product = prod(
        vertex_multiplicity(ptype, v)
        for v in tree.vertices()
        if v not in marked and tree.valence(v) == 3
    )
    fixed = [u for u in sorted(tree.graph[four]) if not decomposition.free.get((four, u), True)]

    if kind in ("A", "C"):
        region = decomposition.bounded_regions[0]
        factor = _gcd_all(_edge_weight_of(ptype, e) for e in _marked_edges(region.edges, marked))
        if kind == "A":
            return factor * vertex_product
        if len(fixed) != 2:
            raise ClassificationError(f"Tipo C com {len(fixed)} arestas fixas no vértice 4-valente")
        turn = vertex_mult(ptype.outgoing(four, fixed[0]), ptype.outgoing(four, fixed[1]))
        return factor * turn * vertex_product

    if len(fixed) != 3:
        raise ClassificationError(f"Tipo B com {len(fixed)} arestas fixas no vértice 4-valente")
    without_four = _region_graph(ptype, removed=four)
    values = []
    for edge in fixed:
        others = [u for u in fixed if u != edge]
        turn = vertex_mult(ptype.outgoing(four, others[0]), ptype.outgoing(four, others[1]))
        behind = nx.node_connected_component(without_four, ("edge", _edge_key(four, edge)))
        region_edges = [node[1] for node in behind if node[0] == "edge"]
        values += [_edge_weight_of(ptype, e) * turn for e in _marked_edges(region_edges, marked)]
    return _gcd_all(values) * vertex_product


@dataclass(frozen=True)
class SplitOff:
    remainder: ParamType
    part: ParamType
    vertex_product: int

    @cached_property
    def applies(self) -> bool:
        """Hipóteses da redução: parte trivalente, k fins e k-1 marcas, cada região com um fim original."""
        part = self.part
        tree = part.tree
        if any(tree.valence(v) != 3 for v in tree.vertices()):
            return False
        if part.n != part.degree.m - 2:
            return False
        cut = part.total
        return all(len([x for x in r.ends if x != cut]) == 1 for r in analyze_regions(part).regions)


def split_off(ptype: ParamType, split: Split) -> SplitOff:
    """Corta `ptype` na aresta `split`: resto com x_1 e parte destacada."""
    if split not in ptype.ctype.split_set:
        raise PreconditionError(f"{split} não é aresta de {ptype.ctype}")
    everything = frozenset(range(1, ptype.total + 1))
    far = far_side(split, 1)
    near = everything - far
    u = ptype.direction_behind(far)
    if u == ZERO:
        raise PreconditionError(f"Aresta {split} tem direção nula")

    def relabel(labels):
        markings = sorted(x for x in labels if ptype.is_contracted(x))
        ends = sorted(x for x in labels if not ptype.is_contracted(x))
        mapping = {old: k + 1 for k, old in enumerate(markings)}
        mapping.update({old: len(markings) + k + 1 for k, old in enumerate(ends)})
        return len(markings), [ptype.end_direction(x) for x in ends], mapping

    n1, ends1, map1 = relabel(near)
    n2, ends2, map2 = relabel(far)
    total1, total2 = n1 + len(ends1) + 1, n2 + len(ends2) + 1
    splits1, splits2 = [], []
    for s in ptype.ctype.splits:
        if s == split:
            continue
        inside = next((side for side in (s.label_set, s.complement) if side < far), None)
        if inside is not None:
            splits2.append(Split.of(total2, [map2[x] for x in inside]))
        else:
            outside = s.label_set if not (s.label_set & far) else s.complement
            splits1.append(Split.of(total1, [map1[x] for x in outside]))
    remainder = ParamType(n1, Degree(tuple(ends1) + (u,)), CombType.of(total1, splits1))
    part = ParamType(n2, Degree(tuple(ends2) + (_neg(u),)), CombType.of(total2, splits2))
    marked = part.marked_vertices()
    vertex_product = prod(vertex_multiplicity(part, v) for v in part.tree.vertices() if v not in marked)
    return SplitOff(remainder, part, vertex_product)


@dataclass(frozen=True, order=True)
class ImageCell:
    rays: tuple[tuple[int, ...], ...]
    weight: int

    def to_json(self) -> dict:
        return {"rays": [list(r) for r in self.rays], "weight": self.weight}


def _primitive(vector: Sequence[int]) -> tuple[int, ...]:
    g = _gcd_all(abs(x) for x in vector)
    return tuple(x // g for x in vector) if g else tuple(vector)


def image_rays(ptype: ParamType) -> tuple[tuple[int, ...], ...]:
    """Raios primitivos da imagem, com x_1 transladado para a origem."""
    matrix = ev_matrix(ptype, root=1).matrix
    # as linhas de x_1 não dependem de comprimentos; descartá-las mata as translações
    return tuple(sorted(_primitive(matrix.column(c)[2:]) for c in range(2, matrix.cols)))


def pushforward_codim1(cycle: Cycle, degree: Degree) -> list[ImageCell]:
    """Push-forward de um ciclo de codimensão 1 por ev: células da imagem com pesos somados."""
    n = degree.m - 1
    total = n + degree.m
    if cycle.is_zero():
        return []
    if cycle.n != total or cycle.dim != total - 4:
        raise PreconditionError(
            f"Push-forward exige ciclo de codimensão 1 em M_0,{total}, recebeu M_0,{cycle.n} dim {cycle.dim}"
        )

    def contribution(item):
        ctype, weight = item
        ptype = ParamType(n, degree, ctype)
        mult = mult_direct(ptype)
        if mult == 0:
            return None
        return image_rays(ptype), weight * mult

    accumulated = defaultdict(int)
    dropped = 0
    for result in parallel_map(contribution, cycle.cones):
        if result is None:
            dropped += 1
            continue
        accumulated[result[0]] += result[1]
    cells = sorted(ImageCell(rays, w) for rays, w in accumulated.items() if w)
    logger.info(f"Push-forward: {len(cycle)} cones, {dropped} não injetivos, {len(cells)} células")
    conflicts = refinement_conflicts(cells)
    if conflicts:
        logger.warning(f"⚠️ {len(conflicts)} pares de células se sobrepõem sem coincidir (refinamento não suportado)")
    return cells


def _span_key(rays: Sequence[Sequence[int]]) -> tuple:
    return tuple(v.to_ints() for v in rational_row_basis([list(r) for r in rays], len(rays[0])))


def _interior_in(point: Sequence[int], rays: Sequence[Sequence[int]]) -> bool:
    coefficients = solve_in_span_q(point, rays)
    return coefficients is not None and all(c > 0 for c in coefficients)


def refinement_conflicts(cells: Sequence[ImageCell]) -> list[tuple[ImageCell, ImageCell]]:
    """Pares de células distintas de mesmo span cujo interior de uma cai na outra."""
    groups = defaultdict(list)
    for cell in cells:
        if cell.rays:
            groups[_span_key(cell.rays)].append(cell)
    conflicts = []
    for group in groups.values():
        for a, b in combinations(group, 2):
            if a.rays == b.rays:
                continue
            inner_a = [sum(col) for col in zip(*a.rays)]
            inner_b = [sum(col) for col in zip(*b.rays)]
            if _interior_in(inner_a, b.rays) or _interior_in(inner_b, a.rays):
                conflicts.append((a, b))
    return conflicts


def image_balancing(cells: Sequence[ImageCell]) -> dict[tuple, bool]:
    """Para cada face das células: Σ w·(raio oposto) pertence ao span da face?"""
    faces = defaultdict(list)
    for cell in cells:
        for ray in cell.rays:
            faces[tuple(r for r in cell.rays if r != ray)].append((cell.weight, ray))
    verdicts = {}
    for face, terms in sorted(faces.items()):
        length = len(terms[0][1])
        total = [sum(w * ray[k] for w, ray in terms) for k in range(length)]
        verdicts[face] = in_span_q(total, [list(r) for r in face])
    return verdicts


def special_position(degree: Degree, version: str) -> list[ImageCell]:
    """Ciclo de pontos em posição especial: (v1) Σψ_i ou (v2) esqueleto, empurrado por ev."""
    n = degree.m - 1
    if n < 2:
        raise PreconditionError(f"Posição especial exige n = |Δ|-1 > 1, recebeu n={n}")
    total = n + degree.m
    if version == "v1":
        cycle = reduce(add_cycles, (psi(i, total) for i in range(2, n + 1)), psi(1, total))
    elif version == "v2":
        cycle = skeleton(total, 1)
    else:
        raise PreconditionError(f"Versão desconhecida: {version}")
    logger.info(f"Posição especial ({version}) para Δ={degree.to_json()}: {len(cycle)} cones em M_0,{total}")
    return pushforward_codim1(cycle, degree)


# --- Órbitas por simetria ---
#
# O grupo age trocando as marcas contraídas entre si e os fins de mesma
# direção entre si. Um tipo de codimensão 1 enraizado no vértice 4-valente é
# um multiconjunto de 4 árvores binárias com folhas coloridas: cor 0 para as
# marcas, cores 1..k para as direções distintas (em ordem crescente).
# Forma canônica: folha (0, cor); nó (1, a, b) com a <= b.

def _color_labels(degree: Degree, n: int) -> list[list[int]]:
    groups = [list(range(1, n + 1))]
    for direction in sorted(set(degree.vectors)):
        groups.append([n + i + 1 for i, v in enumerate(degree.vectors) if v == direction])
    return groups


def _leaf_count(shape: tuple) -> int:
    return 1 if shape[0] == 0 else _leaf_count(shape[1]) + _leaf_count(shape[2])


def _sub_counts(counts: tuple[int, ...]) -> Iterable[tuple[int, ...]]:
    return product(*(range(c + 1) for c in counts))


@lru_cache(maxsize=None)
def _shapes(counts: tuple[int, ...]) -> tuple[tuple[tuple, int], ...]:
    """Formas com `counts[c]` folhas de cor c, cada uma com seu número de automorfismos."""
    if sum(counts) == 1:
        return (((0, counts.index(1)), 1),)
    found = {}
    for left in _sub_counts(counts):
        right = tuple(c - l for c, l in zip(counts, left))
        if not any(left) or not any(right) or left > right:
            continue
        for a, aut_a in _shapes(left):
            for b, aut_b in _shapes(right):
                pair = (1, a, b) if a <= b else (1, b, a)
                found[pair] = aut_a * aut_b * (2 if a == b else 1)
    return tuple(sorted(found.items()))


def _root_children(counts: tuple[int, ...], k: int, lower: tuple) -> Iterable[tuple]:
    # k filhos em ordem não decrescente de (folhas, forma), todos >= lower
    if k == 1:
        size = sum(counts)
        for shape, aut in _shapes(counts):
            if (size, shape) >= lower:
                yield ((shape, aut),)
        return
    for first in _sub_counts(counts):
        size = sum(first)
        rest = tuple(c - f for c, f in zip(counts, first))
        if size == 0 or size < lower[0] or sum(rest) < (k - 1) * size:
            continue
        for shape, aut in _shapes(first):
            if (size, shape) < lower:
                continue
            for tail in _root_children(rest, k - 1, (size, shape)):
                yield ((shape, aut),) + tail


@dataclass(frozen=True)
class TypeOrbit:
    """Órbita de tipos de codimensão 1 sob a troca de marcas e de fins paralelos."""

    degree: Degree
    key: tuple
    size: int

    @property
    def markings_at_four_valent(self) -> int:
        """Marcas contraídas presas ao vértice 4-valente (peso de Σψ_i no tipo)."""
        return sum(1 for child in self.key if child == (0, 0))

    @property
    def representative(self) -> ParamType:
        """Tipo da órbita que usa os menores rótulos de cada cor na ordem da forma."""
        pools = [iter(labels) for labels in _color_labels(self.degree, self.degree.m - 1)]
        splits = []

        def walk(shape):
            if shape[0] == 0:
                return [next(pools[shape[1]])]
            labels = walk(shape[1]) + walk(shape[2])
            splits.append(labels)
            return labels

        for child in self.key:
            walk(child)
        return ParamType.of(self.degree, splits)


@lru_cache(maxsize=4)
def enumerate_param_orbits(degree: Degree) -> tuple[TypeOrbit, ...]:
    """Uma órbita por classe de tipos de codimensão 1; a soma dos tamanhos é o total de tipos."""
    groups = _color_labels(degree, degree.m - 1)
    counts = tuple(len(g) for g in groups)
    if sum(counts) < 5:
        raise PreconditionError(f"Órbitas exigem ao menos 5 rótulos, Δ={degree.to_json()}")
    order = prod(factorial(c) for c in counts)
    orbits = []
    for children in _root_children(counts, 4, (0, ())):
        shapes = tuple(shape for shape, _ in children)
        aut = prod(a for _, a in children) * prod(factorial(k) for k in Counter(shapes).values())
        orbits.append(TypeOrbit(degree, shapes, order // aut))
    logger.info(
        f"Δ={degree.to_json()}: {len(orbits)} órbitas cobrindo {sum(o.size for o in orbits)} tipos (grupo de ordem {order})"
    )
    return tuple(orbits)


def orbit_key(ptype: ParamType) -> tuple:
    """Forma canônica do tipo; dois tipos estão na mesma órbita sse as chaves coincidem."""
    _check_codim1(ptype)
    color = {x: c for c, labels in enumerate(_color_labels(ptype.degree, ptype.n)) for x in labels}
    tree = ptype.tree
    four = tree.four_valent_vertex()

    def shape(vertex, parent):
        if vertex[0] == "x":
            return (0, color[vertex[1]])
        a, b = sorted(shape(u, vertex) for u in tree.graph[vertex] if u != parent)
        return (1, a, b)

    children = [shape(u, four) for u in tree.graph[four]]
    return tuple(sorted(children, key=lambda s: (_leaf_count(s), s)))


def _relabel_ray(ray: Sequence[int], perm: Sequence[int]) -> tuple[int, ...]:
    # perm[i] = nova posição (base 0) da marca i+1; x_1 volta para a origem
    values = [ZERO] + [(ray[2 * k], ray[2 * k + 1]) for k in range(len(perm) - 1)]
    moved = [ZERO] * len(perm)
    for i, target in enumerate(perm):
        moved[target] = values[i]
    base = moved[0]
    return _primitive(tuple(c for v in moved[1:] for c in (v[0] - base[0], v[1] - base[1])))


def _cell_orbit(rays: tuple[tuple[int, ...], ...], n: int) -> frozenset:
    return frozenset(
        tuple(sorted(_relabel_ray(ray, perm) for ray in rays)) for perm in permutations(range(n))
    )


@dataclass(frozen=True, order=True)
class CellOrbit:
    rays: tuple[tuple[int, ...], ...]  # menor célula da órbita
    size: int
    weight: int  # peso de cada célula da órbita

    def cells(self) -> list[ImageCell]:
        n = len(self.rays[0]) // 2 + 1
        return sorted(ImageCell(rays, self.weight) for rays in _cell_orbit(self.rays, n))

    def to_json(self) -> dict:
        return {"rays": [list(r) for r in self.rays], "orbit_size": self.size, "weight": self.weight}


@lru_cache(maxsize=4)
def _injective_orbit_images(degree: Degree) -> tuple:
    n = degree.m - 1

    def image(orbit):
        ptype = orbit.representative
        mult = mult_direct(ptype)
        if mult == 0:
            return None
        cells = _cell_orbit(image_rays(ptype), n)
        return orbit, mult, min(cells), len(cells)

    return tuple(r for r in parallel_map(image, enumerate_param_orbits(degree)) if r is not None)


def special_position_orbits(degree: Degree, version: str) -> list[CellOrbit]:
    """`special_position` a menos da troca das marcas: uma entrada por órbita de células."""
    n = degree.m - 1
    if n < 2:
        raise PreconditionError(f"Posição especial exige n = |Δ|-1 > 1, recebeu n={n}")
    if version not in ("v1", "v2"):
        raise PreconditionError(f"Versão desconhecida: {version}")
    totals = defaultdict(int)
    sizes = {}
    for orbit, mult, rays, size in _injective_orbit_images(degree):
        weight = orbit.markings_at_four_valent if version == "v1" else 1
        if weight:
            totals[rays] += orbit.size * weight * mult
            sizes[rays] = size
    cells = []
    for rays, total in totals.items():
        weight, rest = divmod(total, sizes[rays])
        if rest:
            raise ValueError(f"Peso {total} não se divide pela órbita de {sizes[rays]} células")
        cells.append(CellOrbit(rays, sizes[rays], weight))
    logger.info(f"Posição especial ({version}) para Δ={degree.to_json()}: {len(cells)} órbitas de células")
    return sorted(cells)
