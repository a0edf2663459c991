# irreducibility.py

"""Irredutibilidade local, conexidade em codimensão 1 e irredutibilidade global
de ciclos em M_{0,n}, e circuitos da matroide vetorial dos raios."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import networkx as nx

from combtypes import CombType, Split, enumerate_types, tree_from_splits
from exactlin import IntMatrix, in_span_q, nullspace_q, rank_q, rational_row_basis
from extensions import parallel_map
from modulifan import Cycle, LatticeVector, adjacent_cones, lineality_basis, tilde_v

logger = logging.getLogger(__name__)


class InconsistentReportError(RuntimeError):
    """O relatório contradiz local ∧ conexo ⇒ global."""


@dataclass(frozen=True)
class LocalSolution:
    face: CombType
    cones: tuple[CombType, ...]
    dim: int
    # base canônica nas coordenadas a_σ e base completa [normais | raios | linealidade]
    basis: tuple[tuple[int, ...], ...]
    full_basis: tuple[tuple[int, ...], ...]


def _local(face: CombType, adjacent: Sequence[tuple[CombType, Split]]) -> LocalSolution:
    n = face.n
    columns = [tilde_v(s).coords for _, s in adjacent]
    columns += [tuple(-x for x in tilde_v(s).coords) for s in face.splits]
    columns += [tuple(-x for x in d.coords) for d in lineality_basis(n)]
    full = [v.to_ints() for v in nullspace_q(IntMatrix.from_columns(columns))]
    k = len(adjacent)
    projected = [row[:k] for row in full]
    basis = tuple(v.to_ints() for v in rational_row_basis(projected, k))
    return LocalSolution(face, tuple(c for c, _ in adjacent), len(basis), basis, tuple(full))


def local_solution_space(support: Iterable[CombType], face: CombType) -> LocalSolution:
    """Pesos nos cones adjacentes a `face` que balanceiam a face."""
    adjacent = [
        (cone, next(iter(cone.split_set - face.split_set)))
        for cone in sorted(support)
        if cone.dim == face.dim + 1 and face.split_set < cone.split_set
    ]
    if not adjacent:
        raise ValueError(f"{face} não é face de nenhum cone do suporte")
    return _local(face, adjacent)


@dataclass(frozen=True)
class LocalIrreducibility:
    ok: bool
    dims: dict = field(default_factory=dict)


def is_locally_irreducible(cycle: Cycle) -> LocalIrreducibility:
    """Localmente irredutível se o espaço local tem dimensão 1 em toda face."""
    index = adjacent_cones(cycle.support())
    solutions = parallel_map(lambda item: _local(*item), index.items())
    dims = {s.face: s.dim for s in solutions}
    return LocalIrreducibility(all(d == 1 for d in dims.values()), dims)


def connectivity_components(cycle: Cycle) -> list[list[CombType]]:
    """Componentes do grafo de cones ligados por faces comuns de codimensão 1."""
    graph = nx.Graph()
    graph.add_nodes_from(cycle.support())
    for adjacent in adjacent_cones(cycle.support()).values():
        cones = [c for c, _ in adjacent]
        graph.add_edges_from(zip(cones, cones[1:]))
    return sorted(sorted(component) for component in nx.connected_components(graph))


@dataclass(frozen=True)
class WeightSpace:
    cones: tuple[CombType, ...]
    dim: int
    basis: tuple[tuple[int, ...], ...]


def weight_space(support: Iterable[CombType]) -> WeightSpace:
    """Todos os pesos racionais no suporte que balanceiam em todas as faces."""
    cones = tuple(sorted(set(support)))
    position = {c: k for k, c in enumerate(cones)}
    index = adjacent_cones(cones)
    locals_ = parallel_map(lambda item: _local(*item), index.items())
    rows = []
    for solution in locals_:
        k = len(solution.cones)
        if solution.dim == 0:
            constraints = [tuple(int(i == j) for j in range(k)) for i in range(k)]
        else:
            # complemento ortogonal de K_τ: cada vetor vira uma equação em a|_adj
            constraints = [v.to_ints() for v in nullspace_q(IntMatrix.from_rows(solution.basis, k))]
        for constraint in constraints:
            row = [0] * len(cones)
            for j, cone in enumerate(solution.cones):
                row[position[cone]] = constraint[j]
            rows.append(row)
    logger.info(f"Sistema global: {len(rows)} equações em {len(cones)} pesos")
    if rows:
        null = nullspace_q(IntMatrix.from_rows(rows, len(cones)))
    else:
        null = nullspace_q(IntMatrix.zeros(0, len(cones)))
    basis = tuple(v.to_ints() for v in rational_row_basis([list(v) for v in null], len(cones)))
    return WeightSpace(cones, len(basis), basis)


@dataclass(frozen=True)
class IrreducibilityReport:
    local: bool
    local_dims: dict
    connected: bool
    components: tuple[tuple[CombType, ...], ...]
    weight_space_dim: int
    weight_space_basis: tuple[tuple[int, ...], ...]
    cones: tuple[CombType, ...]
    own_weights_in_space: bool

    @property
    def global_(self) -> bool:
        return self.weight_space_dim == 1

    def to_json(self) -> dict:
        return {
            "local": self.local,
            "connected": self.connected,
            "components": len(self.components),
            "weight_space_dim": self.weight_space_dim,
            "global": self.global_,
            "basis": [list(v) for v in self.weight_space_basis],
            "cones": [c.to_json()["splits"] for c in self.cones],
            "own_weights_in_space": self.own_weights_in_space,
            "faces_with_local_dim": {
                str(d): sum(1 for x in self.local_dims.values() if x == d)
                for d in sorted(set(self.local_dims.values()))
            },
        }


def is_globally_irreducible(cycle: Cycle) -> IrreducibilityReport:
    local = is_locally_irreducible(cycle)
    components = connectivity_components(cycle)
    space = weight_space(cycle.support())
    own = [cycle.weight(c) for c in space.cones]
    report = IrreducibilityReport(
        local=local.ok,
        local_dims=local.dims,
        connected=len(components) == 1,
        components=tuple(tuple(c) for c in components),
        weight_space_dim=space.dim,
        weight_space_basis=space.basis,
        cones=space.cones,
        own_weights_in_space=bool(own) and in_span_q(own, space.basis),
    )
    if report.local and report.connected and not report.global_:
        raise InconsistentReportError(f"Local e conexo, mas espaço de pesos de dimensão {space.dim}")
    logger.info(
        f"Irredutibilidade em M_0,{cycle.n}: local={report.local}, "
        f"componentes={len(components)}, dim pesos={space.dim}"
    )
    return report


@dataclass(frozen=True)
class Circuit:
    indices: tuple[int, ...]
    coefficients: tuple[int, ...]


def circuits(vectors: Sequence[LatticeVector], modulo_lineality: bool = False) -> list[Circuit]:
    """Circuitos (conjuntos dependentes minimais) por crescimento exaustivo de subconjuntos."""
    if not vectors:
        return []
    n = vectors[0].n
    extra = [d.coords for d in lineality_basis(n)] if modulo_lineality else []
    base = rank_q(IntMatrix.from_columns(extra)) if extra else 0
    total = rank_q(IntMatrix.from_columns([v.coords for v in vectors] + extra)) - base
    found: list[Circuit] = []
    for size in range(1, min(len(vectors), total + 1) + 1):
        for subset in combinations(range(len(vectors)), size):
            members = set(subset)
            if any(set(c.indices) <= members for c in found):
                continue
            columns = [vectors[i].coords for i in subset]
            if rank_q(IntMatrix.from_columns(columns + extra)) == size + base:
                continue
            negated = [tuple(-x for x in d) for d in extra]
            null = nullspace_q(IntMatrix.from_columns(columns + negated))
            coefficients = rational_row_basis([list(v)[:size] for v in null], size)[0].to_ints()
            found.append(Circuit(subset, coefficients))
    logger.info(f"{len(found)} circuitos entre {len(vectors)} vetores")
    return found


def marking_partition_weights(cycle: Cycle) -> dict[frozenset, list[int]]:
    """Pesos (zero incluído) de todos os tipos de codimensão 1, agrupados pela
    partição (A,B,C,D) do vértice 4-valente."""
    groups = defaultdict(list)
    for ctype in enumerate_types(cycle.n, cycle.dim):
        tree = tree_from_splits(ctype)
        parts = frozenset(tree.marking_sets(tree.four_valent_vertex()))
        groups[parts].append(cycle.weight(ctype))
    return dict(groups)
