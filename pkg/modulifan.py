# modulifan.py

"""M_{0,n} como leque tropical.

Vetores ambientes em Z^{C(n,2)}, espaço de linealidade gerado por d_1..d_n,
verificação de balanceamento, esqueletos, classes Psi, funções racionais e
seus divisores de Weil, divisores vitais e aritmética de ciclos.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Mapping

from combtypes import (
    CombType,
    Split,
    SplitError,
    enumerate_types,
    resolved_vertex,
    tree_from_splits,
)
from exactlin import solve_in_span_q
from extensions import parallel_map

logger = logging.getLogger(__name__)


class BalancingError(ValueError):
    """Ciclo não balanceado numa face (ou peso não inteiro no divisor)."""

    def __init__(self, message, face=None):
        super().__init__(message)
        self.face = face


@lru_cache(maxsize=None)
def pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(combinations(range(1, n + 1), 2))


@lru_cache(maxsize=None)
def pair_index(n: int) -> dict[tuple[int, int], int]:
    return {pair: k for k, pair in enumerate(pairs(n))}


@dataclass(frozen=True)
class LatticeVector:
    n: int
    coords: tuple[int, ...]

    def __add__(self, other: LatticeVector) -> LatticeVector:
        return LatticeVector(self.n, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __rmul__(self, factor: int) -> LatticeVector:
        return LatticeVector(self.n, tuple(factor * a for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)


def subset_vector(n: int, labels: Iterable[int]) -> LatticeVector:
    """ṽ(I) para qualquer subconjunto I, inclusive unitário."""
    inside = frozenset(labels)
    return LatticeVector(n, tuple(int((i in inside) != (j in inside)) for i, j in pairs(n)))


@lru_cache(maxsize=None)
def tilde_v(split: Split) -> LatticeVector:
    return subset_vector(split.n, split.members)


@lru_cache(maxsize=None)
def lineality_basis(n: int) -> tuple[LatticeVector, ...]:
    return tuple(subset_vector(n, [i]) for i in range(1, n + 1))


def sum_vectors(n: int, terms: Iterable[tuple[int, LatticeVector]]) -> LatticeVector:
    total = [0] * len(pairs(n))
    for factor, vector in terms:
        for k, c in enumerate(vector.coords):
            total[k] += factor * c
    return LatticeVector(n, tuple(total))


def distance_vector(ctype: CombType) -> LatticeVector:
    """Σ ṽ(e) sobre as arestas do tipo: as distâncias entre folhas, par a par."""
    return sum_vectors(ctype.n, ((1, tilde_v(s)) for s in ctype.splits))


@dataclass(frozen=True)
class Cycle:
    """Coleção ponderada de cones de mesma dimensão em M_{0,n}."""

    n: int
    dim: int
    cones: tuple[tuple[CombType, int], ...]
    fan: bool = False

    @classmethod
    def from_weights(cls, n: int, dim: int, weights: Mapping[CombType, int], fan: bool = False) -> Cycle:
        kept = []
        for ctype, weight in weights.items():
            if ctype.n != n or ctype.dim != dim:
                raise SplitError(f"Cone {ctype} não tem dimensão {dim} em M_0,{n}")
            if weight != int(weight):
                raise ValueError(f"Peso não inteiro {weight} em {ctype}")
            if weight:
                kept.append((ctype, int(weight)))
        if fan and any(w < 0 for _, w in kept):
            raise ValueError("Um leque tropical exige pesos positivos")
        return cls(n, dim, tuple(sorted(kept)), fan)

    @cached_property
    def weights(self) -> dict[CombType, int]:
        return dict(self.cones)

    def weight(self, ctype: CombType) -> int:
        return self.weights.get(ctype, 0)

    def support(self) -> list[CombType]:
        return [c for c, _ in self.cones]

    def __len__(self) -> int:
        return len(self.cones)

    def is_zero(self) -> bool:
        return not self.cones

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "dim": self.dim,
            "cones": [{"splits": c.to_json()["splits"], "weight": w} for c, w in self.cones],
        }

    @classmethod
    def from_json(cls, data: dict) -> Cycle:
        n, dim = int(data["n"]), int(data["dim"])
        weights = {CombType.of(n, cone["splits"]): int(cone["weight"]) for cone in data.get("cones", [])}
        return cls.from_weights(n, dim, weights)


def add_cycles(first: Cycle, second: Cycle) -> Cycle:
    if first.n != second.n or first.dim != second.dim:
        raise SplitError(
            f"Ciclos incompatíveis: M_0,{first.n} dim {first.dim} e M_0,{second.n} dim {second.dim}"
        )
    total = defaultdict(int)
    for ctype, weight in first.cones + second.cones:
        total[ctype] += weight
    fan = first.fan and second.fan
    return Cycle.from_weights(first.n, first.dim, total, fan=fan)


def scale_cycle(cycle: Cycle, factor: int) -> Cycle:
    weights = {c: factor * w for c, w in cycle.cones}
    return Cycle.from_weights(cycle.n, cycle.dim, weights, fan=cycle.fan and factor > 0)


def skeleton(n: int, codim: int) -> Cycle:
    """Todos os cones de codimensão `codim` com peso 1."""
    if not 0 <= codim <= n - 3:
        raise SplitError(f"Codimensão {codim} fora de 0..{n - 3}")
    dim = n - 3 - codim
    return Cycle.from_weights(n, dim, {c: 1 for c in enumerate_types(n, dim)}, fan=True)


def marking_on_high_valence(ctype: CombType, label: int) -> bool:
    """True se a marca `label` está num vértice de valência >= 4."""
    tree = tree_from_splits(ctype)
    return tree.valence(tree.vertex_of_label(label)) >= 4


def psi_skeleton(i: int, n: int, codim: int) -> Cycle:
    if n < 4 or not 1 <= i <= n:
        raise SplitError(f"Classe Psi inválida: i={i}, n={n}")
    if not 0 <= codim <= n - 4:
        raise SplitError(f"Codimensão {codim} fora de 0..{n - 4}")
    dim = n - 4 - codim
    cones = [c for c in enumerate_types(n, dim) if marking_on_high_valence(c, i)]
    return Cycle.from_weights(n, dim, {c: 1 for c in cones}, fan=True)


def psi(i: int, n: int) -> Cycle:
    """ψ_i como ciclo de codimensão 1: peso 1 nos tipos com x_i no vértice 4-valente."""
    return psi_skeleton(i, n, 0)


def psi_natural(i: int, n: int) -> Cycle:
    """ψ_i^♮: o esqueleto de codimensão 1 menos ψ_i."""
    return add_cycles(skeleton(n, 1), scale_cycle(psi(i, n), -1))


def ray_sum(cycle: Cycle) -> LatticeVector:
    """Σ w·ṽ sobre os raios de um ciclo de dimensão 1."""
    if cycle.dim != 1:
        raise SplitError(f"Soma de raios exige ciclo de dimensão 1, recebeu {cycle.dim}")
    return sum_vectors(cycle.n, ((w, tilde_v(c.splits[0])) for c, w in cycle.cones))


def ray_sum_by_side(cycle: Cycle, label: int) -> dict[int, LatticeVector]:
    """Soma de raios separada pelo tamanho do lado que contém `label`."""
    if cycle.dim != 1:
        raise SplitError(f"Soma de raios exige ciclo de dimensão 1, recebeu {cycle.dim}")
    groups = defaultdict(list)
    for ctype, weight in cycle.cones:
        split = ctype.splits[0]
        groups[len(split.side_of(label))].append((weight, tilde_v(split)))
    return {size: sum_vectors(cycle.n, terms) for size, terms in sorted(groups.items())}


def adjacent_cones(cones: Iterable[CombType]) -> dict[CombType, list[tuple[CombType, Split]]]:
    """Índice face -> [(cone, split extra)], em ordem determinística."""
    index = defaultdict(list)
    for cone in sorted(cones):
        for split in cone.splits:
            index[cone.without(split)].append((cone, split))
    return dict(sorted(index.items()))


def face_span(face: CombType) -> list[tuple[int, ...]]:
    """Geradores de V_τ + linealidade: raios de τ seguidos de d_1..d_n."""
    return [tilde_v(s).coords for s in face.splits] + [d.coords for d in lineality_basis(face.n)]


@dataclass(frozen=True)
class FaceReport:
    face: CombType
    sum_vector: LatticeVector
    balanced: bool
    coefficients: tuple[Fraction, ...] | None

    def to_json(self) -> dict:
        data = {
            "face": self.face.to_json()["splits"],
            "balanced": self.balanced,
            "sum": list(self.sum_vector.coords),
        }
        if self.coefficients is not None:
            data["coefficients"] = [str(c) for c in self.coefficients]
        return data


@dataclass(frozen=True)
class BalancingCertificate:
    faces: tuple[FaceReport, ...]

    @property
    def balanced(self) -> bool:
        return all(f.balanced for f in self.faces)

    def violations(self) -> list[FaceReport]:
        return [f for f in self.faces if not f.balanced]

    @property
    def first_violation(self) -> FaceReport | None:
        bad = self.violations()
        return bad[0] if bad else None

    def to_json(self) -> dict:
        return {"balanced": self.balanced, "faces": [f.to_json() for f in self.faces]}


def _check_face(cycle: Cycle, face: CombType, adjacent: list[tuple[CombType, Split]]) -> FaceReport:
    total = sum_vectors(cycle.n, ((cycle.weight(c), tilde_v(s)) for c, s in adjacent))
    coefficients = solve_in_span_q(total.coords, face_span(face))
    logger.debug(f"Face {face}: soma {total.coords} -> {'ok' if coefficients is not None else 'falha'}")
    return FaceReport(face, total, coefficients is not None, None if coefficients is None else tuple(coefficients))


def is_balanced(cycle: Cycle) -> BalancingCertificate:
    """Certificado de balanceamento face a face, violações primeiro."""
    if cycle.dim < 1:
        return BalancingCertificate(())
    index = adjacent_cones(cycle.support())
    reports = parallel_map(lambda item: _check_face(cycle, *item), index.items())
    ordered = [r for r in reports if not r.balanced] + [r for r in reports if r.balanced]
    logger.info(
        f"Balanceamento em M_0,{cycle.n} (dim {cycle.dim}): {len(reports)} faces, "
        f"{len(reports) - sum(r.balanced for r in reports)} violações"
    )
    return BalancingCertificate(tuple(ordered))


@dataclass(frozen=True)
class VertexPart:
    face: CombType
    vertex: tuple
    sum_vector: LatticeVector
    balanced: bool


def local_balancing(cycle: Cycle) -> list[VertexPart]:
    """Balanceamento separado por vértice resolvido de cada face."""
    parts = []
    for face, adjacent in adjacent_cones(cycle.support()).items():
        groups = defaultdict(list)
        for cone, split in adjacent:
            groups[resolved_vertex(face, split)].append((cycle.weight(cone), tilde_v(split)))
        span = face_span(face)
        for vertex, terms in sorted(groups.items()):
            total = sum_vectors(cycle.n, terms)
            parts.append(VertexPart(face, vertex, total, solve_in_span_q(total.coords, span) is not None))
    return parts


@dataclass(frozen=True)
class RationalFunctionOnFan:
    """Função linear por partes em M_{0,n}, dada pelos valores nos raios."""

    n: int
    ray_values: tuple[tuple[Split, Fraction], ...]

    @classmethod
    def from_values(cls, n: int, values: Mapping[Split, object]) -> RationalFunctionOnFan:
        for split in values:
            if split.n != n:
                raise SplitError(f"Raio {split} não pertence a M_0,{n}")
        kept = tuple(sorted((s, Fraction(v)) for s, v in values.items() if v))
        return cls(n, kept)

    @classmethod
    def phi(cls, split: Split) -> RationalFunctionOnFan:
        return cls.from_values(split.n, {split: 1})

    @classmethod
    def zero(cls, n: int) -> RationalFunctionOnFan:
        return cls(n, ())

    def value(self, split: Split) -> Fraction:
        return dict(self.ray_values).get(split, Fraction(0))


def weil_divisor(
    function: RationalFunctionOnFan,
    cycle: Cycle,
    certificate: BalancingCertificate | None = None,
) -> Cycle:
    """Divisor de Weil de `function` sobre `cycle`.

    `certificate` pode ser reaproveitado entre funções, desde que seja o
    certificado do próprio `cycle`.
    """
    if cycle.dim < 1:
        raise SplitError("Divisor de Weil exige ciclo de dimensão >= 1")
    if certificate is None:
        certificate = is_balanced(cycle)
    bad = certificate.first_violation
    if bad is not None:
        raise BalancingError(f"Ciclo não balanceado na face {bad.face}", face=bad.face)
    values = dict(function.ray_values)
    index = adjacent_cones(cycle.support())
    weights = {}
    for report in certificate.faces:
        adjacent = index[report.face]
        total = sum(cycle.weight(c) * values.get(s, 0) for c, s in adjacent)
        rays = report.face.splits
        correction = sum(report.coefficients[j] * values.get(ray, 0) for j, ray in enumerate(rays))
        weight = Fraction(total) - correction
        if weight.denominator != 1:
            raise BalancingError(f"Peso não inteiro {weight} na face {report.face}", face=report.face)
        weights[report.face] = int(weight)
    return Cycle.from_weights(cycle.n, cycle.dim - 1, weights)


@lru_cache(maxsize=None)
def _fan_certificate(n: int) -> BalancingCertificate:
    return is_balanced(skeleton(n, 0))


def vital_weight(ctype: CombType, split: Split) -> int:
    """Peso de D^S num tipo de codimensão 1, pela fórmula fechada em A,B,C,D."""
    tree = tree_from_splits(ctype)
    parts = tree.marking_sets(tree.four_valent_vertex())
    if split.label_set in parts or split.complement in parts:
        return -1
    if any(a | b == split.label_set for a, b in combinations(parts, 2)):
        return 1
    return 0


def vital(split: Split, n: int) -> Cycle:
    """Divisor vital D^S: divisor de Weil de φ_S no leque inteiro."""
    if split.n != n:
        raise SplitError(f"Split {split} não pertence a M_0,{n}")
    fan = skeleton(n, 0)
    return weil_divisor(RationalFunctionOnFan.phi(split), fan, certificate=_fan_certificate(n))
