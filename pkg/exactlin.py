# exactlin.py

"""Álgebra linear exata sobre Z e Q.

Forma normal de Smith, divisores elementares, índice de reticulado pelo mdc
dos menores maximais, posto e núcleo racionais e pertinência a subespaços.
Nenhuma conta usa ponto flutuante.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd, prod
from typing import Iterable, Sequence

from sympy import Matrix
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

logger = logging.getLogger(__name__)


class DimensionError(ValueError):
    """Formato de matriz incompatível com a operação pedida."""


@dataclass(frozen=True)
class IntMatrix:
    """Matriz inteira imutável, guardada por linhas."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionError(f"Formato inválido: {self.rows}x{self.cols}")
        if len(self.entries) != self.rows or any(len(row) != self.cols for row in self.entries):
            raise DimensionError(f"Entradas não correspondem ao formato {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> IntMatrix:
        entries = tuple(tuple(int(x) for x in row) for row in rows)
        if cols is None:
            cols = len(entries[0]) if entries else 0
        return cls(len(entries), cols, entries)

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[int]], rows: int | None = None) -> IntMatrix:
        columns = [tuple(int(x) for x in col) for col in columns]
        if rows is None:
            rows = len(columns[0]) if columns else 0
        if any(len(col) != rows for col in columns):
            raise DimensionError("Colunas com comprimentos diferentes")
        entries = tuple(tuple(col[r] for col in columns) for r in range(rows))
        return cls(rows, len(columns), entries)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, size: int) -> IntMatrix:
        return cls.from_rows([[int(r == c) for c in range(size)] for r in range(size)], size)

    def __getitem__(self, key: tuple[int, int]) -> int:
        r, c = key
        return self.entries[r][c]

    def column(self, c: int) -> tuple[int, ...]:
        return tuple(row[c] for row in self.entries)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise DimensionError(f"Produto impossível: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        columns = [other.column(c) for c in range(other.cols)]
        return IntMatrix.from_rows(
            [[sum(a * b for a, b in zip(row, col)) for col in columns] for row in self.entries],
            other.cols,
        )

    def select(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> IntMatrix:
        """Submatriz nas linhas e colunas indicadas (todas, se omitidas)."""
        rows = range(self.rows) if rows is None else rows
        cols = range(self.cols) if cols is None else cols
        return IntMatrix.from_rows([[self.entries[r][c] for c in cols] for r in rows], len(cols))

    def to_domain(self, domain=ZZ) -> DomainMatrix:
        # formato esparso: a maioria das matrizes daqui tem poucos não nulos
        data = {}
        for r, row in enumerate(self.entries):
            nonzero = {c: domain(v) for c, v in enumerate(row) if v}
            if nonzero:
                data[r] = nonzero
        return DomainMatrix(data, (self.rows, self.cols), domain)

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]


@dataclass(frozen=True)
class SNFResult:
    elementary_divisors: tuple[int, ...]
    rank: int

    @property
    def torsion(self) -> int:
        return prod(self.elementary_divisors)


@dataclass(frozen=True)
class RatVector:
    """Vetor racional exato (frações já reduzidas)."""

    entries: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(Fraction(x) for x in self.entries))

    @classmethod
    def of(cls, values: Iterable) -> RatVector:
        return cls(tuple(values))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> Fraction:
        return self.entries[i]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def primitive(self) -> RatVector:
        """Múltiplo inteiro primitivo com primeira entrada não nula positiva."""
        if self.is_zero():
            return self
        denominator = 1
        for x in self.entries:
            denominator = denominator * x.denominator // gcd(denominator, x.denominator)
        ints = [int(x * denominator) for x in self.entries]
        g = 0
        for x in ints:
            g = gcd(g, x)
        lead = next(x for x in ints if x)
        sign = 1 if lead > 0 else -1
        return RatVector(tuple(Fraction(sign * x // g) for x in ints))

    def to_ints(self) -> tuple[int, ...]:
        if any(x.denominator != 1 for x in self.entries):
            raise ValueError(f"Vetor não inteiro: {self.entries}")
        return tuple(int(x) for x in self.entries)


def _to_fraction(x) -> Fraction:
    return Fraction(int(QQ.numer(x)), int(QQ.denom(x)))


def _rational_rows(vectors: Sequence[Sequence], length: int) -> DomainMatrix:
    data = {}
    for r, vec in enumerate(vectors):
        nonzero = {}
        for c, x in enumerate(vec):
            if x:
                x = Fraction(x)
                nonzero[c] = QQ(x.numerator, x.denominator)
        if nonzero:
            data[r] = nonzero
    return DomainMatrix(data, (len(vectors), length), QQ)


def _chain(values: list[int]) -> tuple[int, ...]:
    # reordena uma diagonal positiva na cadeia de divisibilidade
    values = list(values)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            a, b = values[i], values[j]
            g = gcd(a, b)
            values[i], values[j] = g, a // g * b
    return tuple(values)


def snf(matrix: IntMatrix) -> SNFResult:
    """Divisores elementares do reticulado gerado pelas colunas de `matrix`."""
    if matrix.rows == 0 or matrix.cols == 0:
        return SNFResult((), 0)
    factors = invariant_factors(matrix.to_domain(ZZ).to_dense())
    divisors = sorted(abs(int(x)) for x in factors if x)
    return SNFResult(_chain(divisors), len(divisors))


def d_of(matrix: IntMatrix) -> int:
    """mdc dos menores maximais; 0 quando as colunas são dependentes."""
    if matrix.cols > matrix.rows:
        raise DimensionError(f"d_of exige colunas <= linhas, recebeu {matrix.rows}x{matrix.cols}")
    if matrix.cols == 0:
        return 1
    result = snf(matrix)
    if result.rank < matrix.cols:
        return 0
    return result.torsion


def minors_gcd(matrix: IntMatrix) -> int:
    """Enumeração literal dos menores maximais (oráculo para testes)."""
    if matrix.cols > matrix.rows:
        raise DimensionError(f"minors_gcd exige colunas <= linhas, recebeu {matrix.rows}x{matrix.cols}")
    if matrix.cols == 0:
        return 1
    g = 0
    for rows in combinations(range(matrix.rows), matrix.cols):
        g = gcd(g, int(Matrix(matrix.select(rows=rows).to_lists()).det()))
    return g


def determinant(matrix: IntMatrix) -> int:
    """Determinante exato de uma matriz quadrada."""
    if matrix.rows != matrix.cols:
        raise DimensionError(f"Determinante exige matriz quadrada, recebeu {matrix.rows}x{matrix.cols}")
    if matrix.rows == 0:
        return 1
    return int(matrix.to_domain(ZZ).to_dense().det())


def rank_q(matrix: IntMatrix) -> int:
    """Posto sobre Q, pelo número de pivôs da forma escalonada reduzida."""
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    _, pivots = matrix.to_domain(QQ).rref()
    return len(pivots)


def nullspace_q(matrix: IntMatrix) -> list[RatVector]:
    """Base do núcleo racional, cada vetor inteiro primitivo."""
    if matrix.cols == 0:
        return []
    if matrix.rows == 0:
        return [RatVector(tuple(Fraction(int(r == c)) for c in range(matrix.cols))) for r in range(matrix.cols)]
    reduced, pivots = matrix.to_domain(QQ).rref()
    basis = reduced.nullspace_from_rref(pivots).to_list()
    logger.debug(f"Núcleo de {matrix.rows}x{matrix.cols}: dimensão {len(basis)}")
    return [RatVector(tuple(_to_fraction(x) for x in row)).primitive() for row in basis]


def solve_in_span_q(vector: Sequence, basis: Sequence[Sequence]) -> list[Fraction] | None:
    """Coeficientes de `vector` na base dada, ou None se não pertence ao espaço gerado.

    Com base dependente, devolve a solução com zero nas colunas livres.
    """
    length = len(vector)
    if any(len(b) != length for b in basis):
        raise DimensionError("Vetores de comprimentos diferentes")
    k = len(basis)
    if not any(vector):
        return [Fraction(0)] * k
    if k == 0:
        return None
    # matriz aumentada [b_1 ... b_k | v], com vetores como colunas
    augmented = _rational_rows(list(basis) + [list(vector)], length).transpose()
    reduced, pivots = augmented.rref()
    if k in pivots:
        return None
    rows = reduced.to_list()
    coefficients = [Fraction(0)] * k
    for r, p in enumerate(pivots):
        coefficients[p] = _to_fraction(rows[r][k])
    return coefficients


def in_span_q(vector: Sequence, basis: Sequence[Sequence]) -> bool:
    """True se `vector` é combinação racional dos vetores de `basis`."""
    return solve_in_span_q(vector, basis) is not None


def rational_row_basis(vectors: Sequence[Sequence], length: int) -> list[RatVector]:
    """Forma escalonada reduzida das linhas dadas, cada linha primitiva."""
    if not vectors:
        return []
    reduced, pivots = _rational_rows(vectors, length).rref()
    rows = reduced.to_list()[: len(pivots)]
    return [RatVector(tuple(_to_fraction(x) for x in row)).primitive() for row in rows]
