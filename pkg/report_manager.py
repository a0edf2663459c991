import logging
import os
from dataclasses import dataclass, field
from functools import lru_cache, reduce

from combtypes import CombType, Split
from modulifan import (
    add_cycles,
    is_balanced,
    pairs,
    psi,
    psi_natural,
    psi_skeleton,
    ray_sum,
    ray_sum_by_side,
    scale_cycle,
    skeleton,
    vital,
)
from irreducibility import is_globally_irreducible
from paramcurves import (
    ClassificationError,
    Degree,
    ParamType,
    analyze_regions,
    image_balancing,
    mult_closed,
    mult_direct,
    refinement_conflicts,
    special_position,
    special_position_orbits,
)

logger = logging.getLogger(__name__)

DIVISOR_CACHE_SIZE = int(os.environ.get("M0N_DIVISOR_CACHE", "128"))


class ParseError(ValueError):
    """Texto de divisor ou de tipo mal formado."""


@dataclass
class Report:
    command: str
    parameters: dict
    result: dict
    ok: bool = True
    status: str = field(default="")

    def __post_init__(self):
        if not self.status:
            self.status = "true" if self.ok else "false"

    def to_json(self):
        return {
            "command": self.command,
            "parameters": self.parameters,
            "result": self.result,
            "status": self.status,
        }


def parse_labels(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise ParseError(f"Lista de marcas inválida: '{text}'") from e


def parse_type(n, text):
    """Splits separados por ';', cada um como lista de marcas: "1,3;4,5"."""
    chunks = [c for c in text.split(";") if c.strip()]
    return CombType.of(n, [parse_labels(c) for c in chunks])


def _coords_by_pair(n, coords):
    return {f"{i},{j}": value for (i, j), value in zip(pairs(n), coords)}


def _term(n, term):
    """Interpreta um único termo do divisor."""
    factor = 1
    if "*" in term:
        head, term = term.split("*", 1)
        try:
            factor = int(head)
        except ValueError as e:
            raise ParseError(f"Coeficiente inválido: '{head}'") from e
    kind, _, args = term.partition(":")
    try:
        if kind == "psi":
            cycle = psi(int(args), n)
        elif kind == "psi-natural":
            cycle = psi_natural(int(args), n)
        elif kind == "vital":
            cycle = vital(Split.of(n, parse_labels(args)), n)
        elif kind == "skeleton":
            cycle = skeleton(n, int(args))
        elif kind == "psi-skeleton":
            label, _, rest = args.partition(",")
            codim = int(rest.partition(":")[2]) if rest else 0
            cycle = psi_skeleton(int(label), n, codim)
        else:
            raise ParseError(f"Tipo de termo desconhecido: '{kind}'")
    except ParseError:
        raise
    except ValueError as e:
        if type(e) is not ValueError:
            raise
        raise ParseError(f"Termo mal formado: '{term}'") from e
    return cycle if factor == 1 else scale_cycle(cycle, factor)


@lru_cache(maxsize=DIVISOR_CACHE_SIZE)
def cached_divisor(n, text):
    """Divisor já interpretado, por (n, texto sem espaços)."""
    terms = [t for t in text.split("+") if t]
    if not terms:
        raise ParseError("Divisor vazio")
    cycles = [_term(n, t) for t in terms]
    cycle = reduce(add_cycles, cycles[1:], cycles[0])
    logger.info(f"Divisor '{text}' em M_0,{n}: {len(cycle)} cones")
    return cycle


class ReportManager:
    """Monta os relatórios da CLI e da API HTTP a partir da biblioteca."""

    def parse_divisor(self, n, text):
        """Soma de termos "k*tipo:args" separados por '+'."""
        return cached_divisor(n, text.replace(" ", ""))

    # --- Comandos ---

    def skeleton_check(self, n, codim, psi_label=None, verbose=False):
        if psi_label is None:
            cycle = skeleton(n, codim)
        else:
            cycle = psi_skeleton(psi_label, n, codim)
        certificate = is_balanced(cycle)
        bad = certificate.first_violation
        result = {
            "balanced": certificate.balanced,
            "cones": len(cycle),
            "dim": cycle.dim,
            "faces": len(certificate.faces),
            "first_violation": bad.to_json() if bad else None,
        }
        if verbose and cycle.dim == 1:
            result["ray_sum"] = _coords_by_pair(n, ray_sum(cycle).coords)
            # partes por tamanho do lado que contém a marca de ψ (ou 1)
            side = ray_sum_by_side(cycle, psi_label or 1)
            result["ray_sum_by_side"] = {
                str(size): _coords_by_pair(n, vector.coords) for size, vector in side.items()
            }
        parameters = {"n": n, "codim": codim, "psi": psi_label, "verbose": verbose}
        return Report("skeleton-check", parameters, result, ok=certificate.balanced)

    def divisor(self, n, text):
        cycle = self.parse_divisor(n, text)
        return Report("divisor", {"n": n, "divisor": text}, cycle.to_json(), status="ok")

    def irreducible(self, n, text):
        report = is_globally_irreducible(self.parse_divisor(n, text))
        return Report("irreducible", {"n": n, "divisor": text}, report.to_json(), ok=report.global_)

    def special(self, degree_text, version, up_to_symmetry=False):
        degree = Degree.parse(degree_text)
        if up_to_symmetry:
            # uma célula por órbita sob a troca das marcas contraídas
            orbits = special_position_orbits(degree, version)
            result = {
                "degree": degree.to_json(),
                "orbits": [o.to_json() for o in orbits],
                "cells": sum(o.size for o in orbits),
            }
            parameters = {"degree": degree_text, "version": version, "up_to_symmetry": True}
            return Report("special", parameters, result, status="ok")
        cells = special_position(degree, version)
        conflicts = refinement_conflicts(cells)
        if conflicts:
            balanced = None
            logger.warning(f"⚠️ Balanceamento da imagem pulado: {len(conflicts)} conflitos de refinamento")
        else:
            balanced = all(image_balancing(cells).values())
        result = {
            "degree": degree.to_json(),
            "cells": [c.to_json() for c in cells],
            "conflicts": len(conflicts),
            "balanced": balanced,
        }
        return Report("special", {"degree": degree_text, "version": version}, result, status="ok")

    def mult(self, degree_text, type_text, n=None):
        degree = Degree.parse(degree_text)
        n = degree.m - 1 if n is None else n
        ptype = ParamType(n, degree, parse_type(n + degree.m, type_text))
        direct = mult_direct(ptype)
        try:
            decomposition = analyze_regions(ptype)
            kind = decomposition.classification
            closed = 0 if kind == "NonInjective" else mult_closed(ptype, decomposition)
        except ClassificationError as e:
            logger.warning(f"⚠️ Tipo sem fórmula fechada: {str(e)}")
            kind, closed = "Unclassified", None
        result = {
            "type": ptype.to_json(),
            "classification": kind,
            "direct": direct,
            "closed": closed,
            "agree": closed == direct,
        }
        return Report("mult", {"degree": degree_text, "type": type_text}, result, ok=closed == direct)
