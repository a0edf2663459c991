# cli.py

"""Linha de comando: m0n <comando> [opções].

Códigos de saída: 0 sucesso/propriedade verdadeira, 1 propriedade falsa,
2 uso inválido.
"""

import functools
import json
import logging
import os

import click

from extensions import set_threads
from report_manager import ReportManager

logger = logging.getLogger(__name__)

manager = ReportManager()


def _configure_logging():
    level = os.environ.get("LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')


def render_text(report):
    """Formato texto: uma linha de cabeçalho e as chaves do resultado."""
    lines = [f"{report.command}: {report.status}"]
    for key, value in sorted(report.result.items()):
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"  {key}: {value}")
    return "\n".join(lines)


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report.to_json(), sort_keys=True, indent=2)
    return render_text(report)


def report_options(func):
    """Opções comuns a todos os comandos."""

    @click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text", show_default=True)
    @click.option("--threads", type=click.IntRange(min=1), default=None, help="Limite de paralelismo interno.")
    @click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Grava o relatório neste arquivo.")
    @functools.wraps(func)
    def wrapper(*args, fmt, threads, out, **kwargs):
        if threads is not None:
            set_threads(threads)
        try:
            report = func(*args, **kwargs)
        except ValueError as e:
            logger.error(f"❌ {type(e).__name__}: {str(e)}")
            raise click.UsageError(str(e)) from e
        text = render(report, fmt)
        if out:
            with click.open_file(out, "w") as handle:
                handle.write(text + "\n")
        else:
            click.echo(text)
        if report.status == "false":
            click.get_current_context().exit(1)

    return wrapper


@click.group()
def main():
    """Ferramentas exatas para M_{0,n} tropical."""
    _configure_logging()


@main.command("skeleton-check")
@click.option("--n", "n", type=int, required=True)
@click.option("--codim", type=int, required=True)
@click.option("--psi", "psi_label", type=int, default=None, help="Usa o esqueleto de ψ_i.")
@click.option("--verbose", is_flag=True, help="Inclui as somas de raios (ciclos de dimensão 1).")
@report_options
def skeleton_check(n, codim, psi_label, verbose):
    """Verifica o balanceamento de um esqueleto."""
    return manager.skeleton_check(n, codim, psi_label, verbose)


@main.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--vital", "vital_labels", default=None, help="Divisor vital D^S, S como lista '1,2'.")
@click.option("--psi", "psi_label", type=int, default=None)
@click.option("--psi-natural", "natural_label", type=int, default=None)
@click.option("--sum", "sum_text", default=None, help="Soma de termos, ex.: 'psi:1+psi:2'.")
@report_options
def divisor(n, vital_labels, psi_label, natural_label, sum_text):
    """Lista os cones e pesos de um divisor."""
    given = {
        "vital": vital_labels and f"vital:{vital_labels}",
        "psi": psi_label is not None and f"psi:{psi_label}",
        "psi-natural": natural_label is not None and f"psi-natural:{natural_label}",
        "sum": sum_text,
    }
    chosen = [text for text in given.values() if text]
    if len(chosen) != 1:
        raise click.UsageError("Informe exatamente um de --vital, --psi, --psi-natural ou --sum")
    return manager.divisor(n, chosen[0])


@main.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--divisor", "text", required=True, help="Ex.: 'psi:1', 'vital:1,2,3', 'psi-skeleton:1,codim:1'.")
@report_options
def irreducible(n, text):
    """Decide irredutibilidade local, conexidade e irredutibilidade global."""
    return manager.irreducible(n, text)


@main.command()
@click.option("--degree", "degree", required=True, help="'d:<k>' ou pares 'a,b;c,d;...'.")
@click.option("--version", "version", type=click.Choice(["v1", "v2"]), required=True)
@click.option("--up-to-symmetry", is_flag=True, help="Uma célula por órbita sob a troca das marcas contraídas.")
@report_options
def special(degree, version, up_to_symmetry):
    """Ciclo de pontos em posição especial como push-forward."""
    return manager.special(degree, version, up_to_symmetry)


@main.command()
@click.option("--degree", "degree", required=True)
@click.option("--type", "type_text", required=True, help="Splits separados por ';', ex.: '1,3'.")
@report_options
def mult(degree, type_text):
    """Compara a multiplicidade direta com a fórmula fechada."""
    return manager.mult(degree, type_text)


if __name__ == "__main__":
    main()
