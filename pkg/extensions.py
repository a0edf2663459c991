# extensions.py

"""Configuração de execução compartilhada entre os módulos (sem ciclos de importação)."""

import logging
import os
from concurrent.futures import ThreadPoolExecutor

logger = logging.getLogger(__name__)

THREADS = max(1, int(os.environ.get("M0N_THREADS", "1")))


def set_threads(count):
    """Limita o paralelismo interno (flag --threads da CLI)."""
    global THREADS
    if count < 1:
        raise ValueError(f"Número de threads inválido: {count}")
    THREADS = count
    logger.debug(f"Paralelismo interno ajustado para {count} thread(s)")


def parallel_map(func, items):
    """Aplica `func` a cada item, devolvendo os resultados na ordem de entrada."""
    items = list(items)
    if THREADS <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=THREADS) as pool:
        return list(pool.map(func, items))
