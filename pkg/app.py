# app.py

import os
import logging
from flask import Flask, request, jsonify
from werkzeug.middleware.proxy_fix import ProxyFix
from datetime import datetime, timezone

from report_manager import ReportManager

# --- Configuração do Logging ---
logging.basicConfig(level=os.environ.get("LOG_LEVEL", "INFO").upper(), format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

# --- Criação e Configuração da Aplicação Flask ---
app = Flask(__name__)
app.wsgi_app = ProxyFix(app.wsgi_app, x_proto=1, x_host=1)

# --- Inicialização dos Serviços ---
report_manager = ReportManager()


def _run(command, build):
    """Executa um comando e devolve o relatório, 400 para entrada inválida."""
    try:
        data = request.get_json(silent=True) or {}
        logger.info(f"🔄 {command}: {data}")
        report = build(data)
        logger.info(f"✅ {command}: {report.status}")
        return jsonify(report.to_json())
    except (KeyError, TypeError) as e:
        logger.error(f"Parâmetro ausente ou inválido em {command}: {str(e)}")
        return jsonify({"status": "error", "message": f"Parâmetro ausente ou inválido: {str(e)}"}), 400
    except ValueError as e:
        logger.error(f"❌ Entrada inválida em {command}: {str(e)}")
        return jsonify({"status": "error", "message": str(e)}), 400
    except Exception as e:
        logger.error(f"Erro crítico em {command}: {str(e)}")
        return jsonify({"status": "error", "message": "Ocorreu um erro interno no servidor"}), 500


# --- Rotas da Aplicação ---

@app.route("/skeleton-check", methods=["POST"])
def skeleton_check():
    return _run("skeleton-check", lambda d: report_manager.skeleton_check(
        int(d["n"]), int(d["codim"]),
        None if d.get("psi") is None else int(d["psi"]),
        bool(d.get("verbose", False)),
    ))


@app.route("/divisor", methods=["POST"])
def divisor():
    return _run("divisor", lambda d: report_manager.divisor(int(d["n"]), str(d["divisor"])))


@app.route("/irreducible", methods=["POST"])
def irreducible():
    return _run("irreducible", lambda d: report_manager.irreducible(int(d["n"]), str(d["divisor"])))


@app.route("/special", methods=["POST"])
def special():
    def build(d):
        if d.get("version") not in ("v1", "v2"):
            raise ValueError(f"Versão inválida: {d.get('version')}")
        return report_manager.special(str(d["degree"]), d["version"], bool(d.get("up_to_symmetry", False)))
    return _run("special", build)


@app.route("/mult", methods=["POST"])
def mult():
    return _run("mult", lambda d: report_manager.mult(str(d["degree"]), str(d["type"])))


@app.route("/health")
def health_check():
    return jsonify({
        "status": "healthy",
        "timestamp": datetime.now(timezone.utc).isoformat(),
    })


@app.errorhandler(404)
def not_found(error):
    return jsonify({"error": "Endpoint não encontrado"}), 404

@app.errorhandler(500)
def internal_error(error):
    logger.error(f"Erro interno do servidor: {str(error)}")
    return jsonify({"error": "Ocorreu um erro interno no servidor"}), 500

def debug_enabled():
    """Modo debug do servidor de desenvolvimento, ligado só com FLASK_DEBUG=1."""
    return os.environ.get("FLASK_DEBUG", "0") == "1"


if __name__ == "__main__":
    app.run(host='0.0.0.0', port=int(os.environ.get("PORT", 5000)), debug=debug_enabled())
