import json

import pytest
from click.testing import CliRunner

from cli import main


@pytest.fixture
def runner():
    return CliRunner()


def _json(result):
    return json.loads(result.stdout)


def test_skeleton_check_balanced(runner):
    result = runner.invoke(main, ["skeleton-check", "--n", "6", "--codim", "1", "--format", "json"])
    assert result.exit_code == 0
    data = _json(result)
    assert data["command"] == "skeleton-check"
    assert data["status"] == "true"
    assert data["result"]["balanced"] is True
    assert data["result"]["first_violation"] is None


def test_skeleton_check_verbose_ray_sums(runner):
    result = runner.invoke(
        main, ["skeleton-check", "--n", "7", "--codim", "2", "--psi", "1", "--verbose", "--format", "json"]
    )
    assert result.exit_code == 0
    sums = _json(result)["result"]["ray_sum"]
    assert {v for k, v in sums.items() if k.startswith("1,")} == {25}
    assert {v for k, v in sums.items() if not k.startswith("1,")} == {28}
    assert sorted(_json(result)["result"]["ray_sum_by_side"]) == ["3", "4", "5"]


def test_skeleton_check_rejects_bad_codim(runner):
    result = runner.invoke(main, ["skeleton-check", "--n", "3", "--codim", "1"])
    assert result.exit_code == 2


def test_skeleton_check_text_format(runner):
    result = runner.invoke(main, ["skeleton-check", "--n", "5", "--codim", "0"])
    assert result.exit_code == 0
    assert result.stdout.startswith("skeleton-check: true")


def test_divisor_vital(runner):
    result = runner.invoke(main, ["divisor", "--n", "5", "--vital", "1,2", "--format", "json"])
    assert result.exit_code == 0
    cones = {tuple(map(tuple, c["splits"])): c["weight"] for c in _json(result)["result"]["cones"]}
    assert cones == {((1, 2),): -1, ((3, 4),): 1, ((1, 2, 4),): 1, ((1, 2, 3),): 1}


def test_divisor_psi_natural(runner):
    result = runner.invoke(main, ["divisor", "--n", "5", "--psi-natural", "1", "--format", "json"])
    cones = _json(result)["result"]["cones"]
    assert len(cones) == 4
    assert {c["weight"] for c in cones} == {1}


def test_divisor_sum(runner):
    result = runner.invoke(main, ["divisor", "--n", "5", "--sum", "psi:1+psi:2", "--format", "json"])
    weights = sorted(c["weight"] for c in _json(result)["result"]["cones"])
    assert weights == [1] * 6 + [2] * 3


def test_divisor_requires_exactly_one_choice(runner):
    assert runner.invoke(main, ["divisor", "--n", "5"]).exit_code == 2
    assert runner.invoke(main, ["divisor", "--n", "5", "--psi", "1", "--vital", "1,2"]).exit_code == 2


def test_divisor_rejects_bad_split(runner):
    assert runner.invoke(main, ["divisor", "--n", "5", "--vital", "1"]).exit_code == 2


def test_irreducible_psi(runner):
    result = runner.invoke(main, ["irreducible", "--n", "6", "--divisor", "psi:1", "--format", "json"])
    assert result.exit_code == 0
    assert _json(result)["result"]["global"] is True


def test_irreducible_vital_is_global_not_local(runner):
    result = runner.invoke(main, ["irreducible", "--n", "6", "--divisor", "vital:1,2,3", "--format", "json"])
    assert result.exit_code == 0
    data = _json(result)["result"]
    assert data["global"] is True
    assert data["local"] is False


def test_irreducible_psi_skeleton_fails(runner):
    result = runner.invoke(
        main, ["irreducible", "--n", "6", "--divisor", "psi-skeleton:1,codim:1", "--format", "json"]
    )
    assert result.exit_code == 1
    assert _json(result)["status"] == "false"


def test_irreducible_rejects_unknown_term(runner):
    assert runner.invoke(main, ["irreducible", "--n", "5", "--divisor", "kappa:1"]).exit_code == 2


def test_special_versions_agree(runner):
    first = runner.invoke(main, ["special", "--degree", "d:1", "--version", "v1", "--format", "json"])
    second = runner.invoke(main, ["special", "--degree", "d:1", "--version", "v2", "--format", "json"])
    assert first.exit_code == second.exit_code == 0
    assert json.dumps(_json(first)["result"]) == json.dumps(_json(second)["result"])
    assert len(_json(first)["result"]["cells"]) == 6


def test_special_up_to_symmetry(runner):
    result = runner.invoke(
        main, ["special", "--degree", "d:1", "--version", "v2", "--up-to-symmetry", "--format", "json"]
    )
    assert result.exit_code == 0
    data = _json(result)
    assert data["parameters"]["up_to_symmetry"] is True
    assert data["result"]["cells"] == 6
    assert [o["orbit_size"] for o in data["result"]["orbits"]] == [2, 2, 2]


def test_special_rejects_unbalanced_degree(runner):
    result = runner.invoke(main, ["special", "--degree", "1,0;0,1", "--version", "v1"])
    assert result.exit_code == 2


def test_mult_agrees(runner):
    result = runner.invoke(main, ["mult", "--degree", "d:1", "--type", "1,3", "--format", "json"])
    assert result.exit_code == 0
    data = _json(result)["result"]
    assert data["direct"] == data["closed"] == 1
    assert data["agree"] is True


def test_mult_non_injective(runner):
    result = runner.invoke(main, ["mult", "--degree", "d:1", "--type", "1,2", "--format", "json"])
    assert result.exit_code == 0
    assert _json(result)["result"]["classification"] == "NonInjective"


def test_json_output_is_deterministic(runner, tmp_path):
    target = tmp_path / "report.json"
    args = ["divisor", "--n", "6", "--psi", "2", "--format", "json", "--threads", "2"]
    runner.invoke(main, args + ["--out", str(target)])
    again = runner.invoke(main, args)
    assert target.read_text() == again.stdout
