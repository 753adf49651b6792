import json

import pytest
from click.testing import CliRunner

from presslim.cli import EXIT_INPUT_ERROR, EXIT_VERIFICATION_FAILED, main

EXAMPLE_CODE = "a/1 # # # # b/1 c/1 # # # c/0 b/1 b/0 a/0 # a/0 c/0 # # #"


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def invoke_json(runner, args, exit_code=0):
    result = runner.invoke(main, [str(arg) for arg in args])
    assert result.exit_code == exit_code, result.output
    return json.loads(result.stdout)


def test_decide_omega(runner, data_dir):
    report = invoke_json(runner, ["decide", data_dir / "ord_omega.tap"])
    assert report["slim"] is True
    assert report["verdict"] == "word-automatic"
    assert report["exact_k"] == 2
    assert report["block_width"] == 2
    assert "seconds" not in report


def test_decide_with_timing(runner, data_dir):
    report = invoke_json(runner, ["decide", "--timing", data_dir / "ord_omega.tap"])
    assert report["seconds"] >= 0


def test_decide_writes_a_verifiable_presentation(runner, data_dir, tmp_path):
    output = tmp_path / "omega.wap"
    report = invoke_json(runner, ["decide", data_dir / "ord_omega.tap", "-o", output])
    assert str(output) in report["files"]

    verified = invoke_json(runner, ["verify", data_dir / "ord_omega.tap", output, "--max-height", 5])
    assert verified["passed"] is True


def test_decide_all_trees(runner, data_dir):
    report = invoke_json(runner, ["decide", data_dir / "all_trees.tap"])
    assert report["slim"] is False
    assert report["verdict"] == "not-word-automatic-given-scattered"
    assert report["block_width"] is None
    assert report["witness"]
    assert report["witness_thickness"] > report["bound"]


def test_decide_with_fixed_block_width(runner, data_dir):
    report = invoke_json(runner, ["decide", data_dir / "ord_omega.tap", "--k", 3])
    assert report["block_width"] == 3


def test_invalid_block_width(runner, data_dir):
    result = runner.invoke(main, ["decide", str(data_dir / "ord_omega.tap"), "--k", "wide"])
    assert result.exit_code == 2


def test_human_output(runner, data_dir):
    result = runner.invoke(main, ["--human", "decide", str(data_dir / "ord_omega.tap")])
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert any(line.startswith("verdict") and line.endswith("word-automatic") for line in lines)
    assert any(line.startswith("witness") and line.endswith("-") for line in lines)


def test_convert(runner, data_dir, tmp_path):
    report = invoke_json(runner, ["convert", data_dir / "ord_omega.tap", "-o", tmp_path / "omega.wap"])
    assert report["block_width"] == 2
    assert report["domain_states"] > 0
    assert len(report["files"]) == 3


def test_convert_refuses_fat_domains(runner, data_dir, tmp_path):
    result = runner.invoke(main, ["convert", str(data_dir / "all_trees.tap"), "-o", str(tmp_path / "all.wap")])
    assert result.exit_code == EXIT_INPUT_ERROR
    assert "error:" in result.output


def test_encode_and_decode(runner, data_dir):
    encoded = runner.invoke(main, ["encode", "--k", "5", str(data_dir / "t_ex.sexp")])
    assert encoded.exit_code == 0
    assert encoded.stdout == EXAMPLE_CODE + "\n"

    decoded = runner.invoke(main, ["decode", "--k", "5"], input=encoded.stdout)
    assert decoded.exit_code == 0
    assert decoded.stdout.strip() == (data_dir / "t_ex.sexp").read_text().strip()


def test_encode_too_thick(runner, data_dir):
    result = runner.invoke(main, ["encode", "--k", "3", str(data_dir / "t_ex.sexp")])
    assert result.exit_code == EXIT_INPUT_ERROR


def test_decode_invalid_code(runner):
    result = runner.invoke(main, ["decode", "--k", "2"], input="a/1 #\n")
    assert result.exit_code == EXIT_INPUT_ERROR


def test_witness(runner, data_dir):
    report = invoke_json(runner, ["witness", data_dir / "all.ta", "--min-thickness", 5])
    assert report["thickness"] >= 5

    from_presentation = invoke_json(runner, ["witness", data_dir / "all_trees.tap", "--min-thickness", 3])
    assert from_presentation["thickness"] >= 3


def test_witness_needs_a_fat_domain(runner, data_dir):
    result = runner.invoke(main, ["witness", str(data_dir / "spine.ta"), "--min-thickness", "3"])
    assert result.exit_code == EXIT_INPUT_ERROR


def test_verify_fails_for_fat_domains(runner, data_dir, tmp_path):
    output = tmp_path / "omega.wap"
    invoke_json(runner, ["convert", data_dir / "ord_omega.tap", "-o", output])

    report = invoke_json(runner, ["verify", data_dir / "all_trees.tap", output], EXIT_VERIFICATION_FAILED)
    assert report["passed"] is False


def test_sanity_order(runner, data_dir):
    assert invoke_json(runner, ["sanity-order", data_dir / "ord_omega.tap"])["passed"] is True

    report = invoke_json(
        runner, ["sanity-order", data_dir / "all_trees.tap", "--max-height", 2], EXIT_VERIFICATION_FAILED
    )
    assert report["violations"]


def test_enumerate(runner, data_dir):
    result = runner.invoke(main, ["enumerate", "--alphabet", "a", "--max-height", "2"])
    assert result.exit_code == 0
    assert len(result.stdout.splitlines()) == 5

    combs = runner.invoke(
        main, ["enumerate", "--alphabet", "a", "--max-height", "3", "--accepted-by", str(data_dir / "spine.ta")]
    )
    assert combs.stdout.splitlines() == ["a", "(a a a)", "(a (a a a) a)", "(a (a (a a a) a) a)"]


def test_enumerate_rejects_reserved_symbols(runner):
    result = runner.invoke(main, ["enumerate", "--alphabet", "a #", "--max-height", "1"])
    assert result.exit_code == EXIT_INPUT_ERROR


def test_broken_presentation_file(runner, tmp_path):
    broken = tmp_path / "broken.tap"
    broken.write_text("presentation broken\ndomain nowhere.ta\n")
    result = runner.invoke(main, ["decide", str(broken)])
    assert result.exit_code == EXIT_INPUT_ERROR
    assert "error:" in result.output


def test_unusable_environment_is_an_input_error(runner, data_dir):
    result = runner.invoke(main, ["decide", str(data_dir / "ord_omega.tap")], env={"PRESSLIM_BUDGET": "many"})
    assert result.exit_code == EXIT_INPUT_ERROR
    assert "PRESSLIM_BUDGET" in result.output


def test_undecodable_tree_file(runner, tmp_path):
    trees = tmp_path / "trees.sexp"
    trees.write_bytes(b"(a \xff b)\n")
    result = runner.invoke(main, ["encode", "--k", "2", str(trees)])
    assert result.exit_code == EXIT_INPUT_ERROR
    assert "UTF-8" in result.output


def test_undecodable_standard_input(runner):
    result = runner.invoke(main, ["decode", "--k", "2"], input=b"a/0 \xff\n")
    assert result.exit_code == EXIT_INPUT_ERROR


@pytest.mark.parametrize("command", [["witness", "--min-thickness", "2"], ["decide"], ["sanity-order"]])
def test_undecodable_automaton_files(runner, tmp_path, command):
    automaton = tmp_path / "broken.ta"
    automaton.write_bytes(b"alphabet a\nstates q\xff\n")
    presentation = tmp_path / "broken.tap"
    presentation.write_text("presentation broken\ndomain broken.ta\n")
    target = automaton if command[0] == "witness" else presentation

    result = runner.invoke(main, [command[0], str(target), *command[1:]])
    assert result.exit_code == EXIT_INPUT_ERROR
    assert "error:" in result.output


def test_undecodable_presentation_file(runner, tmp_path):
    presentation = tmp_path / "broken.tap"
    presentation.write_bytes(b"presentation \xff\n")
    result = runner.invoke(main, ["decide", str(presentation)])
    assert result.exit_code == EXIT_INPUT_ERROR
