import io
import json
from contextlib import redirect_stdout
from pathlib import Path

from atomlam.cli import main
from atomlam import alpha_eq, parse_term

GOLDEN = Path(__file__).parent / "golden"


def run(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def test_check_ok():
    code, out = run(["check", "--sys", "ipc", "--env", "x:X", "x"])
    assert code == 0 and out.strip() == "X"


def test_check_type_error_exit_1():
    code, _ = run(["check", "--sys", "fat", "--env", "z:forall X.X",
                   "z [Y -> Y]"])
    assert code == 1


def test_parse_error_exit_2():
    code, _ = run(["check", "--sys", "ipc", "fun x => x"])
    assert code == 2


def test_step_cap_exit_3_with_partial_trace():
    code, out = run(["reduce", "--sys", "f", "--env", "z:forall X.X",
                     "--rules", "rho_abort", "--max-steps", "1",
                     "z [(X -> X) & X]", "--format", "json"])
    assert code == 3
    doc = json.loads(out)
    assert doc["truncated"] and len(doc["steps"]) == 1


def test_reduce_atomization_example():
    code, out = run(["reduce", "--sys", "f", "--env", "z:forall X.X",
                     "--rules", "rho_abort", "z [X & X]"])
    assert code == 0
    assert "result: <z [X], z [X]> [1 steps]" in out


def test_translate_examples():
    code, out = run(["translate", "--target", "rp", "--env", "m:bot",
                     "abort[X] m"])
    assert code == 0 and out.strip() == "m [X]"
    code, out = run(["translate", "--target", "at", "abort[X -> Y] m"])
    assert code == 0 and out.strip() == "fun z:X => m [Y]"
    code, out = run(["translate", "--target", "rp", "x"])
    assert out.strip() == "x"
    code, out = run(["translate", "--target", "at", "x"])
    assert out.strip() == "x"


def test_nf_example():
    code, out = run(["nf", "--env", "z:forall X.X", "z [X -> Y]",
                     "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert len(doc["steps"]) == 1
    assert alpha_eq(parse_term(doc["result"]), parse_term("fun w:X => z [Y]"))


def test_simulate_rule_classes():
    code, out = run(["simulate", "--rule", "beta_or", "--env", "a:X",
                     "case in1[X|Y] a of { x:X => x ; y:Y => a } : X",
                     "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert [s["rule"] for s in doc["steps"]] == \
        ["beta_all", "beta_imp", "beta_and", "beta_imp"]


def test_diagram_verifies():
    code, out = run(["diagram", "--rule", "eta_or", "--env", "s:X | Y",
                     "case s of { x:X => in1[X|Y] x ; y:Y => in2[X|Y] y } : X | Y",
                     "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["verified"] and not doc["problems"]
    admin = [s for s in doc["legs"]["m_at->q1"]["steps"]]
    assert len(admin) == 4 and all(s.get("admin") for s in admin)


def test_text_and_json_describe_same_trace():
    argv = ["reduce", "--sys", "f", "--env", "z:forall X.X",
            "--rules", "rho_abort", "z [(X -> X) & X]"]
    _, text = run(argv)
    _, js = run(argv + ["--format", "json"])
    doc = json.loads(js)
    assert text.count("step ") == len(doc["steps"])
    final_line = [l for l in text.splitlines() if l.startswith("result:")][0]
    assert doc["result"] in final_line


def test_env_file(tmp_path):
    envf = tmp_path / "env.txt"
    envf.write_text("z: forall X.X\n# comment\n")
    code, out = run(["check", "--sys", "f", "--env-file", str(envf), "z [X]"])
    assert code == 0 and out.strip() == "X"


def test_file_input(tmp_path):
    f = tmp_path / "term.txt"
    f.write_text("fun x:X => x\n")
    code, out = run(["check", "--sys", "ipc", "--file", str(f)])
    assert code == 0 and out.strip() == "X -> X"


def test_diagram_text_output():
    code, out = run(["diagram", "--rule", "varpi_bot", "--env", "u:bot",
                     "abort[X] (abort[bot] u)"])
    assert code == 0
    assert "verified" in out and "leg q1->q2" in out


def test_golden_traces_replay_bit_exactly():
    manifest = json.loads((GOLDEN / "manifest.json").read_text())
    assert manifest, "no golden traces recorded"
    for case in manifest:
        code, out = run(case["argv"])
        assert code == 0, case["name"]
        expected = (GOLDEN / f"{case['name']}.json").read_text()
        assert out == expected, f"golden mismatch: {case['name']}"
