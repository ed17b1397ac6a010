"""The chowcalc command line."""

import json
import subprocess
import sys


from chowcalc import scenario as scn
from chowcalc.cli import DOMAIN, OK, PARSE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_decompose_shows_residual(capsys):
    code, out, _ = run(capsys, "decompose", "--scenario", "p1xp1_2_3")
    assert code == OK
    assert "2/3*pic:p1(.)ns:H1 - 1*pic:p1(.)ns:H2 - 1/2*pic:p2(.)ns:H1 + 3/4*pic:p2(.)ns:H2" in out
    assert "complete: yes" in out


def test_decompose_expression_and_machine_format(capsys):
    code, out, _ = run(capsys, "decompose", "--scenario", "p2_degree4", "--cycle", "T(pic:p1, ns:H)",
                       "--format", "machine")
    assert code == OK
    data = json.loads(out)
    assert data["complete"] is True and data["scenario"] == "p2_degree4"


def test_decompose_syntax_error(capsys):
    code, _, err = run(capsys, "decompose", "--scenario", "p1xp1_2_3", "--cycle", "Gamma + T(C, ns:Q)")
    assert code == PARSE
    assert "column 14" in err


def test_diagonal(capsys):
    code, out, _ = run(capsys, "diagonal", "--scenario", "p2_degree4")
    assert code == OK and "gamma = 0" in out and "bi-primitive: yes" in out
    code, out, _ = run(capsys, "diagonal", "--scenario", "p1xp1_2_3")
    assert code == OK and "lower bound for <gamma, gamma>: 35/12" in out
    code, out, _ = run(capsys, "diagonal", "--scenario", "triple_product_g2", "--format", "machine")
    assert code == OK and json.loads(out)["biprimitive"] is True


def test_height_ff(capsys):
    code, out, _ = run(capsys, "height-ff", "--scenario", "arith_k3_g2")
    assert code == OK and "closed form      5/2" in out and "holds" in out
    code, _, err = run(capsys, "height-ff", "--scenario", "arith_d_zero")
    assert code == DOMAIN and "d = 0" in err
    code, out, _ = run(capsys, "height-ff", "--scenario", "arith_k3_g2", "--inject-fault")
    assert code == DOMAIN and "routes disagree" in out


def test_height_ff_without_arith_block(capsys):
    code, _, err = run(capsys, "height-ff", "--scenario", "p2_degree1")
    assert code == DOMAIN and "no arith block" in err


def test_semistable_sim(capsys):
    code, out, _ = run(capsys, "semistable-sim", "--scenario", "semistable_node_triple")
    assert code == OK
    code2, out2, _ = run(capsys, "semistable-sim", "--scenario", "semistable_node_triple")
    assert out == out2
    code, out, _ = run(capsys, "semistable-sim", "--seed", "4", "--format", "machine")
    assert code == OK and json.loads(out)["configuration"] == "random seed 4"


def test_verify_all(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == OK
    assert "FAIL" not in out
    assert out.strip().endswith("checks passed")


def test_verify_empty_dir_warns(capsys, tmp_path):
    code, out, err = run(capsys, "verify", "--scenario", str(tmp_path))
    assert code == OK and "warning" in err


def test_bad_gram_exit_codes(capsys, tmp_path):
    doc = scn.to_dict(scn.bundled_by_name("p1xp1_2_3"))
    doc["geometry"]["surface"]["ns_gram"] = [["0", "1"], ["2", "0"]]
    path = tmp_path / "bad.scn"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "decompose", "--scenario", str(path))
    assert code == PARSE and "ns_gram_symmetric" in err
    code, out, _ = run(capsys, "verify", "--scenario", str(path))
    assert code == DOMAIN and "FAIL" in out


def test_malformed_file(capsys, tmp_path):
    path = tmp_path / "broken.scn"
    path.write_text('{"metadata":\n  {"name": }}')
    code, _, err = run(capsys, "diagonal", "--scenario", str(path))
    assert code == PARSE and "line 2" in err


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == PARSE
    assert run(capsys, "diagonal")[0] == PARSE
    assert run(capsys, "diagonal", "--scenario", "no_such")[0] == PARSE


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "chowcalc.cli", "diagonal", "--scenario", "p2_degree2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "gamma = 0" in res.stdout


def test_decompose_zero_cycle(capsys):
    code, out, _ = run(capsys, "decompose", "--scenario", "p1xp1_2_3", "--cycle", "0", "--format", "machine")
    data = json.loads(out)
    assert code == OK
    assert set(data["components"].values()) == {"0"} and data["biprimitive"] == "0"


def test_diagonal_without_mu_table(capsys, tmp_path):
    doc = scn.to_dict(scn.bundled_by_name("triple_product_g2"))
    doc["geometry"].pop("graph_mu", None)
    doc["geometry"].pop("opaque", None)
    path = tmp_path / "no_mu.scn"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "diagonal", "--scenario", str(path))
    assert code == DOMAIN and "mu_f" in err


def test_reports_are_deterministic(capsys):
    for argv in (["diagonal", "--scenario", "triple_product_g3"], ["verify", "--format", "machine"]):
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
