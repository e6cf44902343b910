import json
import shutil

from icx.cli import run
from icx.corpus import default_dir, load_corpus, run_corpus


def test_bundled_corpus_passes():
    results = run_corpus()
    assert len(results) == len(load_corpus()) >= 12
    assert all(r.ok for r in results), [r for r in results if not r.ok]


def test_cli_corpus_summary():
    code, out = run(["corpus"])
    data = json.loads(out)
    assert code == 0 and data["failed"] == 0


def test_mutated_value_fails(tmp_path):
    shutil.copytree(default_dir(), tmp_path / "c")
    path = tmp_path / "c" / "08_local_vs_envelope.json"
    case = json.loads(path.read_text())
    case["expect"]["local_extension"] = ["2"]
    path.write_text(json.dumps(case))
    results = {r.case_id: r for r in run_corpus(tmp_path / "c")}
    assert not results["local-extension-not-convex"].ok
    assert sum(not r.ok for r in results.values()) == 1
    assert run(["corpus", "--dir", str(tmp_path / "c")])[0] == 1


def test_mutated_input_fails(tmp_path):
    shutil.copytree(default_dir(), tmp_path / "c")
    path = tmp_path / "c" / "07_minkowski.json"
    case = json.loads(path.read_text())
    case["inputs"]["other"]["points"][0] = [2, 0]
    path.write_text(json.dumps(case))
    assert run(["corpus", "--dir", str(tmp_path / "c")])[0] == 1


def test_empty_dir_exits_two(tmp_path):
    assert run(["corpus", "--dir", str(tmp_path)])[0] == 2


def test_broken_case_exits_two(tmp_path):
    (tmp_path / "x.json").write_text('{"id": "x"}')
    assert run(["corpus", "--dir", str(tmp_path)])[0] == 2
