import csv
import json
import pytest
from bench_constants import CSV_FIELDS
from cycle_bench import EXIT_IO, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main


@pytest.fixture
def cycle_file(tmp_path):
    target = tmp_path / "path3.txt"
    assert main(["gen", "-g", "path", "-n", "3", "--final-cycle", "--out", str(target)]) == EXIT_OK
    return target


@pytest.fixture
def dag_file(tmp_path):
    target = tmp_path / "dag.txt"
    assert main(["gen", "-n", "30", "-m", "60", "--seed", "4", "--out", str(target)]) == EXIT_OK
    return target


def test_gen_path_to_stdout(capsys):
    assert main(["gen", "-g", "path", "-n", "3", "--final-cycle", "--seed", "0"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# generator=path n=3 m=3 seed=0")
    assert lines[1:] == ["n 3", "0 1", "1 2", "2 0"]


def test_gen_uses_density_without_m(capsys):
    assert main(["gen", "-n", "10", "--density", "2", "--seed", "1"]) == EXIT_OK
    arcs = [line for line in capsys.readouterr().out.splitlines()[2:]]
    assert len(arcs) == 20


def test_run_reports_cycle(cycle_file, capsys):
    assert main(["run", str(cycle_file)]) == EXIT_OK
    record = json.loads(capsys.readouterr().out)
    assert record["outcome"] == "cycle-detected"
    assert record["witness"] == [0, 1, 2, 0]
    assert record["inserted"] == 3
    assert record["messages"]["total"] == record["total_msgs"]


def test_run_trace_goes_to_stderr(cycle_file, capsys):
    assert main(["run", str(cycle_file), "--trace", "--policy", "lifo"]) == EXIT_OK
    captured = capsys.readouterr()
    assert "seq=1 kind=" in captured.err
    assert "seq=" not in captured.out


def test_run_is_deterministic_apart_from_wall_time(dag_file, capsys):
    outputs = []
    for _ in range(2):
        assert main(["run", str(dag_file), "--policy", "random", "--seed", "3", "--q", "0.4"]) == EXIT_OK
        record = json.loads(capsys.readouterr().out)
        del record["wall_ms"]
        outputs.append(record)
    assert outputs[0] == outputs[1]


def test_verify_passes(dag_file, capsys):
    assert main(["verify", str(dag_file), "--seeds", "3", "--preset", "balanced23", "--with-sim"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count(" ok ") == 3
    assert out.count(" backward=") == 3
    assert out.strip().endswith("3/3 seeds passed")


def test_verify_queue_variant_on_cycle(cycle_file, capsys):
    assert main(["verify", str(cycle_file), "--variant", "queue-full"]) == EXIT_OK
    assert "outcome=cycle-detected" in capsys.readouterr().out


def test_verify_flags_broken_engine(tmp_path, monkeypatch, capsys):
    target = tmp_path / "dense.txt"
    main(["gen", "-g", "dense", "-n", "6", "--seed", "1", "--out", str(target)])
    monkeypatch.setattr("cycle_engine.merge_for_arc", lambda src, dst, y, r: dst)

    assert main(["verify", str(target), "--q", "1"]) == EXIT_MISMATCH
    out = capsys.readouterr().out
    assert "FAIL seed=0" in out
    assert "0/1 seeds passed" in out


def test_bench_writes_csv(tmp_path, capsys):
    target = tmp_path / "bench.csv"
    code = main(
        ["bench", "--sizes", "20,40", "--variants", "two-way-vertex,queue-full", "--seeds", "2", "--fit", "--out", str(target)]
    )
    assert code == EXIT_OK

    with open(target, newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 8
    assert list(rows[0]) == CSV_FIELDS
    assert {row["variant"] for row in rows} == {"two-way-vertex", "queue-full"}
    err = capsys.readouterr().err
    assert "fit variant=two-way-vertex preset=msg-vertex axis=n slope=" in err
    assert "fit variant=queue-full preset=full axis=n slope=" in err


def test_bench_fits_each_preset_separately(capsys):
    argv = ["bench", "--sizes", "20,40", "--presets", "sparse32,msg-vertex", "--seeds", "1", "--fit"]
    assert main(argv) == EXIT_OK
    fits = [line for line in capsys.readouterr().err.splitlines() if line.startswith("fit ")]
    assert [line.split(" axis=")[0] for line in fits] == [
        "fit variant=two-way-vertex preset=sparse32",
        "fit variant=two-way-vertex preset=msg-vertex",
    ]


def test_bench_fit_with_fixed_q(capsys):
    assert main(["bench", "--sizes", "20,40", "--q", "0.5", "--seeds", "1", "--fit"]) == EXIT_OK
    assert "fit variant=two-way-vertex preset=fixed-q axis=n slope=" in capsys.readouterr().err


def test_bench_empty_sweep_prints_header(capsys):
    assert main(["bench", "--seeds", "0"]) == EXIT_OK
    assert capsys.readouterr().out == ",".join(CSV_FIELDS) + "\n"


def test_bench_rows_are_deterministic(capsys):
    argv = ["bench", "--sizes", "25", "--presets", "sparse32,msg-vertex", "--seeds", "2"]
    tables = []
    for _ in range(2):
        assert main(argv) == EXIT_OK
        rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
        tables.append([{k: v for k, v in row.items() if k != "wall_ms"} for row in rows])
    assert tables[0] == tables[1]
    assert len(tables[0]) == 4


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "-n", "4", "-m", "7"],
        ["gen", "-n", "-2"],
        ["bench", "--variants", "bogus"],
        ["run"],
    ],
)
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE


def test_bad_input_file_is_usage_error(tmp_path):
    target = tmp_path / "bad.txt"
    target.write_text("n 2\n0 5\n")
    assert main(["run", str(target)]) == EXIT_USAGE
    assert main(["verify", str(target), "--q", "0"]) == EXIT_USAGE


def test_invalid_q_is_usage_error(dag_file):
    assert main(["run", str(dag_file), "--q", "0"]) == EXIT_USAGE


def test_missing_file_is_io_error(tmp_path):
    assert main(["run", str(tmp_path / "missing.txt")]) == EXIT_IO
