import json

import pytest

from heatpeak import io
from heatpeak.cli import main
from conftest import instance_one, instance_two


def write(tmp_path, name, inst):
    path = tmp_path / name
    path.write_text(io.dumps(io.instance_to_dict(inst)))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_gen_solve_verify(tmp_path, capsys):
    inst_path = tmp_path / "g.json"
    assert main(["gen", "--C", "3", "--T", "6", "--seed", "5", "-o", str(inst_path)]) == 0
    report_path = tmp_path / "r.json"
    assert main(["solve", str(inst_path), "--objective", "absolute", "-o", str(report_path)]) == 0
    report = json.loads(report_path.read_text())
    assert report["certificate"]["respected"] and set(report["objectives"]) == {"basic", "maximal", "absolute", "fluctuation"}
    code, out = run(["verify", str(inst_path), str(report_path)], capsys)
    assert code == 0 and out["objective_kind"] == "absolute" and out["ok"]


def test_compare_instance_two(tmp_path, capsys):
    code, out = run(["compare", write(tmp_path, "two.json", instance_two())], capsys)
    assert code == 0 and out["gap"] in (0, 1) and out["bound_respected"] is True


def test_verify_tampered_schedule(tmp_path, capsys):
    path = write(tmp_path, "one.json", instance_one())
    sched = tmp_path / "s.json"
    sched.write_text(json.dumps({"schedule": [[0, 1]]}))
    code, out = run(["verify", path, str(sched)], capsys)
    assert code == 1
    assert {"converter": 1, "t": 2} == {k: out["violations"][0][k] for k in ("converter", "t")}


def test_solve_infeasible_exit_code(tmp_path, capsys):
    from heatpeak import Converter, Instance

    path = write(tmp_path, "bad.json", Instance(1, [0], [Converter(1, 1, [2], [0, 0], [0, 5])]))
    code, out = run(["solve", path], capsys)
    assert code == 2 and out["status"] == "infeasible"


def test_validation_exit_code(tmp_path, capsys):
    from heatpeak import Converter, Instance

    path = write(tmp_path, "loose.json", Instance(1, [0], [Converter(1, 1, [0], [0, 0], [1, 1])]))
    code, out = run(["solve", path], capsys)
    assert code == 1 and "initial SoC not fixed" in out["errors"][0]


def test_oracle_cap_exit_code(tmp_path, capsys):
    path = write(tmp_path, "two.json", instance_two())
    code, out = run(["oracle", path, "--oracle-cap", "3"], capsys)
    assert code == 3 and out["status"] == "cap_exceeded"


def test_zero_energy_converter_is_scheduled_lazily(tmp_path, capsys):
    from heatpeak import Converter, Instance

    inst = Instance(2, [0, 0], [Converter(0, 1, [0, 1], [0, 0, 0], [0, 1, 1]), *instance_two().converters])
    path = write(tmp_path, "z.json", inst)
    code, out = run(["solve", path], capsys)
    assert code == 0 and out["schedule"][0] == [0, 1]
    assert out["counters"]["zero_energy_converters"] == [0]


def test_solve_report_is_byte_identical(tmp_path):
    inst = tmp_path / "g.json"
    main(["gen", "--C", "4", "--T", "8", "--seed", "9", "--profile", "diurnal", "-o", str(inst)])
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        main(["solve", str(inst), "--objective", "fluctuation", "--lp-solver", "barycentric", "--trace", "-o", str(out)])
    assert a.read_bytes() == b.read_bytes()


def test_compare_batch_parallel_matches_serial(capsys):
    _, serial = run(["compare", "--batch", "6", "--C", "2", "--T", "3", "--seed", "100"], capsys)
    _, parallel = run(["compare", "--batch", "6", "--C", "2", "--T", "3", "--seed", "100", "--jobs", "2"], capsys)
    assert serial == parallel and serial["bound_respected"]


@pytest.mark.parametrize("kind", ["basic", "maximal", "absolute", "fluctuation"])
def test_verify_of_solve_passes(tmp_path, capsys, kind):
    inst = tmp_path / "g.json"
    main(["gen", "--C", "2", "--T", "5", "--seed", "3", "-o", str(inst)])
    report = tmp_path / "r.json"
    main(["solve", str(inst), "--objective", kind, "-o", str(report)])
    code, _ = run(["verify", str(inst), str(report)], capsys)
    assert code == 0
