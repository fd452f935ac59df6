import math

import numpy as np
import pytest

import wulfflab as wl
from wulfflab.cli import main, parse_config
from wulfflab.domains import save_domain
from wulfflab.errors import ValidationError


@pytest.fixture(scope="module")
def square_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("bodies") / "square.body"
    wl.save_body(wl.square(), p)
    return str(p)


@pytest.fixture(scope="module")
def triangle_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("bodies") / "tri.body"
    wl.save_body(wl.polytope([[-1, -1], [3, -1], [-1, 3]]), p)
    return str(p)


@pytest.fixture(scope="module")
def disk_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("bodies") / "disk.body"
    wl.save_body(wl.ball(1.0), p)
    return str(p)


@pytest.fixture(scope="module")
def annulus_file(tmp_path_factory, annulus):
    p = tmp_path_factory.mktemp("domains") / "annulus.domain"
    save_domain(annulus, p)
    return str(p)


@pytest.fixture(scope="module")
def bitten_file(tmp_path_factory, bitten_square):
    p = tmp_path_factory.mktemp("domains") / "bitten.domain"
    save_domain(bitten_square, p)
    return str(p)


def test_body_identity_line(square_file, capsys):
    assert main(["body", "--body", square_file]) == 0
    out = capsys.readouterr().out
    assert "P=8 nV=8" in out
    assert "residual=0" in out


def test_beta_command(triangle_file, capsys):
    assert main(["beta", "--body", triangle_file]) == 0
    out = capsys.readouterr().out
    assert out.startswith("beta=")
    val = float(out.split()[0].split("=")[1])
    assert 0 < val <= 0.5


def test_check_annulus(disk_file, annulus_file, capsys):
    assert main(["check", "--body", disk_file, "--domain", annulus_file]) == 0
    out = capsys.readouterr().out
    lines = dict(ln.split("=") for ln in out.strip().splitlines())
    assert float(lines["margin"]) == pytest.approx(16 * math.pi / 3 - 2 * math.pi,
                                                   rel=1e-5)
    assert lines["pass"] == "true"


def test_check_malformed_domain_exits_2(disk_file, tmp_path, capsys):
    bad = tmp_path / "bad.domain"
    bad.write_text("obstacle zero zero one\n")
    assert main(["check", "--body", disk_file, "--domain", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_file_exits_2(capsys):
    assert main(["body", "--body", "/nonexistent.body"]) == 2


def test_missing_required_flag_exits_2(capsys):
    assert main(["check"]) == 2


def test_sharpness_csv_deterministic(square_file, capsys):
    argv = ["sharpness", "--body", square_file, "--radii", "10,100"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    lines = first.strip().splitlines()
    assert lines[0] == "r,lhs,rhs,ratio"
    assert float(lines[1].split(",")[3]) > 1.0


def test_abp_run_with_outputs(square_file, bitten_file, tmp_path, capsys):
    out = tmp_path / "abp_out"
    code = main(["abp", "--body", square_file, "--domain", bitten_file,
                 "--h", "0.05", "--out", str(out)])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "pass=true" in stdout
    contact = (out / "contact.csv").read_text()
    assert contact.startswith("vertex,slack,member")
    cloud = (out / "gradient_image.csv").read_text()
    assert cloud.startswith("gx,gy")


def test_abp_resource_error_exits_3(square_file, bitten_file, capsys):
    assert main(["abp", "--body", square_file, "--domain", bitten_file,
                 "--h", "1e-4"]) == 3


def test_abp_impossible_delta_exits_3(square_file, bitten_file, capsys):
    assert main(["abp", "--body", square_file, "--domain", bitten_file,
                 "--h", "0.05", "--delta", "1e-5"]) == 3


def test_failed_math_check_exits_1(square_file, bitten_file, capsys, monkeypatch):
    import wulfflab.cli as cli

    class FailedReport:
        passed = False

        def to_text(self):
            return "pass=false\n"

    monkeypatch.setattr(cli, "abp_chain_report",
                        lambda *a, **k: FailedReport())
    assert main(["abp", "--body", square_file, "--domain", bitten_file,
                 "--h", "0.05"]) == 1


def test_random_suite(square_file, tmp_path, capsys):
    out = tmp_path / "suite"
    code = main(["random-suite", "--seeds", "4", "--out", str(out)])
    assert code == 0
    stdout = capsys.readouterr().out
    lines = stdout.strip().splitlines()
    assert lines[-1].startswith("min_margin=")
    assert lines[-1].endswith("all_pass=true")
    assert len(lines) == 5
    assert (out / "report_seed0.txt").exists()


def test_random_suite_fixed_body(triangle_file, capsys):
    assert main(["random-suite", "--seeds", "2", "--body", triangle_file]) == 0


def test_bad_numeric_options_exit_2(square_file):
    assert main(["beta", "--body", square_file, "--angres", "-1"]) == 2
    assert main(["random-suite", "--seeds", "0"]) == 2
    assert main(["sharpness", "--body", square_file, "--radii", "ten"]) == 2


def test_config_validation_direct():
    with pytest.raises(ValidationError):
        parse_config(["abp", "--h", "-0.1"])


def test_unknown_command_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
