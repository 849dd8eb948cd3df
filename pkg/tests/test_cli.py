import subprocess
import sys

import pytest

from vdwforge import certificate
from vdwforge.certificate import Certificate, CertificateError


def run(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "vdwforge", *map(str, args)],
        capture_output=True,
        text=True,
        cwd=cwd,
        timeout=300,
    )


@pytest.fixture(scope="module")
def cert_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cert") / "k5r5.cert"
    proc = run("construct", "--k", 5, "--r", 5, "--window", "2:5", "--seed", 0, "--out", path)
    assert proc.returncode == 0, proc.stderr
    return path


def test_construct_then_verify(cert_path):
    cert = certificate.load(cert_path)
    assert (cert.N, cert.k, cert.r, cert.seed) == (135, 5, 5, 0)
    assert cert.verdict == "VERIFIED"
    assert "primes=5,3" in cert.params
    proc = run("verify", cert_path)
    assert proc.returncode == 0
    assert proc.stdout.startswith("VERIFIED N=135")


def test_construct_is_deterministic(cert_path, tmp_path):
    proc = run("construct", "--k", 5, "--r", 5, "--window", "2:5", "--seed", 0)
    assert proc.returncode == 0
    assert proc.stdout.encode() == cert_path.read_bytes()


def test_construct_b0(tmp_path):
    proc = run("construct", "--k", 5, "--r", 2, "--out", tmp_path / "c")
    assert proc.returncode == 0
    assert certificate.load(tmp_path / "c").N == 5


def test_constant_coloring_fails(tmp_path):
    path = tmp_path / "const.cert"
    Certificate(7, 3, 2, None, "handmade", 0, (1,) * 7).write(path)
    proc = run("verify", path)
    assert proc.returncode == 1
    assert "x=0 d=1 k=3 color=1 elements=0 1 2" in proc.stdout


def test_truncated_certificate(cert_path, tmp_path):
    lines = cert_path.read_text().splitlines(keepends=True)
    bad = tmp_path / "trunc.cert"
    bad.write_text("".join(lines[:10] + lines[-1:]))
    proc = run("verify", bad)
    assert proc.returncode == 65
    assert "line" in proc.stderr


@pytest.mark.parametrize(
    "mutate",
    [
        lambda t: t.replace("\n", "\r\n"),
        lambda t: t.replace("VDW-CERT v1", "VDW-CERT v2"),
        lambda t: t.replace("verdict VERIFIED", "verdict MAYBE"),
        lambda t: t + "extra\n",
        lambda t: t.replace("\ncolors\n", "\ncolors\n9 "),
        lambda t: t[: len(t) // 2],
    ],
)
def test_malformed_certificates(cert_path, tmp_path, mutate):
    bad = tmp_path / "bad.cert"
    bad.write_text(mutate(cert_path.read_text()), newline="")
    assert run("verify", bad).returncode == 65


def test_missing_file(tmp_path):
    assert run("verify", tmp_path / "nope").returncode == 65


def test_strict_infeasible():
    proc = run("construct", "--k", 5, "--r", 5, "--mode", "strict")
    assert proc.returncode == 2
    assert "infeasible" in proc.stderr


def test_strict_report_attached():
    # the window (6.65, 7] holds only 7, and r = 5 needs two primes
    proc = run("construct", "--k", 7, "--r", 5, "--mode", "strict")
    assert proc.returncode == 2


@pytest.mark.parametrize(
    "args",
    [
        ("construct", "--k", 5, "--r", 5, "--mode", "strict", "--window", "2:5"),
        ("construct", "--k", 5, "--r", 5, "--epsilon", "1/5"),
        ("construct", "--k", 5, "--r", 5, "--window", "5:2"),
        ("construct", "--k", 5),
        ("frobnicate",),
        ("etset", "--p", 4, "--t", 2),
    ],
)
def test_usage_errors(args):
    assert run(*args).returncode == 64


def test_retries_exhausted(tmp_path):
    proc = run("construct", "--k", 5, "--r", 5, "--window", "2:5", "--seed", 1,
               "--retry-cap", 1, "--repair-sweeps", 0, "--out", tmp_path / "x")
    assert proc.returncode == 3
    assert "retries exhausted" in proc.stderr
    assert not (tmp_path / "x").exists()


def test_vdw_command():
    proc = run("vdw", "--k", 3, "--r", 2, "--witness")
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "w(3;2) = 9"
    assert run("vdw", "--k", 4, "--r", 2, "--budget", 10).returncode == 4


def test_kappa_command():
    proc = run("kappa", "--n", 9, "--r", 2)
    assert proc.stdout.strip() == "kappa(Z/9;2) = 5"


def test_params_command():
    proc = run("params", "--r", 8)
    assert proc.stdout.strip() == "a=2 b=2 base=18 (beats 8)"
    proc = run("params", "--r", 5, "--k", 5, "--window", "2:5")
    assert "plan k=5: primes=5,3 t0=1 t'=3 N=135" in proc.stdout
    assert "cond3: false" in proc.stdout


def test_etset_command():
    assert run("etset", "--p", 3, "--t", 2).stdout.strip() == "4 5 7 8"


def test_bench_command():
    proc = run("bench", "--n", 2000, "--k", 6, "--r", 4)
    assert proc.returncode == 0 and "wall=" in proc.stdout


# -- in-process format checks ----------------------------------------------


def test_certificate_roundtrip():
    cert = Certificate(5, 4, 2, 2**64 - 1, "a=2 b=0", 3, (1, 1, 2, 2, 2), "VERIFIED")
    again = certificate.loads(cert.dumps())
    assert again == cert
    assert again.verify() is None


def test_certificate_wraps_colors():
    cert = Certificate(61, 3, 2, 0, "", 1, (1, 2) * 30 + (1,))
    text = cert.dumps()
    assert max(len(l.split()) for l in text.splitlines()[8:-1]) == certificate.WRAP
    assert certificate.loads(text).colors == cert.colors


def test_certificate_error_has_line():
    text = Certificate(3, 3, 2, 0, "", 1, (1, 2, 1)).dumps().replace("k 3", "k x")
    with pytest.raises(CertificateError) as info:
        certificate.loads(text)
    assert info.value.line == 3
