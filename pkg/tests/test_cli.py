import csv
import io
import json
import math
import shutil
import subprocess
import sys

import numpy as np
import pytest

from diraccomb import make_boundary, named, oblique_transform, spectral_reduced
from diraccomb.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def doc(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--reproducible")
    assert code == 0
    return json.loads(out)


# --- bc ---------------------------------------------------------------------------


def test_bc_named_delta(capsys):
    d = doc(capsys, "bc", "--named", "delta", "--param", "1")
    assert d["schema_version"] == "1.0"
    assert d["command"]["name"] == "bc"
    assert np.allclose(d["payload"]["couplings"], [1, 0, 0, 0], atol=1e-15)
    assert d["bc"]["eta"] == pytest.approx(math.pi / 4)
    assert len(d["bc"]["m"]) == 4 and "generated_at" not in d
    assert d["payload"]["confinement"] == "non_confining"


def test_bc_at_infinity(capsys):
    d = doc(capsys, "bc", "--eta", "0", "--m", "1", "0", "0", "0")
    assert d["payload"]["couplings"] == "at infinity"
    assert d["payload"]["transfer_matrix"] == "undefined"


def test_bc_gauge_equivalent(capsys):
    d = doc(capsys, "bc", "--g", "0", "0", "0.5", "0")
    eq = [e for e in d["payload"]["named_equivalents"] if e["family"] == "pseudo_periodic"]
    assert eq and eq[0]["params"][0] == pytest.approx(2 * math.atan(0.5), abs=1e-12)


def test_bc_cayley_undefined(capsys):
    d = doc(capsys, "bc", "--eta", str(math.pi / 2), "--m", "0", "1", "0", "0")
    assert d["payload"]["cayley"] == "undefined"


def test_bc_degrees(capsys):
    a = doc(capsys, "bc", "--named", "pseudo_periodic", "--param", "60", "--deg")
    b = doc(capsys, "bc", "--named", "pseudo_periodic", "--param", str(math.pi / 3))
    assert np.allclose(a["bc"]["m"], b["bc"]["m"], atol=1e-15) and a["bc"]["eta"] == b["bc"]["eta"]


def test_timestamp_present_by_default(capsys):
    code, out, _ = run(capsys, "bc", "--named", "dirichlet")
    assert code == 0 and "generated_at" in json.loads(out)


@pytest.mark.parametrize(
    "argv",
    [
        ["bc"],
        ["bc", "--named", "delta"],
        ["bc", "--named", "delta", "--param", "1", "--g", "1", "0", "0", "0"],
        ["bc", "--eta", "0.3"],
        ["bc", "--eta", "0", "--m", "0", "0", "0", "0"],
        ["bc", "--named", "nonsense"],
        ["bands", "--named", "periodic", "--nk", "0"],
        ["spectral-fn", "--named", "dirichlet", "--eps-min", "5", "--eps-max", "1"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err


# --- bands ------------------------------------------------------------------------------


def test_bands_delta_sign_pattern(capsys):
    d = doc(capsys, "bands", "--named", "delta", "--param", "-1", "--nk", "101")
    p = d["payload"]
    k = np.array(p["k"])
    band0 = np.array([np.nan if x is None else x for x in p["bands"][0]])
    assert len(k) == 101
    assert band0[np.argmin(abs(k))] < 0
    assert band0[np.argmax(abs(k))] > 0
    assert set(p) >= {"k", "bands", "intervals", "gaps"}


def test_bands_periodic_gapless(capsys):
    p = doc(capsys, "bands", "--named", "periodic", "--nk", "51")["payload"]
    assert len(p["intervals"]) == 1 and p["gaps"] == []
    assert p["intervals"][0][0] == pytest.approx(0.0, abs=1e-12)
    assert p["intervals"][0][1] == pytest.approx((6 * math.pi) ** 2, rel=1e-12)


def test_bands_metric_04_valence_gap(capsys):
    p = doc(capsys, "bands", "--named", "metric", "--param", "0.4")["payload"]
    band0 = [x for x in p["bands"][0] if x is not None]
    band1 = [x for x in p["bands"][1] if x is not None]
    assert max(band0) < 0
    assert min(band1) - max(band0) > 0 and p["gap_widths"][0] > 0


def test_bands_csv_matches_json(capsys):
    argv = ["bands", "--named", "delta", "--param", "0.7", "--nk", "9", "--qmax", str(3 * math.pi)]
    p = doc(capsys, *argv)["payload"]
    code, out, _ = run(capsys, *argv, "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == sum(x is not None for band in p["bands"] for x in band)
    for r in rows:
        j, n = int(r["k_index"]), int(r["band"])
        assert float(r["eps"]) == p["bands"][n][j]
        assert float(r["k"]) == p["k"][j]


def test_bands_deterministic(capsys):
    argv = ["bands", "--named", "delta", "--param", "-2", "--nk", "15", "--reproducible"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_out_file(capsys, tmp_path):
    target = tmp_path / "b.json"
    code, out, _ = run(capsys, "bands", "--named", "dirichlet", "--nk", "5", "--reproducible", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["payload"]["k"][0] == -math.pi


# --- spectral-fn --------------------------------------------------------------------------


def test_spectral_fn_dirichlet_sign_changes(capsys):
    p = doc(capsys, "spectral-fn", "--named", "dirichlet", "--k", "0", "--eps-min", "0", "--eps-max", "100", "--samples", "2001")["payload"]
    brackets = p["sign_changes"]
    assert len(brackets) == 3
    for (lo, hi), n in zip(brackets, (1, 2, 3)):
        assert lo < (n * math.pi) ** 2 < hi


def test_spectral_fn_delta_negative_root(capsys):
    # the lowest root of the delta(-3) comb at k=0 lies at eps = -10.52
    p = doc(capsys, "spectral-fn", "--named", "delta", "--param", "-3", "--eps-min", "-12", "--eps-max", "0")["payload"]
    assert len(p["sign_changes"]) == 1
    lo, hi = p["sign_changes"][0]
    assert lo <= -10.5212 <= hi


def test_spectral_fn_zero_energy_value(capsys):
    bc = make_boundary(1.1, (0.3, -0.5, 0.2, 0.4))
    p = doc(capsys, "spectral-fn", "--eta", str(bc.eta), "--m", *map(str, bc.m), "--eps-min", "-1", "--eps-max", "1", "--samples", "3")["payload"]
    g0 = 0.5 * (math.cos(bc.eta) + bc.m0) + math.sin(bc.eta)
    assert p["G0"] == pytest.approx(g0, abs=1e-15)
    assert p["eps"][1] == 0.0
    assert p["F"][1] == pytest.approx(spectral_reduced(bc, 0.0, 0.0), abs=1e-15)


def test_spectral_fn_csv_full_precision(capsys):
    argv = ["spectral-fn", "--named", "delta", "--param", "1.3", "--k", "0.4", "--eps-min", "-30", "--eps-max", "90", "--samples", "37"]
    p = doc(capsys, *argv)["payload"]
    _, out, _ = run(capsys, *argv, "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))[1:]
    assert [float(r[0]) for r in rows] == p["eps"]
    assert [float(r[1]) for r in rows] == p["F"]


# --- isospec ----------------------------------------------------------------------------------


SPEC = ["--eta", "0.9", "--m", "0.3", "0.4", "-0.5", "0.2"]


def test_verify_oblique_image(capsys):
    d = doc(capsys, "isospec", "verify", *SPEC, "--oblique", "1.2")
    rep = d["payload"]["report"]
    assert rep["max_abs_deviation"] <= 1e-12 and rep["holds"]
    assert rep["k_samples"] == 201 and rep["eps_samples"] == 201


def test_verify_explicit_other_with_shift(capsys):
    bc = make_boundary(0.9, (0.3, 0.4, -0.5, 0.2))
    other = oblique_transform(bc, 0.7)
    argv = ["isospec", "verify", *SPEC, "--other-eta", repr(other.eta), "--other-m", *map(repr, other.m), "--shift", "-0.7", "--nk", "41"]
    assert doc(capsys, *argv)["payload"]["report"]["holds"]


def test_verify_mirror(capsys):
    assert doc(capsys, "isospec", "verify", *SPEC, "--mirror", "--nk", "21")["payload"]["report"]["holds"]


def test_verify_unrelated_exit_1(capsys):
    rng = np.random.default_rng(3)
    m1, m2 = rng.normal(size=4), rng.normal(size=4)
    argv = ["isospec", "verify", "--eta", "0.4", "--m", *map(str, m1), "--other-eta", "2.2", "--other-m", *map(str, m2), "--nk", "21", "--reproducible"]
    code, out, _ = run(capsys, *argv)
    assert code == 1
    assert json.loads(out)["payload"]["report"]["max_abs_deviation"] > 1e-3


def test_verify_non_bijective_exit_3(capsys):
    code, out, err = run(capsys, "isospec", "verify", *SPEC, "--mirror", "--shift-samples", "0", "3", "0", "3")
    assert code == 3 and "precondition" in err and out == ""


def test_verify_needs_exactly_one_target(capsys):
    assert run(capsys, "isospec", "verify", *SPEC)[0] == 2
    assert run(capsys, "isospec", "verify", *SPEC, "--mirror", "--other-named", "dirichlet")[0] == 2


def test_orbit(capsys):
    d = doc(capsys, "isospec", "orbit", "--named", "delta", "--param", "1", "--count", "4", "--nk", "31")
    p = d["payload"]
    assert p["count"] == 4 and len(p["members"]) == 4
    assert p["max_deviation"] <= 1e-12
    assert p["members"][1]["delta"] == pytest.approx(math.pi / 2)


def test_classify(capsys):
    assert doc(capsys, "isospec", "classify", "--named", "dirichlet")["payload"]["verdict"] == "spectrally_unique"
    assert doc(capsys, "isospec", "classify", "--named", "robin", "--param", str(math.pi / 4), "--param2", str(math.pi / 3))["payload"]["verdict"] == "mirror_pair_only"
    p = doc(capsys, "isospec", "classify", "--named", "delta", "--param", "1")["payload"]
    assert p["verdict"] == "not_heard" and p["caveat"]


def test_classify_help_carries_caveat(capsys):
    code, out, _ = run(capsys, "isospec", "classify", "--help")
    assert code == 0 and "isospectral" in out.lower()


def test_bc_csv(capsys):
    code, out, _ = run(capsys, "bc", "--named", "delta", "--param", "1", "--format", "csv")
    rows = dict(csv.reader(io.StringIO(out)))
    assert code == 0 and float(rows["couplings[0]"]) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.skipif(shutil.which("diraccomb") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["diraccomb", "isospec", "classify", "--named", "dirichlet", "--reproducible"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["payload"]["verdict"] == "spectrally_unique"


def test_module_entry():
    res = subprocess.run([sys.executable, "-m", "diraccomb.cli", "bc"], capture_output=True, text=True)
    assert res.returncode == 2 and "error" in res.stderr
