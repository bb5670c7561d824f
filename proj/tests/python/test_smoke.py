import json
import math

import pytest

import ietsurf


PHI = (1 + math.sqrt(5)) / 2


def test_version():
    assert ietsurf.__version__ == "0.3.0"


def test_stratum():
    s = ietsurf.stratum([4, 3, 2, 1])
    assert s == {"k": 1, "orders": [2], "genus": 2}
    assert ietsurf.is_irreducible([2, 1])
    assert not ietsurf.is_irreducible([1, 2])
    assert not ietsurf.is_admissible([2, 1])


def test_evaluate_and_orbit():
    y = ietsurf.evaluate([2, 1], [1.0, PHI], PHI)
    assert y == pytest.approx(PHI - 1)
    pts = ietsurf.orbit([2, 1], [1.0, PHI], 0.0, 3)
    assert len(pts) == 4
    assert pts[0] == 0.0


def test_epsilon_trace():
    tr = ietsurf.epsilon_trace([2, 1], [1.0, PHI], [16, 32, 64])
    assert [n for n, _ in tr] == [16, 32, 64]
    assert all(n * e > 0.5 for n, e in tr)


def test_connections():
    cs = ietsurf.detect_connections([2, 1], [1.0, 1.0], 2)
    assert {(c["i"], c["j"], c["m"]) for c in cs} == {
        (0, 1, 1),
        (1, 0, 1),
        (0, 0, 2),
        (1, 1, 2),
    }


def test_pairing():
    assert ietsurf.q_matrix([2, 1]) == [[0, -1], [1, 0]]
    assert ietsurf.null_space([3, 1, 2]) == [[0, 1, -1]]
    assert ietsurf.cone_contains([4, 3, 2, 1], [3, 1, -1, -3])
    res = ietsurf.is_positive_pair([2, 1], [1.0, PHI], [1.0, -1.0])
    assert res["verdict"] == "Positive"
    res = ietsurf.is_positive_pair([2, 1], [1.0, 1.0], [-1.0, 1.0])
    assert res["verdict"] == "NotPositive"
    assert res["witness_value"] < 0


def test_surface():
    surf = ietsurf.suspend([2, 1], [1.0, PHI], [1.0, -1.0])
    assert surf["area"] == pytest.approx(1 + PHI)
    assert len(surf["top"]) == 3
    assert ietsurf.phi([2, 1], [1.0, 1.0], [1.0, -1.0]) == pytest.approx(1.0)
    scs = ietsurf.saddle_connections([2, 1], [1.0, 1.0], [1.0, -1.0], 2.0)
    assert len(scs) == 8


def test_return_map():
    image, lengths = ietsurf.vertical_return_map([3, 1, 2], [0.5, 0.3, 0.2], [1.0, -0.5, -0.5])
    assert image == [3, 1, 2]
    assert lengths == pytest.approx([0.5, 0.3, 0.2])


def test_rel_deform():
    surf = ietsurf.rel_deform(
        [3, 1, 2], [0.5, 1.0 / 3, 0.25], [2.0, -1.0, -1.0], [0.0, 1.0, -1.0], 0.125
    )
    assert surf["a"] == pytest.approx([0.5, 1.0 / 3 + 0.125, 0.25 - 0.125])
    assert surf["b"] == pytest.approx([2.0, -1.0, -1.0])


def test_mahler_curve():
    beta, beta_prime = ietsurf.mahler_curve(3, 1.0)
    assert beta == pytest.approx([1.0 / 3, 1.0 / 3, 1.0 / 3])
    assert beta_prime == pytest.approx([-1.0 / 3, 0.0, 1.0 / 3])


def test_recurrence_diagnostic():
    out = ietsurf.recurrence_diagnostic([2, 1], [2.0, 1.0], 1024)
    assert out["classification"] == "Degenerate"
    assert out["zeta_lo"] > 0


def test_run_wrapper():
    code, out, err = ietsurf.run("perm.info", sigma="4,3,2,1")
    assert code == 0
    assert err == ""
    info = json.loads(out)
    assert info["genus"] == 2
    assert info["orders"] == [2]

    code, out, err = ietsurf.run("iet.eval", sigma="2,1", a=[1, "phi"], x="phi", exact=True)
    assert code == 0
    assert json.loads(out)["value_exact"] == "-1/2+1/2*sqrt5"


def test_run_wrapper_error():
    code, out, err = ietsurf.run("iet.eval", sigma="2,1", a="1,2.5", x="0", exact=True)
    assert code == 1
    assert json.loads(err)["error"] == "ParseError"
    with pytest.raises(ietsurf.IetsurfError):
        ietsurf.evaluate([2, 1], [1.0, -1.0], 0.0)
