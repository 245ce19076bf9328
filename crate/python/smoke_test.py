"""Smoke test for the twzhu_py extension.

Build and install first, e.g.

    cd crates/python && maturin build --release -o dist && pip install dist/*.whl
"""

import sys

import twzhu_py


def main():
    h = twzhu_py.Backend.heisenberg()
    assert h.order == 2
    assert h.canonical("a[-1]|0> + a[-1]|0>") == "2*a[-1]|0>"
    assert h.mode_product("a[-1]|0>", 1, "a[-1]|0>") == "|0>"

    # J_{1/2}(a) J_{-1/2}(a) acts on the twisted top as 1/2
    assert h.straighten("J[1/2](a[-1]|0>) * J[-1/2](a[-1]|0>)", "0", "0") == "1/2*|0>"

    v = twzhu_py.Backend.virasoro("1/2")
    w = "L[-2]|0>"
    assert v.star(w, w) == "2*L[-2]|0> + 2*L[-3]|0> + L[-2]L[-2]|0>"
    assert v.star(w, "|0>") == w

    q = v.quotient("0", "0", 6, 6, "0", slack=2)
    assert q["basis"][0] == "|0>"
    assert q["dim"] == len(q["basis"])

    try:
        v.canonical("L[-2]|0")
    except ValueError as e:
        assert "parse error" in str(e)
    else:
        raise AssertionError("malformed text accepted")

    report = twzhu_py.run_report('backend = "virasoro"\nc = "26"\nsuites = ["axioms"]\n')
    assert report["schema"] == twzhu_py.SCHEMA
    assert report["summary"]["fail"] == 0, report["summary"]

    print("smoke test ok:", len(report["checks"]), "axiom checks,", "A_0 truncation dim", q["dim"])


if __name__ == "__main__":
    sys.exit(main())
