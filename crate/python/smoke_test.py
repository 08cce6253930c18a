"""Smoke test for the cscx Python extension.

Build and install with

    pip install --no-build-isolation -e crates/py

then run ``python python/smoke_test.py``.
"""

from math import comb

import cscx


def main():
    chart = cscx.ContactChart.standard(2)
    alpha = chart.alpha()
    assert alpha.degree == 1 and alpha.nvars == 5
    assert chart.levi_is_constant()
    assert alpha.d().d().is_zero()

    beta = cscx.Form.from_json(
        '{"degree":1,"nvars":4,"ring":"poly","terms":[{"idx":[1],'
        '"coef":{"ring":"poly","nvars":4,"terms":[{"exp":[1,0,0,0],"num":"1","den":"1"}]}}]}'
    )
    try:
        cscx.ContactChart.from_beta(2, beta)
    except cscx.CscxError as e:
        assert "not a cs potential" in str(e)
    else:
        raise AssertionError("degenerate potential accepted")

    dx = cscx.Form.basis(4, [0, 1])
    assert dx.wedge(dx).is_zero()
    assert cscx.Form.from_json(dx.to_json()) == dx

    for j in range(3):
        assert cscx.primitive_dim(2, j) == comb(4, j) - (comb(4, j - 2) if j >= 2 else 0)
    assert [r["dim"] for r in cscx.lefschetz_table(2)] == [1, 4, 6, 4, 1]

    v = cscx.rumin_verify(2, max_weight=4)
    assert v["passed"], v

    c = cscx.crosscheck(2, max_weight=3)
    assert c["passed"], c

    affine = cscx.rs_cohomology(cscx.CsChart.affine(2), max_weight=6)
    assert affine["passed"]
    assert affine["dims"]["rs"] == [1, 1, 0, 0, 0, 0]

    torus = cscx.rs_cohomology(cscx.CsChart.torus(2), modes=[0], sample_modes=2)
    assert torus["passed"]
    assert torus["dims"]["deRham"] == [1, 4, 6, 4, 1]
    assert torus["dims"]["rs"] == [1, 4, 5, 5, 4, 1]

    les = cscx.les(cscx.CsChart.torus(2))
    assert les["exact"] and les["connecting_ranks"] == [1, 4, 1, 0, 0]

    ops = cscx.rs_operators(cscx.CsChart.affine(2), max_weight=4)
    assert len(ops) == 5

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
