import math
import os
import pathlib

import pytest

import matchfn

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"


def pearson(a, b):
    ma, mb = sum(a) / len(a), sum(b) / len(b)
    sab = sum((x - ma) * (y - mb) for x, y in zip(a, b))
    saa = sum((x - ma) ** 2 for x in a)
    sbb = sum((y - mb) ** 2 for y in b)
    return sab / math.sqrt(saa * sbb)


def test_simulate_then_estimate_recovers_efficiency():
    sim = matchfn.simulate(seed=7)
    assert len(sim["rows"]) == 132
    out = matchfn.estimate(sim["rows"])
    eff = out["efficiency"]
    assert eff[0]["a_index"] == 100.0
    assert pearson([r["a_raw"] for r in eff], sim["efficiency"]) > 0.95
    eps_f = [r["eps_f"] for r in out["elasticity"] if r["eps_f"] is not None]
    assert abs(sum(eps_f) / len(eps_f) - 0.6) <= 0.05


def test_load_panel_and_region_anchor():
    rows = matchfn.load_panel(str(DATA / "three_region.csv"))
    assert len(rows) == 36
    out = matchfn.estimate(rows, anchor="2014-06", anchor_region="kinki")
    anchor = [r for r in out["efficiency"] if r["period"] == "2014-06" and r["region"] == "kinki"]
    assert anchor[0]["a_index"] == 100.0


def test_errors_map_to_python_exceptions():
    with pytest.raises(matchfn.ValidationError, match="row 6"):
        matchfn.load_panel(str(DATA / "bad_row.csv"))
    with pytest.raises(matchfn.IoError):
        matchfn.load_panel(str(DATA / "no_such_file.csv"))
    with pytest.raises(ValueError):
        matchfn.estimate(matchfn.simulate()["rows"], bandwidth=-1.0)


def test_isotonic_fit_pools_violators():
    assert matchfn.isotonic_fit([1.0, 3.0, 2.0, 4.0]) == [1.0, 2.5, 2.5, 4.0]


def test_lasso_zero_penalty_is_least_squares():
    x = [[float(i), float((i * 7) % 5)] for i in range(20)]
    y = [1.0 + 2.0 * a - 0.5 * b for a, b in x]
    fit = matchfn.lasso_fit(x, y, penalty=0.0)
    assert fit["intercept"] == pytest.approx(1.0, abs=1e-9)
    assert fit["coef"] == pytest.approx([2.0, -0.5], abs=1e-9)
    assert fit["kkt_residual"] <= 1e-8


def test_conditional_cdf_bounds_and_galois():
    rows = matchfn.simulate(seed=3)["rows"]
    est = matchfn.ConditionalCdf(rows)
    f, m = rows[50][3], rows[50][4]
    assert est.cdf(0.0, f, m) == 0.0
    assert est.cdf(1e12, f, m) == 1.0
    q = est.quantile(0.5, f, m)
    assert est.cdf(q, f, m) >= 0.5


def test_within_area_share():
    cells = matchfn.within_area_share(
        [("2014-01", "kanto", "kanto"), ("2014-01", "kanto", "kinki"), ("2014-01", "kinki", "kinki")]
    )
    shares = {c["region"]: c["share"] for c in cells}
    assert shares == {"kanto": 0.5, "kinki": 1.0}


def test_cli_exit_codes(tmp_path):
    code, out, _ = matchfn.run_cli(["simulate", "-o", str(tmp_path)])
    assert code == 0 and "T=132" in out
    assert os.path.exists(tmp_path / "panel.csv")
    code, _, err = matchfn.run_cli(["simulate", "--alpha", "2", "-o", str(tmp_path)])
    assert code == 2 and "--alpha" in err
