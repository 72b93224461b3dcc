"""Exercise the Python bindings end to end; exits nonzero on the first failure."""

import math

import mcslab


def main():
    f = mcslab.Lottery([0.5, 2.0], [0.5, 0.5])
    g = f.shift(0.25)
    assert g.dominates(f)
    assert math.isclose(f.mix(g, 0.5).cdf(0.6), 0.25)
    assert mcslab.Lottery.from_json(f.to_json()).support == f.support

    eu = mcslab.PreferenceModel.eu("log-shift:0.1")
    z = 1.0
    centered = eu.local_utility(z, f) - sum(p * eu.local_utility(s, f) for s, p in zip(f.support, f.probs))
    assert abs(eu.gateaux_local(z, f) - centered) < 1e-10

    rdu = mcslab.PreferenceModel.rdu("poly:0,0.5,0.5", "log1p")
    assert rdu.oracle_error(f, [0.5, 1.0, 1.5, 2.0], order=2) < 1e-5

    q = mcslab.PreferenceModel.quadratic(1.0, 0.5)
    report = q.check_d_dara([0.0, 0.5, 1.0, 1.5], [0.0, 0.5], [f])
    assert report["verdict"] == "holds-on-grid", report

    footnote = mcslab.Problem.preset("footnote-counterexample")
    path = footnote.verify_mcs([1.86, 2.49])
    assert path["verdict"] == "violated"
    xs = [e["argmax"]["points"][0] for e in path["entries"]]
    assert abs(xs[0] - 0.944) < 2e-3 and abs(xs[1] - 0.941) < 2e-3, xs

    chew = mcslab.preset("chew-rdu-portfolio")
    problem = mcslab.Problem.from_json(chew["problem"])
    assert problem.check("P1", chew["theta_grid"])["verdict"] == "holds-on-grid"
    assert problem.verify_mcs(chew["theta_grid"])["verdict"] == "monotone"

    motive = mcslab.Problem.preset("rdu-precautionary").precautionary_motive()
    assert motive["positive"] and motive["y_with_risk"] > motive["y_without"] + 1e-4

    axis = [i / 8 for i in range(9)]
    vals = [math.exp(s * t) for s in axis for t in axis]
    assert mcslab.check_grid("log-spm", [axis, axis], vals)["verdict"] == "holds-on-grid"
    vals = [math.exp(-s * t) for s in axis for t in axis]
    assert mcslab.check_grid("log-spm", [axis, axis], vals)["witness"] is not None

    assert len(mcslab.preset_names()) == 11
    try:
        mcslab.Lottery([1.0], [0.5])
    except mcslab.McslabError as e:
        assert "sum" in str(e)
    else:
        raise AssertionError("invalid lottery accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
