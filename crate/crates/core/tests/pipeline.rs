use mcslab::conditions::{interval_dominance, Tolerance};
use mcslab::mcs::{is_quasiconcave, search_counterexample, McsConfig};
use mcslab::presets::{self, preset, quadratic_family};
use mcslab::problems::{build_surface, precautionary_motive};
use mcslab::{
    argmax_set, check_proposition, verify_mcs, Error, Lottery, ProblemSpec, PropGrids, PropId,
};

fn lin(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[test]
fn argmax_matches_dense_scan_on_every_preset() {
    for p in presets::all() {
        for &theta in &p.theta_grid {
            let inst = p.problem.at(theta).unwrap();
            let (lo, hi) = inst.action_domain().unwrap();
            let a = argmax_set(|x| inst.objective(x), (lo, hi), &Default::default()).unwrap();
            let (mut best_x, mut best_v) = (lo, f64::NEG_INFINITY);
            for x in lin(lo, hi, 20001) {
                let v = inst.objective(x).unwrap();
                if v > best_v {
                    (best_x, best_v) = (x, v);
                }
            }
            assert!(
                a.contains(best_x, 1e-4) || (a.representative() - best_x).abs() <= 1e-4,
                "{} at theta = {theta}: {:?} vs dense {best_x}",
                p.name,
                a.points
            );
            assert!(a.value >= best_v - 1e-12);
        }
    }
}

#[test]
fn safe_position_and_initial_slope() {
    for p in presets::all() {
        let Some(port) = p.problem.portfolio(p.theta_grid[0]) else {
            continue;
        };
        let mut previous = None;
        for &theta in &p.theta_grid {
            let inst = p.problem.at(theta).unwrap();
            let u0 = inst.objective(0.0).unwrap();
            if let Some(model) = inst.model() {
                let w = p.problem.portfolio(theta).unwrap().w;
                assert_eq!(
                    u0,
                    model.evaluate(&Lottery::degenerate(w * port.r)).unwrap(),
                    "{}",
                    p.name
                );
            }
            if matches!(p.problem, ProblemSpec::PortfolioWealth { .. }) {
                // V(delta_{w r}) rises with wealth.
                if let Some(prev) = previous {
                    assert!(u0 > prev, "{}", p.name);
                }
                previous = Some(u0);
            }
            let mean_ok = inst.return_lottery().is_none_or(|l| l.mean() > port.r);
            if mean_ok
                && matches!(
                    p.problem,
                    ProblemSpec::PortfolioRiskAversion { .. } | ProblemSpec::PortfolioWealth { .. }
                )
            {
                let h = 1e-6;
                let slope = (inst.objective(h).unwrap() - u0) / h;
                assert!(slope > 0.0, "{} at theta = {theta}: slope {slope}", p.name);
            }
        }
    }
}

#[test]
fn surface_derivatives_match_fresh_differences() {
    let p = preset("quadratic-dara").unwrap();
    let xs = lin(0.05, 0.45, 9);
    let s = build_surface(&p.problem, &xs, &p.theta_grid, true).unwrap();
    let u1 = s.u1_values.as_ref().unwrap();
    for (i, &x) in xs.iter().enumerate() {
        for (k, &theta) in p.theta_grid.iter().enumerate() {
            let h = 1e-4;
            let fresh = (p.problem.objective(x + h, theta).unwrap()
                - p.problem.objective(x - h, theta).unwrap())
                / (2.0 * h);
            assert!((u1[i][k] - fresh).abs() <= 1e-4);
        }
    }
    let wide = build_surface(&p.problem, &lin(0.0, 0.5, 200), &lin(0.5, 3.0, 10), false).unwrap();
    let g = wide.to_grid_fn().unwrap();
    assert!(wide.values.iter().flatten().all(|v| v.is_finite()));
    let single = build_surface(&p.problem, &xs, &[1.0], false).unwrap();
    assert!(single.values.iter().all(|row| row.len() == 1));
    assert!(matches!(
        build_surface(&p.problem, &[], &[1.0], false),
        Err(Error::EmptyGrid)
    ));
    // Quasiconcave rows with a single-crossing derivative: interval dominance.
    assert!(interval_dominance(&g, &Tolerance::default())
        .unwrap()
        .holds());
}

#[test]
fn kimball_exposure_starts_positive() {
    let p = preset("kimball-precautionary").unwrap();
    for &theta in &p.theta_grid {
        let inst = p.problem.at(theta).unwrap();
        let h = 1e-5;
        assert!(inst.objective(h).unwrap() > inst.objective(0.0).unwrap());
    }
}

#[test]
fn precautionary_motives() {
    let eu: ProblemSpec = serde_json::from_value(serde_json::json!({
        "kind": "precautionary", "w": 2.0,
        "eps": {"support": [-0.5, 0.5], "probs": [0.5, 0.5]},
        "family": {"fixed": {"kind": "eu", "u": "log-shift:0.1"}},
        "variant": {"kind": "saving"}
    }))
    .unwrap();
    assert!(precautionary_motive(&eu, 0.0).unwrap().positive);
    assert!(
        precautionary_motive(&preset("rdu-precautionary").unwrap().problem, 0.0)
            .unwrap()
            .positive
    );
    let ProblemSpec::Precautionary {
        w, family, variant, ..
    } = eu
    else {
        unreachable!()
    };
    let riskless = ProblemSpec::Precautionary {
        w,
        eps: Lottery::degenerate(0.0),
        family,
        variant,
    };
    let out = precautionary_motive(&riskless, 0.0).unwrap();
    assert!((out.y_with_risk - out.y_without).abs() < 1e-6);
    assert!(out.positive);
}

#[test]
fn proposition_examples() {
    let tol = Tolerance::default();
    for (a, b) in [(1.0, 0.5), (1.5, 1.5), (2.0, 0.3)] {
        let spec = quadratic_family(&[a, b]).unwrap();
        let r = check_proposition(
            &spec,
            PropId::P1,
            &PropGrids::new(vec![0.5, 1.0, 2.0, 3.0]),
            &tol,
        )
        .unwrap();
        assert!(r.holds(), "Quadratic({a}, {b})");
    }
    let p = preset("footnote-counterexample").unwrap();
    let r = check_proposition(
        &p.problem,
        PropId::P1,
        &PropGrids::new(vec![1.0, 1.86, 2.49, 3.0]),
        &tol,
    )
    .unwrap();
    assert!(!r.holds());
    let h = r
        .components
        .iter()
        .find(|c| c.name == "H SC2 in (-x; s) a.e.")
        .unwrap();
    assert!(h.holds());
    let leaf = r.failing_leaves()[0];
    assert!(leaf.witness.as_ref().unwrap().violates(&tol));

    let signal = preset("signal-portfolio").unwrap();
    let r = check_proposition(
        &signal.problem,
        PropId::A1,
        &PropGrids::new(signal.theta_grid.clone()),
        &tol,
    )
    .unwrap();
    assert!(r
        .components
        .iter()
        .any(|c| c.name == "g(s; theta) log-spm" && c.holds()));

    let json = serde_json::to_string(&r).unwrap();
    let back: mcslab::ConditionReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}

#[test]
fn rdu_local_utility_is_weighted_marginal_utility() {
    let p = preset("chew-rdu-portfolio").unwrap();
    let theta = 1.5;
    let inst = p.problem.at(theta).unwrap();
    let f = inst.outcome_lottery(0.6).unwrap();
    let m = inst.model().unwrap();
    for z in lin(0.65, 1.55, 13) {
        if f.support().iter().any(|s| (s - z).abs() < 1e-9) {
            continue;
        }
        let expect = theta * f.cdf(z).powf(theta - 1.0) * (z + 0.1).powf(-1.0 / theta);
        assert!(
            (m.local_utility_deriv(z, &f, 1).unwrap() - expect).abs() < 1e-12,
            "z = {z}"
        );
    }
}

#[test]
fn quasiconcave_footnote_objective() {
    let p = preset("footnote-counterexample").unwrap();
    let inst = p.problem.at(1.86).unwrap();
    assert!(is_quasiconcave(
        |x| inst.objective(x),
        (0.0, 1.86),
        1024,
        &Tolerance::default()
    )
    .unwrap()
    .holds());
}

#[test]
fn counterexample_search() {
    let cfg = McsConfig::default();
    let pairs = [(1.0, 1.5), (1.86, 2.49), (2.0, 3.0)];
    let found = search_counterexample(
        quadratic_family,
        &[(0.3, 0.5), (0.55, 0.8)],
        &pairs,
        200,
        42,
        &cfg,
    )
    .unwrap()
    .expect("violation in the alpha < beta box");
    assert!(!found.path.is_monotone());
    assert!(found.params[0] < found.params[1]);
    let again = search_counterexample(
        quadratic_family,
        &[(0.3, 0.5), (0.55, 0.8)],
        &pairs,
        200,
        42,
        &cfg,
    )
    .unwrap()
    .unwrap();
    assert_eq!(again.index, found.index);
    assert_eq!(
        serde_json::to_string(&again.path).unwrap(),
        serde_json::to_string(&found.path).unwrap()
    );

    let none = search_counterexample(
        quadratic_family,
        &[(1.0, 2.0), (0.2, 0.9)],
        &pairs,
        500,
        42,
        &cfg,
    )
    .unwrap();
    assert!(none.is_none());
    assert!(search_counterexample(
        quadratic_family,
        &[(1.0, 2.0), (0.2, 0.9)],
        &pairs,
        0,
        42,
        &cfg
    )
    .is_err());
}

#[test]
fn verify_mcs_respects_exhaustive_flag() {
    let p = preset("footnote-counterexample").unwrap();
    let cfg = McsConfig {
        exhaustive: true,
        ..McsConfig::default()
    };
    let path = verify_mcs(&p.problem, &[1.0, 1.86, 2.49], &cfg).unwrap();
    assert!(!path.is_monotone());
    let v = path.violation.unwrap();
    assert!(v.theta < v.theta_hat && v.x_hat < v.x);
}
