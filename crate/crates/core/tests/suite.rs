//! End-to-end runs of the verification suite over an in-memory corpus,
//! plus mutation coverage: every injected fault must trip at least one check.

use std::collections::BTreeMap;
use std::sync::Arc;

use hlift_core::{
    run_suite, Anchor, Chart, ConnectionSource, Expr, Faults, Manifold, ManifoldEntry,
    Mutation, SamplingDomain, SuiteConfig, Tensor, Variance, VectorField, Workspace,
};

fn metric_diag(chart: &Arc<Chart>, diag: Vec<Expr>) -> Tensor {
    Tensor::from_fn(
        chart.clone(),
        vec![Variance::Down, Variance::Down],
        |idx| {
            if idx[0] == idx[1] {
                diag[idx[0]].clone()
            } else {
                Expr::zero()
            }
        },
    )
}

fn entry(
    name: &str,
    coords: &[&str],
    ranges: &[(f64, f64)],
    diag: Vec<Expr>,
    fields: Vec<(&str, Vec<Expr>)>,
) -> (String, ManifoldEntry) {
    let chart = Chart::new(coords.iter().copied()).unwrap();
    let mut dom = SamplingDomain::new();
    for (c, (lo, hi)) in coords.iter().zip(ranges) {
        dom.insert(c, *lo, *hi).unwrap();
    }
    let manifold = Manifold::new(name, chart.clone(), dom).unwrap();
    let g = metric_diag(&chart, diag);
    let fields: BTreeMap<String, VectorField> = fields
        .into_iter()
        .map(|(n, comps)| (n.to_string(), VectorField::new(chart.clone(), comps)))
        .collect();
    (
        name.to_string(),
        ManifoldEntry {
            manifold,
            source: ConnectionSource::Metric(g),
            fields,
        },
    )
}

fn corpus() -> Workspace {
    let x = Expr::var("x");
    let y = Expr::var("y");
    let mut w = Workspace::new("suite");
    let (n, e) = entry(
        "flat",
        &["x", "y"],
        &[(-2.0, 2.0), (-2.0, 2.0)],
        vec![Expr::one(), Expr::one()],
        vec![
            ("zero", vec![Expr::zero(), Expr::zero()]),
            ("rot", vec![-y.clone(), x.clone()]),
            ("quad", vec![x.clone().powi(2), Expr::zero()]),
        ],
    );
    w.manifolds.insert(n, e);
    let (n, e) = entry(
        "sphere",
        &["theta", "phi"],
        &[(0.3, 2.8), (0.1, 6.1)],
        vec![Expr::one(), Expr::var("theta").sin().powi(2)],
        vec![
            ("zero", vec![Expr::zero(), Expr::zero()]),
            ("azimuth", vec![Expr::zero(), Expr::one()]),
            (
                "poly",
                vec![Expr::var("theta") * Expr::var("phi"), Expr::var("theta")],
            ),
        ],
    );
    w.manifolds.insert(n, e);
    let (n, e) = entry(
        "polar",
        &["r", "p"],
        &[(0.5, 2.0), (0.1, 6.1)],
        vec![Expr::one(), Expr::var("r").powi(2)],
        vec![
            ("spin", vec![Expr::zero(), Expr::one()]),
            ("radial", vec![Expr::var("r"), Expr::zero()]),
        ],
    );
    w.manifolds.insert(n, e);
    w
}

#[test]
fn clean_suite_passes_everywhere() {
    let w = corpus();
    let report = run_suite(&w, &SuiteConfig::default()).unwrap();
    assert!(report.diagnostics.is_empty(), "{:?}", report.diagnostics);
    for c in &report.checks {
        assert!(
            c.passed,
            "{} on {}/{:?}: residual {:e} ({})",
            c.anchor.name(),
            c.manifold,
            c.field,
            c.max_residual,
            c.detail
        );
    }
    // every anchor ran
    for a in Anchor::ALL {
        assert!(report.checks.iter().any(|c| c.anchor == a), "{}", a.name());
    }
}

#[test]
fn report_is_deterministic() {
    let w = corpus();
    let cfg = SuiteConfig::default();
    let a = run_suite(&w, &cfg).unwrap();
    let b = run_suite(&w, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_changes_sample_points_but_not_verdicts() {
    let w = corpus();
    let cfg = SuiteConfig {
        seed: 42,
        ..SuiteConfig::default()
    };
    let report = run_suite(&w, &cfg).unwrap();
    assert!(report.all_passed());
}

fn mutated_workspace() -> Workspace {
    // curved manifolds only: several sign faults are invisible where Γ = 0
    let mut w = corpus();
    w.manifolds.remove("flat");
    w
}

#[test]
fn every_mutation_is_caught() {
    let w = mutated_workspace();
    for m in Mutation::ALL {
        let cfg = SuiteConfig {
            faults: Faults::single(m),
            ..SuiteConfig::default()
        };
        let report = run_suite(&w, &cfg).unwrap();
        let failures: Vec<_> = report.failures().collect();
        assert!(
            !failures.is_empty(),
            "mutation `{}` escaped every check",
            m.name()
        );
    }
}

#[test]
fn mask_restricts_checks() {
    let w = corpus();
    let mut mask = std::collections::BTreeSet::new();
    mask.insert(Anchor::Eq8);
    mask.insert(Anchor::Bianchi);
    let cfg = SuiteConfig {
        mask: Some(mask),
        ..SuiteConfig::default()
    };
    let report = run_suite(&w, &cfg).unwrap();
    assert!(report
        .checks
        .iter()
        .all(|c| matches!(c.anchor, Anchor::Eq8 | Anchor::Bianchi)));
    assert!(report.all_passed());
}

#[test]
fn degenerate_metric_becomes_diagnostic_not_panic() {
    let mut w = corpus();
    let chart = Chart::new(["u", "v"]).unwrap();
    let mut dom = SamplingDomain::new();
    dom.insert("u", -1.0, 1.0).unwrap();
    dom.insert("v", -1.0, 1.0).unwrap();
    let manifold = Manifold::new("bad", chart.clone(), dom).unwrap();
    let g = Tensor::from_fn(
        chart.clone(),
        vec![Variance::Down, Variance::Down],
        |idx| {
            if idx == [0, 0] {
                Expr::one()
            } else {
                Expr::zero()
            }
        },
    );
    w.manifolds.insert(
        "bad".to_string(),
        ManifoldEntry {
            manifold,
            source: ConnectionSource::Metric(g),
            fields: BTreeMap::new(),
        },
    );
    let report = run_suite(&w, &SuiteConfig::default()).unwrap();
    assert!(report.diagnostics.iter().any(|d| d.manifold == "bad"));
    // the healthy manifolds still ran
    assert!(report.checks.iter().any(|c| c.manifold == "sphere"));
    assert!(!report.all_passed());
}
