//! End-to-end acceptance gate over the full corpus: one printed pass/fail
//! line per criterion, asserted together at the end.

use std::path::PathBuf;
use std::process::Command;

use hlift::parser::{parse_expression, parse_workspace};
use hlift_core::{
    max_residual, run_suite, sample_points, Anchor, EquivConfig, Expr, Faults, Mutation,
    Point, SamplingDomain, Section, SuiteConfig, VerificationReport, Workspace,
};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_workspace() -> Workspace {
    let mut merged = Workspace::new("corpus");
    for file in ["flat.lg", "flat3.lg", "polar.lg", "sphere.lg", "halfplane.lg"] {
        let text = std::fs::read_to_string(corpus_dir().join(file)).unwrap();
        let w = parse_workspace(&text).unwrap();
        merged.manifolds.extend(w.manifolds);
    }
    merged
}

struct Gate {
    lines: Vec<(String, bool, String)>,
}

impl Gate {
    fn record(&mut self, name: &str, passed: bool, note: impl Into<String>) {
        self.lines.push((name.to_string(), passed, note.into()));
    }

    fn finish(self) {
        let mut all = true;
        for (name, passed, note) in &self.lines {
            let status = if *passed { "PASS" } else { "FAIL" };
            println!("{name}: {status} — {note}");
            all &= passed;
        }
        assert!(all, "acceptance criteria failed");
    }
}

fn anchor_stats(report: &VerificationReport, anchors: &[Anchor]) -> (bool, f64, usize) {
    let mut passed = true;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for c in &report.checks {
        if anchors.contains(&c.anchor) {
            passed &= c.passed;
            worst = worst.max(c.max_residual);
            count += 1;
        }
    }
    (passed && count > 0, worst, count)
}

fn verdict_detail<'r>(
    report: &'r VerificationReport,
    anchor: Anchor,
    manifold: &str,
    field: &str,
) -> &'r str {
    report
        .checks
        .iter()
        .find(|c| {
            c.anchor == anchor && c.manifold == manifold && c.field.as_deref() == Some(field)
        })
        .map(|c| c.detail.as_str())
        .unwrap_or("<missing>")
}

#[derive(Clone)]
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    fn range(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

fn random_expr(rng: &mut Lcg, depth: usize) -> Expr {
    if depth == 0 || rng.range(4) == 0 {
        return match rng.range(3) {
            0 => Expr::constant(rng.range(9) as f64 - 4.0),
            1 => Expr::var("x"),
            _ => Expr::var("y"),
        };
    }
    match rng.range(6) {
        0 => random_expr(rng, depth - 1) + random_expr(rng, depth - 1),
        1 => random_expr(rng, depth - 1) - random_expr(rng, depth - 1),
        2 => random_expr(rng, depth - 1) * random_expr(rng, depth - 1),
        3 => random_expr(rng, depth - 1).sin(),
        4 => random_expr(rng, depth - 1).cos(),
        _ => -random_expr(rng, depth - 1),
    }
}

#[test]
fn acceptance() {
    let mut gate = Gate { lines: Vec::new() };
    let w = corpus_workspace();
    let cfg = SuiteConfig::default();
    let report = run_suite(&w, &cfg).expect("suite must run");
    assert!(report.diagnostics.is_empty(), "{:?}", report.diagnostics);

    // AC-1: four lift conditions per manifold
    let (ok, worst, count) = anchor_stats(&report, &[Anchor::Cond1]);
    gate.record(
        "AC-1",
        ok && worst <= 1e-9,
        format!("lift conditions on {count} manifolds, max residual {worst:.2e}"),
    );

    // AC-2: block structure and fibre-affineness of the lifted connection
    let (ok, worst, count) = anchor_stats(&report, &[Anchor::Eq2]);
    gate.record(
        "AC-2",
        ok && worst <= 1e-9,
        format!("block structure on {count} manifolds, max residual {worst:.2e}"),
    );

    // AC-3: induced connection equals base connection for every pair
    let (ok, worst, count) = anchor_stats(&report, &[Anchor::Eq8]);
    gate.record(
        "AC-3",
        ok && worst <= 1e-9,
        format!("{count} (manifold, field) pairs, max residual {worst:.2e}"),
    );

    // AC-4: commutator oracle calibrates the curvature sign
    let (ok, worst, _) = anchor_stats(&report, &[Anchor::LieCommute]);
    let sphere_ran = report
        .checks
        .iter()
        .any(|c| c.anchor == Anchor::LieCommute && c.manifold == "sphere");
    gate.record(
        "AC-4",
        ok && sphere_ran && worst <= 1e-9,
        format!("commutator oracle incl. sphere, max residual {worst:.2e}"),
    );

    // AC-5: H from the defining residual = closed form = ℒΓ − ϑ·R
    let (ok, worst, count) = anchor_stats(&report, &[Anchor::Eq9, Anchor::Eq10, Anchor::Eq11]);
    gate.record(
        "AC-5",
        ok && worst <= 1e-9,
        format!("{count} H-identity checks, max residual {worst:.2e}"),
    );

    // AC-6: the well-known formula
    let (ok, worst, count) = anchor_stats(&report, &[Anchor::WellKnown]);
    gate.record(
        "AC-6",
        ok && worst <= 1e-9,
        format!("{count} pairs, max residual {worst:.2e}"),
    );

    // AC-7: curvature decomposition, one extra differentiation level
    let (ok, worst, count) = anchor_stats(&report, &[Anchor::Eq15]);
    gate.record(
        "AC-7",
        ok && worst <= 1e-8,
        format!("{count} pairs, max residual {worst:.2e}"),
    );

    // AC-8: Proposition 2 verdicts on the designated pairs
    let (bic_ok, _, _) = anchor_stats(&report, &[Anchor::Prop2]);
    let polar_rot = verdict_detail(&report, Anchor::Prop2, "polar", "rotation");
    let sphere_az = verdict_detail(&report, Anchor::Prop2, "sphere", "azimuth");
    let polar_expected = polar_rot == "H=0: true; lieΓ=0: true; ϑR=0: true";
    let sphere_expected = sphere_az == "H=0: false; lieΓ=0: true; ϑR=0: false";
    // witness H ≠ 0 on the sphere Killing field at a sample point
    let h_witnessed = {
        let entry = &w.manifolds["sphere"];
        let conn = entry.connection(&EquivConfig::default()).unwrap();
        let section = Section::new(&entry.fields["azimuth"], &conn).unwrap();
        let h = section.second_fundamental_closed_form();
        let pts = sample_points(&entry.manifold.domain, 5, 1);
        pts.iter().any(|p| {
            h.iter()
                .any(|(_, e)| e.evaluate(p).map(|v| v.abs() > 1e-6).unwrap_or(false))
        })
    };
    gate.record(
        "AC-8",
        bic_ok && polar_expected && sphere_expected && h_witnessed,
        format!("polar/rotation: {polar_rot}; sphere/azimuth: {sphere_az}; H witnessed nonzero: {h_witnessed}"),
    );

    // AC-9: Proposition 3 biconditional, incl. a both-sides-false pair
    let (bic_ok, _, _) = anchor_stats(&report, &[Anchor::Prop3]);
    let sphere_poly = verdict_detail(&report, Anchor::Prop3, "sphere", "poly");
    let both_false = sphere_poly == "vertical=0: false; lieR=0: false; antisym grad(ϑR)=0: false";
    gate.record(
        "AC-9",
        bic_ok && both_false,
        format!("biconditional everywhere; sphere/poly: {sphere_poly}"),
    );

    // AC-10: every documented mutation trips at least one check.
    // Curved manifolds only: a pure sign flip is invisible where Γ = 0.
    let mut curved = Workspace::new("curved");
    for name in ["polar", "sphere", "halfplane"] {
        curved
            .manifolds
            .insert(name.to_string(), w.manifolds[name].clone());
    }
    let mut escaped = Vec::new();
    for m in Mutation::ALL {
        let cfg = SuiteConfig {
            faults: Faults::single(m),
            ..SuiteConfig::default()
        };
        let r = run_suite(&curved, &cfg).expect("mutated suite must still run");
        if r.failures().count() == 0 {
            escaped.push(m.name());
        }
    }
    gate.record(
        "AC-10",
        escaped.is_empty(),
        if escaped.is_empty() {
            format!("all {} mutations caught", Mutation::ALL.len())
        } else {
            format!("escaped: {escaped:?}")
        },
    );

    // AC-11: symbolic derivative vs central differences on 100 random
    // expressions
    let mut rng = Lcg(0x5eed);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 100 {
        let e = random_expr(&mut rng, 4);
        if !e.free_vars().contains("x") {
            continue;
        }
        let d = e.differentiate("x");
        let x = (rng.range(4000) as f64) / 1000.0 - 2.0;
        let y = (rng.range(4000) as f64) / 1000.0 - 2.0;
        let at = |xv: f64| {
            let mut p = Point::new();
            p.set("x", xv);
            p.set("y", y);
            p
        };
        let sym = d.evaluate(&at(x)).unwrap();
        let fd = (e.evaluate(&at(x + h)).unwrap() - e.evaluate(&at(x - h)).unwrap()) / (2.0 * h);
        worst = worst.max((sym - fd).abs());
        checked += 1;
    }
    gate.record(
        "AC-11",
        worst <= 1e-5,
        format!("100 expressions, max |symbolic − central| = {worst:.2e}"),
    );

    // AC-12: CLI exit codes and JSON round-trip
    gate.record("AC-12", ac12(&w), "CLI exit codes 0/0/2 and JSON component round-trip");

    gate.finish();
}

fn ac12(w: &Workspace) -> bool {
    let bin = env!("CARGO_BIN_EXE_hlift");
    let dir = corpus_dir();
    let run = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .current_dir(&dir)
            .output()
            .expect("binary must run")
    };

    let check = run(&["check", "sphere.lg", "--seed", "42"]);
    if check.status.code() != Some(0) {
        return false;
    }
    let compute = run(&[
        "compute", "H", "flat.lg", "--manifold", "flat", "--field", "quad", "--format", "json",
    ]);
    if compute.status.code() != Some(0) {
        return false;
    }
    let doc: serde_json::Value =
        serde_json::from_slice(&compute.stdout).expect("compute output must be JSON");
    let h000 = doc["objects"]["H"][0][0][0].as_str().unwrap();
    if parse_expression(h000).unwrap().as_const() != Some(2.0) {
        return false;
    }
    let missing = run(&["check", "missing.lg"]);
    if missing.status.code() != Some(2) {
        return false;
    }

    // round-trip: every emitted component string re-parses to an
    // equivalent expression, across all corpus manifolds and selectors
    let mut dom_all = SamplingDomain::new();
    for entry in w.manifolds.values() {
        dom_all = dom_all.extended(&entry.manifold.domain);
    }
    for (mname, entry) in &w.manifolds {
        let field = entry
            .fields
            .keys()
            .find(|k| k.as_str() != "zero")
            .unwrap()
            .clone();
        for (selector, needs_field) in [
            ("christoffel", false),
            ("curvature", false),
            ("lift-connection", false),
            ("lift-metric", false),
            ("frame", true),
            ("induced", true),
            ("H", true),
            ("gauss", true),
        ] {
            let mut args = vec![
                "compute", selector, "--format", "json", "--manifold", mname,
            ];
            let file = format!("{mname}.lg");
            let file = if dir.join(&file).exists() { file } else { "flat3.lg".to_string() };
            args.insert(2, Box::leak(file.into_boxed_str()));
            if needs_field {
                args.push("--field");
                args.push(Box::leak(field.clone().into_boxed_str()));
            }
            let out = run(&args);
            if out.status.code() != Some(0) {
                eprintln!("compute {selector} on {mname} failed: {}",
                    String::from_utf8_lossy(&out.stderr));
                return false;
            }
            let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
            if !roundtrip_strings(&doc["objects"][selector], &dom_all) {
                eprintln!("round-trip failed for {selector} on {mname}");
                return false;
            }
        }
    }
    true
}

/// Every string leaf re-parses and matches its own re-rendering under
/// sampling; fibre coordinates get a default box.
fn roundtrip_strings(v: &serde_json::Value, base_dom: &SamplingDomain) -> bool {
    match v {
        serde_json::Value::String(s) => {
            let Ok(e) = parse_expression(s) else {
                return false;
            };
            let rendered = e.to_string();
            let Ok(e2) = parse_expression(&rendered) else {
                return false;
            };
            let mut dom = base_dom.clone();
            for var in e.free_vars() {
                if dom.get(&var).is_none() {
                    dom.insert(&var, -2.0, 2.0).unwrap();
                }
            }
            let cfg = EquivConfig::default();
            max_residual(&e, &e2, &dom, &cfg)
                .map(|r| r.max <= cfg.tol)
                .unwrap_or(false)
        }
        serde_json::Value::Array(items) => {
            items.iter().all(|i| roundtrip_strings(i, base_dom))
        }
        _ => false,
    }
}
