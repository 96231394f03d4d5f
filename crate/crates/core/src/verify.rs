//! The verification suite: every identity and proposition check over a
//! workspace, with seeded sampling and a deterministic structured report.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bundle::{horizontal_lift_connection_with, verify_lift_conditions_with, TangentBundle};
use crate::expr::{Expr, Point};
use crate::faults::Faults;
use crate::geometry::{covariant_derivative, curvature, tensor_max_residual};
use crate::manifold::{Chart, VectorField};
use crate::sample::{EquivConfig, Residual, SamplingDomain};
use crate::section::Section;
use crate::tensor::{Connection, Tensor, Variance};
use crate::workspace::Workspace;
use alloc::sync::Arc;

/// Stable tags naming the identity each check instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Anchor {
    /// First Bianchi identity of the base curvature.
    Bianchi,
    /// The four defining conditions of the horizontal lift.
    Cond1,
    /// Block structure and fibre-linearity of the lifted coefficients.
    Eq2,
    /// Induced connection reproduces the base connection.
    Eq8,
    /// Defining residual lies along the fibre directions.
    Eq9,
    /// Closed form of H equals the residual-extracted coefficients.
    Eq10,
    /// H splits as ℒ_ϑΓ − ϑ·R.
    Eq11,
    /// Gauss relation along the section.
    Eq12,
    /// Curvature decomposition along the section.
    Eq15,
    /// Commutator of covariant derivatives reproduces the curvature.
    LieCommute,
    /// Totally-geodesic biconditional.
    Prop2,
    /// Curvature-tangency biconditional.
    Prop3,
    /// Antisymmetrized ∇(ℒ_ϑΓ) equals ℒ_ϑR.
    WellKnown,
}

impl Anchor {
    pub const ALL: [Anchor; 13] = [
        Anchor::Bianchi,
        Anchor::Cond1,
        Anchor::Eq2,
        Anchor::Eq8,
        Anchor::Eq9,
        Anchor::Eq10,
        Anchor::Eq11,
        Anchor::Eq12,
        Anchor::Eq15,
        Anchor::LieCommute,
        Anchor::Prop2,
        Anchor::Prop3,
        Anchor::WellKnown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Anchor::Bianchi => "Bianchi",
            Anchor::Cond1 => "Cond1",
            Anchor::Eq2 => "Eq2",
            Anchor::Eq8 => "Eq8",
            Anchor::Eq9 => "Eq9",
            Anchor::Eq10 => "Eq10",
            Anchor::Eq11 => "Eq11",
            Anchor::Eq12 => "Eq12",
            Anchor::Eq15 => "Eq15",
            Anchor::LieCommute => "LieCommute",
            Anchor::Prop2 => "Prop2",
            Anchor::Prop3 => "Prop3",
            Anchor::WellKnown => "WellKnown",
        }
    }

    pub fn from_name(name: &str) -> Option<Anchor> {
        Anchor::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Pass threshold relative to the suite tolerance. The curvature
    /// decomposition carries one extra differentiation level.
    pub fn tol_factor(self) -> f64 {
        match self {
            Anchor::Eq15 | Anchor::Prop3 => 10.0,
            _ => 1.0,
        }
    }
}

/// Configuration of a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub points: usize,
    pub tol: f64,
    pub fibre_halfwidth: f64,
    /// Anchors to run; `None` means all.
    pub mask: Option<BTreeSet<Anchor>>,
    /// Fault injection; empty in normal operation.
    pub faults: Faults,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            points: 20,
            tol: 1e-9,
            fibre_halfwidth: 2.0,
            mask: None,
            faults: Faults::none(),
        }
    }
}

impl SuiteConfig {
    fn selected(&self, anchor: Anchor) -> bool {
        self.mask.as_ref().map_or(true, |m| m.contains(&anchor))
    }
}

/// One executed check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub anchor: Anchor,
    pub manifold: String,
    pub field: Option<String>,
    pub passed: bool,
    pub max_residual: f64,
    pub witness: Option<Point>,
    pub detail: String,
}

/// A manifold whose checks were aborted, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub manifold: String,
    pub message: String,
}

/// Deterministic, sorted outcome of a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub workspace: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub diagnostics: Vec<Diagnostic>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.diagnostics.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SuiteError {
    /// A selected anchor produced no check anywhere in the workspace.
    MissingAnchor(Anchor),
    EmptyWorkspace,
}

impl fmt::Display for SuiteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteError::MissingAnchor(a) => {
                write!(f, "check `{}` was selected but never executed", a.name())
            }
            SuiteError::EmptyWorkspace => write!(f, "workspace defines no manifolds"),
        }
    }
}

fn fnv1a(seed: u64, parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325 ^ seed;
    for part in parts {
        for b in part.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Degree-two polynomial vector field with small integer coefficients,
/// deterministic per rng stream.
fn random_polynomial_field(chart: &Arc<Chart>, rng: &mut ChaCha8Rng) -> VectorField {
    let n = chart.dim();
    let mut coeff = |scale: f64| {
        let c = (rng.next_u64() % 5) as i64 - 2;
        Expr::constant(c as f64 * scale)
    };
    let comps = (0..n)
        .map(|_| {
            let mut acc = coeff(1.0);
            for i in 0..n {
                acc = acc + coeff(1.0) * Expr::var(chart.coord(i));
                for j in i..n {
                    acc = acc
                        + coeff(0.5) * Expr::var(chart.coord(i)) * Expr::var(chart.coord(j));
                }
            }
            acc.simplify()
        })
        .collect();
    VectorField::new(chart.clone(), comps)
}

struct SuiteRun<'a> {
    cfg: &'a SuiteConfig,
    checks: Vec<CheckResult>,
}

impl<'a> SuiteRun<'a> {
    fn equiv_cfg(&self, anchor: Anchor, manifold: &str, field: Option<&str>) -> EquivConfig {
        EquivConfig {
            points: self.cfg.points,
            tol: self.cfg.tol,
            seed: fnv1a(
                self.cfg.seed,
                &[anchor.name(), manifold, field.unwrap_or("")],
            ),
        }
    }

    fn push_residual(
        &mut self,
        anchor: Anchor,
        manifold: &str,
        field: Option<&str>,
        residual: Residual,
        detail: &str,
    ) {
        let threshold = self.cfg.tol * anchor.tol_factor();
        let passed = residual.max <= threshold;
        self.checks.push(CheckResult {
            anchor,
            manifold: manifold.to_string(),
            field: field.map(String::from),
            passed,
            max_residual: residual.max,
            witness: (!passed && !residual.witness.is_empty()).then_some(residual.witness),
            detail: detail.to_string(),
        });
    }

    fn push_verdict(
        &mut self,
        anchor: Anchor,
        manifold: &str,
        field: Option<&str>,
        passed: bool,
        detail: String,
    ) {
        self.checks.push(CheckResult {
            anchor,
            manifold: manifold.to_string(),
            field: field.map(String::from),
            passed,
            max_residual: 0.0,
            witness: None,
            detail,
        });
    }

    fn manifold_checks(
        &mut self,
        name: &str,
        conn: &Connection,
        curv: &Tensor,
        dom: &SamplingDomain,
    ) -> Result<(), String> {
        let chart = conn.chart().clone();
        let n = chart.dim();

        if self.cfg.selected(Anchor::Bianchi) {
            let cfg = self.equiv_cfg(Anchor::Bianchi, name, None);
            let cyclic = Tensor::from_fn(
                chart.clone(),
                alloc::vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down],
                |idx| {
                    let (h, k, j, i) = (idx[0], idx[1], idx[2], idx[3]);
                    curv.get(&[h, k, j, i]).clone()
                        + curv.get(&[h, j, i, k]).clone()
                        + curv.get(&[h, i, k, j]).clone()
                },
            );
            let zero = Tensor::zeros(chart.clone(), cyclic.signature().to_vec());
            let res = tensor_max_residual(&cyclic, &zero, dom, &cfg)
                .map_err(|e| e.to_string())?;
            self.push_residual(Anchor::Bianchi, name, None, res, "first Bianchi identity");
        }

        if self.cfg.selected(Anchor::LieCommute) {
            let cfg = self.equiv_cfg(Anchor::LieCommute, name, None);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut worst = Residual::zero();
            for _ in 0..3 {
                let w = random_polynomial_field(&chart, &mut rng);
                let w_up = Tensor::from_fn(chart.clone(), alloc::vec![Variance::Up], |idx| {
                    w.comp(idx[0]).clone()
                });
                let second = covariant_derivative(&covariant_derivative(&w_up, conn), conn);
                let commutator = Tensor::from_fn(
                    chart.clone(),
                    alloc::vec![Variance::Down, Variance::Down, Variance::Up],
                    |idx| {
                        let (k, j, h) = (idx[0], idx[1], idx[2]);
                        second.get(&[k, j, h]).clone() - second.get(&[j, k, h]).clone()
                    },
                );
                let contracted = Tensor::from_fn(
                    chart.clone(),
                    alloc::vec![Variance::Down, Variance::Down, Variance::Up],
                    |idx| {
                        let (k, j, h) = (idx[0], idx[1], idx[2]);
                        let mut acc = Expr::zero();
                        for t in 0..n {
                            acc = acc + curv.get(&[h, k, j, t]).clone() * w.comp(t).clone();
                        }
                        acc
                    },
                );
                worst.merge(
                    tensor_max_residual(&commutator, &contracted, dom, &cfg)
                        .map_err(|e| e.to_string())?,
                );
            }
            self.push_residual(
                Anchor::LieCommute,
                name,
                None,
                worst,
                "(∇∇ − ∇∇)W = R·W for seeded random fields",
            );
        }

        let needs_bundle =
            self.cfg.selected(Anchor::Cond1) || self.cfg.selected(Anchor::Eq2);
        if needs_bundle {
            let bundle = TangentBundle::new(chart.clone()).map_err(|e| e.to_string())?;
            let lifted =
                horizontal_lift_connection_with(&bundle, conn, curv, &self.cfg.faults);

            if self.cfg.selected(Anchor::Cond1) {
                let cfg = self.equiv_cfg(Anchor::Cond1, name, None);
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                let mut pairs: Vec<(VectorField, VectorField)> = Vec::new();
                for a in 0..n {
                    for b in 0..n {
                        pairs.push((
                            VectorField::coordinate(chart.clone(), a),
                            VectorField::coordinate(chart.clone(), b),
                        ));
                    }
                }
                for _ in 0..5 {
                    pairs.push((
                        random_polynomial_field(&chart, &mut rng),
                        random_polynomial_field(&chart, &mut rng),
                    ));
                }
                let mut worst = Residual::zero();
                let mut all_passed = true;
                for (x, y) in &pairs {
                    let rep = verify_lift_conditions_with(
                        &bundle,
                        &lifted,
                        conn,
                        x,
                        y,
                        dom,
                        self.cfg.fibre_halfwidth,
                        &cfg,
                        &self.cfg.faults,
                    )
                    .map_err(|e| e.to_string())?;
                    all_passed &= rep.all_passed();
                    for c in &rep.conditions {
                        worst.merge(c.residual.clone());
                    }
                }
                let threshold = self.cfg.tol * Anchor::Cond1.tol_factor();
                let passed = all_passed && worst.max <= threshold;
                self.checks.push(CheckResult {
                    anchor: Anchor::Cond1,
                    manifold: name.to_string(),
                    field: None,
                    passed,
                    max_residual: worst.max,
                    witness: (!passed && !worst.witness.is_empty())
                        .then_some(worst.witness),
                    detail: format!(
                        "four lift conditions over {} field pairs",
                        pairs.len()
                    ),
                });
            }

            if self.cfg.selected(Anchor::Eq2) {
                let cfg = self.equiv_cfg(Anchor::Eq2, name, None);
                let blocks_zero = lifted.vanishing_blocks_structurally_zero();
                let bdom = bundle.domain(dom, self.cfg.fibre_halfwidth);
                let mut worst = Residual::zero();
                let mut affine = true;
                for e in lifted.fibre_second_derivatives() {
                    if e.is_zero() {
                        continue;
                    }
                    let res = crate::sample::max_residual(&e, &Expr::zero(), &bdom, &cfg)
                        .map_err(|e| e.to_string())?;
                    affine &= res.max <= self.cfg.tol;
                    worst.merge(res);
                }
                let passed = blocks_zero && affine && worst.max <= self.cfg.tol;
                self.checks.push(CheckResult {
                    anchor: Anchor::Eq2,
                    manifold: name.to_string(),
                    field: None,
                    passed,
                    max_residual: worst.max,
                    witness: None,
                    detail: format!(
                        "vanishing blocks structural: {blocks_zero}; coefficients affine in fibre: {affine}"
                    ),
                });
            }
        }

        Ok(())
    }

    fn field_checks(
        &mut self,
        name: &str,
        fname: &str,
        conn: &Connection,
        field: &VectorField,
        dom: &SamplingDomain,
    ) -> Result<(), String> {
        let section =
            Section::with_faults(field, conn, &self.cfg.faults).map_err(|e| e.to_string())?;
        let f = Some(fname);

        if self.cfg.selected(Anchor::Eq8) {
            let cfg = self.equiv_cfg(Anchor::Eq8, name, f);
            let res = section.eq8_residual(dom, &cfg).map_err(|e| e.to_string())?;
            self.push_residual(Anchor::Eq8, name, f, res, "induced connection = base connection");
        }
        if self.cfg.selected(Anchor::Eq9) {
            let cfg = self.equiv_cfg(Anchor::Eq9, name, f);
            let res = section.eq9_residual(dom, &cfg).map_err(|e| e.to_string())?;
            self.push_residual(
                Anchor::Eq9,
                name,
                f,
                res,
                "defining residual has no tangential part",
            );
        }
        if self.cfg.selected(Anchor::Eq10) {
            let cfg = self.equiv_cfg(Anchor::Eq10, name, f);
            let res = section.eq10_residual(dom, &cfg).map_err(|e| e.to_string())?;
            self.push_residual(
                Anchor::Eq10,
                name,
                f,
                res,
                "closed form of H = extracted coefficients",
            );
        }
        if self.cfg.selected(Anchor::Eq11) {
            let cfg = self.equiv_cfg(Anchor::Eq11, name, f);
            let res = section.eq11_residual(dom, &cfg).map_err(|e| e.to_string())?;
            self.push_residual(Anchor::Eq11, name, f, res, "H = ℒΓ − ϑ·R");
        }
        if self.cfg.selected(Anchor::Eq12) {
            let cfg = self.equiv_cfg(Anchor::Eq12, name, f);
            let res = section.eq12_residual(dom, &cfg).map_err(|e| e.to_string())?;
            self.push_residual(Anchor::Eq12, name, f, res, "Gauss relation along the section");
        }
        if self.cfg.selected(Anchor::WellKnown) {
            let cfg = self.equiv_cfg(Anchor::WellKnown, name, f);
            let res = section
                .well_known_formula_residual(dom, &cfg)
                .map_err(|e| e.to_string())?;
            self.push_residual(
                Anchor::WellKnown,
                name,
                f,
                res,
                "antisymmetrized ∇(ℒΓ) = ℒR",
            );
        }

        let needs_split = self.cfg.selected(Anchor::Eq15) || self.cfg.selected(Anchor::Prop3);
        if needs_split {
            let split = section.curvature_split_unchecked();
            if self.cfg.selected(Anchor::Eq15) {
                let cfg = self.equiv_cfg(Anchor::Eq15, name, f);
                let res = section
                    .eq15_residual_of(&split, dom, &cfg)
                    .map_err(|e| e.to_string())?;
                self.push_residual(
                    Anchor::Eq15,
                    name,
                    f,
                    res,
                    "curvature split = closed forms",
                );
            }
            if self.cfg.selected(Anchor::Prop3) {
                let cfg = self.equiv_cfg(Anchor::Prop3, name, f);
                let cfg = EquivConfig {
                    tol: cfg.tol * Anchor::Prop3.tol_factor(),
                    ..cfg
                };
                let verdict = section
                    .curvature_tangency_verdict_of(&split, dom, &cfg)
                    .map_err(|e| e.to_string())?;
                self.push_verdict(
                    Anchor::Prop3,
                    name,
                    f,
                    verdict.biconditional_holds(),
                    format!(
                        "vertical=0: {}; lieR=0: {}; antisym grad(ϑR)=0: {}",
                        verdict.vertical_vanishes,
                        verdict.lie_curvature_vanishes,
                        verdict.antisym_grad_vanishes
                    ),
                );
            }
        }

        if self.cfg.selected(Anchor::Prop2) {
            let cfg = self.equiv_cfg(Anchor::Prop2, name, f);
            let verdict = section
                .totally_geodesic_verdict_unchecked(dom, &cfg)
                .map_err(|e| e.to_string())?;
            self.push_verdict(
                Anchor::Prop2,
                name,
                f,
                verdict.biconditional_holds(),
                format!(
                    "H=0: {}; lieΓ=0: {}; ϑR=0: {}",
                    verdict.h_vanishes,
                    verdict.lie_connection_vanishes,
                    verdict.theta_r_vanishes
                ),
            );
        }

        Ok(())
    }
}

/// Execute every selected check for every (manifold, field) pair.
///
/// Per-manifold failures to even set up (degenerate metric, unsampleable
/// domain, torsionful connection) abort that manifold's checks with a
/// diagnostic; identity failures are reported as failed checks, never
/// swallowed.
pub fn run_suite(w: &Workspace, cfg: &SuiteConfig) -> Result<VerificationReport, SuiteError> {
    if w.manifolds.is_empty() {
        return Err(SuiteError::EmptyWorkspace);
    }
    let mut run = SuiteRun {
        cfg,
        checks: Vec::new(),
    };
    let mut diagnostics = Vec::new();

    for (name, entry) in &w.manifolds {
        let base_cfg = EquivConfig {
            points: cfg.points,
            tol: cfg.tol,
            seed: fnv1a(cfg.seed, &["connection", name]),
        };
        let conn = match entry.connection(&base_cfg) {
            Ok(c) => c,
            Err(e) => {
                diagnostics.push(Diagnostic {
                    manifold: name.clone(),
                    message: e.to_string(),
                });
                continue;
            }
        };
        if !conn.is_symmetric() {
            diagnostics.push(Diagnostic {
                manifold: name.clone(),
                message: "explicit connection is not flagged symmetric; the suite's identities assume a torsion-free connection".to_string(),
            });
            continue;
        }
        // an explicit symmetric flag is a claim; verify it
        let mut sym_residual = Residual::zero();
        let mut sym_err = None;
        for k in 0..conn.dim() {
            for j in 0..conn.dim() {
                for i in 0..j {
                    match crate::sample::max_residual(
                        conn.gamma(k, j, i),
                        conn.gamma(k, i, j),
                        &entry.manifold.domain,
                        &base_cfg,
                    ) {
                        Ok(r) => sym_residual.merge(r),
                        Err(e) => {
                            sym_err = Some(e.to_string());
                        }
                    }
                }
            }
        }
        if let Some(e) = sym_err {
            diagnostics.push(Diagnostic {
                manifold: name.clone(),
                message: e,
            });
            continue;
        }
        if sym_residual.max > cfg.tol {
            diagnostics.push(Diagnostic {
                manifold: name.clone(),
                message: format!(
                    "connection flagged symmetric but Γ^k_ji ≠ Γ^k_ij (residual {:e})",
                    sym_residual.max
                ),
            });
            continue;
        }

        let curv = curvature(&conn);
        let dom = entry.manifold.domain.clone();
        if let Err(msg) = run.manifold_checks(name, &conn, &curv, &dom) {
            diagnostics.push(Diagnostic {
                manifold: name.clone(),
                message: msg,
            });
            continue;
        }
        let mut aborted = false;
        for (fname, field) in &entry.fields {
            if let Err(msg) = run.field_checks(name, fname, &conn, field, &dom) {
                diagnostics.push(Diagnostic {
                    manifold: name.clone(),
                    message: format!("field `{fname}`: {msg}"),
                });
                aborted = true;
                break;
            }
        }
        if aborted {
            continue;
        }
    }

    // every selected anchor must have executed somewhere
    for anchor in Anchor::ALL {
        if cfg.selected(anchor)
            && diagnostics.is_empty()
            && !run.checks.iter().any(|c| c.anchor == anchor)
        {
            return Err(SuiteError::MissingAnchor(anchor));
        }
    }

    let mut checks = run.checks;
    checks.sort_by(|a, b| {
        (a.anchor, &a.manifold, &a.field).cmp(&(b.anchor, &b.manifold, &b.field))
    });
    Ok(VerificationReport {
        workspace: w.name.clone(),
        seed: cfg.seed,
        checks,
        diagnostics,
    })
}

/// `k` seeded points of a domain; re-exported convenience for callers
/// building their own spot checks.
pub use crate::sample::sample_points;
