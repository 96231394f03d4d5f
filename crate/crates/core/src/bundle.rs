//! Objects on the tangent bundle T(M) in induced coordinates (x^h, y^h).
//!
//! Fibre coordinates are named `d<base coordinate>`. Bundle indices run
//! over 0..2n with 0..n unbarred (base) and n..2n barred (fibre).
//!
//! The horizontal lift of a connection has the block structure
//!
//! ```text
//! Γ̄^k_{ji} = Γ^k_{ji}
//! Γ̄^k_{j̄i} = Γ̄^k_{jī} = Γ̄^k_{j̄ī} = Γ̄^k̄_{j̄ī} = 0
//! Γ̄^k̄_{ji} = y^s ∂_s Γ^k_{ji} − y^s R^k_{sji}
//! Γ̄^k̄_{j̄i} = Γ̄^k̄_{jī} = Γ^k_{ji}
//! ```
//!
//! and is characterized by how it acts on vertical and horizontal lifts of
//! base fields; [`verify_lift_conditions`] checks those four conditions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::Expr;
use crate::faults::{Faults, Mutation};
use crate::geometry::{covariant_derivative_along, curvature};
use crate::manifold::{Chart, ChartError, VectorField};
use crate::sample::{max_residual, EquivConfig, Residual, SamplingDomain, Unsampleable};
use crate::tensor::{Connection, Tensor, Variance};

#[derive(Debug, Clone, PartialEq)]
pub enum BundleError {
    /// A generated fibre coordinate name collides with a base coordinate.
    NameCollision { name: String },
    Chart(ChartError),
}

impl fmt::Display for BundleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleError::NameCollision { name } => {
                write!(f, "fibre coordinate `{name}` collides with a base coordinate")
            }
            BundleError::Chart(e) => write!(f, "{e}"),
        }
    }
}

/// The tangent bundle chart over a base chart.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentBundle {
    base: Arc<Chart>,
    chart: Arc<Chart>,
}

impl TangentBundle {
    pub fn new(base: Arc<Chart>) -> Result<TangentBundle, BundleError> {
        let mut names: Vec<String> = base.coords().map(String::from).collect();
        for c in base.coords() {
            let fibre = format!("d{c}");
            if base.index_of(&fibre).is_some() {
                return Err(BundleError::NameCollision { name: fibre });
            }
            names.push(fibre);
        }
        let chart = Chart::new(names).map_err(BundleError::Chart)?;
        Ok(TangentBundle { base, chart })
    }

    pub fn base(&self) -> &Arc<Chart> {
        &self.base
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn n(&self) -> usize {
        self.base.dim()
    }

    pub fn fibre_coord(&self, h: usize) -> &str {
        self.chart.coord(self.n() + h)
    }

    fn y(&self, h: usize) -> Expr {
        Expr::var(self.fibre_coord(h))
    }

    /// Base domain extended by the open fibre box (−w, w) per fibre
    /// coordinate.
    pub fn domain(&self, base_dom: &SamplingDomain, halfwidth: f64) -> SamplingDomain {
        let mut out = base_dom.clone();
        for h in 0..self.n() {
            out.insert(self.fibre_coord(h), -halfwidth, halfwidth)
                .expect("fibre halfwidth must be positive and finite");
        }
        out
    }

    /// Substitute y^h := ϑ^h(x): restriction to the cross-section.
    pub fn restrict_to_section(&self, e: &Expr, v: &VectorField) -> Expr {
        let mut map = BTreeMap::new();
        for h in 0..self.n() {
            map.insert(String::from(self.fibre_coord(h)), v.comp(h).clone());
        }
        e.substitute(&map)
    }
}

/// Connection coefficients Γ̄^K_{JI} on the tangent bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleConnection {
    bundle: TangentBundle,
    conn: Connection,
}

impl BundleConnection {
    pub fn bundle(&self) -> &TangentBundle {
        &self.bundle
    }

    /// The coefficients as a plain (non-symmetric) connection over the
    /// 2n-dimensional bundle chart.
    pub fn as_connection(&self) -> &Connection {
        &self.conn
    }

    pub fn gamma(&self, k: usize, j: usize, i: usize) -> &Expr {
        self.conn.gamma(k, j, i)
    }

    /// The five vanishing blocks must be the literal zero expression.
    pub fn vanishing_blocks_structurally_zero(&self) -> bool {
        let n = self.bundle.n();
        for k in 0..n {
            for j in 0..2 * n {
                for i in 0..2 * n {
                    // any barred lower index with an unbarred upper one
                    if (j >= n || i >= n) && !self.gamma(k, j, i).is_zero() {
                        return false;
                    }
                }
            }
        }
        for k in n..2 * n {
            for j in n..2 * n {
                for i in n..2 * n {
                    if !self.gamma(k, j, i).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Second fibre derivatives of every component; all must vanish for
    /// the coefficients to be affine in y.
    pub fn fibre_second_derivatives(&self) -> Vec<Expr> {
        let n = self.bundle.n();
        let mut out = Vec::new();
        for k in 0..2 * n {
            for j in 0..2 * n {
                for i in 0..2 * n {
                    for h in 0..n {
                        let name = self.bundle.fibre_coord(h);
                        out.push(
                            self.gamma(k, j, i)
                                .differentiate(name)
                                .differentiate(name)
                                .simplify(),
                        );
                    }
                }
            }
        }
        out
    }
}

/// Horizontal lift Γ̄ of a connection to the tangent bundle. `r` must be
/// the curvature of `c`.
pub fn horizontal_lift_connection(
    bundle: &TangentBundle,
    c: &Connection,
    r: &Tensor,
) -> BundleConnection {
    horizontal_lift_connection_with(bundle, c, r, &Faults::none())
}

pub fn horizontal_lift_connection_with(
    bundle: &TangentBundle,
    c: &Connection,
    r: &Tensor,
    faults: &Faults,
) -> BundleConnection {
    let n = bundle.n();
    let s_horiz = Expr::constant(faults.sign(Mutation::BundleHorizontalBlockSign));
    let s_mixed = Expr::constant(faults.sign(Mutation::BundleMixedBlockSign));
    let s_deriv = Expr::constant(faults.sign(Mutation::BundleDerivativeTermSign));
    let s_curv = Expr::constant(faults.sign(Mutation::BundleCurvatureTermSign));
    let conn = Connection::from_fn(bundle.chart().clone(), false, |kk, jj, ii| {
        let (k_barred, k) = (kk >= n, kk % n);
        let (j_barred, j) = (jj >= n, jj % n);
        let (i_barred, i) = (ii >= n, ii % n);
        match (k_barred, j_barred, i_barred) {
            (false, false, false) => s_horiz.clone() * c.gamma(k, j, i).clone(),
            (false, _, _) => Expr::zero(),
            (true, true, true) => Expr::zero(),
            (true, false, false) => {
                let mut acc = Expr::zero();
                for s in 0..n {
                    let dgamma = c.gamma(k, j, i).differentiate(bundle.base().coord(s));
                    acc = acc
                        + bundle.y(s)
                            * (s_deriv.clone() * dgamma
                                - s_curv.clone() * r.get(&[k, s, j, i]).clone());
                }
                acc
            }
            // exactly one barred lower index
            (true, _, _) => s_mixed.clone() * c.gamma(k, j, i).clone(),
        }
    });
    BundleConnection {
        bundle: bundle.clone(),
        conn,
    }
}

/// Horizontal lift metric ^H g, a 2n x 2n symmetric array.
pub fn horizontal_lift_metric(
    bundle: &TangentBundle,
    g: &Tensor,
    c: &Connection,
) -> Tensor {
    let n = bundle.n();
    // Γ^m_i = y^j Γ^m_{ji}
    let gamma_mi = |m: usize, i: usize| {
        let mut acc = Expr::zero();
        for j in 0..n {
            acc = acc + bundle.y(j) * c.gamma(m, j, i).clone();
        }
        acc
    };
    Tensor::from_fn(
        bundle.chart().clone(),
        alloc::vec![Variance::Down, Variance::Down],
        |idx| {
            let (a, b) = (idx[0], idx[1]);
            match (a >= n, b >= n) {
                (false, false) => {
                    let (i, j) = (a, b);
                    let mut acc = Expr::zero();
                    for m in 0..n {
                        acc = acc
                            + gamma_mi(m, i) * g.get(&[m, j]).clone()
                            + gamma_mi(m, j) * g.get(&[i, m]).clone();
                    }
                    acc
                }
                (false, true) => g.get(&[a, b - n]).clone(),
                (true, false) => g.get(&[a - n, b]).clone(),
                (true, true) => Expr::zero(),
            }
        },
    )
}

/// Vertical lift ^V X = (0, X^h).
pub fn vertical_lift(bundle: &TangentBundle, x: &VectorField) -> VectorField {
    let n = bundle.n();
    let mut comps = alloc::vec![Expr::zero(); n];
    comps.extend(x.comps().iter().cloned());
    VectorField::new(bundle.chart().clone(), comps)
}

/// Horizontal lift ^H X = (X^h, −Γ^h_s X^s) with Γ^h_s = y^j Γ^h_{js}.
pub fn horizontal_lift_vector(
    bundle: &TangentBundle,
    x: &VectorField,
    c: &Connection,
) -> VectorField {
    horizontal_lift_vector_with(bundle, x, c, &Faults::none())
}

pub fn horizontal_lift_vector_with(
    bundle: &TangentBundle,
    x: &VectorField,
    c: &Connection,
    faults: &Faults,
) -> VectorField {
    let n = bundle.n();
    let sign = Expr::constant(-faults.sign(Mutation::HorizontalLiftVectorSign));
    let mut comps: Vec<Expr> = x.comps().to_vec();
    for h in 0..n {
        let mut acc = Expr::zero();
        for j in 0..n {
            for s in 0..n {
                acc = acc + bundle.y(j) * c.gamma(h, j, s).clone() * x.comp(s).clone();
            }
        }
        comps.push((sign.clone() * acc).simplify());
    }
    VectorField::new(bundle.chart().clone(), comps)
}

/// (∇̄_U W)^K = U^J ∂_J W^K + Γ̄^K_{JI} U^J W^I.
pub fn bundle_covariant_derivative(
    gc: &BundleConnection,
    u: &VectorField,
    w: &VectorField,
) -> VectorField {
    covariant_derivative_along(gc.as_connection(), u, w)
}

/// Curvature R̄^K_{MJI} of the bundle connection, same coordinate formula
/// as on the base, over 2n indices.
pub fn bundle_curvature(gc: &BundleConnection) -> Tensor {
    curvature(gc.as_connection())
}

/// Result of checking one of the four defining conditions of the lift.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResult {
    pub name: &'static str,
    pub passed: bool,
    pub residual: Residual,
}

/// Per-condition outcome of [`verify_lift_conditions`].
#[derive(Debug, Clone, PartialEq)]
pub struct LiftConditionReport {
    pub conditions: Vec<ConditionResult>,
}

impl LiftConditionReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.conditions
            .iter()
            .map(|c| c.residual.max)
            .fold(0.0, f64::max)
    }
}

fn field_residual(
    a: &VectorField,
    b: &VectorField,
    dom: &SamplingDomain,
    cfg: &EquivConfig,
) -> Result<Residual, Unsampleable> {
    let mut out = Residual::zero();
    for (ea, eb) in a.comps().iter().zip(b.comps()) {
        if (ea.clone() - eb.clone()).simplify().is_zero() {
            continue;
        }
        out.merge(max_residual(ea, eb, dom, cfg)?);
    }
    Ok(out)
}

/// Check the four conditions characterizing the horizontal lift:
///
/// ∇̄_{^VX} ^VY = 0, ∇̄_{^VX} ^HY = 0,
/// ∇̄_{^HX} ^VY = ^V(∇_X Y), ∇̄_{^HX} ^HY = ^H(∇_X Y)
///
/// sampled over the base domain times the fibre box.
pub fn verify_lift_conditions(
    bundle: &TangentBundle,
    gc: &BundleConnection,
    c: &Connection,
    x: &VectorField,
    y: &VectorField,
    base_dom: &SamplingDomain,
    fibre_halfwidth: f64,
    cfg: &EquivConfig,
) -> Result<LiftConditionReport, Unsampleable> {
    verify_lift_conditions_with(
        bundle,
        gc,
        c,
        x,
        y,
        base_dom,
        fibre_halfwidth,
        cfg,
        &Faults::none(),
    )
}

#[allow(clippy::too_many_arguments)]
pub fn verify_lift_conditions_with(
    bundle: &TangentBundle,
    gc: &BundleConnection,
    c: &Connection,
    x: &VectorField,
    y: &VectorField,
    base_dom: &SamplingDomain,
    fibre_halfwidth: f64,
    cfg: &EquivConfig,
    faults: &Faults,
) -> Result<LiftConditionReport, Unsampleable> {
    let dom = bundle.domain(base_dom, fibre_halfwidth);
    let vx = vertical_lift(bundle, x);
    let vy = vertical_lift(bundle, y);
    let hx = horizontal_lift_vector_with(bundle, x, c, faults);
    let hy = horizontal_lift_vector_with(bundle, y, c, faults);
    let nabla_xy = covariant_derivative_along(c, x, y);
    let v_nabla = vertical_lift(bundle, &nabla_xy);
    let h_nabla = horizontal_lift_vector_with(bundle, &nabla_xy, c, faults);
    let zero = VectorField::zero(bundle.chart().clone());

    let pairs: [(&'static str, VectorField, &VectorField); 4] = [
        ("vertical-vertical", bundle_covariant_derivative(gc, &vx, &vy), &zero),
        ("vertical-horizontal", bundle_covariant_derivative(gc, &vx, &hy), &zero),
        ("horizontal-vertical", bundle_covariant_derivative(gc, &hx, &vy), &v_nabla),
        ("horizontal-horizontal", bundle_covariant_derivative(gc, &hx, &hy), &h_nabla),
    ];

    let mut conditions = Vec::with_capacity(4);
    for (name, lhs, rhs) in pairs {
        let residual = field_residual(&lhs, rhs, &dom, cfg)?;
        conditions.push(ConditionResult {
            name,
            passed: residual.max <= cfg.tol,
            residual,
        });
    }
    Ok(LiftConditionReport { conditions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::christoffel_from_metric;
    use crate::manifold::Chart;

    fn cfg() -> EquivConfig {
        EquivConfig::default()
    }

    fn flat2() -> (Arc<Chart>, Connection, SamplingDomain) {
        let chart = Chart::new(["x", "y"]).unwrap();
        let mut dom = SamplingDomain::new();
        dom.insert("x", -2.0, 2.0).unwrap();
        dom.insert("y", -2.0, 2.0).unwrap();
        (chart.clone(), Connection::flat(chart), dom)
    }

    fn sphere() -> (Arc<Chart>, Connection, SamplingDomain) {
        let chart = Chart::new(["theta", "phi"]).unwrap();
        let g = Tensor::from_fn(
            chart.clone(),
            alloc::vec![Variance::Down, Variance::Down],
            |idx| match (idx[0], idx[1]) {
                (0, 0) => Expr::one(),
                (1, 1) => Expr::var("theta").sin().powi(2),
                _ => Expr::zero(),
            },
        );
        let mut dom = SamplingDomain::new();
        dom.insert("theta", 0.3, 2.8).unwrap();
        dom.insert("phi", 0.1, 6.1).unwrap();
        let c = christoffel_from_metric(&g, &dom, &cfg()).unwrap();
        (chart, c, dom)
    }

    #[test]
    fn fibre_names_and_collisions() {
        let chart = Chart::new(["x", "y"]).unwrap();
        let b = TangentBundle::new(chart).unwrap();
        assert_eq!(b.fibre_coord(0), "dx");
        assert_eq!(b.chart().dim(), 4);

        let bad = Chart::new(["x", "dx"]).unwrap();
        assert!(matches!(
            TangentBundle::new(bad),
            Err(BundleError::NameCollision { .. })
        ));
    }

    #[test]
    fn flat_lift_is_zero() {
        let (chart, c, _) = flat2();
        let b = TangentBundle::new(chart).unwrap();
        let r = curvature(&c);
        let gc = horizontal_lift_connection(&b, &c, &r);
        assert!(gc.as_connection().as_tensor().is_structurally_zero());
        assert!(gc.vanishing_blocks_structurally_zero());
    }

    #[test]
    fn polar_lift_component() {
        // flat plane in polar coordinates: Γ̄^r̄_{φφ} = y^s ∂_s Γ^r_{φφ} = −y^r
        let chart = Chart::new(["r", "phi"]).unwrap();
        let g = Tensor::from_fn(
            chart.clone(),
            alloc::vec![Variance::Down, Variance::Down],
            |idx| match (idx[0], idx[1]) {
                (0, 0) => Expr::one(),
                (1, 1) => Expr::var("r").powi(2),
                _ => Expr::zero(),
            },
        );
        let mut dom = SamplingDomain::new();
        dom.insert("r", 0.5, 2.0).unwrap();
        dom.insert("phi", 0.1, 3.0).unwrap();
        let c = christoffel_from_metric(&g, &dom, &cfg()).unwrap();
        let b = TangentBundle::new(chart).unwrap();
        let r = curvature(&c);
        let gc = horizontal_lift_connection(&b, &c, &r);
        let bdom = b.domain(&dom, 2.0);
        assert!(crate::sample::equivalent(
            gc.gamma(2, 1, 1),
            &Expr::var("dr").neg(),
            &bdom,
            &cfg()
        )
        .unwrap());
    }

    #[test]
    fn lift_metric_blocks() {
        let (chart, c, _) = flat2();
        let b = TangentBundle::new(chart.clone()).unwrap();
        let g = Tensor::from_fn(
            chart,
            alloc::vec![Variance::Down, Variance::Down],
            |idx| {
                if idx[0] == idx[1] {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            },
        );
        let hg = horizontal_lift_metric(&b, &g, &c);
        // [[0, I], [I, 0]]
        for i in 0..4 {
            for j in 0..4 {
                let e = hg.get(&[i, j]);
                let expected_one = (i + 2 == j) || (j + 2 == i);
                if expected_one {
                    assert!(e.is_one());
                } else {
                    assert!(e.is_zero());
                }
                // structural symmetry
                assert_eq!(e, hg.get(&[j, i]));
            }
        }
    }

    #[test]
    fn vertical_lift_components() {
        let chart = Chart::new(["x", "y"]).unwrap();
        let b = TangentBundle::new(chart.clone()).unwrap();
        let dx = VectorField::coordinate(chart.clone(), 0);
        let v = vertical_lift(&b, &dx);
        assert_eq!(
            v.comps().iter().map(|e| e.as_const()).collect::<Vec<_>>(),
            alloc::vec![Some(0.0), Some(0.0), Some(1.0), Some(0.0)]
        );
        let z = vertical_lift(&b, &VectorField::zero(chart));
        assert!(z.comps().iter().all(|e| e.is_zero()));
    }

    #[test]
    fn horizontal_lift_vector_flat() {
        let (chart, c, _) = flat2();
        let b = TangentBundle::new(chart.clone()).unwrap();
        let x = VectorField::new(
            chart,
            alloc::vec![Expr::var("x"), Expr::var("y").powi(2)],
        );
        let h = horizontal_lift_vector(&b, &x, &c);
        assert_eq!(h.comp(0), &Expr::var("x"));
        assert!(h.comp(2).is_zero());
        assert!(h.comp(3).is_zero());
    }

    #[test]
    fn lift_conditions_flat_and_sphere() {
        let (chart, c, dom) = flat2();
        let b = TangentBundle::new(chart.clone()).unwrap();
        let r = curvature(&c);
        let gc = horizontal_lift_connection(&b, &c, &r);
        let x = VectorField::new(
            chart.clone(),
            alloc::vec![Expr::var("x") * Expr::var("y"), Expr::var("x").powi(2)],
        );
        let y = VectorField::new(
            chart,
            alloc::vec![Expr::var("y"), Expr::var("x") + Expr::var("y")],
        );
        let rep = verify_lift_conditions(&b, &gc, &c, &x, &y, &dom, 2.0, &cfg()).unwrap();
        assert!(rep.all_passed(), "{rep:?}");

        let (chart, c, dom) = sphere();
        let b = TangentBundle::new(chart.clone()).unwrap();
        let r = curvature(&c);
        let gc = horizontal_lift_connection(&b, &c, &r);
        let x = VectorField::coordinate(chart.clone(), 0);
        let y = VectorField::coordinate(chart, 1);
        let rep = verify_lift_conditions(&b, &gc, &c, &x, &y, &dom, 2.0, &cfg()).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
    }

    #[test]
    fn corrupted_lift_fails_conditions() {
        let (chart, c, dom) = sphere();
        let b = TangentBundle::new(chart.clone()).unwrap();
        let r = curvature(&c);
        let gc = horizontal_lift_connection_with(
            &b,
            &c,
            &r,
            &Faults::single(Mutation::BundleCurvatureTermSign),
        );
        let x = VectorField::coordinate(chart.clone(), 0);
        let y = VectorField::coordinate(chart, 1);
        let rep = verify_lift_conditions(&b, &gc, &c, &x, &y, &dom, 2.0, &cfg()).unwrap();
        assert!(!rep.all_passed());
    }

    #[test]
    fn lift_coefficients_affine_in_fibre() {
        let (_, c, _) = sphere();
        let b = TangentBundle::new(c.chart().clone()).unwrap();
        let r = curvature(&c);
        let gc = horizontal_lift_connection(&b, &c, &r);
        assert!(gc
            .fibre_second_derivatives()
            .iter()
            .all(|e| e.is_zero()));
    }
}
