//! Tensor calculus on the base manifold.
//!
//! Curvature convention: R^h_{kji} = ∂_k Γ^h_{ji} − ∂_j Γ^h_{ki}
//! + Γ^h_{kt} Γ^t_{ji} − Γ^h_{jt} Γ^t_{ki}, so that for a symmetric
//! connection (∇_k ∇_j − ∇_j ∇_k) W^h = R^h_{kjt} W^t. The commutator
//! property is tested, not assumed; every downstream sign hangs on it.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{Expr, Point};
use crate::manifold::{Chart, VectorField};
use crate::sample::{max_residual, sample_points, EquivConfig, Residual, SamplingDomain, Unsampleable};
use crate::tensor::{Connection, ConnectionError, Tensor, Variance};

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    /// Metric determinant vanished (numerically) at a sample point.
    DegenerateMetric { point: Point, det: f64 },
    Torsion(ConnectionError),
    Unsampleable(Unsampleable),
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::DegenerateMetric { point, det } => {
                write!(f, "metric is degenerate (det = {det:e}) at ")?;
                for (i, (k, v)) in point.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k} = {v}")?;
                }
                Ok(())
            }
            GeometryError::Torsion(e) => write!(f, "{e}"),
            GeometryError::Unsampleable(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConnectionError> for GeometryError {
    fn from(e: ConnectionError) -> Self {
        GeometryError::Torsion(e)
    }
}

impl From<Unsampleable> for GeometryError {
    fn from(e: Unsampleable) -> Self {
        GeometryError::Unsampleable(e)
    }
}

fn partial(e: &Expr, chart: &Chart, j: usize) -> Expr {
    e.differentiate(chart.coord(j))
}

/// Determinant of a square matrix of expressions by cofactor expansion.
pub fn det(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Expr::zero();
    for (col, entry) in m[0].iter().enumerate() {
        let minor = minor_matrix(m, 0, col);
        let term = entry.clone() * det(&minor);
        acc = if col % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn minor_matrix(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|&(r, _)| r != row)
        .map(|(_, rv)| {
            rv.iter()
                .enumerate()
                .filter(|&(c, _)| c != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// Symbolic matrix inverse via adjugate over determinant. Exact; intended
/// for the small dimensions this engine works at.
pub fn inverse(m: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    let n = m.len();
    let d = det(m);
    let mut out = alloc::vec![alloc::vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            // adjugate: cofactor of (j, i)
            let cof = det(&minor_matrix(m, j, i));
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            out[i][j] = (Expr::constant(sign) * cof / d.clone()).simplify();
        }
    }
    out
}

/// Levi-Civita connection of a symmetric metric.
///
/// Γ^k_{ji} = ½ g^{km} (∂_j g_{mi} + ∂_i g_{jm} − ∂_m g_{ji}). The metric
/// inverse is computed symbolically; invertibility is checked numerically
/// at seeded sample points of the domain.
pub fn christoffel_from_metric(
    g: &Tensor,
    dom: &SamplingDomain,
    cfg: &EquivConfig,
) -> Result<Connection, GeometryError> {
    assert_eq!(g.signature(), [Variance::Down, Variance::Down]);
    let chart = g.chart().clone();
    let n = chart.dim();

    let matrix: Vec<Vec<Expr>> = (0..n)
        .map(|i| (0..n).map(|j| g.get(&[i, j]).clone()).collect())
        .collect();

    let d = det(&matrix).simplify();
    for p in sample_points(dom, cfg.points, cfg.seed) {
        let v = d.evaluate(&p).map_err(|e| {
            GeometryError::Unsampleable(Unsampleable {
                last_error: e,
                last_point: p.clone(),
            })
        })?;
        if v.abs() <= 1e-12 {
            return Err(GeometryError::DegenerateMetric { point: p, det: v });
        }
    }

    let ginv = inverse(&matrix);
    Ok(Connection::from_fn(chart.clone(), true, |k, j, i| {
        let mut acc = Expr::zero();
        for m in 0..n {
            let bracket = partial(g.get(&[m, i]), &chart, j)
                + partial(g.get(&[j, m]), &chart, i)
                - partial(g.get(&[j, i]), &chart, m);
            acc = acc + ginv[k][m].clone() * bracket;
        }
        Expr::constant(0.5) * acc
    }))
}

/// Curvature tensor R^h_{kji} of a connection (see module docs for the
/// sign convention).
pub fn curvature(c: &Connection) -> Tensor {
    let chart = c.chart().clone();
    let n = chart.dim();
    Tensor::from_fn(
        chart.clone(),
        alloc::vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down],
        |idx| {
            let (h, k, j, i) = (idx[0], idx[1], idx[2], idx[3]);
            let mut acc = partial(c.gamma(h, j, i), &chart, k)
                - partial(c.gamma(h, k, i), &chart, j);
            for t in 0..n {
                acc = acc + c.gamma(h, k, t).clone() * c.gamma(t, j, i).clone()
                    - c.gamma(h, j, t).clone() * c.gamma(t, k, i).clone();
            }
            acc
        },
    )
}

/// Covariant derivative; the new down index comes first.
pub fn covariant_derivative(t: &Tensor, c: &Connection) -> Tensor {
    assert!(Arc::ptr_eq(t.chart(), c.chart()) || t.chart() == c.chart());
    let chart = t.chart().clone();
    let n = chart.dim();
    let mut sig = alloc::vec![Variance::Down];
    sig.extend_from_slice(t.signature());
    Tensor::from_fn(chart.clone(), sig, |idx| {
        let k = idx[0];
        let inner = &idx[1..];
        let mut acc = partial(t.get(inner), &chart, k);
        for (slot, variance) in t.signature().iter().enumerate() {
            for s in 0..n {
                let mut swapped: Vec<usize> = inner.to_vec();
                swapped[slot] = s;
                let term = match variance {
                    Variance::Up => {
                        c.gamma(inner[slot], k, s).clone() * t.get(&swapped).clone()
                    }
                    Variance::Down => {
                        (c.gamma(s, k, inner[slot]).clone() * t.get(&swapped).clone())
                            .neg()
                    }
                };
                acc = acc + term;
            }
        }
        acc
    })
}

/// Directional covariant derivative of a vector field:
/// (∇_U W)^K = U^J ∂_J W^K + Γ^K_{JI} U^J W^I.
pub fn covariant_derivative_along(
    c: &Connection,
    u: &VectorField,
    w: &VectorField,
) -> VectorField {
    let chart = c.chart().clone();
    let n = chart.dim();
    let comps = (0..n)
        .map(|k| {
            let mut acc = Expr::zero();
            for j in 0..n {
                acc = acc + u.comp(j).clone() * partial(w.comp(k), &chart, j);
                for i in 0..n {
                    acc = acc
                        + c.gamma(k, j, i).clone() * u.comp(j).clone() * w.comp(i).clone();
                }
            }
            acc.simplify()
        })
        .collect();
    VectorField::new(chart, comps)
}

/// Lie derivative of a symmetric connection along a vector field, as a
/// (1,2) tensor:
///
/// (ℒ_ϑ Γ)^h_{ji} = ∂_j ∂_i ϑ^h + ϑ^t ∂_t Γ^h_{ji}
///   + Γ^h_{mi} ∂_j ϑ^m + Γ^h_{jn} ∂_i ϑ^n − Γ^t_{ji} ∂_t ϑ^h.
pub fn lie_derivative_connection(
    v: &VectorField,
    c: &Connection,
) -> Result<Tensor, GeometryError> {
    lie_derivative_connection_inner(v, c, false)
}

// `flip_transport` negates the −Γ^t_{ji} ∂_t ϑ^h term; fault-injection only.
pub(crate) fn lie_derivative_connection_inner(
    v: &VectorField,
    c: &Connection,
    flip_transport: bool,
) -> Result<Tensor, GeometryError> {
    if !c.is_symmetric() {
        return Err(ConnectionError::TorsionNotSupported.into());
    }
    let chart = c.chart().clone();
    let n = chart.dim();
    Ok(Tensor::from_fn(
        chart.clone(),
        alloc::vec![Variance::Up, Variance::Down, Variance::Down],
        |idx| {
            let (h, j, i) = (idx[0], idx[1], idx[2]);
            let mut acc = partial(&partial(v.comp(h), &chart, i), &chart, j);
            for t in 0..n {
                let transport = c.gamma(t, j, i).clone() * partial(v.comp(h), &chart, t);
                acc = acc
                    + v.comp(t).clone() * partial(c.gamma(h, j, i), &chart, t)
                    + c.gamma(h, t, i).clone() * partial(v.comp(t), &chart, j)
                    + c.gamma(h, j, t).clone() * partial(v.comp(t), &chart, i)
                    + if flip_transport { transport } else { transport.neg() };
            }
            acc
        },
    ))
}

/// Standard Lie derivative of a tensor field along a vector field.
pub fn lie_derivative_tensor(v: &VectorField, t: &Tensor) -> Tensor {
    let chart = t.chart().clone();
    let n = chart.dim();
    Tensor::from_fn(chart.clone(), t.signature().to_vec(), |idx| {
        let mut acc = Expr::zero();
        for s in 0..n {
            acc = acc + v.comp(s).clone() * partial(t.get(idx), &chart, s);
        }
        for (slot, variance) in t.signature().iter().enumerate() {
            for s in 0..n {
                let mut swapped: Vec<usize> = idx.to_vec();
                swapped[slot] = s;
                let term = match variance {
                    Variance::Up => {
                        (partial(v.comp(idx[slot]), &chart, s) * t.get(&swapped).clone())
                            .neg()
                    }
                    Variance::Down => {
                        partial(v.comp(s), &chart, idx[slot]) * t.get(&swapped).clone()
                    }
                };
                acc = acc + term;
            }
        }
        acc
    })
}

/// Largest residual between corresponding components of two tensors.
pub fn tensor_max_residual(
    a: &Tensor,
    b: &Tensor,
    dom: &SamplingDomain,
    cfg: &EquivConfig,
) -> Result<Residual, Unsampleable> {
    assert_eq!(a.signature(), b.signature());
    let mut out = Residual::zero();
    for ((_, ea), (_, eb)) in a.iter().zip(b.iter()) {
        // structural equality short-circuits the sampling
        if (ea.clone() - eb.clone()).simplify().is_zero() {
            continue;
        }
        out.merge(max_residual(ea, eb, dom, cfg)?);
    }
    Ok(out)
}

/// Sampled check that every component of a tensor vanishes on the domain.
pub fn tensor_vanishes(
    t: &Tensor,
    dom: &SamplingDomain,
    cfg: &EquivConfig,
) -> Result<bool, Unsampleable> {
    let zero = Tensor::zeros(t.chart().clone(), t.signature().to_vec());
    Ok(tensor_max_residual(t, &zero, dom, cfg)?.max <= cfg.tol)
}

/// Whether ϑ is an infinitesimal affine transformation: ℒ_ϑ Γ ≡ 0.
pub fn is_infinitesimal_affine(
    v: &VectorField,
    c: &Connection,
    dom: &SamplingDomain,
    cfg: &EquivConfig,
) -> Result<bool, GeometryError> {
    let lie = lie_derivative_connection(v, c)?;
    Ok(tensor_vanishes(&lie, dom, cfg)?)
}

/// Contraction ϑ^t R^h_{tji} as a (1,2) tensor.
pub fn contract_field_curvature(v: &VectorField, r: &Tensor) -> Tensor {
    let chart = r.chart().clone();
    let n = chart.dim();
    Tensor::from_fn(
        chart,
        alloc::vec![Variance::Up, Variance::Down, Variance::Down],
        |idx| {
            let (h, j, i) = (idx[0], idx[1], idx[2]);
            let mut acc = Expr::zero();
            for t in 0..n {
                acc = acc + v.comp(t).clone() * r.get(&[h, t, j, i]).clone();
            }
            acc
        },
    )
}
