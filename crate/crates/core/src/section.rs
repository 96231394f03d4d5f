//! Geometry of the cross-section β_ϑ(M) of the tangent bundle.
//!
//! A vector field ϑ embeds the base manifold into T(M) as y = ϑ(x). Along
//! that section the adapted frame {B_(j), C_(j)} splits bundle vectors
//! into a part tangent to the section and a part tangent to the fibres.
//! This module builds the frame, the connection the horizontal lift
//! induces on the section, the second fundamental form H, and the Gauss
//! and curvature decompositions, together with the totally-geodesic and
//! curvature-tangency predicates.
//!
//! Every operation that states an internal identity (the induced
//! connection reproducing the base one, the defining residual of H lying
//! along the fibres, the Gauss relation, the curvature split) checks that
//! identity on the sampling domain and refuses to return an object that
//! violates it.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::bundle::{
    bundle_covariant_derivative, bundle_curvature, horizontal_lift_connection_with,
    BundleConnection, BundleError, TangentBundle,
};
use crate::expr::Expr;
use crate::faults::{Faults, Mutation};
use crate::geometry::{
    contract_field_curvature, covariant_derivative, curvature,
    lie_derivative_connection_inner, lie_derivative_tensor, tensor_max_residual,
    tensor_vanishes, GeometryError,
};
use crate::manifold::{Chart, VectorField};
use crate::sample::{max_residual, EquivConfig, Residual, SamplingDomain, Unsampleable};
use crate::tensor::{Connection, ConnectionError, Tensor, Variance};

/// The adapted frame of a cross-section: tangent columns B_j^A, fibre
/// columns C_j^A, and the inverse rows B_A^h, C_A^h.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    n: usize,
    b: Vec<Expr>,     // B_j^A, [A][j]
    c: Vec<Expr>,     // C_j^A, [A][j]
    b_inv: Vec<Expr>, // B_A^h, [h][A]
    c_inv: Vec<Expr>, // C_A^h, [h][A]
}

impl AdaptedFrame {
    pub fn n(&self) -> usize {
        self.n
    }

    /// B_j^A
    pub fn b(&self, a: usize, j: usize) -> &Expr {
        &self.b[a * self.n + j]
    }

    /// C_j^A
    pub fn c(&self, a: usize, j: usize) -> &Expr {
        &self.c[a * self.n + j]
    }

    /// B_A^h
    pub fn b_inv(&self, h: usize, a: usize) -> &Expr {
        &self.b_inv[h * 2 * self.n + a]
    }

    /// C_A^h
    pub fn c_inv(&self, h: usize, a: usize) -> &Expr {
        &self.c_inv[h * 2 * self.n + a]
    }

    /// The four duality identities as exact expressions:
    /// B_A^h B_j^A = δ, C_A^h C_j^A = δ, B_A^h C_j^A = 0, C_A^h B_j^A = 0.
    /// True iff every product simplifies to the literal expected constant.
    pub fn duality_holds_exactly(&self) -> bool {
        let n = self.n;
        let dot = |row: &dyn Fn(usize) -> Expr, col: &dyn Fn(usize) -> Expr| {
            let mut acc = Expr::zero();
            for a in 0..2 * n {
                acc = acc + row(a) * col(a);
            }
            acc.simplify()
        };
        for h in 0..n {
            for j in 0..n {
                let delta = if h == j { 1.0 } else { 0.0 };
                let bb = dot(&|a| self.b_inv(h, a).clone(), &|a| self.b(a, j).clone());
                let cc = dot(&|a| self.c_inv(h, a).clone(), &|a| self.c(a, j).clone());
                let bc = dot(&|a| self.b_inv(h, a).clone(), &|a| self.c(a, j).clone());
                let cb = dot(&|a| self.c_inv(h, a).clone(), &|a| self.b(a, j).clone());
                if bb.as_const() != Some(delta) || cc.as_const() != Some(delta) {
                    return false;
                }
                if !bc.is_zero() || !cb.is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Build the adapted frame of the section determined by ϑ:
/// B_j^A = (δ^h_j, ∂_j ϑ^h), C_j^A = (0, δ^h_j),
/// B_A^h = (δ^h_j, 0), C_A^h = (−∂_j ϑ^h, δ^h_j).
pub fn adapted_frame(v: &VectorField) -> AdaptedFrame {
    adapted_frame_with(v, &Faults::none())
}

pub fn adapted_frame_with(v: &VectorField, faults: &Faults) -> AdaptedFrame {
    let n = v.dim();
    let chart = v.chart().clone();
    let s_b = Expr::constant(faults.sign(Mutation::FrameFibreBlockSign));
    let s_cinv = Expr::constant(-faults.sign(Mutation::InverseFrameSign));
    let delta = |a: usize, b: usize| {
        if a == b {
            Expr::one()
        } else {
            Expr::zero()
        }
    };
    let dtheta =
        |h: usize, j: usize| v.comp(h).differentiate(chart.coord(j)).simplify();

    let mut b = Vec::with_capacity(2 * n * n);
    let mut c = Vec::with_capacity(2 * n * n);
    for a in 0..2 * n {
        for j in 0..n {
            if a < n {
                b.push(delta(a, j));
                c.push(Expr::zero());
            } else {
                b.push((s_b.clone() * dtheta(a - n, j)).simplify());
                c.push(delta(a - n, j));
            }
        }
    }
    let mut b_inv = Vec::with_capacity(2 * n * n);
    let mut c_inv = Vec::with_capacity(2 * n * n);
    for h in 0..n {
        for a in 0..2 * n {
            if a < n {
                b_inv.push(delta(h, a));
                c_inv.push((s_cinv.clone() * dtheta(h, a)).simplify());
            } else {
                b_inv.push(Expr::zero());
                c_inv.push(delta(h, a - n));
            }
        }
    }
    AdaptedFrame {
        n,
        b,
        c,
        b_inv,
        c_inv,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SectionError {
    /// A defining identity of the construction failed on the sampling
    /// domain; the anchor names which one.
    Inconsistency {
        anchor: &'static str,
        residual: Residual,
    },
    Geometry(GeometryError),
    Bundle(BundleError),
    Unsampleable(Unsampleable),
}

impl fmt::Display for SectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectionError::Inconsistency { anchor, residual } => write!(
                f,
                "internal inconsistency in {anchor}: residual {:e}",
                residual.max
            ),
            SectionError::Geometry(e) => write!(f, "{e}"),
            SectionError::Bundle(e) => write!(f, "{e}"),
            SectionError::Unsampleable(e) => write!(f, "{e}"),
        }
    }
}

impl From<GeometryError> for SectionError {
    fn from(e: GeometryError) -> Self {
        SectionError::Geometry(e)
    }
}

impl From<BundleError> for SectionError {
    fn from(e: BundleError) -> Self {
        SectionError::Bundle(e)
    }
}

impl From<Unsampleable> for SectionError {
    fn from(e: Unsampleable) -> Self {
        SectionError::Unsampleable(e)
    }
}

impl From<ConnectionError> for SectionError {
    fn from(e: ConnectionError) -> Self {
        SectionError::Geometry(GeometryError::Torsion(e))
    }
}

/// A cross-section with its supporting objects: the bundle chart, the
/// horizontal lift of the connection, its curvature and the adapted frame.
pub struct Section {
    bundle: TangentBundle,
    conn: Connection,
    curv: Tensor,
    lifted: BundleConnection,
    field: VectorField,
    frame: AdaptedFrame,
    faults: Faults,
}

impl Section {
    pub fn new(v: &VectorField, c: &Connection) -> Result<Section, SectionError> {
        Section::with_faults(v, c, &Faults::none())
    }

    pub fn with_faults(
        v: &VectorField,
        c: &Connection,
        faults: &Faults,
    ) -> Result<Section, SectionError> {
        if !c.is_symmetric() {
            return Err(ConnectionError::TorsionNotSupported.into());
        }
        let bundle = TangentBundle::new(c.chart().clone())?;
        let curv = curvature(c);
        let lifted = horizontal_lift_connection_with(&bundle, c, &curv, faults);
        let frame = adapted_frame_with(v, faults);
        Ok(Section {
            bundle,
            conn: c.clone(),
            curv,
            lifted,
            field: v.clone(),
            frame,
            faults: faults.clone(),
        })
    }

    pub fn bundle(&self) -> &TangentBundle {
        &self.bundle
    }

    pub fn frame(&self) -> &AdaptedFrame {
        &self.frame
    }

    pub fn lifted_connection(&self) -> &BundleConnection {
        &self.lifted
    }

    pub fn base_curvature(&self) -> &Tensor {
        &self.curv
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    fn chart(&self) -> &Arc<Chart> {
        self.conn.chart()
    }

    fn n(&self) -> usize {
        self.conn.dim()
    }

    /// Γ̄^A_{MN} restricted to the section (y := ϑ(x)).
    fn lifted_gamma_on_section(&self, a: usize, m: usize, nn: usize) -> Expr {
        self.bundle
            .restrict_to_section(self.lifted.gamma(a, m, nn), &self.field)
    }

    /// '∇_j B_i^A = ∂_j B_i^A + Γ̄^A_{MN}|_ϑ B_j^M B_i^N — the left side
    /// of the defining relation for the induced connection and H.
    fn frame_derivative(&self, j: usize, i: usize, a: usize) -> Expr {
        let n = self.n();
        let chart = self.chart();
        let mut acc = self.frame.b(a, i).differentiate(chart.coord(j));
        for m in 0..2 * n {
            for q in 0..2 * n {
                acc = acc
                    + self.lifted_gamma_on_section(a, m, q)
                        * self.frame.b(m, j).clone()
                        * self.frame.b(q, i).clone();
            }
        }
        acc.simplify()
    }

    /// Induced connection on the section, computed through the frame
    /// projection (never shortcut to the base connection), then checked to
    /// reproduce it on the sampling domain.
    pub fn induced_connection(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<Connection, SectionError> {
        let induced = self.induced_connection_unchecked();
        let residual = tensor_max_residual(
            &induced.as_tensor(),
            &self.conn.as_tensor(),
            dom,
            cfg,
        )?;
        if residual.max > cfg.tol {
            return Err(SectionError::Inconsistency {
                anchor: "Eq8",
                residual,
            });
        }
        Ok(induced)
    }

    pub(crate) fn induced_connection_unchecked(&self) -> Connection {
        let n = self.n();
        Connection::from_fn(self.chart().clone(), self.conn.is_symmetric(), |h, j, i| {
            let mut acc = Expr::zero();
            for a in 0..2 * n {
                acc = acc + self.frame_derivative(j, i, a) * self.frame.b_inv(h, a).clone();
            }
            acc
        })
    }

    /// Residual of the defining relation after removing the tangential
    /// part: '∇_j B_i^A − Γ^h_{ji} B_h^A, indexed [A][j][i].
    fn defining_residual(&self, j: usize, i: usize, a: usize) -> Expr {
        let n = self.n();
        let mut acc = self.frame_derivative(j, i, a);
        for h in 0..n {
            acc = acc - self.conn.gamma(h, j, i).clone() * self.frame.b(a, h).clone();
        }
        acc.simplify()
    }

    /// Coefficients of the defining residual along the fibre directions,
    /// extracted with the inverse frame: H^k_{ji} = C_A^k ('∇_j B_i^A −
    /// Γ^h_{ji} B_h^A).
    pub fn second_fundamental_from_residual(&self) -> Tensor {
        let n = self.n();
        Tensor::from_fn(
            self.chart().clone(),
            alloc::vec![Variance::Up, Variance::Down, Variance::Down],
            |idx| {
                let (k, j, i) = (idx[0], idx[1], idx[2]);
                let mut acc = Expr::zero();
                for a in 0..2 * n {
                    acc = acc
                        + self.frame.c_inv(k, a).clone() * self.defining_residual(j, i, a);
                }
                acc
            },
        )
    }

    /// Tangential projection of the defining residual; must vanish, i.e.
    /// the residual is a combination of the fibre directions alone.
    pub fn defining_residual_tangential_projection(&self) -> Tensor {
        let n = self.n();
        Tensor::from_fn(
            self.chart().clone(),
            alloc::vec![Variance::Up, Variance::Down, Variance::Down],
            |idx| {
                let (h, j, i) = (idx[0], idx[1], idx[2]);
                let mut acc = Expr::zero();
                for a in 0..2 * n {
                    acc = acc
                        + self.frame.b_inv(h, a).clone() * self.defining_residual(j, i, a);
                }
                acc
            },
        )
    }

    /// Closed form of the second fundamental form:
    /// H^h_{ji} = ∂_j ∂_i ϑ^h + ϑ^t ∂_t Γ^h_{ji} − ϑ^t R^h_{tji}
    ///   + Γ^h_{mi} ∂_j ϑ^m + Γ^h_{jn} ∂_i ϑ^n − Γ^t_{ji} ∂_t ϑ^h,
    /// i.e. H = ℒ_ϑΓ − ϑ^t R^h_{tji}: substituting the lifted coefficients
    /// into the defining relation contracts the curvature on its first
    /// lower slot with a minus sign, which the four lift conditions pin
    /// down under the commutator-calibrated curvature convention.
    pub fn second_fundamental_closed_form(&self) -> Tensor {
        let n = self.n();
        let chart = self.chart().clone();
        let v = &self.field;
        let c = &self.conn;
        let r = &self.curv;
        let s_hess = Expr::constant(self.faults.sign(Mutation::SecondFundamentalHessianSign));
        let s_curv = Expr::constant(self.faults.sign(Mutation::SecondFundamentalCurvatureSign));
        let s_trans = Expr::constant(self.faults.sign(Mutation::LieConnectionTransportSign));
        Tensor::from_fn(
            chart.clone(),
            alloc::vec![Variance::Up, Variance::Down, Variance::Down],
            |idx| {
                let (h, j, i) = (idx[0], idx[1], idx[2]);
                let hess = v
                    .comp(h)
                    .differentiate(chart.coord(i))
                    .differentiate(chart.coord(j));
                let mut acc = s_hess.clone() * hess;
                for t in 0..n {
                    acc = acc
                        + v.comp(t).clone()
                            * c.gamma(h, j, i).differentiate(chart.coord(t))
                        - s_curv.clone() * v.comp(t).clone() * r.get(&[h, t, j, i]).clone()
                        + c.gamma(h, t, i).clone()
                            * v.comp(t).differentiate(chart.coord(j))
                        + c.gamma(h, j, t).clone()
                            * v.comp(t).differentiate(chart.coord(i))
                        - s_trans.clone()
                            * c.gamma(t, j, i).clone()
                            * v.comp(h).differentiate(chart.coord(t));
                }
                acc
            },
        )
    }

    /// The second fundamental form, gated on the defining relation: the
    /// closed form must reproduce the residual-extracted coefficients and
    /// the residual must have no tangential part.
    pub fn second_fundamental(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<Tensor, SectionError> {
        let closed = self.second_fundamental_closed_form();
        let derived = self.second_fundamental_from_residual();
        let tangential = self.defining_residual_tangential_projection();
        let zero = Tensor::zeros(self.chart().clone(), tangential.signature().to_vec());
        let res_t = tensor_max_residual(&tangential, &zero, dom, cfg)?;
        if res_t.max > cfg.tol {
            return Err(SectionError::Inconsistency {
                anchor: "Eq9",
                residual: res_t,
            });
        }
        let res_h = tensor_max_residual(&closed, &derived, dom, cfg)?;
        if res_h.max > cfg.tol {
            return Err(SectionError::Inconsistency {
                anchor: "Eq10",
                residual: res_h,
            });
        }
        Ok(closed)
    }

    /// ℒ_ϑ Γ as computed for this section (honors fault injection).
    pub fn lie_connection(&self) -> Result<Tensor, SectionError> {
        Ok(lie_derivative_connection_inner(
            &self.field,
            &self.conn,
            self.faults.has(Mutation::LieConnectionTransportSign),
        )?)
    }

    /// ∇̄_{B_(j)} B_(i) computed in bundle coordinates and restricted to
    /// the section, as a 2n-component object indexed [A][j][i].
    fn gauss_lhs(&self) -> Vec<Expr> {
        let n = self.n();
        let frame_field = |j: usize| {
            VectorField::new(
                self.bundle.chart().clone(),
                (0..2 * n).map(|a| self.frame.b(a, j).clone()).collect(),
            )
        };
        let mut out = Vec::with_capacity(2 * n * n * n);
        for j in 0..n {
            let bj = frame_field(j);
            for i in 0..n {
                let bi = frame_field(i);
                let nabla = bundle_covariant_derivative(&self.lifted, &bj, &bi);
                for a in 0..2 * n {
                    out.push(
                        self.bundle
                            .restrict_to_section(nabla.comp(a), &self.field)
                            .simplify(),
                    );
                }
            }
        }
        out
    }

    /// Gauss relation: ∇̄_{B_(j)} B_(i) = Γ^h_{ji} B_(h) + H^h_{ji} C_(h),
    /// verified componentwise; returns the tangential part (the induced
    /// connection) and the normal part (H).
    pub fn gauss_decomposition(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<GaussDecomposition, SectionError> {
        let n = self.n();
        let tangential = self.induced_connection(dom, cfg)?;
        let normal = self.second_fundamental(dom, cfg)?;

        let lhs = self.gauss_lhs();
        let mut worst = Residual::zero();
        for j in 0..n {
            for i in 0..n {
                for a in 0..2 * n {
                    let l = &lhs[((j * n) + i) * 2 * n + a];
                    let mut r = Expr::zero();
                    for h in 0..n {
                        r = r
                            + tangential.gamma(h, j, i).clone() * self.frame.b(a, h).clone()
                            + normal.get(&[h, j, i]).clone() * self.frame.c(a, h).clone();
                    }
                    let r = r.simplify();
                    if (l.clone() - r.clone()).simplify().is_zero() {
                        continue;
                    }
                    worst.merge(max_residual(l, &r, dom, cfg)?);
                }
            }
        }
        if worst.max > cfg.tol {
            return Err(SectionError::Inconsistency {
                anchor: "Eq12",
                residual: worst,
            });
        }

        // H must also split as ℒ_ϑΓ − ϑ^t R
        let split = self
            .lie_connection()?
            .sub(&contract_field_curvature(&self.field, &self.curv));
        let res = tensor_max_residual(&normal, &split, dom, cfg)?;
        if res.max > cfg.tol {
            return Err(SectionError::Inconsistency {
                anchor: "Eq11",
                residual: res,
            });
        }

        Ok(GaussDecomposition {
            tangential,
            normal,
        })
    }

    /// Vertical closed form of the curvature decomposition:
    /// ℒ_ϑ R^h_{kji} − ∇_k(ϑ^t R^h_{tji}) + ∇_j(ϑ^t R^h_{tki}).
    ///
    /// Follows from the Gauss relation: the vertical part is
    /// ∇_k H^h_{ji} − ∇_j H^h_{ki} with H = ℒ_ϑΓ − ϑ^t R, and the
    /// antisymmetrized ∇(ℒ_ϑΓ) collapses to ℒ_ϑR.
    pub fn vertical_curvature_closed_form(&self) -> Tensor {
        let lie_r = lie_derivative_tensor(&self.field, &self.curv);
        let theta_r = contract_field_curvature(&self.field, &self.curv);
        let grad = covariant_derivative(&theta_r, &self.conn);
        Tensor::from_fn(
            self.chart().clone(),
            alloc::vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down],
            |idx| {
                let (h, k, j, i) = (idx[0], idx[1], idx[2], idx[3]);
                lie_r.get(&[h, k, j, i]).clone() - grad.get(&[k, h, j, i]).clone()
                    + grad.get(&[j, h, k, i]).clone()
            },
        )
    }

    /// Frame-contracted bundle curvature R̄(B_(k), B_(j)) B_(i) restricted
    /// to the section and split by the inverse frame, with no identity
    /// check applied.
    pub fn curvature_split_unchecked(&self) -> CurvatureDecomposition {
        let n = self.n();
        let rbar = bundle_curvature(&self.lifted);

        // contracted^A_{kji}, restricted to the section
        let sig4 = alloc::vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down];
        let mut contracted = Vec::with_capacity(2 * n * n * n * n);
        for a in 0..2 * n {
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        let mut acc = Expr::zero();
                        for m in 0..2 * n {
                            for jj in 0..2 * n {
                                for ii in 0..2 * n {
                                    let r = rbar.get(&[a, m, jj, ii]);
                                    if r.is_zero() {
                                        continue;
                                    }
                                    acc = acc
                                        + r.clone()
                                            * self.frame.b(m, k).clone()
                                            * self.frame.b(jj, j).clone()
                                            * self.frame.b(ii, i).clone();
                                }
                            }
                        }
                        contracted.push(
                            self.bundle
                                .restrict_to_section(&acc.simplify(), &self.field)
                                .simplify(),
                        );
                    }
                }
            }
        }
        let at = |a: usize, k: usize, j: usize, i: usize| {
            contracted[((a * n + k) * n + j) * n + i].clone()
        };

        let tangential = Tensor::from_fn(self.chart().clone(), sig4.clone(), |idx| {
            let (h, k, j, i) = (idx[0], idx[1], idx[2], idx[3]);
            let mut acc = Expr::zero();
            for a in 0..2 * n {
                acc = acc + self.frame.b_inv(h, a).clone() * at(a, k, j, i);
            }
            acc
        });
        let vertical = Tensor::from_fn(self.chart().clone(), sig4, |idx| {
            let (h, k, j, i) = (idx[0], idx[1], idx[2], idx[3]);
            let mut acc = Expr::zero();
            for a in 0..2 * n {
                acc = acc + self.frame.c_inv(h, a).clone() * at(a, k, j, i);
            }
            acc
        });

        CurvatureDecomposition {
            tangential,
            vertical,
        }
    }

    /// The curvature split, checked against the closed forms R^h_{kji}
    /// (tangential) and ℒ_ϑR + antisymmetrized ∇(ϑ·R) (vertical).
    pub fn curvature_decomposition(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<CurvatureDecomposition, SectionError> {
        let split = self.curvature_split_unchecked();
        let residual = self.eq15_residual_of(&split, dom, cfg)?;
        if residual.max > cfg.tol {
            return Err(SectionError::Inconsistency {
                anchor: "Eq15",
                residual,
            });
        }
        Ok(split)
    }

    /// Antisymmetrized covariant derivative ∇_k(ϑ^t R^h_{tji}) −
    /// ∇_j(ϑ^t R^h_{tki}).
    pub fn antisymmetrized_grad_theta_r(&self) -> Tensor {
        let theta_r = contract_field_curvature(&self.field, &self.curv);
        let grad = covariant_derivative(&theta_r, &self.conn);
        Tensor::from_fn(
            self.chart().clone(),
            alloc::vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down],
            |idx| {
                let (h, k, j, i) = (idx[0], idx[1], idx[2], idx[3]);
                grad.get(&[k, h, j, i]).clone() - grad.get(&[j, h, k, i]).clone()
            },
        )
    }

    /// Proposition 2 operationalized: H ≡ 0 iff ϑ is an infinitesimal
    /// affine transformation and ϑ^t R^h_{tji} ≡ 0.
    pub fn is_totally_geodesic(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<TotallyGeodesicVerdict, SectionError> {
        let h = self.second_fundamental(dom, cfg)?;
        let lie = self.lie_connection()?;
        let theta_r = contract_field_curvature(&self.field, &self.curv);
        let h_vanishes = tensor_vanishes(&h, dom, cfg)?;
        let lie_vanishes = tensor_vanishes(&lie, dom, cfg)?;
        let theta_r_vanishes = tensor_vanishes(&theta_r, dom, cfg)?;
        Ok(TotallyGeodesicVerdict {
            h_vanishes,
            lie_connection_vanishes: lie_vanishes,
            theta_r_vanishes,
        })
    }

    /// Proposition 3 operationalized: the vertical part of the restricted
    /// curvature vanishes iff ℒ_ϑR ≡ 0 and the antisymmetrized ∇(ϑ·R)
    /// vanishes.
    pub fn is_curvature_tangent(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<CurvatureTangencyVerdict, SectionError> {
        let decomp = self.curvature_decomposition(dom, cfg)?;
        self.curvature_tangency_verdict_of(&decomp, dom, cfg)
    }

    /// Proposition 3 booleans for an already-computed split.
    pub fn curvature_tangency_verdict_of(
        &self,
        decomp: &CurvatureDecomposition,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<CurvatureTangencyVerdict, SectionError> {
        let lie_r = lie_derivative_tensor(&self.field, &self.curv);
        let antisym = self.antisymmetrized_grad_theta_r();
        Ok(CurvatureTangencyVerdict {
            vertical_vanishes: tensor_vanishes(&decomp.vertical, dom, cfg)?,
            lie_curvature_vanishes: tensor_vanishes(&lie_r, dom, cfg)?,
            antisym_grad_vanishes: tensor_vanishes(&antisym, dom, cfg)?,
        })
    }

    // Audit surface: the same identities the gated constructors enforce,
    // exposed as residuals so the verifier can report them.

    /// Eq8: induced connection vs the base connection.
    pub fn eq8_residual(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<Residual, Unsampleable> {
        tensor_max_residual(
            &self.induced_connection_unchecked().as_tensor(),
            &self.conn.as_tensor(),
            dom,
            cfg,
        )
    }

    /// Eq9: tangential projection of the defining residual vs zero.
    pub fn eq9_residual(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<Residual, Unsampleable> {
        let t = self.defining_residual_tangential_projection();
        let zero = Tensor::zeros(self.chart().clone(), t.signature().to_vec());
        tensor_max_residual(&t, &zero, dom, cfg)
    }

    /// Eq10: closed form of H vs the residual-extracted coefficients.
    pub fn eq10_residual(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<Residual, Unsampleable> {
        tensor_max_residual(
            &self.second_fundamental_closed_form(),
            &self.second_fundamental_from_residual(),
            dom,
            cfg,
        )
    }

    /// Eq11: H vs ℒ_ϑΓ − ϑ^t R.
    pub fn eq11_residual(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<Residual, SectionError> {
        let split = self
            .lie_connection()?
            .sub(&contract_field_curvature(&self.field, &self.curv));
        Ok(tensor_max_residual(
            &self.second_fundamental_closed_form(),
            &split,
            dom,
            cfg,
        )?)
    }

    /// Eq12: Gauss relation with the base connection as tangential part
    /// and the closed-form H as normal part.
    pub fn eq12_residual(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<Residual, Unsampleable> {
        let n = self.n();
        let normal = self.second_fundamental_closed_form();
        let lhs = self.gauss_lhs();
        let mut worst = Residual::zero();
        for j in 0..n {
            for i in 0..n {
                for a in 0..2 * n {
                    let l = &lhs[((j * n) + i) * 2 * n + a];
                    let mut r = Expr::zero();
                    for h in 0..n {
                        r = r
                            + self.conn.gamma(h, j, i).clone() * self.frame.b(a, h).clone()
                            + normal.get(&[h, j, i]).clone() * self.frame.c(a, h).clone();
                    }
                    let r = r.simplify();
                    if (l.clone() - r.clone()).simplify().is_zero() {
                        continue;
                    }
                    worst.merge(max_residual(l, &r, dom, cfg)?);
                }
            }
        }
        Ok(worst)
    }

    /// Eq15: both halves of an already-computed split vs their closed
    /// forms.
    pub fn eq15_residual_of(
        &self,
        split: &CurvatureDecomposition,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<Residual, Unsampleable> {
        let mut worst = tensor_max_residual(&split.tangential, &self.curv, dom, cfg)?;
        worst.merge(tensor_max_residual(
            &split.vertical,
            &self.vertical_curvature_closed_form(),
            dom,
            cfg,
        )?);
        Ok(worst)
    }

    /// The display after Eq15: ∇_k(ℒ_ϑΓ)^h_{ji} − ∇_j(ℒ_ϑΓ)^h_{ki} vs
    /// (ℒ_ϑR)^h_{kji}.
    pub fn well_known_formula_residual(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<Residual, SectionError> {
        let lie = self.lie_connection()?;
        let grad = covariant_derivative(&lie, &self.conn);
        let lhs = Tensor::from_fn(
            self.chart().clone(),
            alloc::vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down],
            |idx| {
                let (h, k, j, i) = (idx[0], idx[1], idx[2], idx[3]);
                grad.get(&[k, h, j, i]).clone() - grad.get(&[j, h, k, i]).clone()
            },
        );
        let rhs = lie_derivative_tensor(&self.field, &self.curv);
        Ok(tensor_max_residual(&lhs, &rhs, dom, cfg)?)
    }

    /// Proposition 2 booleans computed without the Eq9/Eq10 gate, for
    /// suites that report those identities separately.
    pub fn totally_geodesic_verdict_unchecked(
        &self,
        dom: &SamplingDomain,
        cfg: &EquivConfig,
    ) -> Result<TotallyGeodesicVerdict, SectionError> {
        let h = self.second_fundamental_closed_form();
        let lie = self.lie_connection()?;
        let theta_r = contract_field_curvature(&self.field, &self.curv);
        Ok(TotallyGeodesicVerdict {
            h_vanishes: tensor_vanishes(&h, dom, cfg)?,
            lie_connection_vanishes: tensor_vanishes(&lie, dom, cfg)?,
            theta_r_vanishes: tensor_vanishes(&theta_r, dom, cfg)?,
        })
    }
}

/// Result of the Gauss relation: tangential part 'Γ and normal part H.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussDecomposition {
    pub tangential: Connection,
    pub normal: Tensor,
}

/// Result of the curvature split along the section.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureDecomposition {
    pub tangential: Tensor,
    pub vertical: Tensor,
}

/// Booleans of Proposition 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TotallyGeodesicVerdict {
    pub h_vanishes: bool,
    pub lie_connection_vanishes: bool,
    pub theta_r_vanishes: bool,
}

impl TotallyGeodesicVerdict {
    pub fn biconditional_holds(&self) -> bool {
        self.h_vanishes == (self.lie_connection_vanishes && self.theta_r_vanishes)
    }
}

/// Booleans of Proposition 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurvatureTangencyVerdict {
    pub vertical_vanishes: bool,
    pub lie_curvature_vanishes: bool,
    pub antisym_grad_vanishes: bool,
}

impl CurvatureTangencyVerdict {
    pub fn biconditional_holds(&self) -> bool {
        self.vertical_vanishes
            == (self.lie_curvature_vanishes && self.antisym_grad_vanishes)
    }
}
