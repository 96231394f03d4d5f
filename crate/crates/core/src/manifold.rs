//! Coordinate charts, manifolds and vector fields.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::Expr;
use crate::sample::SamplingDomain;

/// An ordered list of coordinate names. Shared via `Arc`; two objects live
/// on the same chart iff they hold the same `Arc`ed chart (or equal names).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    coords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChartError {
    EmptyChart,
    DuplicateCoord(String),
}

impl fmt::Display for ChartError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartError::EmptyChart => write!(f, "chart has no coordinates"),
            ChartError::DuplicateCoord(c) => write!(f, "duplicate coordinate `{c}`"),
        }
    }
}

impl Chart {
    pub fn new<S: Into<String>>(coords: impl IntoIterator<Item = S>) -> Result<Arc<Chart>, ChartError> {
        let coords: Vec<String> = coords.into_iter().map(Into::into).collect();
        if coords.is_empty() {
            return Err(ChartError::EmptyChart);
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(ChartError::DuplicateCoord(c.clone()));
            }
        }
        Ok(Arc::new(Chart { coords }))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, i: usize) -> &str {
        &self.coords[i]
    }

    pub fn coords(&self) -> impl Iterator<Item = &str> {
        self.coords.iter().map(|s| s.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }
}

/// A coordinate neighborhood: a chart plus the open box identities are
/// sampled on.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifold {
    pub name: String,
    pub chart: Arc<Chart>,
    pub domain: SamplingDomain,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldError {
    MissingDomain { coord: String },
}

impl fmt::Display for ManifoldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldError::MissingDomain { coord } => {
                write!(f, "no sampling interval for coordinate `{coord}`")
            }
        }
    }
}

impl Manifold {
    pub fn new(
        name: &str,
        chart: Arc<Chart>,
        domain: SamplingDomain,
    ) -> Result<Arc<Manifold>, ManifoldError> {
        for c in chart.coords() {
            if !domain.contains_coord(c) {
                return Err(ManifoldError::MissingDomain {
                    coord: c.to_string(),
                });
            }
        }
        Ok(Arc::new(Manifold {
            name: name.to_string(),
            chart,
            domain,
        }))
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }
}

/// A vector field by its components in the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    chart: Arc<Chart>,
    comps: Vec<Expr>,
}

impl VectorField {
    /// Components in chart order; length must equal the chart dimension.
    pub fn new(chart: Arc<Chart>, comps: Vec<Expr>) -> VectorField {
        assert_eq!(comps.len(), chart.dim(), "component count != dim");
        VectorField { chart, comps }
    }

    pub fn zero(chart: Arc<Chart>) -> VectorField {
        let comps = (0..chart.dim()).map(|_| Expr::zero()).collect();
        VectorField { chart, comps }
    }

    /// The coordinate field ∂ along coordinate `i`.
    pub fn coordinate(chart: Arc<Chart>, i: usize) -> VectorField {
        let comps = (0..chart.dim())
            .map(|j| if i == j { Expr::one() } else { Expr::zero() })
            .collect();
        VectorField { chart, comps }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn comp(&self, i: usize) -> &Expr {
        &self.comps[i]
    }

    pub fn comps(&self) -> &[Expr] {
        &self.comps
    }
}
