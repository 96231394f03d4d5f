//! Validated in-memory model of a workspace: manifolds, their connection
//! source and their named vector fields.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;

use crate::geometry::{christoffel_from_metric, GeometryError};
use crate::manifold::{Manifold, VectorField};
use crate::sample::EquivConfig;
use crate::tensor::{Connection, Tensor};

/// Where a manifold's connection comes from: exactly one of a metric
/// (Levi-Civita) or explicitly entered coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum ConnectionSource {
    Metric(Tensor),
    Explicit(Connection),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldEntry {
    pub manifold: Arc<Manifold>,
    pub source: ConnectionSource,
    pub fields: BTreeMap<String, VectorField>,
}

impl ManifoldEntry {
    /// The working connection: Levi-Civita of the metric (checked for
    /// degeneracy on the sampling domain) or the explicit coefficients.
    pub fn connection(&self, cfg: &EquivConfig) -> Result<Connection, GeometryError> {
        match &self.source {
            ConnectionSource::Metric(g) => {
                christoffel_from_metric(g, &self.manifold.domain, cfg)
            }
            ConnectionSource::Explicit(c) => Ok(c.clone()),
        }
    }

    pub fn metric(&self) -> Option<&Tensor> {
        match &self.source {
            ConnectionSource::Metric(g) => Some(g),
            ConnectionSource::Explicit(_) => None,
        }
    }
}

/// A named collection of manifolds with their fields; the unit the
/// verification suite runs over.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Workspace {
    pub name: String,
    pub manifolds: BTreeMap<String, ManifoldEntry>,
}

impl Workspace {
    pub fn new(name: &str) -> Workspace {
        Workspace {
            name: String::from(name),
            manifolds: BTreeMap::new(),
        }
    }
}
