//! Dense symbolic tensors and affine connections on a chart.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::Expr;
use crate::manifold::Chart;

/// Variance tag of one tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Up,
    Down,
}

/// Dense tensor of symbolic components, row-major over its index tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    chart: Arc<Chart>,
    signature: Vec<Variance>,
    comps: Vec<Expr>,
}

/// All index tuples of the given rank with entries below `dim`,
/// lexicographic order.
pub fn index_tuples(rank: usize, dim: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(rank as u32);
    (0..total).map(move |mut flat| {
        let mut idx = alloc::vec![0usize; rank];
        for slot in (0..rank).rev() {
            idx[slot] = flat % dim;
            flat /= dim;
        }
        idx
    })
}

impl Tensor {
    pub fn from_fn(
        chart: Arc<Chart>,
        signature: Vec<Variance>,
        mut f: impl FnMut(&[usize]) -> Expr,
    ) -> Tensor {
        let dim = chart.dim();
        let comps = index_tuples(signature.len(), dim)
            .map(|idx| f(&idx).simplify())
            .collect();
        Tensor {
            chart,
            signature,
            comps,
        }
    }

    pub fn zeros(chart: Arc<Chart>, signature: Vec<Variance>) -> Tensor {
        Tensor::from_fn(chart, signature, |_| Expr::zero())
    }

    /// Rank-0 wrapper around a scalar expression.
    pub fn scalar(chart: Arc<Chart>, e: Expr) -> Tensor {
        Tensor {
            chart,
            signature: Vec::new(),
            comps: alloc::vec![e.simplify()],
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn rank(&self) -> usize {
        self.signature.len()
    }

    pub fn signature(&self) -> &[Variance] {
        &self.signature
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let dim = self.dim();
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < dim);
            acc * dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.comps[self.flat(idx)]
    }

    pub fn comps(&self) -> &[Expr] {
        &self.comps
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &Expr)> {
        index_tuples(self.rank(), self.dim()).zip(self.comps.iter())
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Tensor {
        Tensor {
            chart: self.chart.clone(),
            signature: self.signature.clone(),
            comps: self.comps.iter().map(|e| f(e).simplify()).collect(),
        }
    }

    /// Componentwise sum; signatures must match.
    pub fn add(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.signature, other.signature, "signature mismatch");
        Tensor {
            chart: self.chart.clone(),
            signature: self.signature.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| (a.clone() + b.clone()).simplify())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.add(&other.map(|e| e.neg()))
    }

    /// True when every component is the literal zero after simplification.
    pub fn is_structurally_zero(&self) -> bool {
        self.comps.iter().all(|e| e.simplify().is_zero())
    }
}

/// Affine connection coefficients Γ^k_{ji}; the first lower index is the
/// differentiation index.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    chart: Arc<Chart>,
    comps: Vec<Expr>,
    symmetric: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConnectionError {
    /// An operation assuming a torsion-free connection was given one
    /// without the symmetric flag.
    TorsionNotSupported,
}

impl fmt::Display for ConnectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConnectionError::TorsionNotSupported => {
                write!(f, "operation requires a symmetric (torsion-free) connection")
            }
        }
    }
}

impl Connection {
    pub fn from_fn(
        chart: Arc<Chart>,
        symmetric: bool,
        mut f: impl FnMut(usize, usize, usize) -> Expr,
    ) -> Connection {
        let dim = chart.dim();
        let comps = index_tuples(3, dim)
            .map(|idx| f(idx[0], idx[1], idx[2]).simplify())
            .collect();
        Connection {
            chart,
            comps,
            symmetric,
        }
    }

    pub fn flat(chart: Arc<Chart>) -> Connection {
        Connection::from_fn(chart, true, |_, _, _| Expr::zero())
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Γ^k_{ji}
    pub fn gamma(&self, k: usize, j: usize, i: usize) -> &Expr {
        let d = self.dim();
        &self.comps[(k * d + j) * d + i]
    }

    /// View of the coefficients as a `[Up, Down, Down]` tensor.
    pub fn as_tensor(&self) -> Tensor {
        let me = self.clone();
        Tensor::from_fn(
            self.chart.clone(),
            alloc::vec![Variance::Up, Variance::Down, Variance::Down],
            move |idx| me.gamma(idx[0], idx[1], idx[2]).clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::Chart;

    #[test]
    fn index_tuples_lexicographic() {
        let all: Vec<_> = index_tuples(2, 2).collect();
        assert_eq!(
            all,
            alloc::vec![
                alloc::vec![0, 0],
                alloc::vec![0, 1],
                alloc::vec![1, 0],
                alloc::vec![1, 1]
            ]
        );
    }

    #[test]
    fn tensor_get_matches_from_fn() {
        let chart = Chart::new(["x", "y", "z"]).unwrap();
        let t = Tensor::from_fn(
            chart,
            alloc::vec![Variance::Up, Variance::Down],
            |idx| Expr::constant((idx[0] * 10 + idx[1]) as f64),
        );
        assert_eq!(t.get(&[2, 1]).as_const(), Some(21.0));
        assert_eq!(t.rank(), 2);
    }

    #[test]
    fn tensor_add_sub() {
        let chart = Chart::new(["x"]).unwrap();
        let a = Tensor::from_fn(chart.clone(), alloc::vec![Variance::Down], |_| {
            Expr::var("x")
        });
        let diff = a.sub(&a);
        assert!(diff.is_structurally_zero());
    }
}
