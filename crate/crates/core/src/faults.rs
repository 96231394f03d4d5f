//! Fault injection for mutation testing of the verifier.
//!
//! Each [`Mutation`] flips exactly one sign in one construction formula.
//! The verification suite must notice every one of them; a mutation that
//! no check catches would mean the corresponding identity test is vacuous.

use alloc::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mutation {
    /// Γ̄^k̄_{ji}: `+ y^s R^k_{sji}` instead of `- y^s R^k_{sji}`.
    BundleCurvatureTermSign,
    /// Γ̄^k̄_{ji}: `- y^s ∂_s Γ^k_{ji}` instead of `+`.
    BundleDerivativeTermSign,
    /// Γ̄^k_{ji} = -Γ^k_{ji}.
    BundleHorizontalBlockSign,
    /// Γ̄^k̄_{j̄i} = Γ̄^k̄_{jī} = -Γ^k_{ji}.
    BundleMixedBlockSign,
    /// Adapted frame B: fibre block -∂_j ϑ^h.
    FrameFibreBlockSign,
    /// Inverse frame row C_A^h = (+∂_j ϑ^h, δ) instead of (-∂_j ϑ^h, δ).
    InverseFrameSign,
    /// H = ℒ_ϑ Γ - ϑ^t R instead of +.
    SecondFundamentalCurvatureSign,
    /// H with -∂_j ∂_i ϑ^h.
    SecondFundamentalHessianSign,
    /// Horizontal lift of a vector: (X^h, +Γ^h_s X^s) instead of minus.
    HorizontalLiftVectorSign,
    /// ℒ_ϑ Γ with +Γ^t_{ji} ∂_t ϑ^h instead of minus.
    LieConnectionTransportSign,
}

impl Mutation {
    pub const ALL: [Mutation; 10] = [
        Mutation::BundleCurvatureTermSign,
        Mutation::BundleDerivativeTermSign,
        Mutation::BundleHorizontalBlockSign,
        Mutation::BundleMixedBlockSign,
        Mutation::FrameFibreBlockSign,
        Mutation::InverseFrameSign,
        Mutation::SecondFundamentalCurvatureSign,
        Mutation::SecondFundamentalHessianSign,
        Mutation::HorizontalLiftVectorSign,
        Mutation::LieConnectionTransportSign,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::BundleCurvatureTermSign => "bundle-curvature-term-sign",
            Mutation::BundleDerivativeTermSign => "bundle-derivative-term-sign",
            Mutation::BundleHorizontalBlockSign => "bundle-horizontal-block-sign",
            Mutation::BundleMixedBlockSign => "bundle-mixed-block-sign",
            Mutation::FrameFibreBlockSign => "frame-fibre-block-sign",
            Mutation::InverseFrameSign => "inverse-frame-sign",
            Mutation::SecondFundamentalCurvatureSign => "h-curvature-term-sign",
            Mutation::SecondFundamentalHessianSign => "h-hessian-term-sign",
            Mutation::HorizontalLiftVectorSign => "horizontal-lift-vector-sign",
            Mutation::LieConnectionTransportSign => "lie-connection-transport-sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Mutation> {
        Mutation::ALL.into_iter().find(|m| m.name() == name)
    }
}

/// Set of active mutations; empty in normal operation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Faults {
    active: BTreeSet<Mutation>,
}

impl Faults {
    pub fn none() -> Self {
        Faults::default()
    }

    pub fn single(m: Mutation) -> Self {
        let mut active = BTreeSet::new();
        active.insert(m);
        Faults { active }
    }

    pub fn with(mut self, m: Mutation) -> Self {
        self.active.insert(m);
        self
    }

    pub fn has(&self, m: Mutation) -> bool {
        self.active.contains(&m)
    }

    /// -1.0 when the mutation is active, +1.0 otherwise.
    pub fn sign(&self, m: Mutation) -> f64 {
        if self.has(m) {
            -1.0
        } else {
            1.0
        }
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }
}
