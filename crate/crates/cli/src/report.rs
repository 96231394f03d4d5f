//! Serialization of verification reports and computed objects:
//! a stable JSON schema for CI assertions plus a plain-text rendering.

use std::collections::BTreeMap;

use hlift_core::{Anchor, VerificationReport};
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct JsonReport {
    pub workspace: String,
    pub seed: u64,
    pub checks: Vec<JsonCheck>,
    pub objects: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct JsonCheck {
    pub anchor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifold: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub status: String,
    pub max_residual: f64,
    pub witness: Option<BTreeMap<String, f64>>,
}

pub fn to_json_report(r: &VerificationReport) -> JsonReport {
    JsonReport {
        workspace: r.workspace.clone(),
        seed: r.seed,
        checks: r
            .checks
            .iter()
            .map(|c| JsonCheck {
                anchor: c.anchor.name().to_string(),
                manifold: Some(c.manifold.clone()),
                field: c.field.clone(),
                status: if c.passed { "pass" } else { "fail" }.to_string(),
                max_residual: c.max_residual,
                witness: c
                    .witness
                    .as_ref()
                    .map(|p| p.iter().map(|(k, v)| (k.to_string(), v)).collect()),
            })
            .collect(),
        objects: serde_json::Map::new(),
        diagnostics: r
            .diagnostics
            .iter()
            .map(|d| format!("{}: {}", d.manifold, d.message))
            .collect(),
    }
}

pub fn render_text(r: &VerificationReport) -> String {
    let mut out = String::new();
    for c in &r.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let target = match &c.field {
            Some(f) => format!("{}/{f}", c.manifold),
            None => c.manifold.clone(),
        };
        out.push_str(&format!(
            "{status} {:<10} {:<20} residual {:9.2e}  {}\n",
            c.anchor.name(),
            target,
            c.max_residual,
            c.detail
        ));
        if let Some(w) = &c.witness {
            let coords: Vec<String> =
                w.iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
            out.push_str(&format!("     witness: {}\n", coords.join(", ")));
        }
    }
    for d in &r.diagnostics {
        out.push_str(&format!("ABORT {}: {}\n", d.manifold, d.message));
    }
    let failed = r.checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!(
        "{} checks, {} failed, {} manifolds aborted\n",
        r.checks.len(),
        failed,
        r.diagnostics.len()
    ));
    out
}

/// One-paragraph description of each check for `explain`.
pub fn describe(anchor: Anchor) -> &'static str {
    match anchor {
        Anchor::Bianchi => {
            "First Bianchi identity: the cyclic sum of the curvature over its \
             three lower indices vanishes for a torsion-free connection."
        }
        Anchor::Cond1 => {
            "The four conditions defining the horizontal lift of the connection: \
             derivatives of vertical/horizontal lifts reproduce the vertical and \
             horizontal lifts of the base derivative."
        }
        Anchor::Eq2 => {
            "Block structure of the lifted connection: five blocks vanish \
             identically and the remaining fibre block is affine in the fibre \
             coordinates."
        }
        Anchor::Eq8 => {
            "The connection induced on the cross-section through the adapted \
             frame equals the base connection."
        }
        Anchor::Eq9 => {
            "The defining residual of the induced connection lies entirely along \
             the fibre directions: its tangential projection vanishes."
        }
        Anchor::Eq10 => {
            "The closed form of the second fundamental form agrees with the \
             coefficients extracted from the defining residual."
        }
        Anchor::Eq11 => {
            "The second fundamental form splits as the Lie derivative of the \
             connection minus the field-curvature contraction."
        }
        Anchor::Eq12 => {
            "Gauss relation: the bundle covariant derivative of the frame along \
             itself decomposes into tangential (induced connection) and normal \
             (second fundamental form) parts."
        }
        Anchor::Eq15 => {
            "Curvature decomposition along the section: frame-contracted bundle \
             curvature equals the base curvature tangentially plus a closed-form \
             vertical part."
        }
        Anchor::LieCommute => {
            "Commutator of covariant derivatives on random vector fields \
             reproduces the curvature contraction; calibrates the sign \
             convention."
        }
        Anchor::Prop2 => {
            "Totally-geodesic biconditional: the second fundamental form \
             vanishes exactly when the field is an infinitesimal affine \
             transformation and its curvature contraction vanishes."
        }
        Anchor::Prop3 => {
            "Curvature-tangency biconditional: the vertical part of the \
             restricted curvature vanishes exactly when the Lie derivative of \
             the curvature and the antisymmetrized gradient of the contraction \
             both vanish."
        }
        Anchor::WellKnown => {
            "Antisymmetrized covariant derivative of the Lie derivative of the \
             connection equals the Lie derivative of the curvature."
        }
    }
}
