//! Configuration, experiment pipelines and report output behind the `wlab`
//! command.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiment;
pub mod output;

use wlab::curves::{section_space, Curve};
use wlab::periods::period_matrix;
use wlab::C64;

use config::CurveModel;

fn point(z: C64) -> String {
    format!("({:.16e}, {:.16e})", z.re, z.im)
}

/// Human-readable summary of a curve: its data, section-space dimensions
/// and, for smooth models, the period matrix.
pub fn describe(model: &CurveModel) -> wlab::Result<String> {
    let g = model.genus();
    let mut s = format!("type: {}\ngenus: {g}\n", model.label());
    let curve = match model {
        CurveModel::Hyperelliptic(h) => {
            s += &format!("lead: {}\nbranch points:\n", point(h.lead()));
            for b in h.branch_points() {
                s += &format!("  {}\n", point(*b));
            }
            Some(Curve::Hyperelliptic(h.clone()))
        }
        CurveModel::Nodal(x) => {
            s += "node preimage pairs:\n";
            for (b, c) in x.pairs() {
                s += &format!("  {} ~ {}\n", point(*b), point(*c));
            }
            Some(Curve::Nodal(x.clone()))
        }
        CurveModel::Plumbing(p) => {
            s += &format!("lead: {}\nroots of q:\n", point(p.lead()));
            for r in p.q_roots() {
                s += &format!("  {}\n", point(*r));
            }
            s += &format!("node clearance: {:.16e}\n", p.node_clearance());
            None
        }
    };
    if let Some(curve) = &curve {
        let dims: Vec<String> = (1..=4).map(|m| section_space(curve, m).map(|b| b.n().to_string())).collect::<wlab::Result<_>>()?;
        s += &format!("h0(omega^m), m = 1..4: {}\n", dims.join(", "));
    }
    let smooth = match model {
        CurveModel::Hyperelliptic(h) => Some(("period data", h.clone())),
        CurveModel::Plumbing(p) => Some(("period data of the normalization", p.normalization()?)),
        CurveModel::Nodal(_) => None,
    };
    if let Some((title, h)) = smooth {
        s += &format!("{title}:\n{}", period_matrix(&h)?.report());
    }
    Ok(s)
}
