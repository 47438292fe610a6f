//! Composite Gauss-Legendre quadrature with panel doubling.
//!
//! The reported error of an estimate is the largest change observed when the
//! panel width is halved, floored at [`ERROR_FLOOR`]; refinement stops once that
//! change is below the requested tolerance.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Nodes per panel.
const ORDER: usize = 20;
const INITIAL_PANELS: usize = 16;
const MAX_PANELS: usize = 1 << 14;

/// Smallest error bound ever reported.
pub const ERROR_FLOOR: f64 = 1e-12;

/// Momentum cutoff (times the profile width) beyond which `exp(-eps^2 k^2) < 1e-16`.
pub fn gaussian_cutoff() -> f64 {
    (16.0 * std::f64::consts::LN_10).sqrt()
}

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(ORDER)
            .expect("valid Gauss-Legendre degree")
            .into_node_weight_pairs()
    })
}

/// Nodes and weights of the composite rule with `panels` panels on `[a, b]`.
pub fn composite_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * ORDER);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for &(x, w) in rule() {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// Value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// `int_a^b f` to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    let eval = |panels: usize| -> f64 {
        composite_nodes(a, b, panels)
            .into_iter()
            .map(|(x, w)| w * f(x))
            .sum()
    };
    let mut panels = INITIAL_PANELS;
    let mut previous = eval(panels);
    loop {
        panels *= 2;
        let current = eval(panels);
        let change = (current - previous).abs();
        if change <= tol {
            return Ok(Estimate {
                value: current,
                error: change.max(ERROR_FLOOR),
            });
        }
        if panels >= MAX_PANELS {
            return Err(Error::QuadratureNotConverged {
                estimate: change,
                tolerance: tol,
            });
        }
        previous = current;
    }
}

/// `int_0^k_max weight(k) cos(k x) dk` for every `x` in `points`, refined until
/// every sample changes by less than `tol`. Returns the samples and their shared
/// error bound.
pub fn cosine_transform(
    weight: impl Fn(f64) -> f64,
    k_max: f64,
    points: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, f64)> {
    let eval = |panels: usize| -> Vec<f64> {
        let nodes: Vec<(f64, f64)> = composite_nodes(0.0, k_max, panels)
            .into_iter()
            .map(|(k, w)| (k, w * weight(k)))
            .collect();
        points
            .iter()
            .map(|&x| nodes.iter().map(|&(k, w)| w * (k * x).cos()).sum())
            .collect()
    };
    let mut panels = INITIAL_PANELS;
    let mut previous = eval(panels);
    loop {
        panels *= 2;
        let current = eval(panels);
        let change = current
            .iter()
            .zip(&previous)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        if change <= tol {
            return Ok((current, change.max(ERROR_FLOOR)));
        }
        if panels >= MAX_PANELS {
            return Err(Error::QuadratureNotConverged {
                estimate: change,
                tolerance: tol,
            });
        }
        previous = current;
    }
}
