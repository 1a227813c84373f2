//! The parabolic census at `t = 2`, the excellent-component quartic, and the
//! distinguished points of X4.

use num_complex::Complex64;
use serde::Serialize;

use super::{
    quartic, sample_component, x4_system_tracked, x4_vector, ComponentId, ComponentSample,
};
use crate::error::Result;
use crate::numfield::{c, dedup_points, real, PolyLE4, Tracked, CLUSTER_TOL};
use crate::tracealg::TraceVector;

type C = Complex64;

/// Parabolic characters, deduplicated, with per-component counts.
#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub samples: Vec<ComponentSample>,
    pub counts: Vec<(ComponentId, usize)>,
    pub total: usize,
}

impl CensusReport {
    pub fn count(&self, id: ComponentId) -> usize {
        self.counts
            .iter()
            .find(|(i, _)| *i == id)
            .map_or(0, |(_, n)| *n)
    }
}

/// Samples every component at `t = 2` and removes coincident vectors.
pub fn enumerate_parabolic() -> Result<CensusReport> {
    let t = real(2.0);
    let mut all = Vec::new();
    for id in ComponentId::ALL {
        all.extend(sample_component(id, t)?);
    }
    let points: Vec<Vec<C>> = all.iter().map(|s| s.vector.to_array().to_vec()).collect();
    let keep = dedup_points(&points, CLUSTER_TOL);
    let samples: Vec<ComponentSample> = keep.into_iter().map(|i| all[i].clone()).collect();
    let counts = ComponentId::ALL
        .iter()
        .map(|&id| (id, samples.iter().filter(|s| s.id == id).count()))
        .collect();
    Ok(CensusReport {
        total: samples.len(),
        samples,
        counts,
    })
}

/// `u^4 + (2 - 2t^2) u^3 + (t^4 + 3) u^2 + (2 - 2t^4) u + 2t^4 - 4t^2 + 1`.
pub fn excellent_quartic(t: C) -> PolyLE4<f64> {
    let t2 = t * t;
    let t4 = t2 * t2;
    quartic([
        C::new(1.0, 0.0),
        -(t2 * 2.0) + 2.0,
        t4 + 3.0,
        -(t4 * 2.0) + 2.0,
        t4 * 2.0 - t2 * 4.0 + 1.0,
    ])
}

/// Normalized residuals of `t eta = u^2 + u - t^2 + 1` and the eta-quadratic.
pub fn x4_system_residuals(t: C, u: C, eta: C) -> [f64; 2] {
    x4_system_tracked(Tracked::new(t), Tracked::new(u), Tracked::new(eta))
        .map(|r| r.residual().normalized())
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecialPoint {
    pub label: String,
    #[serde(serialize_with = "ser_c")]
    pub t: C,
    #[serde(serialize_with = "ser_c")]
    pub u: C,
    #[serde(serialize_with = "ser_c")]
    pub eta: C,
    pub vector: TraceVector<f64>,
}

fn ser_c<S: serde::Serializer>(z: &C, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

impl SpecialPoint {
    fn new(label: impl Into<String>, t: C, u: C, eta: C) -> Self {
        Self {
            label: label.into(),
            t,
            u,
            eta,
            vector: x4_vector(t, u, eta),
        }
    }

    fn from_u(label: impl Into<String>, t: C, u: C) -> Self {
        Self::new(label, t, u, (u * u + u - t * t + 1.0) / t)
    }

    pub fn residuals(&self) -> [f64; 2] {
        x4_system_residuals(self.t, self.u, self.eta)
    }
}

/// The distinguished characters on the closure of X4.
pub fn special_points() -> Vec<SpecialPoint> {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s5 = 5f64.sqrt();
    let s6 = 6f64.sqrt();
    let mut out = vec![SpecialPoint::new(
        "limit of hyperbolicity",
        real(1.0 - s2),
        real(1.0 - s2),
        real(-s2),
    )];

    for eps in [1.0, -1.0] {
        let t = real((3.0 + 2.0 * eps * s2).sqrt());
        let u = real(1.0 + eps * s2);
        for sign in [1.0, -1.0] {
            let t = t * sign;
            out.push(SpecialPoint::new(
                format!(
                    "limit of X1*/X2*, t^2 = 3 {} 2 sqrt 2, t {}",
                    pm(eps),
                    pm(sign)
                ),
                t,
                u,
                (u + 1.0) / t,
            ));
        }
    }

    for eps in [1.0, -1.0] {
        for eps2 in [1.0, -1.0] {
            out.push(SpecialPoint::new(
                format!(
                    "t = 0, u = (-1 {} sqrt 3 i)/2, eta = {}sqrt 6",
                    pm(eps),
                    pm(eps2)
                ),
                real(0.0),
                c(-0.5, eps * s3 / 2.0),
                real(eps2 * s6),
            ));
        }
    }

    // u^4 + 4u^2 - 1 = 0: u^2 = -2 +- sqrt 5
    for t in [1.0, -1.0] {
        for w in [-2.0 + s5, -2.0 - s5] {
            let r = real(w).sqrt();
            for u in [r, -r] {
                out.push(SpecialPoint::from_u(
                    format!("t = {t}, u^2 = {w:.6}"),
                    real(t),
                    u,
                ));
            }
        }
    }

    for t in [s3, -s3] {
        for im in [s6, -s6] {
            out.push(SpecialPoint::from_u(
                format!("t = {t:.6}, u = 1 {} sqrt 6 i", pm(im)),
                real(t),
                c(1.0, im),
            ));
        }
    }

    let re = (s5 - 2.0).sqrt();
    let im = (s5 + 2.0).sqrt();
    for t in [s5, -s5] {
        for u in [c(2.0 + re, 0.0), c(2.0 - re, 0.0), c(2.0, im), c(2.0, -im)] {
            out.push(SpecialPoint::from_u(
                format!("t = {t:.6}, u = {u:.6}"),
                real(t),
                u,
            ));
        }
    }

    for t2 in [3.0 + s5, 3.0 - s5] {
        for sign in [1.0, -1.0] {
            let t = real(sign * t2.sqrt());
            out.push(SpecialPoint::new(
                format!("t^4 - 6t^2 + 4 = 0, t = {:.6}", t.re),
                t,
                t * t / 2.0,
                t,
            ));
        }
    }
    out
}

fn pm(x: f64) -> &'static str {
    if x >= 0.0 {
        "+"
    } else {
        "-"
    }
}
