//! The ten components of the irreducible character variety of 8_18.
//!
//! Each component is a family of trace vectors parameterized by `t` and a few
//! auxiliary unknowns cut out by quadratics. This module samples every branch at a
//! given `t`, recovers parameters from an arbitrary vector to test membership, and
//! enforces the exclusion conditions.

mod census;
mod explore;

pub use census::{
    enumerate_parabolic, excellent_quartic, special_points, x4_system_residuals, CensusReport,
    SpecialPoint,
};
pub use explore::{
    best_component, classify, explore_solve, is_reducible_character, newton_refine, worker_count,
    Classification, ExploreFinding, ExploreReport, Refined,
};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfield::{real, solve_poly, solve_quadratic, PolyLE4, Residual, Tracked};
use crate::tracealg::{rotate, TraceVector};

type C = Complex64;
type V = TraceVector<f64>;

/// Samplers refuse `t` within this distance of an excluded value.
pub const SAMPLER_MARGIN: f64 = 1e-3;
/// Membership guards reject parameters within this distance of an excluded value.
pub const GUARD_MARGIN: f64 = 1e-6;
/// Tolerance on normalized membership residuals of sampled vectors.
pub const SAMPLE_TOL: f64 = 1e-10;
/// X4 roots closer than this to `u = 1` are dropped.
const X4_U_EXCLUSION: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComponentId {
    X11,
    X12,
    X21,
    X22,
    X3,
    X4,
    X51,
    X52,
    X61,
    X62,
}

impl ComponentId {
    pub const ALL: [ComponentId; 10] = [
        Self::X11,
        Self::X12,
        Self::X21,
        Self::X22,
        Self::X3,
        Self::X4,
        Self::X51,
        Self::X52,
        Self::X61,
        Self::X62,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::X11 => "X11",
            Self::X12 => "X12",
            Self::X21 => "X21",
            Self::X22 => "X22",
            Self::X3 => "X3",
            Self::X4 => "X4",
            Self::X51 => "X51",
            Self::X52 => "X52",
            Self::X61 => "X61",
            Self::X62 => "X62",
        }
    }

    /// Image under the cyclic relabeling `x_i -> x_{i+1}`.
    pub fn pair(self) -> Self {
        match self {
            Self::X11 => Self::X12,
            Self::X12 => Self::X11,
            Self::X21 => Self::X22,
            Self::X22 => Self::X21,
            Self::X51 => Self::X52,
            Self::X52 => Self::X51,
            Self::X61 => Self::X62,
            Self::X62 => Self::X61,
            other => other,
        }
    }

    /// Number of samples at a generic admissible `t`.
    pub fn generic_count(self) -> usize {
        match self {
            Self::X11 | Self::X12 | Self::X21 | Self::X22 | Self::X4 => 4,
            Self::X3 => 2,
            _ => 1,
        }
    }

    /// The component this one is the rotation of, if it is a second member of a pair.
    fn rotated_from(self) -> Option<Self> {
        match self {
            Self::X12 => Some(Self::X11),
            Self::X22 => Some(Self::X21),
            Self::X52 => Some(Self::X51),
            Self::X62 => Some(Self::X61),
            _ => None,
        }
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComponentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace(['_', ','], "");
        Self::ALL
            .into_iter()
            .find(|id| id.name() == key)
            .ok_or_else(|| Error::PreconditionViolated(format!("unknown component `{s}`")))
    }
}

/// A named residual of a defining equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NamedResidual {
    pub name: &'static str,
    pub residual: Residual<f64>,
}

impl NamedResidual {
    pub fn normalized(&self) -> f64 {
        self.residual.normalized()
    }
}

pub fn max_normalized(rs: &[NamedResidual]) -> f64 {
    rs.iter().map(NamedResidual::normalized).fold(0.0, f64::max)
}

/// One point of a component at a fixed `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentSample {
    pub id: ComponentId,
    /// Index of the root combination, principal roots first.
    pub branch: usize,
    pub params: Vec<(&'static str, C)>,
    pub vector: V,
}

impl ComponentSample {
    pub fn param(&self, name: &str) -> Option<C> {
        self.params
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, z)| *z)
    }

    pub fn t(&self) -> C {
        self.vector.t
    }

    pub fn residuals(&self) -> Vec<NamedResidual> {
        membership_residual(self.id, &self.vector)
    }

    pub fn max_residual(&self) -> f64 {
        max_normalized(&self.residuals())
    }
}

impl Serialize for ComponentSample {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Params<'a>(&'a [(&'static str, C)]);
        impl Serialize for Params<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (name, z) in self.0 {
                    m.serialize_entry(name, &[z.re, z.im])?;
                }
                m.end()
            }
        }
        struct Residuals(Vec<NamedResidual>);
        impl Serialize for Residuals {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for r in &self.0 {
                    m.serialize_entry(r.name, &r.normalized())?;
                }
                m.end()
            }
        }
        let mut map = serializer.serialize_map(Some(5))?;
        map.serialize_entry("id", self.id.name())?;
        map.serialize_entry("branch", &self.branch)?;
        map.serialize_entry("params", &Params(&self.params))?;
        map.serialize_entry("vector", &self.vector)?;
        map.serialize_entry("residuals", &Residuals(self.residuals()))?;
        map.end()
    }
}

fn excluded(component: ComponentId, reason: String) -> Error {
    Error::ExcludedParameter {
        component: component.name().into(),
        reason,
    }
}

/// Values of `t` each sampler refuses, with a label.
pub fn sampler_exclusions(id: ComponentId) -> Vec<(C, &'static str)> {
    let s2 = 2f64.sqrt();
    let pm = |x: f64, label: &'static str| vec![(real(x), label), (real(-x), label)];
    let mut out = Vec::new();
    match id {
        ComponentId::X11 | ComponentId::X12 | ComponentId::X21 | ComponentId::X22 => {
            out.push((real(0.0), "t = 0 (degenerate parameters)"));
            out.extend(pm(1.0, "alpha = 0"));
            out.extend(pm(3f64.sqrt(), "alpha = 2"));
            out.extend(pm(5f64.sqrt(), "alpha = 4"));
            out.extend(pm(1.0 + s2, "alpha = 2 + 2 sqrt 2"));
            out.extend(pm(s2 - 1.0, "alpha = 2 - 2 sqrt 2"));
        }
        ComponentId::X3 => out.extend(pm(5f64.sqrt(), "t^2 = 5")),
        ComponentId::X4 => {}
        ComponentId::X51 | ComponentId::X52 => out.extend(pm(3f64.sqrt(), "t^2 = 3")),
        ComponentId::X61 | ComponentId::X62 => {
            out.extend(pm(3f64.sqrt(), "t^2 = 3"));
            out.push((real(0.0), "t = 0 (all triple traces vanish)"));
        }
    }
    out
}

/// Refuses `t` within `margin` of an excluded value.
pub fn check_sampler_t(id: ComponentId, t: C, margin: f64) -> Result<()> {
    if !(t.re.is_finite() && t.im.is_finite()) {
        return Err(excluded(id, "t is not finite".into()));
    }
    for (bad, label) in sampler_exclusions(id) {
        if (t - bad).norm() <= margin {
            return Err(excluded(
                id,
                format!("t = {t} is within {margin:e} of {label}"),
            ));
        }
    }
    Ok(())
}

/// Parameters recovered linearly from a vector.
struct Recovered {
    t: C,
    alpha: C,
    main: C,
}

fn recover(id: ComponentId, v: &V) -> Recovered {
    let w = match id.rotated_from() {
        Some(_) => rotate_back(v),
        None => *v,
    };
    let alpha = w.alpha();
    let main = match id {
        // mu
        ComponentId::X11 | ComponentId::X12 => w.t12 + w.t23 - 2.0,
        // z
        ComponentId::X21 | ComponentId::X22 => w.t23 - 1.0,
        // u
        ComponentId::X3 | ComponentId::X4 => w.t12,
        _ => C::zero(),
    };
    Recovered {
        t: w.t,
        alpha,
        main,
    }
}

/// Checks the component's exclusion conditions on the parameters recovered from `v`.
pub fn guard(id: ComponentId, v: &V, margin: f64) -> Result<()> {
    let r = recover(id, v);
    let near = |a: C, b: f64| (a - b).norm() <= margin;
    let s2 = 2f64.sqrt();
    let fail = |reason: String| Err(excluded(id, reason));
    match id {
        ComponentId::X11 | ComponentId::X12 | ComponentId::X21 | ComponentId::X22 => {
            for bad in [0.0, 2.0, 4.0] {
                if near(r.alpha, bad) {
                    return fail(format!("alpha = {} is within {margin:e} of {bad}", r.alpha));
                }
            }
            // (alpha, mu) for X1*, (alpha, z) for X2*
            let pairs = if matches!(id, ComponentId::X11 | ComponentId::X12) {
                [(2.0 + 2.0 * s2, 2.0 * s2), (2.0 - 2.0 * s2, -2.0 * s2)]
            } else {
                [(2.0 + 2.0 * s2, s2), (2.0 - 2.0 * s2, -s2)]
            };
            for (a, m) in pairs {
                if near(r.alpha, a) && near(r.main, m) {
                    return fail(format!("(alpha, param) is within {margin:e} of ({a}, {m})"));
                }
            }
            Ok(())
        }
        ComponentId::X3 => {
            if near(r.t * r.t, 5.0) {
                return fail("t^2 = 5".into());
            }
            Ok(())
        }
        ComponentId::X4 => {
            if near(r.main, 1.0) {
                return fail("u = 1".into());
            }
            Ok(())
        }
        _ => {
            if near(r.t * r.t, 3.0) {
                return fail("t^2 = 3".into());
            }
            Ok(())
        }
    }
}

fn rotate_back(v: &V) -> V {
    rotate(&rotate(&rotate(v)))
}

fn tk(z: C) -> Tracked<f64> {
    Tracked::new(z)
}

fn k(x: f64) -> Tracked<f64> {
    Tracked::constant(x)
}

fn named(name: &'static str, value: Tracked<f64>) -> NamedResidual {
    NamedResidual {
        name,
        residual: value.residual(),
    }
}

fn eq(name: &'static str, lhs: C, rhs: Tracked<f64>) -> NamedResidual {
    named(name, tk(lhs) - rhs)
}

/// Residuals of the component's defining equalities at `v`, denominators cleared.
pub fn membership_residual(id: ComponentId, v: &V) -> Vec<NamedResidual> {
    if id.rotated_from().is_some() {
        return membership_residual(id.pair(), &rotate_back(v));
    }
    let t = tk(v.t);
    let t2 = t.square();
    let a = t2 - k(1.0);
    match id {
        ComponentId::X11 => {
            let x = tk(v.t12) - k(1.0);
            let mu = tk(v.t12) + tk(v.t23) - k(2.0);
            let a2 = a.square();
            let a3 = a2 * a;
            let tau_a =
                (a3 - a2.scale(3.0) + k(4.0)) * mu - a2.square() + a3.scale(4.0) - a.scale(7.0);
            let sp_a =
                (a2 - a.scale(3.0) + k(1.0)) * mu - a3 + a2.scale(4.0) - a.scale(2.0) + mu * x;
            let sm_a = (k(1.0) + a) * mu - a.scale(2.0) - mu * x;
            vec![
                eq("t14=x+1", v.t14, tk(v.t12)),
                eq("t34=mu+1-x", v.t34, tk(v.t23)),
                eq("t13=1", v.t13, k(1.0)),
                named("alpha*t24=alpha*tau", a * tk(v.t24) - tau_a),
                named("alpha*t123=t*mu", a * tk(v.t123) - t * mu),
                named("alpha*t134=t*mu", a * tk(v.t134) - t * mu),
                named("alpha*t124=t*alpha*sigma+", a * tk(v.t124) - t * sp_a),
                named("alpha*t234=t*alpha*sigma-", a * tk(v.t234) - t * sm_a),
                named(
                    "x-quadratic",
                    a * x.square() - a * mu * x + mu.scale(2.0) + a2 - a.scale(4.0),
                ),
                named(
                    "mu-quadratic",
                    mu.square() + (a2 - a.scale(4.0)) * mu + a2.scale(4.0) - a3,
                ),
            ]
        }
        ComponentId::X21 => {
            let z = tk(v.t23) - k(1.0);
            let g = tk(v.t12) - a + k(1.0);
            let z2 = z.square();
            let tza = t * a;
            vec![
                eq("t14=z+1", v.t14, tk(v.t23)),
                eq("t13=1", v.t13, k(1.0)),
                eq("t24=1", v.t24, k(1.0)),
                named(
                    "gamma*t34=z^2+gamma*(alpha-1)",
                    g * tk(v.t34) - z2 - g * (a - k(1.0)),
                ),
                named("alpha*t123", a * tk(v.t123) - tza - t * z * g),
                named("alpha*t124", a * tk(v.t124) - tza - t * z * g),
                named(
                    "alpha*gamma*t134",
                    a * g * tk(v.t134) - tza * g - t * z2 * z,
                ),
                named(
                    "alpha*gamma*t234",
                    a * g * tk(v.t234) - tza * g - t * z2 * z,
                ),
                named("z-quadratic", z2 - a * z + a),
                named(
                    "gamma-quadratic",
                    g.square() + ((a - k(2.0)) * z2 - z.scale(2.0)) * g + z2,
                ),
            ]
        }
        ComponentId::X3 => {
            let u = tk(v.t12);
            let q = t2 - k(2.0);
            let tri = t * u - t;
            vec![
                eq("t23=u", v.t23, u),
                eq("t34=u", v.t34, u),
                eq("t14=u", v.t14, u),
                eq("t13=t^2-2", v.t13, q),
                eq("t24=t^2-2", v.t24, q),
                eq("t123=tu-t", v.t123, tri),
                eq("t124=tu-t", v.t124, tri),
                eq("t134=tu-t", v.t134, tri),
                eq("t234=tu-t", v.t234, tri),
                named(
                    "u-quadratic",
                    u.square() - (t2 + k(1.0)) * u + t2.scale(2.0) - k(1.0),
                ),
            ]
        }
        ComponentId::X4 => {
            let u = tk(v.t12);
            let eta = tk(v.t123);
            let diag = u.scale(2.0) + k(2.0) - t2;
            let [lin, quad] = x4_system_tracked(t, u, eta);
            vec![
                eq("t23=u", v.t23, u),
                eq("t34=u", v.t34, u),
                eq("t14=u", v.t14, u),
                eq("t13=2u+2-t^2", v.t13, diag),
                eq("t24=2u+2-t^2", v.t24, diag),
                eq("t124=eta", v.t124, eta),
                eq("t134=eta", v.t134, eta),
                eq("t234=eta", v.t234, eta),
                named("t*eta=u^2+u-t^2+1", lin),
                named("eta-quadratic", quad),
            ]
        }
        ComponentId::X51 => {
            let q = t2 - k(2.0);
            vec![
                eq("t12=1", v.t12, k(1.0)),
                eq("t23=t^2-2", v.t23, q),
                eq("t34=1", v.t34, k(1.0)),
                eq("t14=t^2-2", v.t14, q),
                eq("t13=1", v.t13, k(1.0)),
                eq("t24=1", v.t24, k(1.0)),
                eq("t123=0", v.t123, k(0.0)),
                eq("t124=0", v.t124, k(0.0)),
                eq("t134=0", v.t134, k(0.0)),
                eq("t234=0", v.t234, k(0.0)),
            ]
        }
        ComponentId::X61 => {
            let qq = t2.scale(4.0) - k(2.0) - t2.square();
            let p = t.scale(3.0) - t2 * t;
            vec![
                eq("t12=1", v.t12, k(1.0)),
                eq("t23=1", v.t23, k(1.0)),
                eq("t34=1", v.t34, k(1.0)),
                eq("t14=1", v.t14, k(1.0)),
                eq("t13=1", v.t13, k(1.0)),
                eq("t24=4t^2-2-t^4", v.t24, qq),
                eq("t123=0", v.t123, k(0.0)),
                eq("t124=3t-t^3", v.t124, p),
                eq("t134=0", v.t134, k(0.0)),
                eq("t234=3t-t^3", v.t234, p),
            ]
        }
        _ => unreachable!("second members are handled by rotation"),
    }
}

/// `[t eta - (u^2 + u - t^2 + 1), eta^2 + t(t^2 + 4 - 2u) eta - 5 t^2 u + t^4 + 4 t^2 - 6]`.
fn x4_system_tracked(t: Tracked<f64>, u: Tracked<f64>, eta: Tracked<f64>) -> [Tracked<f64>; 2] {
    let t2 = t.square();
    let lin = t * eta - (u.square() + u - t2 + k(1.0));
    let quad = eta.square() + t * (t2 + k(4.0) - u.scale(2.0)) * eta - t2.scale(5.0) * u
        + t2.square()
        + t2.scale(4.0)
        - k(6.0);
    [lin, quad]
}

fn x11_sample(t: C, alpha: C, mu: C, x: C, branch: usize) -> ComponentSample {
    let tau = (alpha * alpha - alpha * 3.0 + alpha.inv() * 4.0) * mu - alpha.powi(3)
        + alpha * alpha * 4.0
        - 7.0;
    let sp = (alpha + alpha.inv() - 3.0) * mu - alpha * alpha + alpha * 4.0 - 2.0 + mu / alpha * x;
    let sm = (alpha.inv() + 1.0) * mu - 2.0 - mu / alpha * x;
    let one = C::one();
    let vector = V {
        t,
        t12: x + 1.0,
        t23: mu + 1.0 - x,
        t34: mu + 1.0 - x,
        t14: x + 1.0,
        t13: one,
        t24: tau,
        t123: t * mu / alpha,
        t124: t * sp,
        t134: t * mu / alpha,
        t234: t * sm,
    };
    ComponentSample {
        id: ComponentId::X11,
        branch,
        params: vec![
            ("t", t),
            ("alpha", alpha),
            ("mu", mu),
            ("x", x),
            ("tau", tau),
            ("sigma+", sp),
            ("sigma-", sm),
        ],
        vector,
    }
}

fn x21_sample(t: C, alpha: C, z: C, g: C, branch: usize) -> ComponentSample {
    let one = C::one();
    let a = t + t * z * g / alpha;
    let b = t + t * z.powi(3) / (alpha * g);
    let vector = V {
        t,
        t12: g + alpha - 1.0,
        t23: z + 1.0,
        t34: z * z / g + alpha - 1.0,
        t14: z + 1.0,
        t13: one,
        t24: one,
        t123: a,
        t124: a,
        t134: b,
        t234: b,
    };
    ComponentSample {
        id: ComponentId::X21,
        branch,
        params: vec![("t", t), ("alpha", alpha), ("z", z), ("gamma", g)],
        vector,
    }
}

pub(crate) fn x3_vector(t: C, u: C) -> V {
    let q = t * t - 2.0;
    let tri = t * u - t;
    V {
        t,
        t12: u,
        t23: u,
        t34: u,
        t14: u,
        t13: q,
        t24: q,
        t123: tri,
        t124: tri,
        t134: tri,
        t234: tri,
    }
}

pub(crate) fn x4_vector(t: C, u: C, eta: C) -> V {
    let d = u * 2.0 + 2.0 - t * t;
    V {
        t,
        t12: u,
        t23: u,
        t34: u,
        t14: u,
        t13: d,
        t24: d,
        t123: eta,
        t124: eta,
        t134: eta,
        t234: eta,
    }
}

/// `(u, eta)` pairs on the X4 fiber over `t`, `u = 1` excluded.
fn x4_points(t: C) -> Result<Vec<(C, C)>> {
    let mut pts = Vec::new();
    if t == C::zero() {
        // t eta = u^2 + u + 1 forces u^2 + u + 1 = 0; eta^2 = 6 is then free of u
        let us = solve_quadratic(C::one(), C::one(), C::one())?;
        let etas = solve_quadratic(C::one(), C::zero(), real(-6.0))?;
        for u in us {
            for eta in etas {
                pts.push((u, eta));
            }
        }
        return Ok(pts);
    }
    let roots = solve_poly(&excellent_quartic(t))?;
    for u in roots {
        if (u - 1.0).norm() <= X4_U_EXCLUSION {
            continue;
        }
        let eta = if t.norm() > SAMPLER_MARGIN {
            (u * u + u - t * t + 1.0) / t
        } else {
            small_t_eta(t, u)?
        };
        pts.push(polish_x4(t, u, eta));
    }
    Ok(pts)
}

/// For tiny `|t|` pick the root of the eta-quadratic that best fits the linear relation.
fn small_t_eta(t: C, u: C) -> Result<C> {
    let b = t * (t * t + 4.0 - u * 2.0);
    let c = -(t * t * u * 5.0) + t.powi(4) + t * t * 4.0 - 6.0;
    let roots = solve_quadratic(C::one(), b, c)?;
    let lin = |eta: C| (t * eta - (u * u + u - t * t + 1.0)).norm();
    Ok(if lin(roots[0]) <= lin(roots[1]) {
        roots[0]
    } else {
        roots[1]
    })
}

/// A few Newton steps on the 2x2 X4 system in `(u, eta)`.
fn polish_x4(t: C, mut u: C, mut eta: C) -> (C, C) {
    for _ in 0..4 {
        let f1 = t * eta - (u * u + u - t * t + 1.0);
        let f2 = eta * eta + t * (t * t + 4.0 - u * 2.0) * eta - t * t * u * 5.0
            + t.powi(4)
            + t * t * 4.0
            - 6.0;
        // Jacobian rows: d/du, d/deta
        let j11 = -(u * 2.0 + 1.0);
        let j12 = t;
        let j21 = -(t * eta * 2.0) - t * t * 5.0;
        let j22 = eta * 2.0 + t * (t * t + 4.0 - u * 2.0);
        let det = j11 * j22 - j12 * j21;
        if det.norm() < 1e-300 {
            break;
        }
        let du = (f1 * j22 - f2 * j12) / det;
        let de = (j11 * f2 - j21 * f1) / det;
        let (nu, ne) = (u - du, eta - de);
        if !(nu.re.is_finite() && nu.im.is_finite() && ne.re.is_finite() && ne.im.is_finite()) {
            break;
        }
        u = nu;
        eta = ne;
        if du.norm() + de.norm() <= 1e-16 * (1.0 + u.norm() + eta.norm()) {
            break;
        }
    }
    (u, eta)
}

/// All branches of a component over `t`, in a fixed order.
pub fn sample_component(id: ComponentId, t: C) -> Result<Vec<ComponentSample>> {
    check_sampler_t(id, t, SAMPLER_MARGIN)?;
    if let Some(base) = id.rotated_from() {
        return Ok(sample_component(base, t)?
            .into_iter()
            .map(|s| ComponentSample {
                id,
                vector: rotate(&s.vector),
                ..s
            })
            .collect());
    }
    let alpha = t * t - 1.0;
    let one = C::one();
    let samples = match id {
        ComponentId::X11 => {
            let mus = solve_quadratic(
                one,
                alpha * alpha - alpha * 4.0,
                alpha * alpha * 4.0 - alpha.powi(3),
            )?;
            let mut out = Vec::with_capacity(4);
            for (i, mu) in mus.into_iter().enumerate() {
                let xs = solve_quadratic(one, -mu, mu * 2.0 / alpha + alpha - 4.0)?;
                for (j, x) in xs.into_iter().enumerate() {
                    out.push(x11_sample(t, alpha, mu, x, 2 * i + j));
                }
            }
            out
        }
        ComponentId::X21 => {
            let zs = solve_quadratic(one, -alpha, alpha)?;
            let mut out = Vec::with_capacity(4);
            for (i, z) in zs.into_iter().enumerate() {
                let gs = solve_quadratic(one, (alpha - 2.0) * z * z - z * 2.0, z * z)?;
                for (j, g) in gs.into_iter().enumerate() {
                    out.push(x21_sample(t, alpha, z, g, 2 * i + j));
                }
            }
            out
        }
        ComponentId::X3 => solve_quadratic(one, -(t * t + 1.0), t * t * 2.0 - 1.0)?
            .into_iter()
            .enumerate()
            .map(|(branch, u)| ComponentSample {
                id,
                branch,
                params: vec![("t", t), ("u", u)],
                vector: x3_vector(t, u),
            })
            .collect(),
        ComponentId::X4 => x4_points(t)?
            .into_iter()
            .enumerate()
            .map(|(branch, (u, eta))| ComponentSample {
                id,
                branch,
                params: vec![("t", t), ("u", u), ("eta", eta)],
                vector: x4_vector(t, u, eta),
            })
            .collect(),
        ComponentId::X51 => {
            let q = t * t - 2.0;
            let z = C::zero();
            vec![ComponentSample {
                id,
                branch: 0,
                params: vec![("t", t)],
                vector: V {
                    t,
                    t12: one,
                    t23: q,
                    t34: one,
                    t14: q,
                    t13: one,
                    t24: one,
                    t123: z,
                    t124: z,
                    t134: z,
                    t234: z,
                },
            }]
        }
        ComponentId::X61 => {
            let qq = t * t * 4.0 - 2.0 - t.powi(4);
            let p = t * 3.0 - t.powi(3);
            let z = C::zero();
            vec![ComponentSample {
                id,
                branch: 0,
                params: vec![("t", t)],
                vector: V {
                    t,
                    t12: one,
                    t23: one,
                    t34: one,
                    t14: one,
                    t13: one,
                    t24: qq,
                    t123: z,
                    t124: p,
                    t134: z,
                    t234: p,
                },
            }]
        }
        _ => unreachable!("second members are handled by rotation"),
    };
    for s in &samples {
        if !s.vector.is_finite() {
            return Err(Error::NonFinite("component sample"));
        }
    }
    Ok(samples)
}

/// Samples of every component over `t`, skipping components that refuse it.
pub fn sample_all(t: C) -> Vec<(ComponentId, Result<Vec<ComponentSample>>)> {
    ComponentId::ALL
        .iter()
        .map(|&id| (id, sample_component(id, t)))
        .collect()
}

/// `PolyLE4` helper shared with the census.
pub(crate) fn quartic(coeffs: [C; 5]) -> PolyLE4<f64> {
    PolyLE4::new(coeffs.to_vec()).expect("leading coefficient is one")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::c;
    use crate::tracealg::trace_equation_residuals;

    #[test]
    fn parse_and_display() {
        for id in ComponentId::ALL {
            assert_eq!(id.name().parse::<ComponentId>().unwrap(), id);
            assert_eq!(id.pair().pair(), id);
        }
        assert_eq!(
            "x_{5,1}"
                .replace(['{', '}'], "")
                .parse::<ComponentId>()
                .unwrap(),
            ComponentId::X51
        );
        assert!("X7".parse::<ComponentId>().is_err());
    }

    #[test]
    fn x3_at_t2() {
        let s = sample_component(ComponentId::X3, real(2.0)).unwrap();
        assert_eq!(s.len(), 2);
        let r3 = 3f64.sqrt();
        for (smp, want) in s.iter().zip([c(2.5, r3 / 2.0), c(2.5, -r3 / 2.0)]) {
            let u = smp.param("u").unwrap();
            assert!((u - want).norm() < 1e-12 || (u - want.conj()).norm() < 1e-12);
            assert!((smp.vector.t123 - (u * 2.0 - 2.0)).norm() < 1e-12);
            assert!(smp.max_residual() <= SAMPLE_TOL);
        }
    }

    #[test]
    fn x51_at_t2_and_x61_at_t1() {
        let s = sample_component(ComponentId::X51, real(2.0)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(
            s[0].vector,
            V::from_real([2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0])
        );
        let s = sample_component(ComponentId::X61, real(1.0)).unwrap();
        assert_eq!(
            s[0].vector,
            V::from_real([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 2.0, 0.0, 2.0])
        );
    }

    #[test]
    fn every_component_samples_cleanly_at_t3() {
        let t = real(3.0);
        let mut total = 0;
        for id in ComponentId::ALL {
            let s = sample_component(id, t).unwrap();
            assert_eq!(s.len(), id.generic_count(), "{id}");
            for smp in &s {
                assert!(
                    smp.max_residual() <= SAMPLE_TOL,
                    "{id} {:e}",
                    smp.max_residual()
                );
                assert!(guard(id, &smp.vector, GUARD_MARGIN).is_ok(), "{id} guard");
                let tr = trace_equation_residuals(&smp.vector);
                let m = crate::numfield::max_normalized(&tr);
                assert!(m <= 1e-8, "{id} {} {m:e} {:?}", smp.branch, smp.params);
            }
            total += s.len();
        }
        assert_eq!(total, 26);
    }

    #[test]
    fn printed_x22_triple_order_fails_trace_equations() {
        let t = c(1.3, 0.2);
        for s in sample_component(ComponentId::X21, t).unwrap() {
            let alpha = s.param("alpha").unwrap();
            let z = s.param("z").unwrap();
            let g = s.param("gamma").unwrap();
            let a = t + t * z * g / alpha;
            let b = t + t * z.powi(3) / (alpha * g);
            let rotated = rotate(&s.vector);
            assert!((rotated.t123 - a).norm() < 1e-12 && (rotated.t134 - b).norm() < 1e-12);
            let printed = V {
                t123: b,
                t124: b,
                t134: a,
                t234: a,
                ..rotated
            };
            assert!(crate::numfield::max_normalized(&trace_equation_residuals(&printed)) > 1e-3);
        }
    }

    #[test]
    fn x11_triple_traces_match_unsimplified_solution() {
        let t = c(1.3, 0.2);
        for s in sample_component(ComponentId::X11, t).unwrap() {
            let alpha = s.param("alpha").unwrap();
            let mu = s.param("mu").unwrap();
            let x = s.param("x").unwrap();
            let v = s.vector;
            let base =
                (alpha / 2.0 + alpha.inv() - 1.0) * mu - alpha * alpha / 2.0 + alpha * 2.0 - 2.0;
            let half = mu / (alpha * 2.0) * (v.t12 - v.t23);
            assert!((v.t124 - t * (base + half)).norm() < 1e-10);
            assert!((v.t234 - t * (base - half)).norm() < 1e-10);
            // the shortened forms (1/a + 1) mu - 2 + mu x / a and mu^2 / a + ... do not solve the system
            let sp = (alpha.inv() + 1.0) * mu - 2.0 + mu / alpha * x;
            let sm = mu * mu / alpha + (alpha.inv() + 1.0) * mu - 2.0 - mu / alpha * x;
            let short = V {
                t124: t * sp,
                t234: t * sm,
                ..v
            };
            assert!(crate::numfield::max_normalized(&trace_equation_residuals(&short)) > 1e-3);
        }
    }

    #[test]
    fn sampler_refuses_excluded_t() {
        let err = sample_component(ComponentId::X11, real(5f64.sqrt() + 1e-4)).unwrap_err();
        assert!(matches!(err, Error::ExcludedParameter { .. }));
        assert!(sample_component(ComponentId::X3, real(-(5f64.sqrt()))).is_err());
        assert!(sample_component(ComponentId::X52, real(3f64.sqrt())).is_err());
        assert!(sample_component(ComponentId::X62, real(0.0)).is_err());
        assert!(sample_component(ComponentId::X4, real(0.0)).is_ok());
    }

    #[test]
    fn guard_detects_alpha_four() {
        // X11 at alpha = 4 collapses x12 and x34: the guard must fire
        let t: C = real(5f64.sqrt());
        let alpha = t * t - 1.0;
        let mus = solve_quadratic(
            C::one(),
            alpha * alpha - alpha * 4.0,
            alpha * alpha * 4.0 - alpha.powi(3),
        )
        .unwrap();
        let xs = solve_quadratic(C::one(), -mus[0], mus[0] * 2.0 / alpha + alpha - 4.0).unwrap();
        let s = x11_sample(t, alpha, mus[0], xs[0], 0);
        assert!(guard(ComponentId::X11, &s.vector, GUARD_MARGIN).is_err());
    }

    #[test]
    fn x4_fiber_at_zero() {
        let s = sample_component(ComponentId::X4, C::zero()).unwrap();
        assert_eq!(s.len(), 4);
        for smp in &s {
            assert!(smp.max_residual() <= SAMPLE_TOL);
        }
        let near = sample_component(ComponentId::X4, c(4e-4, 1e-4)).unwrap();
        assert_eq!(near.len(), 4);
        for smp in &near {
            assert!(smp.max_residual() <= SAMPLE_TOL, "{:e}", smp.max_residual());
        }
    }

    #[test]
    fn x4_vs_x3_negative_control() {
        for s in sample_component(ComponentId::X4, real(2.0)).unwrap() {
            assert!(max_normalized(&membership_residual(ComponentId::X3, &s.vector)) > 1e-3);
        }
    }

    #[test]
    fn sample_json_shape() {
        let s = &sample_component(ComponentId::X3, real(3.0)).unwrap()[0];
        let v: serde_json::Value = serde_json::to_value(s).unwrap();
        assert_eq!(v["id"], "X3");
        assert!(v["params"]["u"].is_array());
        assert!(v["vector"]["t134"].is_array());
        assert!(v["residuals"]["u-quadratic"].as_f64().unwrap() <= SAMPLE_TOL);
    }
}
