//! Random-start Gauss-Newton search for characters satisfying the full relation
//! battery at fixed `t`, used as a numerical completeness probe.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{max_normalized, membership_residual, ComponentId};
use crate::numfield::Residual;
use crate::reconstruct::realize_character;
use crate::tracealg::{residual_battery, s_from_t, t_from_s, TraceVector};
use crate::wirtinger::{is_irreducible, is_representation, DEFAULT_REP_TOL};

type C = Complex64;
type V = TraceVector<f64>;

const MAX_ITER: usize = 100;
const CONVERGED: f64 = 1e-9;
const COMPONENT_TOL: f64 = 1e-6;
/// Reducible characters are singular solutions, so Newton only reaches them to
/// about the square root of the residual tolerance.
const REDUCIBLE_TOL: f64 = 1e-4;
const FD_STEP: f64 = 1e-6;
const POLISH_ITER: usize = 40;
/// Converged points with all triple traces below this (relative) are re-solved on the planar chart.
const PLANAR_SWITCH: f64 = 1e-4;
/// Polishing stops once a step fails to shrink the residual by this factor.
const POLISH_RATIO: f64 = 0.9;
const MAX_HALVINGS: usize = 30;
const SVD_EPS: f64 = 1e-13;

/// Outcome of a local solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Refined {
    pub vector: V,
    pub iterations: usize,
    /// Largest normalized residual of the battery at `vector`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Component {
        id: ComponentId,
        residual: f64,
    },
    /// The character of a diagonal quadruple, or a realization with a common eigenvector.
    Reducible,
    /// Satisfies the trace-level conditions, but the realized relators differ.
    NotRepresentation {
        residual: f64,
    },
    /// Triple traces vanish and no pair pattern reproduces the vector.
    Unrealizable,
    /// An irreducible representation outside every component.
    Unclassified {
        membership: f64,
    },
}

impl Classification {
    pub fn label(&self) -> String {
        match self {
            Self::Component { id, .. } => id.name().to_string(),
            Self::Reducible => "reducible".into(),
            Self::NotRepresentation { .. } => "not_representation".into(),
            Self::Unrealizable => "unrealizable".into(),
            Self::Unclassified { .. } => "unclassified".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExploreFinding {
    pub attempt: u64,
    pub iterations: usize,
    pub residual: f64,
    pub vector: V,
    pub classification: Classification,
    /// For unclassified points: whether a perturbed restart returns to the same point.
    pub reproducible: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExploreReport {
    #[serde(serialize_with = "ser_c")]
    pub t: C,
    pub seed: u64,
    pub attempts: u64,
    pub converged: usize,
    pub findings: Vec<ExploreFinding>,
    pub histogram: Vec<(String, usize)>,
}

fn ser_c<S: serde::Serializer>(z: &C, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

impl ExploreReport {
    /// Converged points verified to be irreducible representations.
    pub fn irreducible_converged(&self) -> usize {
        self.findings
            .iter()
            .filter(|f| {
                matches!(
                    f.classification,
                    Classification::Component { .. } | Classification::Unclassified { .. }
                )
            })
            .count()
    }

    pub fn classified(&self) -> usize {
        self.findings
            .iter()
            .filter(|f| matches!(f.classification, Classification::Component { .. }))
            .count()
    }

    pub fn reproducible_unclassified(&self) -> Vec<&ExploreFinding> {
        self.findings
            .iter()
            .filter(|f| f.reproducible == Some(true))
            .collect()
    }
}

/// Worker count: `CHARVAR_THREADS` if set to a positive integer, else all cores.
pub fn worker_count() -> usize {
    std::env::var("CHARVAR_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Coordinates the solver moves in, with `t` held fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Chart {
    /// All ten coordinates.
    Full,
    /// The six pair traces, with every `s_ijk` pinned to zero.
    Planar,
}

impl Chart {
    fn dim(self) -> usize {
        match self {
            Self::Full => 10,
            Self::Planar => 6,
        }
    }

    fn coords(self, v: &V) -> Vec<C> {
        let a = v.to_array();
        a[1..1 + self.dim()].to_vec()
    }

    fn vector(self, t: C, w: &[C]) -> V {
        let mut a = [t; 11];
        match self {
            Self::Full => a[1..].copy_from_slice(w),
            Self::Planar => {
                a[1..7].copy_from_slice(w);
                let mut s = s_from_t(&V::from_array(a));
                s.s123 = C::zero();
                s.s124 = C::zero();
                s.s134 = C::zero();
                s.s234 = C::zero();
                return t_from_s(&s, t).expect("s0 computed from t");
            }
        }
        V::from_array(a)
    }
}

fn weighted_norm(rs: &[Residual<f64>], weights: &[f64]) -> f64 {
    rs.iter()
        .zip(weights)
        .map(|(r, w)| r.value.norm_sqr() * w * w)
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
fn max_normalized_battery(v: &V) -> f64 {
    residual_battery(v)
        .iter()
        .map(Residual::normalized)
        .fold(0.0, f64::max)
}

/// Damped Gauss-Newton on the residual battery with `t` held fixed.
///
/// After the residual first drops below the convergence threshold the iteration
/// continues while it keeps shrinking. Solutions with vanishing triple traces are
/// singular for the full system, so those are re-solved with the triple traces
/// pinned to zero, where they are typically regular.
pub fn newton_refine(start: &V) -> Option<Refined> {
    let full = solve(Chart::Full, start)?;
    let s = s_from_t(&full.vector);
    let scale = s.s0.norm().max(1.0);
    if s.triples()
        .iter()
        .all(|z| z.norm() <= PLANAR_SWITCH * scale.powf(1.5))
    {
        if let Some(planar) = solve(Chart::Planar, &full.vector) {
            if planar.vector.distance(&full.vector) <= PLANAR_SWITCH * full.vector.norm().max(1.0) {
                return Some(Refined {
                    iterations: full.iterations + planar.iterations,
                    ..planar
                });
            }
        }
    }
    Some(full)
}

fn solve(chart: Chart, start: &V) -> Option<Refined> {
    let t = start.t;
    let mut w = chart.coords(start);
    let mut converged_at: Option<usize> = None;
    let mut best = f64::INFINITY;
    for iter in 0..=MAX_ITER + POLISH_ITER {
        let v = chart.vector(t, &w);
        let rs = residual_battery(&v);
        let res = rs.iter().map(Residual::normalized).fold(0.0, f64::max);
        if !res.is_finite() {
            return None;
        }
        if converged_at.is_none() && res <= CONVERGED {
            converged_at = Some(iter);
        }
        let done = Refined {
            vector: v,
            iterations: iter,
            residual: res,
        };
        if let Some(first) = converged_at {
            if res >= POLISH_RATIO * best || iter - first >= POLISH_ITER || res == 0.0 {
                return Some(done);
            }
        } else if iter >= MAX_ITER {
            return None;
        }
        best = best.min(res);
        match gauss_newton_step(chart, t, &w, &rs) {
            Some(next) => w = next,
            None => return converged_at.map(|_| done),
        }
    }
    None
}

fn gauss_newton_step(chart: Chart, t: C, w: &[C], rs: &[Residual<f64>]) -> Option<Vec<C>> {
    let battery = |w: &[C]| residual_battery(&chart.vector(t, w));
    // row weights frozen at the current point
    let weights: Vec<f64> = rs.iter().map(|r| 1.0 / r.scale.max(1.0)).collect();
    let (m, n) = (rs.len(), w.len());
    let mut jac = DMatrix::<C>::zeros(m, n);
    for j in 0..n {
        let h = FD_STEP * w[j].norm().max(1.0);
        let mut wp = w.to_vec();
        let mut wm = w.to_vec();
        wp[j] += h;
        wm[j] -= h;
        let (rp, rm) = (battery(&wp), battery(&wm));
        for i in 0..m {
            jac[(i, j)] = (rp[i].value - rm[i].value) / (2.0 * h) * weights[i];
        }
    }
    let rhs = DVector::<C>::from_iterator(m, rs.iter().zip(&weights).map(|(r, wt)| -r.value * *wt));
    let step = jac.svd(true, true).solve(&rhs, SVD_EPS).ok()?;
    let base = weighted_norm(rs, &weights);
    let mut lambda = 1.0;
    for _ in 0..MAX_HALVINGS {
        let trial: Vec<C> = w
            .iter()
            .zip(step.iter())
            .map(|(a, d)| a + d * lambda)
            .collect();
        let norm = weighted_norm(&battery(&trial), &weights);
        if norm.is_finite() && norm < base {
            return Some(trial);
        }
        lambda *= 0.5;
    }
    None
}

/// Character of a diagonal quadruple `diag(k^e_i, k^-e_i)`: `s_ij = e_i e_j s0` for a
/// sign vector `e`, which forces every `s_ijk` to vanish.
pub fn is_reducible_character(v: &V, tol: f64) -> bool {
    let s = s_from_t(v);
    let scale = s.s0.norm().max(1.0);
    let signs: [f64; 4] = std::array::from_fn(|k| {
        if k == 0 || (s.pair(1, k + 1) - s.s0).norm() <= (s.pair(1, k + 1) + s.s0).norm() {
            1.0
        } else {
            -1.0
        }
    });
    let pairs_ok = (1..=4).all(|i| {
        (i + 1..=4)
            .all(|j| (s.pair(i, j) - s.s0 * signs[i - 1] * signs[j - 1]).norm() <= tol * scale)
    });
    pairs_ok
        && s.triples()
            .iter()
            .all(|z| z.norm() <= tol * scale.powf(1.5))
}

#[cfg(test)]
fn abelian(t: C) -> V {
    let q = t * t - 2.0;
    let cube = t * t * t - t * 3.0;
    V {
        t,
        t12: q,
        t23: q,
        t34: q,
        t14: q,
        t13: q,
        t24: q,
        t123: cube,
        t124: cube,
        t134: cube,
        t234: cube,
    }
}

/// Closest component by membership residual, if within tolerance.
pub fn best_component(v: &V) -> (ComponentId, f64) {
    ComponentId::ALL
        .iter()
        .map(|&id| (id, max_normalized(&membership_residual(id, v))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("ten components")
}

pub fn classify(v: &V) -> Classification {
    let (id, residual) = best_component(v);
    if residual <= COMPONENT_TOL {
        return Classification::Component { id, residual };
    }
    if is_reducible_character(v, REDUCIBLE_TOL) {
        return Classification::Reducible;
    }
    let Ok(q) = realize_character(v) else {
        return Classification::Unrealizable;
    };
    let (ok, rep_res) = is_representation(&q, DEFAULT_REP_TOL);
    if !ok {
        return Classification::NotRepresentation { residual: rep_res };
    }
    if !is_irreducible(&q) {
        return Classification::Reducible;
    }
    Classification::Unclassified {
        membership: residual,
    }
}

fn random_start(t: C, rng: &mut ChaCha8Rng) -> V {
    // log-uniform moduli up to the size of the largest component coordinates
    let hi = (10.0 * t.norm().max(1.0).powi(3)).ln();
    let lo = 0.1f64.ln();
    let mut a = [t; 11];
    for z in a.iter_mut().skip(1) {
        let r = rng.gen_range(lo..hi).exp();
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        *z = C::from_polar(r, theta);
    }
    V::from_array(a)
}

fn is_reproducible(found: &V, rng: &mut ChaCha8Rng) -> bool {
    let mut a = found.to_array();
    for z in a.iter_mut().skip(1) {
        let scale = 1e-6 * z.norm().max(1.0);
        *z += C::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
    }
    match newton_refine(&V::from_array(a)) {
        Some(r) => {
            r.vector.distance(found) <= 1e-6 * found.norm().max(1.0)
                && matches!(classify(&r.vector), Classification::Unclassified { .. })
        }
        None => false,
    }
}

fn run_attempt(t: C, seed: u64, attempt: u64) -> Option<ExploreFinding> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt);
    let start = random_start(t, &mut rng);
    let refined = newton_refine(&start)?;
    let classification = classify(&refined.vector);
    let reproducible = matches!(classification, Classification::Unclassified { .. })
        .then(|| is_reproducible(&refined.vector, &mut rng));
    Some(ExploreFinding {
        attempt,
        iterations: refined.iterations,
        residual: refined.residual,
        vector: refined.vector,
        classification,
        reproducible,
    })
}

/// Runs `attempts` random starts at `t` on a pool of [`worker_count`] threads.
///
/// Findings are ordered by attempt index, so the report depends only on
/// `(t, seed, attempts)`.
pub fn explore_solve(t: C, seed: u64, attempts: u64) -> ExploreReport {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .expect("thread pool");
    let mut findings: Vec<ExploreFinding> = pool.install(|| {
        (0..attempts)
            .into_par_iter()
            .filter_map(|a| run_attempt(t, seed, a))
            .collect()
    });
    findings.sort_by_key(|f| f.attempt);
    let mut histogram: Vec<(String, usize)> = Vec::new();
    for f in &findings {
        let label = f.classification.label();
        match histogram.iter_mut().find(|(l, _)| *l == label) {
            Some((_, n)) => *n += 1,
            None => histogram.push((label, 1)),
        }
    }
    histogram.sort();
    ExploreReport {
        t,
        seed,
        attempts,
        converged: findings.len(),
        findings,
        histogram,
    }
}
