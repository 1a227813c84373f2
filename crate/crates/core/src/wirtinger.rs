//! The Wirtinger presentation of the 8_18 knot group and checks on quadruples.
//!
//! A quadruple `(x1, x2, x3, x4)` defines a representation exactly when the four
//! relator matrices `r_i = x_i x_{i+1} x_i^-1 x_{i-1} x_i` (indices mod 4) coincide.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat2::{has_common_eigenvector, Mat2};
use crate::reconstruct::Quadruple;

type M2 = Mat2<f64>;

pub const DEFAULT_REP_TOL: f64 = 1e-7;
const COMMUTE_TOL: f64 = 1e-9;
const FIG8_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelatorSet {
    pub r: [M2; 4],
}

impl RelatorSet {
    /// Largest entrywise distance between two relators, relative to `max(1, |r1|)`.
    pub fn spread(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                worst = worst.max(self.r[i].distance(&self.r[j]));
            }
        }
        worst / self.r[0].norm().max(1.0)
    }
}

fn idx(i: isize) -> usize {
    i.rem_euclid(4) as usize
}

pub fn relators(q: &Quadruple) -> RelatorSet {
    let xs = q.mats();
    let inv = q.elements().map(|x| *x.inverse().mat());
    let r = std::array::from_fn(|k| {
        let k = k as isize;
        xs[idx(k)] * xs[idx(k + 1)] * inv[idx(k)] * xs[idx(k - 1)] * xs[idx(k)]
    });
    RelatorSet { r }
}

/// `(residual <= tol, residual)` with the residual from [`RelatorSet::spread`].
pub fn is_representation(q: &Quadruple, tol: f64) -> (bool, f64) {
    let res = relators(q).spread();
    (res <= tol, res)
}

/// No common eigenvector among the four matrices.
pub fn is_irreducible(q: &Quadruple) -> bool {
    !has_common_eigenvector(&q.mats())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BraidLemmaReport {
    /// `|x_i - x_{i+1}|`.
    pub adjacent: f64,
    /// `|x_{i-1} - x_{i+2}|`.
    pub opposite: f64,
    /// `|tr(x_i x_{i-1}) - 1|`.
    pub trace_gap: f64,
}

impl BraidLemmaReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.adjacent <= tol && self.opposite <= tol && self.trace_gap <= tol
    }
}

/// For a representation where `x_i` and `x_{i+1}` commute: checks `x_i = x_{i+1}`,
/// `x_{i-1} = x_{i+2}` and `tr(x_i x_{i-1}) = 1`. `i` is in `1..=4`.
pub fn braid_lemma_check(q: &Quadruple, i: usize) -> Result<BraidLemmaReport> {
    if !(1..=4).contains(&i) {
        return Err(Error::PreconditionViolated(format!(
            "index {i} outside 1..=4"
        )));
    }
    let (ok, res) = is_representation(q, DEFAULT_REP_TOL);
    if !ok {
        return Err(Error::PreconditionViolated(format!(
            "not a representation ({res:.3e})"
        )));
    }
    if !is_irreducible(q) {
        return Err(Error::PreconditionViolated("quadruple is reducible".into()));
    }
    let xs = q.mats();
    let k = i as isize - 1;
    let (a, b) = (xs[idx(k)], xs[idx(k + 1)]);
    let scale = q.scale();
    let comm = a.commutator(&b).norm();
    if comm > COMMUTE_TOL * scale * scale {
        return Err(Error::PreconditionViolated(format!(
            "x{} and x{} do not commute ({comm:.3e})",
            i,
            idx(k + 1) + 1
        )));
    }
    let prev = xs[idx(k - 1)];
    let trace = (a * prev).trace();
    Ok(BraidLemmaReport {
        adjacent: a.distance(&b) / scale,
        opposite: prev.distance(&xs[idx(k + 2)]) / scale,
        trace_gap: (trace - Complex64::new(1.0, 0.0)).norm(),
    })
}

/// `|s1 s2 s1^-1 s2 s1 - s2 s1 s2^-1 s1 s2|` relative to the operand scale, the
/// figure-eight knot relator on `s1 = x1`, `s2 = x2`.
pub fn fig8_relator_residual(q: &Quadruple) -> f64 {
    let (s1, s2) = (*q.x(1).mat(), *q.x(2).mat());
    let (i1, i2) = (*q.x(1).inverse().mat(), *q.x(2).inverse().mat());
    let lhs = s1 * s2 * i1 * s2 * s1;
    let rhs = s2 * s1 * i2 * s1 * s2;
    lhs.distance(&rhs) / q.scale().powi(5)
}

/// Whether the representation factors through the figure-eight knot group via
/// `x1, x3 -> s1` and `x2, x4 -> s2`.
pub fn factors_through_fig8(q: &Quadruple) -> bool {
    let scale = q.scale();
    q.x(1).mat().distance(q.x(3).mat()) <= FIG8_TOL * scale
        && q.x(2).mat().distance(q.x(4).mat()) <= FIG8_TOL * scale
        && fig8_relator_residual(q) <= FIG8_TOL
}
