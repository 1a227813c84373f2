//! Matrix realizations of trace data.
//!
//! A generic character is realized by building three traceless parts with a
//! prescribed Gram matrix and triple trace, then solving for the fourth. Characters
//! whose four triple traces all vanish have coplanar traceless parts; they are
//! realized from a single pair, first by the known component patterns and then by
//! solving for each remaining generator in the plane of the pair.

use nalgebra::Matrix3;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{GtElement, Mat2, TracelessMat2};
use crate::numfield::{c, real, solve_quadratic};
use crate::tracealg::{s_from_t, trace_vector_of, type_ii_residuals, SCoords, TraceVector};

type C = Complex64;
type M2 = Mat2<f64>;

const SMALL_S123: f64 = 1e-9;
const CONSTRAINT_TOL: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-10;
const EXTEND_TOL: f64 = 1e-8;
const ROLE_THRESHOLD: f64 = 1e-7;
const REALIZE_TOL: f64 = 1e-8;
const ELEMENT_TOL: f64 = 1e-10;
const BALANCE_ROUNDS: usize = 30;
const BALANCE_TOL: f64 = 1e-6;

/// Four elements of `G(t)` sharing the trace `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadruple {
    xs: [GtElement<f64>; 4],
}

impl Quadruple {
    pub fn new(xs: [GtElement<f64>; 4]) -> Result<Self> {
        let t = xs[0].t();
        let tol = ELEMENT_TOL * t.norm().max(1.0);
        if xs.iter().any(|x| (x.t() - t).norm() > tol) {
            return Err(Error::TraceMismatch);
        }
        Ok(Self { xs })
    }

    pub fn from_mats(ms: [M2; 4]) -> Result<Self> {
        let xs = [
            GtElement::new(ms[0])?,
            GtElement::new(ms[1])?,
            GtElement::new(ms[2])?,
            GtElement::new(ms[3])?,
        ];
        Self::new(xs)
    }

    pub fn t(&self) -> C {
        self.xs[0].t()
    }

    /// `x_i` for `i` in `1..=4`.
    pub fn x(&self, i: usize) -> &GtElement<f64> {
        &self.xs[i - 1]
    }

    pub fn elements(&self) -> &[GtElement<f64>; 4] {
        &self.xs
    }

    pub fn mats(&self) -> [M2; 4] {
        self.xs.map(|x| *x.mat())
    }

    pub fn trace_vector(&self) -> TraceVector<f64> {
        trace_vector_of(&self.mats()).expect("quadruple shares a trace by construction")
    }

    /// `g x_i g^-1` for each `i`.
    pub fn conjugate(&self, g: &M2) -> Result<Self> {
        let g_inv = g.inverse()?;
        Ok(Self {
            xs: self.xs.map(|x| x.conjugate_by(g, &g_inv)),
        })
    }

    pub fn scale(&self) -> f64 {
        self.xs.iter().map(|x| x.mat().norm()).fold(1.0, f64::max)
    }

    /// Conjugate minimizing `sum |x_i|^2` over positive Hermitian conjugators.
    ///
    /// The objective is convex along `exp(s H)` for Hermitian `H`; each round does
    /// a line search along the negative gradient `-sum (x x^* - x^* x)`.
    pub fn balanced(&self) -> Self {
        let mut cur = *self;
        let energy = |q: &Self| q.xs.iter().map(|x| x.mat().norm().powi(2)).sum::<f64>();
        for _ in 0..BALANCE_ROUNDS {
            let f0 = energy(&cur);
            let grad = cur.xs.iter().fold(M2::zero(), |acc, x| {
                let (m, h) = (*x.mat(), x.mat().adjoint());
                acc + m * h - h * m
            });
            let gnorm = grad.norm();
            if gnorm <= BALANCE_TOL * f0 {
                break;
            }
            let dir = grad * C::new(-1.0 / gnorm, 0.0);
            let at = |s: f64| {
                cur.conjugate(&hermitian_exp(&dir, s))
                    .map(|q| (energy(&q), q))
                    .ok()
            };
            let mut hi = 1.0;
            while hi < 64.0 && at(hi).is_some_and(|(f, _)| f < f0) {
                hi *= 2.0;
            }
            // golden-section search on [0, hi]
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let (mut a, mut b) = (0.0, hi);
            for _ in 0..60 {
                let (c1, c2) = (b - g * (b - a), a + g * (b - a));
                let f1 = at(c1).map_or(f64::INFINITY, |r| r.0);
                let f2 = at(c2).map_or(f64::INFINITY, |r| r.0);
                if f1 < f2 {
                    b = c2;
                } else {
                    a = c1;
                }
            }
            match at(0.5 * (a + b)) {
                Some((f, q)) if f < f0 => cur = q,
                _ => break,
            }
        }
        cur
    }
}

/// `exp(s H)` for traceless `H` with `H^2 = mu^2 e`.
fn hermitian_exp(h: &M2, s: f64) -> M2 {
    let mu = (-h.det()).sqrt();
    let shifted = s * mu;
    let sinh_over = if mu.norm() < 1e-300 {
        C::new(s, 0.0)
    } else {
        shifted.sinh() / mu
    };
    M2::scalar(shifted.cosh()) + *h * sinh_over
}

#[derive(Serialize, Deserialize)]
struct QuadrupleJson {
    t: [f64; 2],
    matrices: [[[f64; 2]; 4]; 4],
}

impl Serialize for Quadruple {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let pair = |z: C| [z.re, z.im];
        QuadrupleJson {
            t: pair(self.t()),
            matrices: self.mats().map(|m| m.entries().map(pair)),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Quadruple {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let raw = QuadrupleJson::deserialize(deserializer)?;
        let ms = raw.matrices.map(|e| {
            let z = |p: [f64; 2]| C::new(p[0], p[1]);
            M2::new(z(e[0]), z(e[1]), z(e[2]), z(e[3]))
        });
        Quadruple::from_mats(ms).map_err(serde::de::Error::custom)
    }
}

/// The fixed basis of traceless matrices used for realizations.
///
/// `e1 = [[1,0],[0,-1]]`, `e2 = [[0,1],[1,0]]`, `e3 = [[0,1],[-1,0]]`, with
/// `tr(e_i e_j) = diag(2, 2, -2)` and `tr(e1 e2 e3) = -2`.
#[derive(Clone, Copy, Debug)]
pub struct TracelessBasis {
    pub e: [M2; 3],
}

impl Default for TracelessBasis {
    fn default() -> Self {
        Self::standard()
    }
}

impl TracelessBasis {
    pub fn standard() -> Self {
        Self {
            e: [
                M2::from_real(1.0, 0.0, 0.0, -1.0),
                M2::from_real(0.0, 1.0, 1.0, 0.0),
                M2::from_real(0.0, 1.0, -1.0, 0.0),
            ],
        }
    }

    pub const GRAM: [f64; 3] = [2.0, 2.0, -2.0];

    /// `sum_k coeffs[k] e_k`.
    pub fn combine(&self, coeffs: [C; 3]) -> M2 {
        self.e[0] * coeffs[0] + self.e[1] * coeffs[1] + self.e[2] * coeffs[2]
    }
}

fn max_abs3(s: &Matrix3<C>) -> f64 {
    s.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `M` with `M^T M = S` via `L D L^T` with diagonal pivoting, or `None` when every
/// remaining pivot is negligible.
fn ldlt_root(s: &Matrix3<C>) -> Option<Matrix3<C>> {
    let thr = PIVOT_TOL * max_abs3(s);
    let mut a = *s;
    let mut l = Matrix3::<C>::identity();
    let mut d = [C::zero(); 3];
    let mut perm = [0usize, 1, 2];
    for k in 0..3 {
        let p = (k..3).max_by(|&i, &j| a[(i, i)].norm().total_cmp(&a[(j, j)].norm()))?;
        if !(a[(p, p)].norm() > thr) {
            return None;
        }
        if p != k {
            a.swap_rows(k, p);
            a.swap_columns(k, p);
            perm.swap(k, p);
            for j in 0..k {
                let tmp = l[(k, j)];
                l[(k, j)] = l[(p, j)];
                l[(p, j)] = tmp;
            }
        }
        d[k] = a[(k, k)];
        for i in k + 1..3 {
            l[(i, k)] = a[(i, k)] / d[k];
        }
        for i in k + 1..3 {
            for j in k + 1..3 {
                a[(i, j)] -= l[(i, k)] * d[k] * l[(j, k)];
            }
        }
    }
    let mut m = Matrix3::<C>::zeros();
    for r in 0..3 {
        let root = d[r].sqrt();
        for k in 0..3 {
            m[(r, perm[k])] = root * l[(k, r)];
        }
    }
    Some(m)
}

fn congruences() -> [Matrix3<C>; 3] {
    let (o, z, i) = (C::one(), C::zero(), C::i());
    [
        Matrix3::new(o, z, o, o, o, z, z, o, o),
        Matrix3::new(o, i, z, z, o, i, i, z, o),
        Matrix3::new(o, o, o, z, o, o, o, z, o),
    ]
}

/// Factors a complex symmetric `S` as `M^T M`.
///
/// Pivoted `L D L^T` first; if all pivots vanish (every diagonal zero, as at
/// `t = +-2`), factor `G^T S G` for a fixed invertible `G` and undo the congruence.
pub fn symmetric_root(s: &Matrix3<C>) -> Result<Matrix3<C>> {
    if let Some(m) = ldlt_root(s) {
        return Ok(m);
    }
    for g in congruences() {
        let Some(g_inv) = g.try_inverse() else {
            continue;
        };
        let shifted = g.transpose() * s * g;
        if let Some(m) = ldlt_root(&shifted) {
            return Ok(m * g_inv);
        }
    }
    Err(Error::FactorizationFailure)
}

/// Realizes `(x1, x2, x3)` in `G(t)` with Gram matrix `gram` of traceless parts and
/// `tr(u1 u2 u3) = s123`.
pub fn realize_triple(t: C, gram: &[[C; 3]; 3], s123: C) -> Result<[GtElement<f64>; 3]> {
    if !(s123.norm() > SMALL_S123) {
        return Err(Error::SmallS123(s123.norm()));
    }
    let s = Matrix3::from_fn(|i, j| gram[i][j]);
    let s0 = t * t * 0.5 - 2.0;
    let diag_tol = CONSTRAINT_TOL * s0.norm().max(1.0);
    if (0..3).any(|i| (s[(i, i)] - s0).norm() > diag_tol) {
        return Err(Error::PreconditionViolated(
            "Gram diagonal differs from s0".into(),
        ));
    }
    let det = s.determinant();
    let scale = (2.0 * s123.norm_sqr()).max(max_abs3(&s).powi(3)).max(1.0);
    let constraint = (s123 * s123 * 2.0 + det).norm();
    if constraint > CONSTRAINT_TOL * scale {
        return Err(Error::ConstraintViolated(constraint / scale));
    }

    let m = symmetric_root(&s)?;
    let n_inv = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()].map(real::<f64>);
    let mut a = m;
    for j in 0..3 {
        a[(0, j)] *= n_inv[0];
        a[(1, j)] *= n_inv[1];
        a[(2, j)] /= c::<f64>(0.0, 2f64.sqrt());
    }
    // tr(u1 u2 u3) = -2 det(A); the two signs of A give opposite triple traces
    let achieved = a.determinant() * -2.0;
    if (achieved + s123).norm() < (achieved - s123).norm() {
        a = -a;
    }

    let basis = TracelessBasis::standard();
    let half = Mat2::scalar(t * 0.5);
    let build = |col: usize| -> Result<GtElement<f64>> {
        let u = basis.combine([a[(0, col)], a[(1, col)], a[(2, col)]]);
        GtElement::new(u + half)
    };
    Ok([build(0)?, build(1)?, build(2)?])
}

/// Solves for `x4` given a realized triple and the coordinates involving index 4.
///
/// `s` carries all targets; its `s123` must be the triple trace of `triple`.
pub fn extend_to_quadruple(
    triple: &[GtElement<f64>; 3],
    s: &SCoords<f64>,
) -> Result<GtElement<f64>> {
    let t = triple[0].t();
    if !(s.s123.norm() > SMALL_S123) {
        return Err(Error::SmallS123(s.s123.norm()));
    }
    let residuals = type_ii_residuals(s);
    let worst = residuals[..3]
        .iter()
        .map(|r| r.normalized())
        .fold(0.0, f64::max);
    if worst > EXTEND_TOL {
        return Err(Error::TypeIIViolated(worst));
    }
    let u: Vec<TracelessMat2<f64>> = triple.iter().map(|x| x.mat().traceless_part()).collect();
    let u4 = TracelessMat2::combine(&[
        (s.s234 / s.s123, &u[0]),
        (-s.s134 / s.s123, &u[1]),
        (s.s124 / s.s123, &u[2]),
    ]);
    let s44 = u4.pairing(&u4);
    let gap = (s44 - s.s0).norm() / s.s0.norm().max(s44.norm()).max(1.0);
    if gap > EXTEND_TOL {
        return Err(Error::S44Mismatch(gap));
    }
    GtElement::from_traceless(&u4, t)
}

/// `x1 = [[k, 1], [0, 1/k]]`, `x2 = [[k, 0], [c, 1/k]]` with `k + 1/k = t` and
/// `tr(x1 x2) = target`.
pub fn realize_pair(t: C, target: C) -> (GtElement<f64>, GtElement<f64>) {
    let [k, k_inv] = solve_quadratic(C::one(), -t, C::one()).expect("monic quadratic");
    let cc = target - t * t + 2.0;
    let x1 = M2::new(k, C::one(), C::zero(), k_inv);
    let x2 = M2::new(k, C::zero(), cc, k_inv);
    (
        GtElement::new(x1).expect("det is k * (1/k) = 1"),
        GtElement::new(x2).expect("det is k * (1/k) = 1"),
    )
}

/// How one generator is expressed in terms of a base pair `(p, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Word {
    P,
    PInv,
    Q,
    QInv,
}

/// Degenerate patterns: `(partner of x1, words for the other two indices)`.
fn degenerate_patterns() -> Vec<(usize, [Word; 2])> {
    use Word::*;
    // x1 = x3, x2 = x4 ; x2 = x3, x4 = x1 ; x2 = x1, x4 = x3 ; x3 = x1^-1, x4 = x2^-1
    let mut out = vec![(2, [P, Q]), (2, [Q, P]), (3, [P, Q]), (2, [PInv, QInv])];
    let words = [P, PInv, Q, QInv];
    for partner in 2..=4 {
        for w1 in words {
            for w2 in words {
                let cand = (partner, [w1, w2]);
                if !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
    }
    out
}

fn try_degenerate(v: &TraceVector<f64>, tol: f64) -> Option<Quadruple> {
    let t = v.t;
    for (partner, words) in degenerate_patterns() {
        let (p, q) = realize_pair(t, v.pair(1, partner));
        let pick = |w: Word| match w {
            Word::P => p,
            Word::PInv => p.inverse(),
            Word::Q => q,
            Word::QInv => q.inverse(),
        };
        let others: Vec<usize> = (2..=4).filter(|&i| i != partner).collect();
        let mut xs = [p; 4];
        xs[partner - 1] = q;
        xs[others[0] - 1] = pick(words[0]);
        xs[others[1] - 1] = pick(words[1]);
        let Ok(quad) = Quadruple::new(xs) else {
            continue;
        };
        if quad.trace_vector().distance(v) <= tol {
            return Some(quad);
        }
    }
    None
}

/// All traceless parts in the plane of a nondegenerate pair `(x_i, x_j)`: every other
/// `u_k` is the combination of `u_i, u_j` with the prescribed pairings.
fn try_planar(v: &TraceVector<f64>, s: &SCoords<f64>, tol: f64) -> Option<Quadruple> {
    let t = v.t;
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for i in 1..=4 {
        for j in i + 1..=4 {
            let sij = s.pair(i, j);
            pairs.push((i, j, (s.s0 * s.s0 - sij * sij).norm()));
        }
    }
    pairs.sort_by(|a, b| b.2.total_cmp(&a.2));
    let floor = PIVOT_TOL * s.s0.norm().max(1.0).powi(2);
    for (i, j, gap) in pairs {
        if gap <= floor {
            break;
        }
        let (xi, xj) = realize_pair(t, v.pair(i, j));
        let (ui, uj) = (xi.mat().traceless_part(), xj.mat().traceless_part());
        let sij = s.pair(i, j);
        let det = s.s0 * s.s0 - sij * sij;
        let mut xs = [xi; 4];
        xs[j - 1] = xj;
        let mut ok = true;
        for k in (1..=4).filter(|&k| k != i && k != j) {
            let (sik, sjk) = (s.pair(i, k), s.pair(j, k));
            let a = (s.s0 * sik - sij * sjk) / det;
            let b = (s.s0 * sjk - sij * sik) / det;
            let uk = TracelessMat2::combine(&[(a, &ui), (b, &uj)]);
            match GtElement::from_traceless(&uk, t) {
                Ok(x) => xs[k - 1] = x,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        if let Ok(quad) = Quadruple::new(xs) {
            if quad.trace_vector().distance(v) <= tol {
                return Some(quad);
            }
        }
    }
    None
}

fn realize_role(v: &TraceVector<f64>, s: &SCoords<f64>, role: [usize; 4]) -> Result<Quadruple> {
    let r = s.relabel(role);
    let gram = [
        [r.s0, r.s12, r.s13],
        [r.s12, r.s0, r.s23],
        [r.s13, r.s23, r.s0],
    ];
    let triple = realize_triple(v.t, &gram, r.s123)?;
    let x4 = extend_to_quadruple(&triple, &r)?;
    let ys = [triple[0], triple[1], triple[2], x4];
    let mut xs = ys;
    for (slot, &orig) in role.iter().enumerate() {
        xs[orig - 1] = ys[slot];
    }
    Quadruple::new(xs)
}

/// Index roles: the first three entries form the realized triple, the last is solved for.
const ROLES: [[usize; 4]; 4] = [[1, 2, 3, 4], [1, 2, 4, 3], [1, 3, 4, 2], [2, 3, 4, 1]];

/// Balanced form of `q` when it still matches `v` within `tol`.
fn balance_within(q: Quadruple, v: &TraceVector<f64>, tol: f64) -> Quadruple {
    let b = q.balanced();
    if b.trace_vector().distance(v) <= tol {
        b
    } else {
        q
    }
}

/// Realizes an irreducible character as a quadruple whose traces reproduce `v`.
pub fn realize_character(v: &TraceVector<f64>) -> Result<Quadruple> {
    if !v.is_finite() {
        return Err(Error::NonFinite("trace vector"));
    }
    let s = s_from_t(v);
    let tol = REALIZE_TOL * v.norm().max(1.0);
    let mut last_err = None;
    for (role, s_role) in ROLES.iter().zip(s.triples()) {
        if s_role.norm() <= ROLE_THRESHOLD {
            continue;
        }
        match realize_role(v, &s, *role) {
            Ok(q) => {
                let dev = q.trace_vector().distance(v);
                if dev <= tol {
                    return Ok(balance_within(q, v, tol));
                }
                last_err = Some(Error::DegenerateCharacter(format!(
                    "role {role:?} realized with trace deviation {dev:.3e}"
                )));
            }
            Err(e) => last_err = Some(e),
        }
    }
    if s.triples().iter().all(|z| z.norm() <= ROLE_THRESHOLD) {
        return try_degenerate(v, tol)
            .or_else(|| try_planar(v, &s, tol))
            .map(|q| balance_within(q, v, tol))
            .ok_or_else(|| {
                Error::DegenerateCharacter(
                    "all triple traces vanish and no planar realization fits".into(),
                )
            });
    }
    Err(last_err
        .unwrap_or_else(|| Error::DegenerateCharacter("no realization strategy applies".into())))
}
