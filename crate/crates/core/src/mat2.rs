//! 2x2 complex matrices and the trace identities of `SL(2,C)`.
//!
//! Everything here works over `Complex<T>` for any [`Real`] `T`. Tolerances are
//! relative to `max(1, largest entry magnitude involved)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numfield::{csqrt, real, Real};

const SCALAR_TOL: f64 = 1e-12;
const EIGEN_ANGLE_TOL: f64 = 1e-8;
const SINGULAR_EPS: f64 = 1e-14;
const TRACELESS_TOL: f64 = 1e-12;
const DET_TOL: f64 = 1e-10;
const PAIR_TOL: f64 = 1e-9;

/// Row-major 2x2 complex matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2<T: Real> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Real> Mat2<T> {
    #[inline]
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(real(a), real(b), real(c), real(d))
    }

    pub fn identity() -> Self {
        Self::scalar(Complex::one())
    }

    pub fn zero() -> Self {
        Self::scalar(Complex::zero())
    }

    pub fn scalar(k: Complex<T>) -> Self {
        Self::new(k, Complex::zero(), Complex::zero(), k)
    }

    #[inline]
    pub fn trace(&self) -> Complex<T> {
        self.a + self.d
    }

    #[inline]
    pub fn det(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    /// Classical adjoint; `x + adj(x) = tr(x) e`.
    pub fn adjugate(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        let scale = self.norm().max(T::one());
        if !(det.norm() > T::lit(SINGULAR_EPS) * scale * scale) {
            return Err(Error::SingularMatrix);
        }
        Ok(self.adjugate() * det.inv())
    }

    /// Largest entry magnitude.
    pub fn norm(&self) -> T {
        self.entries()
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    pub fn entries(&self) -> [Complex<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    /// `x - (tr(x)/2) e`.
    pub fn traceless_part(&self) -> TracelessMat2<T> {
        let h = self.trace() * T::lit(0.5);
        TracelessMat2(Self::new(self.a - h, self.b, self.c, self.d - h))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entrywise distance.
    pub fn distance(&self, other: &Self) -> T {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.entries()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn is_scalar(&self) -> bool {
        let tol = T::lit(SCALAR_TOL) * self.norm();
        self.b.norm() <= tol && self.c.norm() <= tol && (self.a - self.d).norm() <= tol
    }

    pub fn apply(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, y: Self) -> Self {
        Self::new(
            self.a * y.a + self.b * y.c,
            self.a * y.b + self.b * y.d,
            self.c * y.a + self.d * y.c,
            self.c * y.b + self.d * y.d,
        )
    }
}

impl<T: Real> Mul<Complex<T>> for Mat2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, k: Complex<T>) -> Self {
        Self::new(self.a * k, self.b * k, self.c * k, self.d * k)
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    #[inline]
    fn add(self, y: Self) -> Self {
        Self::new(self.a + y.a, self.b + y.b, self.c + y.c, self.d + y.d)
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, y: Self) -> Self {
        Self::new(self.a - y.a, self.b - y.b, self.c - y.c, self.d - y.d)
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }
}

/// A trace-free 2x2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracelessMat2<T: Real>(Mat2<T>);

impl<T: Real> TracelessMat2<T> {
    pub fn new(m: Mat2<T>) -> Result<Self> {
        if m.trace().norm() > T::lit(TRACELESS_TOL) * m.norm().max(T::one()) {
            return Err(Error::PreconditionViolated(format!(
                "matrix is not traceless (|tr| = {:e})",
                m.trace().norm()
            )));
        }
        Ok(Self(m))
    }

    pub fn mat(&self) -> &Mat2<T> {
        &self.0
    }

    pub fn into_mat(self) -> Mat2<T> {
        self.0
    }

    /// Linear combination `sum k_i u_i`, which stays traceless.
    pub fn combine(terms: &[(Complex<T>, &TracelessMat2<T>)]) -> Self {
        Self(
            terms
                .iter()
                .fold(Mat2::zero(), |acc, (k, u)| acc + u.0 * *k),
        )
    }

    /// `tr(u v)`, the symmetric bilinear form on traceless matrices.
    pub fn pairing(&self, other: &Self) -> Complex<T> {
        (self.0 * other.0).trace()
    }
}

/// An element of `G(t) = { x in SL(2,C) : tr(x) = t }`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GtElement<T: Real> {
    m: Mat2<T>,
}

impl<T: Real> GtElement<T> {
    pub fn new(m: Mat2<T>) -> Result<Self> {
        let scale = m.norm().max(T::one());
        if (m.det() - Complex::one()).norm() > T::lit(DET_TOL) * scale * scale {
            return Err(Error::PreconditionViolated(format!(
                "det = {} is not 1",
                m.det()
            )));
        }
        Ok(Self { m })
    }

    /// `u + (t/2) e` for traceless `u` with `det(u) = 1 - t^2/4`.
    pub fn from_traceless(u: &TracelessMat2<T>, t: Complex<T>) -> Result<Self> {
        Self::new(*u.mat() + Mat2::scalar(t * T::lit(0.5)))
    }

    pub fn mat(&self) -> &Mat2<T> {
        &self.m
    }

    pub fn t(&self) -> Complex<T> {
        self.m.trace()
    }

    /// `t e - x`, valid because `det x = 1`.
    pub fn inverse(&self) -> Self {
        Self {
            m: Mat2::scalar(self.t()) - self.m,
        }
    }

    pub fn conjugate_by(&self, g: &Mat2<T>, g_inv: &Mat2<T>) -> Self {
        Self {
            m: *g * self.m * *g_inv,
        }
    }
}

/// `x^2 - t x + e` (Cayley-Hamilton).
pub fn ch_residual<T: Real>(x: &GtElement<T>) -> Mat2<T> {
    let m = *x.mat();
    m * m - m * x.t() + Mat2::identity()
}

/// `x y x - (tr(xy) x + y - t e)`.
pub fn xyx_expand<T: Real>(x: &GtElement<T>, y: &GtElement<T>) -> Mat2<T> {
    let (mx, my) = (*x.mat(), *y.mat());
    let txy = (mx * my).trace();
    mx * my * mx - (mx * txy + my - Mat2::scalar(x.t()))
}

/// `u v + v u - tr(u v) e`.
pub fn anticommutator_residual<T: Real>(u: &TracelessMat2<T>, v: &TracelessMat2<T>) -> Mat2<T> {
    let (mu, mv) = (*u.mat(), *v.mat());
    mu * mv + mv * mu - Mat2::scalar(u.pairing(v))
}

/// `tr(u v w)`: alternating and trilinear; vanishes iff `u, v, w` are dependent.
pub fn triple_trace<T: Real>(
    u: &TracelessMat2<T>,
    v: &TracelessMat2<T>,
    w: &TracelessMat2<T>,
) -> Complex<T> {
    (*u.mat() * *v.mat() * *w.mat()).trace()
}

fn eigenvectors<T: Real>(m: &Mat2<T>) -> Vec<[Complex<T>; 2]> {
    let half = m.trace() * T::lit(0.5);
    let disc = csqrt(half * half - m.det());
    let mut out = Vec::with_capacity(2);
    for lambda in [half + disc, half - disc] {
        // null vector of m - lambda e from whichever row is larger
        let r1 = [m.b, lambda - m.a];
        let r2 = [lambda - m.d, m.c];
        let n1 = r1[0].norm() + r1[1].norm();
        let n2 = r2[0].norm() + r2[1].norm();
        let v = if n1 >= n2 { r1 } else { r2 };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if n > T::zero() {
            out.push([v[0] / n, v[1] / n]);
        }
    }
    out
}

fn is_eigenvector<T: Real>(m: &Mat2<T>, v: [Complex<T>; 2]) -> bool {
    let w = m.apply(v);
    let cross = v[0] * w[1] - v[1] * w[0];
    // v is unit length; compare against |m| so that a null image counts as eigen
    cross.norm() <= T::lit(EIGEN_ANGLE_TOL) * m.norm().max(T::min_positive_value())
}

/// Whether some nonzero vector is an eigenvector of every matrix in `ms`.
///
/// Candidates are the (at most two) eigenvectors of the non-scalar matrix whose
/// eigenvalues are best separated; scalar matrices preserve every line.
pub fn has_common_eigenvector<T: Real>(ms: &[Mat2<T>]) -> bool {
    let pivot = ms
        .iter()
        .filter(|m| !m.is_scalar())
        .map(|m| {
            let half = m.trace() * T::lit(0.5);
            let sep = (half * half - m.det()).norm() / m.norm().powi(2);
            (sep, m)
        })
        .fold(None::<(T, &Mat2<T>)>, |best, cur| match best {
            Some(b) if b.0 >= cur.0 => Some(b),
            _ => Some(cur),
        });
    let Some((_, pivot)) = pivot else {
        return true;
    };
    eigenvectors(pivot)
        .into_iter()
        .any(|v| ms.iter().all(|m| m.is_scalar() || is_eigenvector(m, v)))
}

/// Trace criterion for irreducibility of a pair in `G(t)`: `tr(xy)` avoids `{2, t^2-2}`.
pub fn is_irreducible_pair<T: Real>(x: &GtElement<T>, y: &GtElement<T>) -> bool {
    let t = x.t();
    let txy = (*x.mat() * *y.mat()).trace();
    let tol = T::lit(PAIR_TOL) * txy.norm().max(T::one());
    let two = real::<T>(2.0);
    (txy - two).norm() > tol && (txy - (t * t - two)).norm() > tol
}

/// Determinant of the 4x4 matrix whose rows are the entries of `ms`.
pub fn span_det<T: Real>(ms: [&Mat2<T>; 4]) -> Complex<T> {
    let rows: Vec<[Complex<T>; 4]> = ms.iter().map(|m| m.entries()).collect();
    det4(&rows)
}

fn det4<T: Real>(r: &[[Complex<T>; 4]]) -> Complex<T> {
    let mut total = Complex::zero();
    for col in 0..4 {
        let minor: Vec<[Complex<T>; 3]> = (1..4)
            .map(|i| {
                let mut row = [Complex::zero(); 3];
                let mut k = 0;
                for j in 0..4 {
                    if j != col {
                        row[k] = r[i][j];
                        k += 1;
                    }
                }
                row
            })
            .collect();
        let m3 = minor[0][0] * (minor[1][1] * minor[2][2] - minor[1][2] * minor[2][1])
            - minor[0][1] * (minor[1][0] * minor[2][2] - minor[1][2] * minor[2][0])
            + minor[0][2] * (minor[1][0] * minor[2][1] - minor[1][1] * minor[2][0]);
        let term = r[0][col] * m3;
        total = if col % 2 == 0 {
            total + term
        } else {
            total - term
        };
    }
    total
}

/// Which conclusion of the commuting-triple lemma applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommutingTripleClass {
    /// `x1 x3 = x3 x1` only (parabolic `t = +-2`).
    Commuting,
    /// `x3 = x1`.
    Equal,
    /// `x3 = x1^-1`.
    Inverse,
}

#[derive(Clone, Copy, Debug)]
pub struct CommutingTripleReport {
    pub class: CommutingTripleClass,
    pub commutator_residual: f64,
    /// Distance `|x3 - x1^eps|`, present when `t != +-2`.
    pub power_residual: Option<f64>,
}

/// Checks the conclusions for an irreducible triple with `s123 = 0` and `s13 = eps s0`.
pub fn commuting_triple_lemma<T: Real>(
    x1: &GtElement<T>,
    x2: &GtElement<T>,
    x3: &GtElement<T>,
) -> Result<CommutingTripleReport> {
    let tol = T::lit(1e-9);
    let t = x1.t();
    let scale = [x1, x2, x3]
        .iter()
        .map(|x| x.mat().norm())
        .fold(T::one(), T::max);
    if has_common_eigenvector(&[*x1.mat(), *x2.mat(), *x3.mat()]) {
        return Err(Error::PreconditionViolated("triple is reducible".into()));
    }
    let (u1, u2, u3) = (
        x1.mat().traceless_part(),
        x2.mat().traceless_part(),
        x3.mat().traceless_part(),
    );
    let s123 = triple_trace(&u1, &u2, &u3);
    if s123.norm() > tol * scale.powi(3) {
        return Err(Error::PreconditionViolated(format!(
            "|s123| = {:e}",
            s123.norm()
        )));
    }
    let s0 = t * t * T::lit(0.5) - real(2.0);
    let s13 = u1.pairing(&u3);
    let eps_tol = tol * scale.powi(2);
    let eps_plus = (s13 - s0).norm() <= eps_tol;
    if !eps_plus && (s13 + s0).norm() > eps_tol {
        return Err(Error::PreconditionViolated("s13 is not +-s0".into()));
    }

    let commutator_residual = x1.mat().commutator(x3.mat()).norm() / scale.powi(2);
    let parabolic =
        (t - real(2.0)).norm() <= T::lit(1e-6) || (t + real(2.0)).norm() <= T::lit(1e-6);
    let (class, power_residual) = if parabolic {
        (CommutingTripleClass::Commuting, None)
    } else if eps_plus {
        (
            CommutingTripleClass::Equal,
            Some(x3.mat().distance(x1.mat()) / scale),
        )
    } else {
        (
            CommutingTripleClass::Inverse,
            Some(x3.mat().distance(x1.inverse().mat()) / scale),
        )
    };
    Ok(CommutingTripleReport {
        class,
        commutator_residual: commutator_residual.to_f64_lossy(),
        power_residual: power_residual.map(Real::to_f64_lossy),
    })
}

impl CommutingTripleReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.commutator_residual <= tol && self.power_residual.is_none_or(|r| r <= tol)
    }
}
