//! Complex scalar utilities and root finding for polynomials of degree at most four.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, FloatConst, One, Zero};

use crate::error::{Error, Result};

/// Real floating-point type underlying the complex scalars.
pub trait Real:
    Float + FloatConst + Debug + Display + std::fmt::LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal (tolerances, small constants) into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Leading coefficients at or below this magnitude are treated as zero.
pub const LEADING_EPS: f64 = 1e-14;
/// Absolute tolerance for deciding that two roots (or two census points) coincide.
pub const CLUSTER_TOL: f64 = 1e-8;

const DK_STEP_TOL: f64 = 1e-13;
const DK_MAX_ITER: usize = 500;
const DK_RESIDUAL_TOL: f64 = 1e-9;
// Rotation of the initial Durand-Kerner circle, in radians (1/sqrt(2)).
const DK_PHASE: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn real<T: Real>(re: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::zero())
}

#[inline]
pub fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn ensure_finite<T: Real>(z: Complex<T>, what: &'static str) -> Result<Complex<T>> {
    if is_finite(z) {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Principal square root (branch cut along the negative real axis).
#[inline]
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    z.sqrt()
}

/// A complex value together with the largest monomial magnitude that went into it.
///
/// Sums keep the larger of the two magnitudes and products multiply them, so after
/// evaluating a polynomial expression `mag` is the size of its largest expanded
/// monomial. Dividing a residual by `max(1, mag)` gives a cancellation-aware
/// normalized residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tracked<T: Real> {
    pub value: Complex<T>,
    pub mag: T,
}

impl<T: Real> Tracked<T> {
    #[inline]
    pub fn new(value: Complex<T>) -> Self {
        Self {
            value,
            mag: value.norm(),
        }
    }

    #[inline]
    pub fn constant(x: f64) -> Self {
        Self::new(real(x))
    }

    #[inline]
    pub fn scale(self, k: f64) -> Self {
        Self {
            value: self.value * T::lit(k),
            mag: self.mag * T::lit(k).abs(),
        }
    }

    #[inline]
    pub fn square(self) -> Self {
        self * self
    }

    pub fn residual(self) -> Residual<T> {
        Residual {
            value: self.value,
            scale: self.mag,
        }
    }
}

impl<T: Real> From<Complex<T>> for Tracked<T> {
    fn from(z: Complex<T>) -> Self {
        Self::new(z)
    }
}

impl<T: Real> Add for Tracked<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self {
            value: self.value + rhs.value,
            mag: self.mag.max(rhs.mag),
        }
    }
}

impl<T: Real> Sub for Tracked<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self {
            value: self.value - rhs.value,
            mag: self.mag.max(rhs.mag),
        }
    }
}

impl<T: Real> Mul for Tracked<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self {
            value: self.value * rhs.value,
            mag: self.mag * rhs.mag,
        }
    }
}

impl<T: Real> Neg for Tracked<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            mag: self.mag,
        }
    }
}

/// A residual value with the scale it should be judged against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual<T: Real> {
    pub value: Complex<T>,
    pub scale: T,
}

impl<T: Real> Residual<T> {
    pub fn raw(&self) -> T {
        self.value.norm()
    }

    /// `|value| / max(1, scale)`.
    pub fn normalized(&self) -> T {
        self.value.norm() / self.scale.max(T::one())
    }

    /// Residual of the equality `lhs = rhs`, judged against the larger side.
    pub fn difference(lhs: Complex<T>, rhs: Complex<T>) -> Self {
        Self {
            value: lhs - rhs,
            scale: lhs.norm().max(rhs.norm()),
        }
    }
}

pub fn max_normalized<T: Real>(rs: &[Residual<T>]) -> T {
    rs.iter().map(Residual::normalized).fold(T::zero(), T::max)
}

pub fn max_raw<T: Real>(rs: &[Residual<T>]) -> T {
    rs.iter().map(Residual::raw).fold(T::zero(), T::max)
}

/// Both roots of `a z^2 + b z + c`, larger magnitude first.
pub fn solve_quadratic<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
) -> Result<[Complex<T>; 2]> {
    if !(a.norm() > T::lit(LEADING_EPS)) {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let disc = b * b - a * c * T::lit(4.0);
    let sq = csqrt(disc);
    // pick the sign that avoids cancellation in -b -/+ sq
    let sq = if (b.conj() * sq).re >= T::zero() {
        sq
    } else {
        -sq
    };
    let q = -(b + sq) * T::lit(0.5);
    if q.norm() == T::zero() {
        // b = 0 and disc = 0, hence c = 0
        return Ok([Complex::zero(), Complex::zero()]);
    }
    let z1 = q / a;
    let z2 = c / (a * z1);
    Ok([
        ensure_finite(z1, "quadratic root")?,
        ensure_finite(z2, "quadratic root")?,
    ])
}

/// Polynomial of degree 1 to 4 with coefficients stored leading-first.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyLE4<T: Real> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> PolyLE4<T> {
    /// `coeffs` are leading-first, e.g. `[1, -6, 19, -30, 17]` for `u^4-6u^3+19u^2-30u+17`.
    pub fn new(coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() < 2 || coeffs.len() > 5 {
            return Err(Error::InvalidDegree(coeffs.len().saturating_sub(1)));
        }
        if !(coeffs[0].norm() > T::lit(LEADING_EPS)) {
            return Err(Error::DegenerateLeadingCoefficient);
        }
        for z in &coeffs {
            ensure_finite(*z, "polynomial coefficient")?;
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| real(x)).collect())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex<T>]) -> Result<Self> {
        let mut coeffs = vec![Complex::<T>::one()];
        for &r in roots {
            let mut next = vec![Complex::zero(); coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i] = next[i] + a;
                next[i + 1] = next[i + 1] - a * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn normalized(&self) -> Self {
        let lead = self.coeffs[0];
        Self {
            coeffs: self.coeffs.iter().map(|&a| a / lead).collect(),
        }
    }

    pub fn scaled(&self, k: Complex<T>) -> Result<Self> {
        Self::new(self.coeffs.iter().map(|&a| a * k).collect())
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .fold(Complex::zero(), |acc, &a| acc * z + a)
    }

    fn max_coeff(&self) -> T {
        self.coeffs.iter().map(|a| a.norm()).fold(T::zero(), T::max)
    }

    /// `|p(z)| / (1 + max|coeff|)` on the monic normalization.
    pub fn normalized_residual(&self, z: Complex<T>) -> T {
        let p = self.normalized();
        p.eval(z).norm() / (T::one() + p.max_coeff())
    }
}

/// All complex roots, with multiplicity, by Durand-Kerner simultaneous iteration.
pub fn solve_poly<T: Real>(p: &PolyLE4<T>) -> Result<Vec<Complex<T>>> {
    let p = p.normalized();
    let n = p.degree();
    let cs = p.coeffs();
    if n == 1 {
        return Ok(vec![ensure_finite(-cs[1], "linear root")?]);
    }

    let radius = T::one() + cs[1..].iter().map(|a| a.norm()).fold(T::zero(), T::max);
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|k| {
            let theta = T::lit(2.0 * std::f64::consts::PI * k as f64 / n as f64 + DK_PHASE);
            Complex::from_polar(radius, theta)
        })
        .collect();

    let step_tol = T::lit(DK_STEP_TOL);
    for _ in 0..DK_MAX_ITER {
        let mut max_step = T::zero();
        for i in 0..n {
            let mut denom = Complex::<T>::one();
            for j in 0..n {
                if i != j {
                    denom = denom * (z[i] - z[j]);
                }
            }
            if denom.norm() == T::zero() {
                // coincident iterates; nudge apart deterministically
                denom = Complex::new(T::lit(1e-12), T::lit(1e-12));
            }
            let step = p.eval(z[i]) / denom;
            z[i] = z[i] - step;
            max_step = max_step.max(step.norm());
        }
        if max_step <= step_tol {
            break;
        }
    }

    let tol = T::lit(DK_RESIDUAL_TOL);
    for &r in &z {
        ensure_finite(r, "polynomial root")?;
        if p.normalized_residual(r) > tol {
            return Err(Error::NonConvergence("Durand-Kerner root finding"));
        }
    }
    Ok(z)
}

/// Smallest achievable maximum pairwise distance when matching two root multisets.
///
/// Brute force over permutations; intended for the short lists (length at most six)
/// produced by the solvers here. Returns `None` if the lengths differ.
pub fn multiset_distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Option<T> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = T::infinity();
    permute(&mut perm, 0, &mut |p| {
        let d = (0..n)
            .map(|i| (a[i] - b[p[i]]).norm())
            .fold(T::zero(), T::max);
        if d < best {
            best = d;
        }
    });
    Some(if n == 0 { T::zero() } else { best })
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Greedy clustering: keeps the first point of every group whose coordinates all lie
/// within `tol` of an earlier kept point.
pub fn dedup_points<T: Real>(points: &[Vec<Complex<T>>], tol: T) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let dup = kept.iter().any(|&k| {
            points[k].len() == p.len()
                && points[k]
                    .iter()
                    .zip(p)
                    .all(|(a, b)| (*a - *b).norm() <= tol)
        });
        if !dup {
            kept.push(i);
        }
    }
    kept
}
