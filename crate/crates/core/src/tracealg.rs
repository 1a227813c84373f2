//! Trace and s-coordinates of quadruples in `G(t)^4`, the definitive relations
//! among them, and the trace equations cut out by the 8_18 relators.
//!
//! Coordinates are ordered `(t; t12, t23, t34, t14; t13, t24; t123, t124, t134, t234)`.
//! Every residual is returned as a [`Residual`] whose scale is the largest expanded
//! monomial, so `normalized()` stays meaningful for large `|t|`.

use num_complex::Complex;
use num_traits::Zero;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::numfield::{Real, Residual, Tracked};

const TRACE_MATCH_TOL: f64 = 1e-9;
const S0_TOL: f64 = 1e-9;

/// Names of the eleven coordinates, in storage order.
pub const COORD_NAMES: [&str; 11] = [
    "t", "t12", "t23", "t34", "t14", "t13", "t24", "t123", "t124", "t134", "t234",
];

/// The eleven trace coordinates of a character of the free group on `x1..x4`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct TraceVector<T: Real> {
    pub t: Complex<T>,
    pub t12: Complex<T>,
    pub t23: Complex<T>,
    pub t34: Complex<T>,
    pub t14: Complex<T>,
    pub t13: Complex<T>,
    pub t24: Complex<T>,
    pub t123: Complex<T>,
    pub t124: Complex<T>,
    pub t134: Complex<T>,
    pub t234: Complex<T>,
}

impl<T: Real> TraceVector<T> {
    pub fn from_array(a: [Complex<T>; 11]) -> Self {
        Self {
            t: a[0],
            t12: a[1],
            t23: a[2],
            t34: a[3],
            t14: a[4],
            t13: a[5],
            t24: a[6],
            t123: a[7],
            t124: a[8],
            t134: a[9],
            t234: a[10],
        }
    }

    pub fn to_array(&self) -> [Complex<T>; 11] {
        [
            self.t, self.t12, self.t23, self.t34, self.t14, self.t13, self.t24, self.t123,
            self.t124, self.t134, self.t234,
        ]
    }

    /// Builds a vector from real parts, in storage order.
    pub fn from_real(a: [f64; 11]) -> Self {
        Self::from_array(a.map(|x| Complex::new(T::lit(x), T::zero())))
    }

    /// `tr(x_i x_j)` for distinct `i, j` in `1..=4`, in either order.
    pub fn pair(&self, i: usize, j: usize) -> Complex<T> {
        match (i.min(j), i.max(j)) {
            (1, 2) => self.t12,
            (2, 3) => self.t23,
            (3, 4) => self.t34,
            (1, 4) => self.t14,
            (1, 3) => self.t13,
            (2, 4) => self.t24,
            _ => panic!("pair index ({i}, {j}) out of range"),
        }
    }

    /// Largest coordinate deviation.
    pub fn distance(&self, other: &Self) -> T {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest coordinate magnitude.
    pub fn norm(&self) -> T {
        self.to_array()
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn alpha(&self) -> Complex<T> {
        self.t * self.t - T::one()
    }
}

impl<T: Real> Serialize for TraceVector<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(11))?;
        for (name, z) in COORD_NAMES.iter().zip(self.to_array()) {
            map.serialize_entry(name, &[z.re.to_f64_lossy(), z.im.to_f64_lossy()])?;
        }
        map.end()
    }
}

impl<'de, T: Real> Deserialize<'de> for TraceVector<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V<T>(std::marker::PhantomData<T>);

        impl<'de, T: Real> Visitor<'de> for V<T> {
            type Value = TraceVector<T>;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an object mapping the eleven trace coordinates to [re, im]")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut slots: [Option<Complex<T>>; 11] = [None; 11];
                while let Some(key) = map.next_key::<String>()? {
                    let idx = COORD_NAMES
                        .iter()
                        .position(|n| *n == key)
                        .ok_or_else(|| de::Error::unknown_field(&key, &COORD_NAMES))?;
                    let [re, im]: [f64; 2] = map.next_value()?;
                    if slots[idx]
                        .replace(Complex::new(T::lit(re), T::lit(im)))
                        .is_some()
                    {
                        return Err(de::Error::custom(format!("duplicate field `{key}`")));
                    }
                }
                let mut out = [Complex::zero(); 11];
                for (i, slot) in slots.into_iter().enumerate() {
                    out[i] = slot.ok_or_else(|| de::Error::missing_field(COORD_NAMES[i]))?;
                }
                Ok(TraceVector::from_array(out))
            }
        }

        deserializer.deserialize_map(V(std::marker::PhantomData))
    }
}

/// Traces of products of traceless parts.
///
/// `s0 = tr(u_i^2)`, `s_ij = tr(u_i u_j)`, `s_ijk = tr(u_i u_j u_k)` where
/// `u_i = x_i - (t/2) e`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SCoords<T: Real> {
    pub s0: Complex<T>,
    pub s12: Complex<T>,
    pub s23: Complex<T>,
    pub s34: Complex<T>,
    pub s14: Complex<T>,
    pub s13: Complex<T>,
    pub s24: Complex<T>,
    pub s123: Complex<T>,
    pub s124: Complex<T>,
    pub s134: Complex<T>,
    pub s234: Complex<T>,
}

/// The four index triples `i1 < i2 < i3`, in storage order.
pub const TRIPLES: [[usize; 3]; 4] = [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]];

impl<T: Real> SCoords<T> {
    /// `s_ij`, with `s_ii = s0`.
    pub fn pair(&self, i: usize, j: usize) -> Complex<T> {
        match (i.min(j), i.max(j)) {
            (a, b) if a == b && (1..=4).contains(&a) => self.s0,
            (1, 2) => self.s12,
            (2, 3) => self.s23,
            (3, 4) => self.s34,
            (1, 4) => self.s14,
            (1, 3) => self.s13,
            (2, 4) => self.s24,
            _ => panic!("pair index ({i}, {j}) out of range"),
        }
    }

    /// `s_ijk` for any indices; alternating, so repeated indices give zero.
    pub fn triple(&self, i: usize, j: usize, k: usize) -> Complex<T> {
        if i == j || j == k || i == k {
            return Complex::zero();
        }
        let mut idx = [i, j, k];
        let mut sign = T::one();
        // bubble sort, counting transpositions
        for a in 0..3 {
            for b in 0..2 - a {
                if idx[b] > idx[b + 1] {
                    idx.swap(b, b + 1);
                    sign = -sign;
                }
            }
        }
        let v = match idx {
            [1, 2, 3] => self.s123,
            [1, 2, 4] => self.s124,
            [1, 3, 4] => self.s134,
            [2, 3, 4] => self.s234,
            _ => panic!("triple index ({i}, {j}, {k}) out of range"),
        };
        v * sign
    }

    pub fn triples(&self) -> [Complex<T>; 4] {
        [self.s123, self.s124, self.s134, self.s234]
    }

    /// Relabels indices: the result's coordinate `i` is this one's `perm[i-1]`.
    pub fn relabel(&self, perm: [usize; 4]) -> Self {
        let p = |i: usize| perm[i - 1];
        Self {
            s0: self.s0,
            s12: self.pair(p(1), p(2)),
            s23: self.pair(p(2), p(3)),
            s34: self.pair(p(3), p(4)),
            s14: self.pair(p(1), p(4)),
            s13: self.pair(p(1), p(3)),
            s24: self.pair(p(2), p(4)),
            s123: self.triple(p(1), p(2), p(3)),
            s124: self.triple(p(1), p(2), p(4)),
            s134: self.triple(p(1), p(3), p(4)),
            s234: self.triple(p(2), p(3), p(4)),
        }
    }

    pub fn gram(&self) -> GramData<T> {
        let tri = |[a, b, c]: [usize; 3]| {
            let idx = [a, b, c];
            let mut m = [[Complex::zero(); 3]; 3];
            for (r, &i) in idx.iter().enumerate() {
                for (col, &j) in idx.iter().enumerate() {
                    m[r][col] = self.pair(i, j);
                }
            }
            m
        };
        let mut d = [[Complex::zero(); 4]; 4];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.pair(i + 1, j + 1);
            }
        }
        GramData {
            s123: tri(TRIPLES[0]),
            s124: tri(TRIPLES[1]),
            s134: tri(TRIPLES[2]),
            s234: tri(TRIPLES[3]),
            sdiamond: d,
        }
    }
}

/// Gram matrices of the traceless parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GramData<T: Real> {
    pub s123: [[Complex<T>; 3]; 3],
    pub s124: [[Complex<T>; 3]; 3],
    pub s134: [[Complex<T>; 3]; 3],
    pub s234: [[Complex<T>; 3]; 3],
    pub sdiamond: [[Complex<T>; 4]; 4],
}

impl<T: Real> GramData<T> {
    /// The 3x3 Gram matrix for one of [`TRIPLES`].
    pub fn triple(&self, idx: [usize; 3]) -> &[[Complex<T>; 3]; 3] {
        match idx {
            [1, 2, 3] => &self.s123,
            [1, 2, 4] => &self.s124,
            [1, 3, 4] => &self.s134,
            [2, 3, 4] => &self.s234,
            _ => panic!("not a sorted index triple: {idx:?}"),
        }
    }
}

pub fn s_from_t<T: Real>(v: &TraceVector<T>) -> SCoords<T> {
    let t = v.t;
    let h = t * t * T::lit(0.5);
    let half_t = t * T::lit(0.5);
    let cube = t * t * t * T::lit(0.5);
    let s3 = |tijk: Complex<T>, a: Complex<T>, b: Complex<T>, c: Complex<T>| {
        tijk - half_t * (a + b + c) + cube
    };
    SCoords {
        s0: h - T::lit(2.0),
        s12: v.t12 - h,
        s23: v.t23 - h,
        s34: v.t34 - h,
        s14: v.t14 - h,
        s13: v.t13 - h,
        s24: v.t24 - h,
        s123: s3(v.t123, v.t12, v.t23, v.t13),
        s124: s3(v.t124, v.t12, v.t24, v.t14),
        s134: s3(v.t134, v.t13, v.t34, v.t14),
        s234: s3(v.t234, v.t23, v.t34, v.t24),
    }
}

pub fn t_from_s<T: Real>(s: &SCoords<T>, t: Complex<T>) -> Result<TraceVector<T>> {
    let h = t * t * T::lit(0.5);
    let expected = h - T::lit(2.0);
    if (s.s0 - expected).norm() > T::lit(S0_TOL) * expected.norm().max(T::one()) {
        return Err(Error::InconsistentS0 {
            expected: format!("{expected}"),
            found: format!("{}", s.s0),
        });
    }
    let half_t = t * T::lit(0.5);
    let cube = t * t * t * T::lit(0.5);
    let (t12, t23, t34, t14, t13, t24) = (
        s.s12 + h,
        s.s23 + h,
        s.s34 + h,
        s.s14 + h,
        s.s13 + h,
        s.s24 + h,
    );
    let t3 = |sijk: Complex<T>, a: Complex<T>, b: Complex<T>, c: Complex<T>| {
        sijk + half_t * (a + b + c) - cube
    };
    Ok(TraceVector {
        t,
        t12,
        t23,
        t34,
        t14,
        t13,
        t24,
        t123: t3(s.s123, t12, t23, t13),
        t124: t3(s.s124, t12, t24, t14),
        t134: t3(s.s134, t13, t34, t14),
        t234: t3(s.s234, t23, t34, t24),
    })
}

fn det_tracked<T: Real>(m: &[Vec<Tracked<T>>]) -> Tracked<T> {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let mut acc = Tracked {
        value: Complex::zero(),
        mag: T::zero(),
    };
    for col in 0..n {
        let minor: Vec<Vec<Tracked<T>>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, x)| *x)
                    .collect()
            })
            .collect();
        let term = m[0][col] * det_tracked(&minor);
        acc = if col % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// The 16 type I relations `2 s_I s_J + det(s_{i_a j_b})`, over ordered pairs of
/// [`TRIPLES`] (`I` major).
pub fn type_i_residuals<T: Real>(s: &SCoords<T>) -> [Residual<T>; 16] {
    let tr = |z: Complex<T>| Tracked::new(z);
    let st = s.triples();
    std::array::from_fn(|k| {
        let (a, b) = (k / 4, k % 4);
        let (ii, jj) = (TRIPLES[a], TRIPLES[b]);
        let m: Vec<Vec<Tracked<T>>> = ii
            .iter()
            .map(|&i| jj.iter().map(|&j| tr(s.pair(i, j))).collect())
            .collect();
        ((tr(st[a]) * tr(st[b])).scale(2.0) + det_tracked(&m)).residual()
    })
}

/// The 4 type II relations `s_i1 s234 - s_i2 s134 + s_i3 s124 - s_i4 s123`, `i = 1..4`.
pub fn type_ii_residuals<T: Real>(s: &SCoords<T>) -> [Residual<T>; 4] {
    let tr = |z: Complex<T>| Tracked::new(z);
    std::array::from_fn(|k| {
        let i = k + 1;
        (tr(s.pair(i, 1)) * tr(s.s234) - tr(s.pair(i, 2)) * tr(s.s134)
            + tr(s.pair(i, 3)) * tr(s.s124)
            - tr(s.pair(i, 4)) * tr(s.s123))
        .residual()
    })
}

/// `det S_diamond`, the 4x4 Gram determinant; vanishes because `M_0` is 3-dimensional.
pub fn det_sdiamond<T: Real>(s: &SCoords<T>) -> Residual<T> {
    let m: Vec<Vec<Tracked<T>>> = (1..=4)
        .map(|i| (1..=4).map(|j| Tracked::new(s.pair(i, j))).collect())
        .collect();
    det_tracked(&m).residual()
}

/// Cyclic relabeling `x_i -> x_{i+1}` of a character.
///
/// `t12 -> t23 -> t34 -> t14 -> t12`, `t13 <-> t24`,
/// `t123 -> t234 -> t134 -> t124 -> t123`.
pub fn rotate<T: Real>(v: &TraceVector<T>) -> TraceVector<T> {
    TraceVector {
        t: v.t,
        t12: v.t14,
        t23: v.t12,
        t34: v.t23,
        t14: v.t34,
        t13: v.t24,
        t24: v.t13,
        t123: v.t124,
        t124: v.t134,
        t134: v.t234,
        t234: v.t123,
    }
}

fn rotate_back<T: Real>(v: &TraceVector<T>) -> TraceVector<T> {
    rotate(&rotate(&rotate(v)))
}

struct Coords<T: Real> {
    t: Tracked<T>,
    t12: Tracked<T>,
    t23: Tracked<T>,
    t14: Tracked<T>,
    t13: Tracked<T>,
    t24: Tracked<T>,
    t123: Tracked<T>,
    t124: Tracked<T>,
}

impl<T: Real> Coords<T> {
    fn of(v: &TraceVector<T>) -> Self {
        let tr = Tracked::new;
        Self {
            t: tr(v.t),
            t12: tr(v.t12),
            t23: tr(v.t23),
            t14: tr(v.t14),
            t13: tr(v.t13),
            t24: tr(v.t24),
            t123: tr(v.t123),
            t124: tr(v.t124),
        }
    }
}

fn k<T: Real>(x: f64) -> Tracked<T> {
    Tracked::constant(x)
}

/// `[tr0, tr1 - tr2, tr1 + tr2, tr3]` for the relation `r1 = r2`.
fn base_equations<T: Real>(v: &TraceVector<T>) -> [Residual<T>; 4] {
    let c = Coords::of(v);
    let t = c.t;
    let t2 = t.square();
    let a12 = c.t12;
    let d_tri = c.t124 - c.t123;
    let s_tri = c.t124 + c.t123;
    let d_diag = c.t13 - c.t24;
    let s_diag = c.t13 + c.t24;
    let d_side = c.t14 - c.t23;
    let s_side = c.t14 + c.t23;

    let tr0 = (t2 - k(1.0)) * d_tri + t * d_diag - t * (a12 - k(1.0)) * d_side;
    let tr_minus = t * (a12 + t2 - k(2.0)) * d_tri + (a12 + t2 - k(1.0)) * d_diag
        - (a12.square() + (t2 - k(1.0)) * a12 - t2 - k(1.0)) * d_side;
    let tr_plus = t * (t2 - k(2.0) - a12) * s_tri + (a12 + k(1.0) - t2) * s_diag
        - (k(1.0) - a12.square() + (t2 - k(1.0)) * a12 - t2) * s_side;
    let tr3 = t2 * (a12 - k(1.0)) * d_tri + t * (a12 - k(1.0)) * d_diag
        - t * (a12.square() - a12 - k(1.0)) * d_side;
    [
        tr0.residual(),
        tr_minus.residual(),
        tr_plus.residual(),
        tr3.residual(),
    ]
}

/// The 12 trace-equation residuals, ordered `(position 1..4) x (tr0, tr1-tr2, tr1+tr2)`.
///
/// Position `k` encodes `tr(r_k a) = tr(r_{k+1} a)` for `a` in
/// `{e, x_k, x_{k+1}}`, obtained from the base equations by shifting subscripts.
pub fn trace_equation_residuals<T: Real>(v: &TraceVector<T>) -> [Residual<T>; 12] {
    let mut out = [Residual {
        value: Complex::zero(),
        scale: T::zero(),
    }; 12];
    let mut w = *v;
    for pos in 0..4 {
        let eqs = base_equations(&w);
        out[3 * pos..3 * pos + 3].copy_from_slice(&eqs[..3]);
        w = rotate_back(&w);
    }
    out
}

/// The redundant `tr(r_k x_{k+1} x_k) = tr(r_{k+1} x_{k+1} x_k)` residual per position.
pub fn tr3_residuals<T: Real>(v: &TraceVector<T>) -> [Residual<T>; 4] {
    let mut out = [Residual {
        value: Complex::zero(),
        scale: T::zero(),
    }; 4];
    let mut w = *v;
    for slot in out.iter_mut() {
        *slot = base_equations(&w)[3];
        w = rotate_back(&w);
    }
    out
}

/// All 33 polynomial residuals: trace equations, type I, type II, `det S_diamond`.
pub fn residual_battery<T: Real>(v: &TraceVector<T>) -> Vec<Residual<T>> {
    let s = s_from_t(v);
    let mut out = Vec::with_capacity(33);
    out.extend(trace_equation_residuals(v));
    out.extend(type_i_residuals(&s));
    out.extend(type_ii_residuals(&s));
    out.push(det_sdiamond(&s));
    out
}

/// The eleven traces of a quadruple of matrices sharing a trace.
pub fn trace_vector_of<T: Real>(xs: &[Mat2<T>; 4]) -> Result<TraceVector<T>> {
    let t = xs[0].trace();
    let tol = T::lit(TRACE_MATCH_TOL) * t.norm().max(T::one());
    if xs.iter().any(|x| (x.trace() - t).norm() > tol) {
        return Err(Error::TraceMismatch);
    }
    let [x1, x2, x3, x4] = *xs;
    let tr2 = |a: Mat2<T>, b: Mat2<T>| (a * b).trace();
    let tr3 = |a: Mat2<T>, b: Mat2<T>, c: Mat2<T>| (a * b * c).trace();
    Ok(TraceVector {
        t,
        t12: tr2(x1, x2),
        t23: tr2(x2, x3),
        t34: tr2(x3, x4),
        t14: tr2(x1, x4),
        t13: tr2(x1, x3),
        t24: tr2(x2, x4),
        t123: tr3(x1, x2, x3),
        t124: tr3(x1, x2, x4),
        t134: tr3(x1, x3, x4),
        t234: tr3(x2, x3, x4),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{c, max_normalized, real};

    type V = TraceVector<f64>;

    #[test]
    fn s_coordinates_at_t2() {
        let v = V::from_real([2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let s = s_from_t(&v);
        assert_eq!(s.s0, real(0.0));
        assert_eq!(s.s13, real(-1.0));
        assert_eq!(s.triples(), [real(1.0); 4]);
    }

    #[test]
    fn s_coordinates_at_t0_are_traces() {
        let v = V::from_array(std::array::from_fn(|i| {
            if i == 0 {
                real(0.0)
            } else {
                c(i as f64, -1.0)
            }
        }));
        let s = s_from_t(&v);
        assert_eq!(s.s0, real(-2.0));
        assert_eq!(s.s24, v.t24);
        assert_eq!(s.s134, v.t134);
        assert_eq!(t_from_s(&s, v.t).unwrap(), v);
    }

    #[test]
    fn inconsistent_s0_rejected() {
        let v = V::from_real([1.0; 11]);
        let mut s = s_from_t(&v);
        s.s0 += real(1e-3);
        assert!(matches!(
            t_from_s(&s, v.t),
            Err(Error::InconsistentS0 { .. })
        ));
    }

    #[test]
    fn triple_is_alternating() {
        let s = SCoords::<f64> {
            s123: real(5.0),
            s124: real(7.0),
            ..Default::default()
        };
        assert_eq!(s.triple(2, 1, 3), real(-5.0));
        assert_eq!(s.triple(3, 1, 2), real(5.0));
        assert_eq!(s.triple(4, 2, 1), real(-7.0));
        assert_eq!(s.triple(1, 1, 2), real(0.0));
    }

    #[test]
    fn diagonal_gram_type_i() {
        // 2 s123^2 = -s0^3 with s0 = -2 gives s123 = 2
        let s = SCoords::<f64> {
            s0: real(-2.0),
            s123: real(2.0),
            ..Default::default()
        };
        assert!(type_i_residuals(&s)[0].raw() < 1e-15);
    }

    #[test]
    fn rank_one_gram_has_zero_det() {
        let z = c(0.3, -1.2);
        let s = SCoords::<f64> {
            s0: z,
            s12: z,
            s23: z,
            s34: z,
            s14: z,
            s13: z,
            s24: z,
            ..Default::default()
        };
        assert!(det_sdiamond(&s).raw() < 1e-15);
        assert!(type_ii_residuals(&s).iter().all(|r| r.raw() == 0.0));
    }

    #[test]
    fn x61_at_t1_satisfies_trace_equations() {
        let v = V::from_real([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 2.0, 0.0, 2.0]);
        assert!(max_normalized(&trace_equation_residuals(&v)) <= 1e-10);
    }

    #[test]
    fn x51_at_t2_satisfies_trace_equations() {
        let v = V::from_real([2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(max_normalized(&trace_equation_residuals(&v)) <= 1e-10);
    }

    #[test]
    fn abelian_pattern_satisfies_equations_but_perturbation_does_not() {
        // t_ij = t^2 - 2 makes every difference and every tr1+tr2 coefficient cancel
        let t = 3.0f64;
        let q = t * t - 2.0;
        let cube = t * t * t - 2.0 * t;
        let mut v = V::from_real([t, q, q, q, q, q, q, cube, cube, cube, cube]);
        assert!(max_normalized(&trace_equation_residuals(&v)) <= 1e-12);
        v.t13 += real(0.5);
        assert!(max_normalized(&trace_equation_residuals(&v)) > 1e-3);
    }

    #[test]
    fn rotate_examples() {
        let t = 1.7f64;
        let qq = 4.0 * t * t - 2.0 - t.powi(4);
        let p = 3.0 * t - t.powi(3);
        let x61 = V::from_real([t, 1.0, 1.0, 1.0, 1.0, 1.0, qq, 0.0, p, 0.0, p]);
        let x62 = V::from_real([t, 1.0, 1.0, 1.0, 1.0, qq, 1.0, p, 0.0, p, 0.0]);
        assert_eq!(rotate(&x61), x62);
        let sym = V::from_real([t, 2.0, 2.0, 2.0, 2.0, 3.0, 3.0, 5.0, 5.0, 5.0, 5.0]);
        assert_eq!(rotate(&sym), sym);
        let v = V::from_array(std::array::from_fn(|i| c(i as f64, 1.0 / (i as f64 + 1.0))));
        assert_eq!(rotate(&rotate(&rotate(&rotate(&v)))), v);
    }

    #[test]
    fn all_equal_quadruple_traces() {
        let x = Mat2::<f64>::from_real(0.0, 1.0, -1.0, 0.0);
        let v = trace_vector_of(&[x; 4]).unwrap();
        assert_eq!(v.t12, real(-2.0));
        assert_eq!(v.t234, real(0.0));
    }

    #[test]
    fn trace_mismatch_detected() {
        let x = Mat2::<f64>::identity();
        let y = Mat2::<f64>::from_real(0.0, 1.0, -1.0, 0.0);
        assert_eq!(trace_vector_of(&[x, x, x, y]), Err(Error::TraceMismatch));
    }

    #[test]
    fn json_round_trip() {
        let v = V::from_array(std::array::from_fn(|i| c(i as f64 * 0.5, -(i as f64))));
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.starts_with("{\"t\":[0.0,-0.0]"));
        let back: V = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<V>("{\"t\":[0,0]}").is_err());
    }
}
