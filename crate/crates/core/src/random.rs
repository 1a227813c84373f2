//! Random test data: points of discs, elements of `G(t)` and SL(2,C), quadruples,
//! and admissible values of `t`.

use num_complex::Complex64;
use rand::Rng;

use crate::catalog::{sampler_exclusions, ComponentId, SAMPLER_MARGIN};
use crate::mat2::{has_common_eigenvector, GtElement, Mat2};
use crate::numfield::solve_quadratic;
use crate::reconstruct::Quadruple;

type C = Complex64;

/// Uniform point of the closed disk of radius `r`.
pub fn disk<R: Rng + ?Sized>(rng: &mut R, r: f64) -> C {
    let rho = r * rng.gen::<f64>().sqrt();
    C::from_polar(rho, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Point of the annulus `lo <= |z| <= hi`.
pub fn annulus<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> C {
    C::from_polar(
        rng.gen_range(lo..hi),
        rng.gen_range(0.0..std::f64::consts::TAU),
    )
}

/// `[[a, b], [c, t - a]]` with `c` fixed by `det = 1`.
pub fn random_gt<R: Rng + ?Sized>(rng: &mut R, t: C) -> GtElement<f64> {
    let a = disk(rng, 1.5);
    let b = annulus(rng, 0.5, 1.5);
    let d = t - a;
    let c = (a * d - 1.0) / b;
    GtElement::new(Mat2::new(a, b, c, d)).expect("det 1 by construction")
}

/// Element of SL(2,C) with all entries of modulus at most 2.
pub fn random_sl2<R: Rng + ?Sized>(rng: &mut R) -> Mat2<f64> {
    loop {
        let a = annulus(rng, 0.5, 2.0);
        let b = disk(rng, 2.0);
        let c = disk(rng, 2.0);
        let d = (1.0 + b * c) / a;
        if d.norm() <= 2.0 {
            return Mat2::new(a, b, c, d);
        }
    }
}

pub fn random_quadruple<R: Rng + ?Sized>(rng: &mut R, t: C) -> Quadruple {
    Quadruple::new(std::array::from_fn(|_| random_gt(rng, t))).expect("shared trace")
}

pub fn random_irreducible_quadruple<R: Rng + ?Sized>(rng: &mut R, t: C) -> Quadruple {
    loop {
        let q = random_quadruple(rng, t);
        if !has_common_eigenvector(&q.mats()) {
            return q;
        }
    }
}

/// Pair in `G(t)` sharing an eigenvector: upper triangular, then conjugated.
pub fn random_reducible_pair<R: Rng + ?Sized>(
    rng: &mut R,
    t: C,
) -> (GtElement<f64>, GtElement<f64>) {
    let one = C::new(1.0, 0.0);
    let k = solve_quadratic(one, -t, one).expect("monic")[0];
    let flip = rng.gen_bool(0.5);
    let x = Mat2::new(k, disk(rng, 2.0), C::new(0.0, 0.0), k.inv());
    let (a, d) = if flip { (k.inv(), k) } else { (k, k.inv()) };
    let y = Mat2::new(a, disk(rng, 2.0), C::new(0.0, 0.0), d);
    let g = random_sl2(rng);
    let gi = g.inverse().expect("det 1");
    let conj = |m: Mat2<f64>| GtElement::new(g * m * gi).expect("conjugate of G(t) element");
    (conj(x), conj(y))
}

/// Distance from `t` to the nearest excluded value of the given samplers.
pub fn exclusion_distance(t: C, ids: &[ComponentId]) -> f64 {
    ids.iter()
        .flat_map(|&id| sampler_exclusions(id))
        .map(|(z, _)| (t - z).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Random `t` with `|t| <= r` admissible for every listed component.
pub fn admissible_t<R: Rng + ?Sized>(rng: &mut R, r: f64, ids: &[ComponentId]) -> C {
    loop {
        let t = disk(rng, r);
        if exclusion_distance(t, ids) > SAMPLER_MARGIN {
            return t;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_their_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let t = disk(&mut rng, 3.0);
            assert!(t.norm() <= 3.0);
            let g = random_sl2(&mut rng);
            assert!((g.det() - 1.0).norm() <= 1e-12);
            assert!(g.entries().iter().all(|z| z.norm() <= 2.0 + 1e-12));
            let (x, y) = random_reducible_pair(&mut rng, t);
            assert!((x.t() - t).norm() <= 1e-9 && (y.t() - t).norm() <= 1e-9);
            assert!(has_common_eigenvector(&[*x.mat(), *y.mat()]));
            let s = admissible_t(&mut rng, 3.0, &ComponentId::ALL);
            assert!(exclusion_distance(s, &ComponentId::ALL) > SAMPLER_MARGIN);
        }
    }
}
