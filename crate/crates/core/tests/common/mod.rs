#![allow(dead_code)]

use charvar_core::catalog::ComponentId;
use charvar_core::C64;
use rand_chacha::ChaCha8Rng;

#[allow(unused_imports)]
pub use charvar_core::random::{
    disk, random_gt, random_irreducible_quadruple, random_quadruple, random_reducible_pair,
    random_sl2,
};
pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random `t` with `|t| <= r` admissible for every component.
pub fn admissible_t(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    charvar_core::random::admissible_t(rng, r, &ComponentId::ALL)
}
