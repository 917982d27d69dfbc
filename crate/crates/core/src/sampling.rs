//! Seeded random inputs: states, joint distributions and marginal sets.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::DIM;
use crate::fine::JointDistribution;
use crate::measurement::{MarginalConvention, MarginalSet};
use crate::qstates::{c, pd_state, w_state, ComplexScalar, PureState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn phase<R: Rng>(rng: &mut R, modulus: f64) -> ComplexScalar {
    let t = rng.random::<f64>() * 2.0 * PI;
    c(modulus * t.cos(), modulus * t.sin())
}

/// Normalized probability vector; each entry is zero with probability
/// `zero_rate`, the rest follow a flat Dirichlet.
pub fn simplex<R: Rng, const N: usize>(rng: &mut R, zero_rate: f64) -> [f64; N] {
    loop {
        let mut w = [0.0; N];
        for x in w.iter_mut() {
            if rng.random::<f64>() >= zero_rate {
                *x = -(1.0 - rng.random::<f64>()).ln();
            }
        }
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return w.map(|x| x / total);
        }
    }
}

fn state_from_weights<R: Rng>(rng: &mut R, w: [f64; DIM]) -> PureState {
    let amps = w.map(|p| phase(rng, p.sqrt()));
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    PureState::new(amps.map(|z| z / norm)).expect("normalized by construction")
}

/// Random pure state with random phases; some amplitudes may vanish.
pub fn pure_state<R: Rng>(rng: &mut R) -> PureState {
    let w = simplex::<R, DIM>(rng, 0.2);
    state_from_weights(rng, w)
}

/// Normalized amplitude triple with random phases.
fn amplitude_triple<R: Rng>(rng: &mut R) -> [ComplexScalar; 3] {
    let w = simplex::<R, 3>(rng, 0.1);
    let z = w.map(|p| phase(rng, p.sqrt()));
    let norm: f64 = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    z.map(|x| x / norm)
}

pub fn w_type<R: Rng>(rng: &mut R) -> PureState {
    let [a, b, d] = amplitude_triple(rng);
    w_state(a, b, d).expect("normalized by construction")
}

pub fn pd_type<R: Rng>(rng: &mut R) -> PureState {
    let [a, b, d] = amplitude_triple(rng);
    pd_state(a, b, d).expect("normalized by construction")
}

/// Pure state with `|c₄|² = |c₆|² = |c₇|²` and `|c₂|² = |c₃|² = |c₅|²`
/// (amplitudes numbered `1..=8`); `c₁` and `c₈` are free.
pub fn coop_cond_state<R: Rng>(rng: &mut R) -> PureState {
    let [p1, p8, q, r] = simplex::<R, 4>(rng, 0.1);
    let mut w = [0.0; DIM];
    w[0] = p1;
    w[7] = p8;
    for i in [1, 2, 4] {
        w[i] = q / 3.0;
    }
    for i in [3, 5, 6] {
        w[i] = r / 3.0;
    }
    state_from_weights(rng, w)
}

pub fn joint<R: Rng>(rng: &mut R) -> JointDistribution {
    let w = simplex::<R, DIM>(rng, 0.25);
    JointDistribution::new(w).expect("simplex draw")
}

/// Conjunction marginals with singles uniform in `[0, 1]`, each pair uniform
/// within its Fréchet bounds and `ξ` uniform in `[0, min pair]`. Most
/// draws have no joint distribution.
pub fn bounded_conjunction_set<R: Rng>(rng: &mut R) -> MarginalSet {
    let s: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>());
    let mut pair = |x: f64, y: f64| {
        let lo = (x + y - 1.0).max(0.0);
        let hi = x.min(y);
        lo + rng.random::<f64>() * (hi - lo)
    };
    let ab = pair(s[0], s[1]);
    let bc = pair(s[1], s[2]);
    let ac = pair(s[0], s[2]);
    let xi = rng.random::<f64>() * ab.min(bc).min(ac);
    MarginalSet::new([s[0], s[1], s[2], ab, bc, ac, xi], MarginalConvention::Conjunction)
        .expect("drawn inside the Fréchet bounds")
}
