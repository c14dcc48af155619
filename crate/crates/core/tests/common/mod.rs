//! Generators shared by the integration tests. Everything derives from a `u64` seed so
//! proptest can shrink over seeds.
#![allow(dead_code)]

use quasicopy::block::BlockOperator;
use quasicopy::linalg::ComplexMatrix;
use quasicopy::qcore::family_rng;
use quasicopy::random;
use quasicopy::ProtocolConfig;
use rand::Rng;

/// Random operator with each block present iff the matching mask bit is set.
pub fn random_block(d: usize, mask: u8, seed: u64) -> BlockOperator {
    let mut rng = family_rng(seed);
    let mut block = |bit: u8| (mask & bit != 0).then(|| random::ginibre(d, d, &mut rng));
    let (a, b, c, dd) = (block(1), block(2), block(4), block(8));
    BlockOperator::from_blocks(d, a, b, c, dd).unwrap()
}

/// A random protocol config: Haar-random POVM or projective inner measurement and a
/// random pure or mixed input state.
pub fn random_config(d: usize, n: usize, phi: f64, seed: u64) -> ProtocolConfig {
    let mut rng = family_rng(seed);
    let inner = if n <= d && rng.random_bool(0.3) {
        random::projective_family(d, n, Some(&mut rng)).unwrap()
    } else {
        random::random_povm(d, n, &mut rng).unwrap()
    };
    let rho = if rng.random_bool(0.5) {
        random::random_pure_state(d, &mut rng)
    } else {
        random::random_mixed_state(d, &mut rng)
    };
    ProtocolConfig::new(phi, inner, rho, seed).unwrap()
}

/// Configs spread over `d ≤ max_d`, `n ≤ max_n` and `φ ∈ [0, π/2]`.
pub fn config_sweep(count: usize, max_d: usize, max_n: usize, seed: u64) -> Vec<ProtocolConfig> {
    let mut rng = family_rng(seed);
    (0..count)
        .map(|_| {
            let d = rng.random_range(1..=max_d);
            let n = rng.random_range(1..=max_n);
            let phi = rng.random_range(0.0..=std::f64::consts::FRAC_PI_2);
            random_config(d, n, phi, rng.random())
        })
        .collect()
}

pub fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    quasicopy::linalg::max_abs_diff(a, b)
}
