mod common;

use std::f64::consts::FRAC_PI_2;

use common::{max_diff, random_config};
use proptest::prelude::*;
use quasicopy::linalg::{self, ComplexMatrix};
use quasicopy::protocol::{outcome_probability, reversal_probability};
use quasicopy::qcore::{family_rng, trace_distance, validate_instrument, DensityMatrix, TrialStream};
use quasicopy::qrm::{
    matched_qrm_instrument, qrm_max_reversal_probability, qrm_recovery_instrument, qrm_reversal_operator,
    run_qrm_protocol, tradeoff_check, QrmInstrument,
};
use quasicopy::{random, Error, ProtocolConfig};

fn success_probability(inst: &QrmInstrument, rho: &DensityMatrix) -> f64 {
    inst.operators()
        .iter()
        .map(|m| {
            let r = qrm_reversal_operator(m).unwrap();
            linalg::sandwich(&(&r * m), rho.as_matrix()).trace().re
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matched_instrument_reproduces_statistics(d in 1usize..=6, n in 1usize..=4, phi in 0.0..=FRAC_PI_2, seed: u64, s2: u64) {
        let cfg = random_config(d, n, phi, seed);
        let inst = matched_qrm_instrument(&cfg).unwrap();
        let rho = random::random_mixed_state(d, &mut family_rng(s2));
        let cfg = cfg.with_rho0(rho.clone()).unwrap();
        for nu in 1..=n {
            let q = linalg::sandwich(&inst.operators()[nu - 1], rho.as_matrix()).trace().re;
            prop_assert!((q - outcome_probability(nu, &cfg).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn reversal_operator_is_a_contraction(d in 1usize..=6, seed: u64) {
        let m = random::ginibre(d, d, &mut family_rng(seed));
        let r = qrm_reversal_operator(&m).unwrap();
        prop_assert!((linalg::max_singular_value(&r) - 1.0).abs() <= 1e-9);
        let rm = &r * &m;
        let smin = linalg::min_singular_value(&m);
        prop_assert!(max_diff(&rm, &linalg::identity(d).scale(smin)) <= 1e-9 * (1.0 + smin));
        prop_assert!(validate_instrument(&qrm_recovery_instrument(&m).unwrap(), 1e-9).unwrap().passed);
    }

    #[test]
    fn qrm_success_is_state_independent(d in 1usize..=5, n in 1usize..=3, phi in 0.0..1.5f64, seed: u64, s2: u64) {
        let cfg = random_config(d, n, phi, seed);
        let inst = matched_qrm_instrument(&cfg).unwrap();
        let rho = random::random_pure_state(d, &mut family_rng(s2));
        prop_assert!((success_probability(&inst, &rho) - qrm_max_reversal_probability(&inst)).abs() <= 1e-10);
    }

    #[test]
    fn left_unitary_redressing_is_invisible(d in 1usize..=5, n in 1usize..=3, phi in 0.0..1.5f64, seed: u64, s2: u64) {
        let cfg = random_config(d, n, phi, seed);
        let inst = matched_qrm_instrument(&cfg).unwrap();
        let mut rng = family_rng(s2);
        let dressed: Vec<ComplexMatrix> =
            inst.operators().iter().map(|m| random::haar_unitary(d, &mut rng) * m).collect();
        let dressed = QrmInstrument::new(dressed).unwrap();
        prop_assert!((qrm_max_reversal_probability(&dressed) - qrm_max_reversal_probability(&inst)).abs() <= 1e-10);
        let rho = random::random_mixed_state(d, &mut rng);
        prop_assert!((success_probability(&dressed, &rho) - success_probability(&inst, &rho)).abs() <= 1e-10);
        // The dressed instrument still undoes itself exactly on success.
        for i in 0..8 {
            let rec = run_qrm_protocol(&dressed, &rho, &mut TrialStream::new(s2, i)).unwrap();
            if let Some(out) = &rec.recovered {
                prop_assert!(trace_distance(out, &rho).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn projective_families_tie(d in 2usize..=6, phi in 0.0..=FRAC_PI_2, seed: u64) {
        let n = 2.min(d);
        let inner = random::projective_family(d, n, Some(&mut family_rng(seed))).unwrap();
        let cfg = ProtocolConfig::new(phi, inner, DensityMatrix::maximally_mixed(d), seed).unwrap();
        let r = tradeoff_check(&cfg).unwrap();
        prop_assert!(r.condition_holds);
        prop_assert!(r.consistent);
        prop_assert!((r.p_qrm - reversal_probability(phi)).abs() <= 1e-10);
    }

    #[test]
    fn full_rank_families_favor_qrm(d in 1usize..=5, n in 1usize..=4, phi in 0.05..=FRAC_PI_2, seed: u64) {
        let inner = random::scaled_unitary_family(d, n, &mut family_rng(seed)).unwrap();
        let cfg = ProtocolConfig::new(phi, inner, DensityMatrix::maximally_mixed(d), seed).unwrap();
        let r = tradeoff_check(&cfg).unwrap();
        prop_assert!(!r.condition_holds);
        prop_assert!(r.consistent);
        // Σ min-eig(M†M) = n · 1/n = 1, so p_qrm = cos² + sin² = 1.
        prop_assert!((r.p_qrm - 1.0).abs() <= 1e-10);
        prop_assert!(r.delta > 0.0);
    }
}

#[test]
fn singular_outcomes_are_irreversible() {
    let m = linalg::projector(2, 0);
    assert!(matches!(qrm_reversal_operator(&m), Err(Error::SingularOperator { .. })));
    assert!(QrmInstrument::new(vec![linalg::projector(2, 0)]).is_err());
}

#[test]
fn qrm_trials_use_the_outcome() {
    let cfg = random_config(3, 3, 0.8, 17);
    let inst = matched_qrm_instrument(&cfg).unwrap();
    // Different outcomes need different recovery operators.
    let r1 = qrm_reversal_operator(&inst.operators()[0]).unwrap();
    let r2 = qrm_reversal_operator(&inst.operators()[1]).unwrap();
    assert!(max_diff(&r1, &r2) > 1e-3);
    let mut hits = 0;
    for i in 0..500 {
        let rec = run_qrm_protocol(&inst, cfg.rho0(), &mut TrialStream::new(2, i)).unwrap();
        if let Some(out) = rec.recovered {
            hits += 1;
            assert!(trace_distance(&out, cfg.rho0()).unwrap() <= 1e-9);
        }
    }
    assert!(hits > 0);
}
