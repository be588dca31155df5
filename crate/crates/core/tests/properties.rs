use flashici_core::detector::{
    brute_force_posteriors, cell_by_cell_detect, llrs_to_prior, posteriors_to_llrs, quantized_conditional_likelihood,
    sum_product_detect, uniform_priors,
};
use flashici_core::ldpc::{generate_code, LdpcCode};
use flashici_core::{AggressorState, BitLlrs, DeviceParams, GrayMap, Observations, Pmf, ScalarQuantizer};
use proptest::prelude::*;
use std::sync::OnceLock;

fn params() -> impl Strategy<Value = DeviceParams> {
    (0.5f64..2.0, 0.0f64..0.2, 0.0f64..1.0).prop_map(|(b, g, a)| DeviceParams::mlc(b, g, a).unwrap())
}

fn reads(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..6.0, 1..=max)
}

fn priors(n: usize) -> impl Strategy<Value = Vec<Pmf>> {
    prop::collection::vec(prop::collection::vec(0.01f64..1.0, 4), n)
        .prop_map(|v| v.into_iter().map(|w| Pmf::from_weights(w).unwrap()).collect())
}

fn small_code() -> &'static LdpcCode {
    static CODE: OnceLock<LdpcCode> = OnceLock::new();
    CODE.get_or_init(|| generate_code(576, 0.75, 7).unwrap())
}

fn normalized(p: &Pmf) -> bool {
    let s: f64 = p.as_slice().iter().sum();
    (s - 1.0).abs() < 1e-9 && p.as_slice().iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detector_outputs_are_pmfs(p in params(), y in reads(64)) {
        let obs = Observations::Voltages(&y);
        let pri = uniform_priors(4, y.len());
        for post in sum_product_detect(&p, &obs, &pri).unwrap() {
            prop_assert!(normalized(&post));
        }
        for post in cell_by_cell_detect(&p, &obs, &pri).unwrap() {
            prop_assert!(normalized(&post));
        }
    }

    #[test]
    fn sum_product_matches_enumeration(
        p in params(),
        (y, pri) in reads(5).prop_flat_map(|y| { let n = y.len(); (Just(y), priors(n)) }),
    ) {
        let obs = Observations::Voltages(&y);
        let a = sum_product_detect(&p, &obs, &pri).unwrap();
        let b = brute_force_posteriors(&p, &obs, &pri).unwrap();
        for (u, v) in a.iter().zip(&b) {
            for (x, z) in u.as_slice().iter().zip(v.as_slice()) {
                prop_assert!((x - z).abs() < 1e-9, "{:?} vs {:?}", u, v);
            }
        }
    }

    #[test]
    fn quantized_bins_partition_the_line(
        p in params(),
        mut t in prop::collection::vec(-1.0f64..6.0, 1..12),
        x in 0usize..4,
        s in 0usize..64,
    ) {
        t.sort_by(f64::total_cmp);
        t.dedup();
        let q = ScalarQuantizer::new(t).unwrap();
        let state = AggressorState::from_index(s, 4);
        let total: f64 = (0..q.regions()).map(|b| quantized_conditional_likelihood(&p, &q, b, x, state)).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn llr_prior_round_trip(l in prop::collection::vec(-20.0f64..20.0, 2..40)) {
        let mut llrs = l;
        if llrs.len() % 2 == 1 {
            llrs.pop();
        }
        let gray = GrayMap::mlc();
        let bits = BitLlrs { bits_per_cell: 2, llrs: llrs.clone() };
        let pri = llrs_to_prior(&bits, &gray);
        for p in &pri {
            prop_assert!(normalized(p));
        }
        let back = posteriors_to_llrs(&pri, &gray);
        for (a, b) in back.llrs.iter().zip(&llrs) {
            prop_assert!((a - b).abs() < 1e-6, "{} vs {}", a, b);
        }
    }

    #[test]
    fn encoding_is_linear(
        a in prop::collection::vec(0u8..2, 432),
        b in prop::collection::vec(0u8..2, 432),
    ) {
        let code = small_code();
        prop_assume!(code.k() == 432);
        let ca = code.encode(&a).unwrap();
        let cb = code.encode(&b).unwrap();
        let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let cs = code.encode(&sum).unwrap();
        prop_assert!(code.is_codeword(&ca));
        prop_assert_eq!(code.extract_info(&ca), a);
        let xor: Vec<u8> = ca.iter().zip(&cb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(cs, xor);
    }

    #[test]
    fn extrinsic_is_posterior_minus_channel(
        llrs in prop::collection::vec(-8.0f64..8.0, 576),
        iters in 1usize..20,
    ) {
        let r = small_code().decode(&llrs, iters).unwrap();
        for i in 0..llrs.len() {
            prop_assert!((r.posterior[i] - llrs[i] - r.extrinsic[i]).abs() < 1e-9);
            prop_assert_eq!(r.hard_bits[i], u8::from(r.posterior[i] < 0.0));
        }
        prop_assert_eq!(r.syndrome_ok, small_code().is_codeword(&r.hard_bits));
    }
}
