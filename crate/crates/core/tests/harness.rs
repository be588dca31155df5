use flashici_core::detector::{
    hard_decision, posteriors_to_llrs, sum_product_detect, uniform_priors, DetectorKind,
};
use flashici_core::harness::{
    emit_plot, point_seed, read_csv, run_point, run_sweep, run_trial, trial_rng, CodeSource, OperatingPoint,
    SimConfig, StopRule, TrialSetup,
};
use flashici_core::ldpc::{generate_code, LdpcCode};
use flashici_core::{channel::simulate_wordline, DeviceParams, GrayMap, Observations};
use rand::Rng;

fn point(gamma_v: f64, alpha: f64, detector: DetectorKind, max_out: usize) -> OperatingPoint {
    OperatingPoint {
        gamma_v,
        alpha,
        beta: 1.0,
        detector,
        quantized: false,
        max_in: 50,
        max_out,
    }
}

fn small_config(dir: &std::path::Path, name: &str) -> SimConfig {
    let text = format!(
        r#"
seed = 11
output = "{}"
timing = false
code = "desk_scale"
quantized = true
[sweep]
gamma_v = [0.12, 0.13]
alpha = [0.5]
[stop]
min_wl_errors = 3
max_trials = 8
batch = 4
"#,
        dir.join(name).display()
    );
    SimConfig::from_toml(&text).unwrap()
}

#[test]
fn sweep_is_reproducible_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let a = small_config(dir.path(), "a.csv");
    let b = small_config(dir.path(), "b.csv");
    let ra = run_sweep(&a).unwrap();
    let rb = run_sweep(&b).unwrap();
    assert_eq!(ra.len(), 4);
    assert_eq!(
        std::fs::read(dir.path().join("a.csv")).unwrap(),
        std::fs::read(dir.path().join("b.csv")).unwrap()
    );
    assert_eq!(read_csv(&dir.path().join("a.csv")).unwrap(), rb);
    for r in &ra {
        assert!(r.quantized);
        assert!(r.trials <= 8 && r.wl_errors <= r.trials);
        assert!(r.censored == (r.wl_errors < 3));
        assert!((0.0..=1.0).contains(&r.coded_ber) && (0.0..=1.0).contains(&r.uncoded_ber));
    }
    let svg = dir.path().join("a.svg");
    emit_plot(&dir.path().join("a.csv"), &svg).unwrap();
    let text = std::fs::read_to_string(svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("sum_product"));
}

#[test]
fn unwritable_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path(), "x.csv");
    cfg.output = dir.path().join("missing").join("x.csv");
    cfg.stop.max_trials = 1;
    cfg.sweep.gamma_v = vec![0.1];
    cfg.detectors = vec![DetectorKind::CellByCell];
    assert!(run_sweep(&cfg).is_err());
}

#[test]
fn no_diagonal_coupling_gives_identical_counts() {
    let code = LdpcCode::desk_scale();
    let params = DeviceParams::mlc(1.0, 0.13, 0.0).unwrap();
    let stop = StopRule {
        min_wl_errors: u64::MAX,
        max_trials: 12,
        batch: 4,
    };
    let seed = point_seed(5, 0.13, 0.0, 1.0);
    let counts: Vec<_> = [DetectorKind::CellByCell, DetectorKind::SumProduct]
        .into_iter()
        .map(|d| {
            let s = TrialSetup::new(point(0.13, 0.0, d, 1), params.clone(), Some(&code), 0).unwrap();
            run_point(&s, seed, &stop).unwrap().counts
        })
        .collect();
    assert!(counts[0].uncoded_bit_errors > 0);
    assert_eq!(counts[0], counts[1]);
}

#[test]
fn single_outer_round_is_the_plain_pipeline() {
    // Rebuild the non-iterative pipeline from public pieces with the same
    // random stream and compare bit for bit.
    let code = LdpcCode::desk_scale();
    let params = DeviceParams::mlc(1.0, 0.13, 0.5).unwrap();
    let setup = TrialSetup::new(point(0.13, 0.5, DetectorKind::SumProduct, 1), params.clone(), Some(&code), 0).unwrap();
    let gray = GrayMap::mlc();
    for t in 0..4 {
        let counts = run_trial(&setup, &mut trial_rng(3, t)).unwrap();

        let mut rng = trial_rng(3, t);
        let info: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2u8)).collect();
        let cw = code.encode(&info).unwrap();
        let victims = gray.bits_to_levels(&cw);
        let aggr: Vec<usize> = (0..victims.len()).map(|_| rng.random_range(0..4)).collect();
        let y = simulate_wordline(&params, &victims, &aggr, &mut rng).unwrap().y;
        let post = sum_product_detect(&params, &Observations::Voltages(&y), &uniform_priors(4, y.len())).unwrap();
        let raw = gray.levels_to_bits(&hard_decision(&post));
        let dec = code.decode(&posteriors_to_llrs(&post, &gray).llrs, 50).unwrap();
        let decoded = code.extract_info(&dec.hard_bits);

        let diff = |a: &[u8], b: &[u8]| a.iter().zip(b).filter(|(x, y)| x != y).count() as u64;
        assert_eq!(counts.uncoded_bit_errors, diff(&raw, &cw));
        assert_eq!(counts.coded_bit_errors, diff(&decoded, &info));
        assert_eq!(counts.outer_rounds, 1);
    }
}

#[test]
fn iterative_rounds_only_run_after_failures() {
    let code = LdpcCode::desk_scale();
    let params = DeviceParams::mlc(1.0, 0.135, 0.5).unwrap();
    let setup = TrialSetup::new(point(0.135, 0.5, DetectorKind::SumProduct, 4), params, Some(&code), 0).unwrap();
    let stop = StopRule {
        min_wl_errors: u64::MAX,
        max_trials: 16,
        batch: 16,
    };
    let out = run_point(&setup, 8, &stop).unwrap();
    assert!(out.counts.outer_rounds >= 16 && out.counts.outer_rounds <= 64);
}

#[test]
fn coded_ber_falls_with_weaker_coupling() {
    let code = LdpcCode::desk_scale();
    let stop = StopRule {
        min_wl_errors: 20,
        max_trials: 400,
        batch: 16,
    };
    let ber: Vec<f64> = [0.14, 0.13, 0.11]
        .iter()
        .map(|&g| {
            let params = DeviceParams::mlc(1.0, g, 0.25).unwrap();
            let s = TrialSetup::new(point(g, 0.25, DetectorKind::CellByCell, 1), params, Some(&code), 0).unwrap();
            run_point(&s, point_seed(1, g, 0.25, 1.0), &stop).unwrap().counts.coded_ber()
        })
        .collect();
    assert!(ber[0] > ber[1] && ber[1] > ber[2], "{ber:?}");
}

#[test]
fn decoding_does_not_raise_ber_where_it_converges() {
    // Batches at a point where nearly every word-line decodes.
    let code = LdpcCode::desk_scale();
    let params = DeviceParams::mlc(1.0, 0.11, 0.25).unwrap();
    let s = TrialSetup::new(point(0.11, 0.25, DetectorKind::SumProduct, 1), params, Some(&code), 0).unwrap();
    for batch in 0..3 {
        let stop = StopRule {
            min_wl_errors: u64::MAX,
            max_trials: 16,
            batch: 16,
        };
        let c = run_point(&s, 100 + batch, &stop).unwrap().counts;
        assert!(c.coded_wl_errors * 10 < c.trials);
        assert!(c.coded_ber() <= c.uncoded_ber());
    }
}

#[test]
fn config_file_round_trip_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "r.csv");
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    assert_eq!(SimConfig::load(&path).unwrap(), cfg);
    std::fs::write(&path, format!("{}\nmystery = 1\n", cfg.to_toml())).unwrap();
    assert!(SimConfig::load(&path).is_err());
    assert!(SimConfig::load(&dir.path().join("absent.toml")).is_err());
}

#[test]
fn alist_code_source_loads() {
    let dir = tempfile::tempdir().unwrap();
    let code = generate_code(576, 0.75, 2).unwrap();
    let path = dir.path().join("c.alist");
    code.save(&path).unwrap();
    assert_eq!(CodeSource::Alist(path).load().unwrap(), code);
}
