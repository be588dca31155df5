use std::path::Path;
use std::process::{Command, Output};

fn flashici(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flashici"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_code_writes_alist() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.alist");
    ok(&flashici(&["gen-code", "--n", "576", "--rate", "0.75", "--seed", "4", "-o", path.to_str().unwrap()]));
    let code = flashici_core::LdpcCode::load(&path).unwrap();
    assert_eq!(code.n(), 576);

    let out = flashici(&["gen-code", "--n", "576", "--rate", "0.75", "--seed", "4"]);
    ok(&out);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), std::fs::read_to_string(&path).unwrap());
}

#[test]
fn design_quantizer_merges_into_book() {
    let dir = tempfile::tempdir().unwrap();
    let book = dir.path().join("q.toml");
    let b = book.to_str().unwrap();
    ok(&flashici(&["design-quantizer", "--gamma-v", "0.1,0.12", "--alpha", "0.5", "--fine-bins", "200", "-o", b]));
    ok(&flashici(&["design-quantizer", "--gamma-v", "0.12", "--alpha", "0.25", "--fine-bins", "200", "-o", b]));
    let read = flashici_core::quantizer::QuantizerBook::read(&book).unwrap();
    assert_eq!(read.points.len(), 3);
    assert!(read.find(0.12, 0.25, 1.0).is_some());
}

#[test]
fn sweep_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let cfg = dir.path().join("s.toml");
    std::fs::write(
        &cfg,
        format!(
            "seed = 3\noutput = {:?}\ncoded = false\ndetectors = [\"cell_by_cell\"]\n\
             [sweep]\ngamma_v = [0.14]\nalpha = [0.5]\n[stop]\nmax_trials = 2\nbatch = 2\n",
            csv.to_str().unwrap()
        ),
    )
    .unwrap();
    let svg = dir.path().join("r.svg");
    ok(&flashici(&["sweep", cfg.to_str().unwrap(), "--plot", svg.to_str().unwrap()]));
    let rows = flashici_core::harness::read_csv(&csv).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].coded_ber.is_nan() && rows[0].uncoded_ber > 0.0);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("cell_by_cell uncoded"));

    ok(&flashici(&["plot", csv.to_str().unwrap()]));
    assert!(Path::new(&csv.with_extension("svg")).exists());
}

#[test]
fn bad_inputs_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[sweep]\ngamma_v = []\nalpha = [0.5]\n").unwrap();
    let out = flashici(&["sweep", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert!(!flashici(&["plot", dir.path().join("none.csv").to_str().unwrap()]).status.success());
    assert!(!flashici(&["gen-code", "--rate", "1.5"]).status.success());
}
