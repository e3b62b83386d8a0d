use pauli_prop_cli::{parse_circuit_file, run_from_args};

fn run(args: &[&str]) -> String {
    let mut argv = vec!["pauli-prop"];
    argv.extend_from_slice(args);
    run_from_args(argv).expect("run succeeds")
}

fn field(report: &str, key: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("missing field '{key}' in:\n{report}"))
        .to_string()
}

const BOX2: &str = "# two-qubit example\nNQ 2\nRZZ 1 2\nRX 2\nRX 1\n";

#[test]
fn circuit_grammar_box2() {
    let circ = parse_circuit_file(BOX2).unwrap();
    assert_eq!(circ.nqubits(), 2);
    assert_eq!(circ.gates().len(), 3);
    assert_eq!(circ.nparams(), 3);

    let fixed = parse_circuit_file("NQ 1\nRX 1 theta=0.3\n").unwrap();
    assert_eq!(fixed.nparams(), 0);

    let empty = parse_circuit_file("NQ 3\n").unwrap();
    assert!(empty.gates().is_empty());

    assert!(parse_circuit_file("RX 1\n").is_err());
    assert!(parse_circuit_file("NQ 2\nBOGUS 1\n").is_err());
    assert!(parse_circuit_file("NQ 2\nRX 5\n").is_err());
    assert!(parse_circuit_file("NQ 2\nDEPOL 1\n").is_err());
}

#[test]
fn propagate_mode_reports_box2_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("box2.circ");
    std::fs::write(&circ, BOX2).unwrap();
    let report = run(&[
        "--circuit",
        circ.to_str().unwrap(),
        "--observable",
        "ZI",
        "--thetas=-0.8,1.0471975511965976,0.3",
        "--min-abs-coeff",
        "0",
    ]);
    let value: f64 = field(&report, "expectation").parse().unwrap();
    assert!((value - 0.96).abs() < 0.005);
    assert_eq!(field(&report, "terms"), "3");
}

#[test]
fn dump_round_trips_as_observable() {
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("box2.circ");
    let dump = dir.path().join("sum.txt");
    std::fs::write(&circ, BOX2).unwrap();
    run(&[
        "--circuit",
        circ.to_str().unwrap(),
        "--observable",
        "ZI",
        "--thetas=-0.8,0.7,0.3",
        "--min-abs-coeff",
        "0",
        "--dump-sum",
        dump.to_str().unwrap(),
    ]);
    // re-import the dump through an identity circuit and dump again
    let id_circ = dir.path().join("id.circ");
    std::fs::write(&id_circ, "NQ 2\n").unwrap();
    let dump2 = dir.path().join("sum2.txt");
    run(&[
        "--circuit",
        id_circ.to_str().unwrap(),
        "--observable",
        &format!("@{}", dump.display()),
        "--min-abs-coeff",
        "0",
        "--dump-sum",
        dump2.to_str().unwrap(),
    ]);
    assert_eq!(
        std::fs::read_to_string(&dump).unwrap(),
        std::fs::read_to_string(&dump2).unwrap()
    );
}

#[test]
fn sweep_csv_has_monotone_terms() {
    let report = run(&[
        "--builder",
        "tilted-bricklayer",
        "--nqubits",
        "4",
        "--layers",
        "2",
        "--thetas",
        "0.5",
        "--observable",
        "ZIII",
        "--mode",
        "sweep",
    ]);
    let mut lines = report.lines();
    assert_eq!(
        lines.next().unwrap(),
        "threshold,expectation,nterms,delta_l1,seconds"
    );
    let mut last = 0usize;
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 5);
        let nterms: usize = cols[2].parse().unwrap();
        assert!(nterms >= last, "nterms must grow as thresholds tighten");
        last = nterms;
        rows += 1;
    }
    assert_eq!(rows, 9);
}

#[test]
fn mc_error_is_seed_deterministic() {
    let args = [
        "--builder",
        "bricklayer",
        "--nqubits",
        "2",
        "--layers",
        "1",
        "--observable",
        "ZI",
        "--mode",
        "mc-error",
        "--samples",
        "500",
        "--seed",
        "11",
        "--max-freq",
        "1",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a, b);
    assert!(a.starts_with("samples,seed,mse,stderr\n"));
}

#[test]
fn surrogate_compile_then_eval_matches_propagate() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.json");
    run(&[
        "--builder",
        "tilted-bricklayer",
        "--nqubits",
        "4",
        "--layers",
        "2",
        "--observable",
        "IZII",
        "--mode",
        "surrogate-compile",
        "--out",
        graph.to_str().unwrap(),
    ]);
    let eval = run(&[
        "--mode",
        "surrogate-eval",
        "--surrogate",
        graph.to_str().unwrap(),
        "--thetas",
        "0.37",
    ]);
    let direct = run(&[
        "--builder",
        "tilted-bricklayer",
        "--nqubits",
        "4",
        "--layers",
        "2",
        "--observable",
        "IZII",
        "--thetas",
        "0.37",
        "--min-abs-coeff",
        "0",
    ]);
    let fast: f64 = field(&eval, "expectation").parse().unwrap();
    let slow: f64 = field(&direct, "expectation").parse().unwrap();
    assert!((fast - slow).abs() < 1e-12);
}

#[test]
fn state_specs_are_parsed() {
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("c.circ");
    std::fs::write(&circ, "NQ 2\nRX 1 theta=0.3\n").unwrap();
    // on |10> the Z1 observable flips sign relative to |00>
    let zero = run(&[
        "--circuit",
        circ.to_str().unwrap(),
        "--observable",
        "ZI",
        "--state",
        "00",
    ]);
    let one = run(&[
        "--circuit",
        circ.to_str().unwrap(),
        "--observable",
        "ZI",
        "--state",
        "10",
    ]);
    let a: f64 = field(&zero, "expectation").parse().unwrap();
    let b: f64 = field(&one, "expectation").parse().unwrap();
    assert!((a + b).abs() < 1e-15);
    assert!((a - 0.3f64.cos()).abs() < 1e-15);

    let stab = dir.path().join("state.stab");
    std::fs::write(&stab, "+Z\n-Z\n").unwrap();
    let via_file = run(&[
        "--circuit",
        circ.to_str().unwrap(),
        "--observable",
        "ZI",
        "--state",
        &format!("stab:{}", stab.display()),
    ]);
    let c: f64 = field(&via_file, "expectation").parse().unwrap();
    assert_eq!(a, c);
}

#[test]
fn analyze_mode_reports_magic_fields() {
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("box2.circ");
    std::fs::write(&circ, BOX2).unwrap();
    let report = run(&[
        "--circuit",
        circ.to_str().unwrap(),
        "--observable",
        "ZI",
        "--thetas=-0.8,0.7,0.3",
        "--min-abs-coeff",
        "0",
        "--mode",
        "analyze",
    ]);
    let purity: f64 = field(&report, "pauli purity").parse().unwrap();
    let l1: f64 = field(&report, "normalized l1").parse().unwrap();
    let bound: f64 = field(&report, "l1 lower bound 1/sqrt(purity)")
        .parse()
        .unwrap();
    assert!(purity > 0.0 && purity <= 1.0);
    assert!(l1 + 1e-12 >= bound);
    assert_eq!(field(&report, "paths"), "3");
}

#[test]
fn bad_invocations_fail() {
    assert!(run_from_args(["pauli-prop", "--observable", "ZI"]).is_err());
    assert!(run_from_args([
        "pauli-prop",
        "--builder",
        "bricklayer",
        "--nqubits",
        "2",
        "--observable",
        "ZI",
        "--thetas",
        "0.1,0.2"
    ])
    .is_err());
    assert!(run_from_args([
        "pauli-prop",
        "--builder",
        "nonsense",
        "--nqubits",
        "2",
        "--observable",
        "ZI"
    ])
    .is_err());
}
