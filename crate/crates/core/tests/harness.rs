use madm::harness::{parse_config, parse_config_str, parse_csv, render_csv, run_spec, Axis, Layout, Method};
use madm::scenario::Scenario;
use madm::{Error, Execution};

const SMALL: &str = r#"
[scenario]
id = "small"
grid_nx = 4
grid_nz = 4
ris_my = 8
ris_mz = 8
num_antennas = 4
"#;

#[test]
fn empty_config_is_the_default_scenario() {
    let spec = parse_config_str("").unwrap();
    assert_eq!(spec.scenario, Scenario::default());
    assert_eq!(spec.methods, vec![Method::MaCs]);
    assert_eq!(spec.seeds, vec![1]);
    assert_eq!(spec.axis, Axis::P0Dbm);
    assert!((spec.scenario.noise.bob - 1e-11).abs() <= 1e-25);
    spec.validate().unwrap();
}

#[test]
fn powers_are_converted_from_dbm() {
    let spec = parse_config_str("[scenario]\np0_dbm = 20\nnoise_ris_dbm = -90\n").unwrap();
    assert!((spec.scenario.solver.p0 - 0.1).abs() <= 1e-15);
    assert!((spec.scenario.noise.ris - 1e-12).abs() <= 1e-26);
}

#[test]
fn malformed_axis_names_the_field() {
    let msg = parse_config_str("[sweep]\naxis = \"power\"\nvalues = [1]\n").unwrap_err().to_string();
    assert!(msg.contains("axis"), "{msg}");
    assert!(msg.contains("power"), "{msg}");
}

#[test]
fn unknown_keys_are_rejected() {
    let msg = parse_config_str("[scenario]\np0_dbn = 20\n").unwrap_err().to_string();
    assert!(msg.contains("p0_dbn"), "{msg}");
    assert!(parse_config_str("[extra]\nx = 1\n").is_err());
}

#[test]
fn validation_reports_empty_seeds() {
    let spec = parse_config_str(&format!("{SMALL}\n[run]\nseeds = []\n")).unwrap();
    match spec.validate() {
        Err(Error::Validation(msgs)) => assert!(msgs.iter().any(|m| m.contains("run.seeds")), "{msgs:?}"),
        other => panic!("unexpected {other:?}"),
    }
    assert!(run_spec(&spec, Execution::default()).is_err());
}

#[test]
fn config_files_are_read_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    std::fs::write(&path, SMALL).unwrap();
    let spec = parse_config(&path).unwrap();
    assert_eq!(spec.scenario.id, "small");
    assert_eq!(spec.scenario.grid.len(), 16);
    assert!(parse_config(&dir.path().join("missing.toml")).is_err());
}

#[test]
fn antenna_count_sweep_has_one_column_per_method() {
    let cfg = format!(
        "{SMALL}\n[sweep]\naxis = \"num_antennas\"\nvalues = [2, 4, 6]\n\n\
         [baselines]\nworst_trials = 8\n\n\
         [run]\nmethods = [\"ma-cs\", \"fpa-side\", \"fpa-random\", \"fpa-worst\"]\nseeds = [1, 2]\nlayout = \"wide\"\n"
    );
    let mut spec = parse_config_str(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig.csv");
    spec.out = Some(out.clone());
    let rows = run_spec(&spec, Execution::default()).unwrap();
    assert_eq!(rows.len(), 4 * 3 * 2);
    assert!(rows.iter().all(|r| r.sr >= 0.0));

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "scenario_id,axis,axis_value,seed,ma-cs,fpa-side,fpa-random,fpa-worst");
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), 3 * 2);
    assert!(body.iter().all(|l| l.starts_with("small,num_antennas,") && l.split(',').count() == 8));
    assert!(text.ends_with('\n') && !text.contains('\r'));
}

#[test]
fn emitted_csv_parses_back_to_the_rows() {
    let cfg = format!("{SMALL}\n[sweep]\naxis = \"eta\"\nvalues = [1, 2.5]\n\n[run]\nmethods = [\"ma-cs\", \"robust\"]\nseeds = [4, 9]\n");
    let spec = parse_config_str(&cfg).unwrap();
    let rows = run_spec(&spec, Execution::default()).unwrap();
    let text = render_csv(&rows, Layout::Long).unwrap();
    let back = parse_csv(&text).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in back.iter().zip(&rows) {
        assert_eq!(
            (a.method, a.seed, a.axis_value, a.iterations, a.converged),
            (b.method, b.seed, b.axis_value, b.iterations, b.converged)
        );
        assert!((a.sr - b.sr).abs() <= 1e-11 * b.sr.abs().max(1e-300));
    }
    // Rows come out sorted by (method, axis value, seed).
    let keys: Vec<_> = rows.iter().map(|r| (r.method, r.axis_value.to_bits(), r.seed)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn identical_specs_write_identical_bytes() {
    let cfg = format!("{SMALL}\n[run]\nmethods = [\"ma-cs\", \"nonrobust\"]\nseeds = [1, 2, 3]\n");
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for (k, exec) in [Execution::Parallel, Execution::Parallel, Execution::Sequential].into_iter().enumerate() {
        let mut spec = parse_config_str(&cfg).unwrap();
        let out = dir.path().join(format!("run{k}.csv"));
        spec.out = Some(out.clone());
        run_spec(&spec, exec).unwrap();
        texts.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
}

#[test]
fn artificial_noise_power_axis_changes_the_rate() {
    let cfg = format!("{SMALL}\n[sweep]\naxis = \"an_power_dbm\"\nvalues = [-30, 0, 15]\n");
    let spec = parse_config_str(&cfg).unwrap();
    let rows = run_spec(&spec, Execution::default()).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.sr.is_finite() && r.sr >= 0.0));
    assert!(rows.windows(2).any(|w| w[0].sr != w[1].sr));
}

#[test]
fn bad_sweep_points_are_all_reported() {
    let cfg = format!("{SMALL}\n[sweep]\naxis = \"ris_elements\"\nvalues = [64, 50, 0]\n");
    let spec = parse_config_str(&cfg).unwrap();
    match spec.validate() {
        Err(Error::Validation(msgs)) => {
            assert!(msgs.iter().any(|m| m.contains("= 50")), "{msgs:?}");
            assert!(msgs.iter().any(|m| m.contains("= 0")), "{msgs:?}");
            assert!(!msgs.iter().any(|m| m.contains("= 64")), "{msgs:?}");
        }
        other => panic!("unexpected {other:?}"),
    }
}
