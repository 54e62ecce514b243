use proptest::prelude::*;
use sectorcap::config::{Antenna, ExperimentConfig, SweepAxis, TableFormat};
use sectorcap::orientation::draw_orientations;
use sectorcap::streams;
use sectorcap::table::{agrees, content_id, format_float, write_table, Audit, Cell, Table};
use sectorcap::AppError;
use sectorcap_core::montecarlo::Estimate;
use std::f64::consts::{PI, TAU};

#[test]
fn empty_file_gives_the_defaults() {
    let cfg = ExperimentConfig::from_toml_str("", "<empty>").unwrap();
    assert_eq!(cfg, ExperimentConfig::default());
    assert_eq!(cfg.mc.seed, sectorcap::DEFAULT_SEED);
    assert_eq!(cfg.sweep.values.len(), 9);
}

#[test]
fn partial_sections_keep_other_defaults() {
    let cfg = ExperimentConfig::from_toml_str("[scenario]\nrho = 0.25\n", "<t>").unwrap();
    assert_eq!(cfg.scenario.rho, 0.25);
    assert_eq!(cfg.scenario.sectors, 8);
    assert_eq!(cfg.roc, ExperimentConfig::default().roc);
}

#[test]
fn error_categories_and_codes() {
    let e = ExperimentConfig::from_toml_str("[mc]\nframez = 3\n", "x.toml").unwrap_err();
    assert!(matches!(e, AppError::Config { .. }));
    assert_eq!((e.category(), e.exit_code()), ("config", 3));

    let e = ExperimentConfig::from_toml_str("[scenario]\nsectors = 1\n", "x.toml").unwrap_err();
    assert_eq!((e.category(), e.exit_code()), ("validation", 6));

    let e = ExperimentConfig::from_toml_str("[averaging]\nphi_3db_deg = []\nomni = false\n", "x.toml").unwrap_err();
    assert_eq!(e.category(), "validation");
}

#[test]
fn resolve_converts_units() {
    let mut cfg = ExperimentConfig::default();
    cfg.scenario.p_bar_db = 10.0;
    cfg.scenario.i_bar_db = -10.0;
    cfg.scenario.phi_3db_deg = 90.0;
    let s = cfg.scenario.resolve().unwrap();
    assert!((s.p_bar - 10.0).abs() < 1e-12);
    assert!((s.i_bar - 0.1).abs() < 1e-15);
    assert!((s.phi_3db - PI / 2.0).abs() < 1e-15);
}

#[test]
fn sensing_window_longer_than_the_frame_is_rejected_on_resolve() {
    let mut cfg = ExperimentConfig::default();
    cfg.scenario.t_sense_ms = 20.0;
    assert!(cfg.scenario.resolve().is_err());
}

#[test]
fn sweep_axes_touch_one_field() {
    let base = ExperimentConfig::default().scenario;
    let cases = [
        (SweepAxis::PBarDb, 7.0),
        (SweepAxis::IBarDb, -2.0),
        (SweepAxis::PdTarget, 0.6),
        (SweepAxis::Rho, 0.3),
        (SweepAxis::Pi1, 0.2),
    ];
    for (axis, v) in cases {
        let s = axis.apply(&base, v);
        let mut expected = base.clone();
        match axis {
            SweepAxis::PBarDb => expected.p_bar_db = v,
            SweepAxis::IBarDb => expected.i_bar_db = v,
            SweepAxis::PdTarget => expected.pd_target = v,
            SweepAxis::Rho => expected.rho = v,
            SweepAxis::Pi1 => expected.pi1 = v,
        }
        assert_eq!(s, expected, "{}", axis.name());
    }
}

#[test]
fn antenna_labels() {
    assert_eq!(Antenna::Sectored { phi_3db_deg: 20.0 }.label(), "ra20");
    assert_eq!(Antenna::Omni.label(), "omni");
}

#[test]
fn content_id_matches_git_sha256_blobs() {
    // `git hash-object` in a sha256 repository
    assert_eq!(content_id(b""), "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813");
    assert_eq!(content_id(b"hello\n"), "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4");
}

#[test]
fn table_bytes_and_sidecar() {
    let mut t = Table::new("demo", &["x", "label", "ok"]);
    t.push(vec![Cell::from(0.5), Cell::from("a,b"), Cell::from(true)]);
    t.push(vec![Cell::from(3u64), Cell::from("c"), Cell::from(false)]);
    let csv = String::from_utf8(t.to_bytes(TableFormat::Csv).unwrap()).unwrap();
    assert_eq!(csv, "x,label,ok\n0.5,\"a,b\",true\n3,c,false\n");
    let tsv = String::from_utf8(t.to_bytes(TableFormat::Tsv).unwrap()).unwrap();
    assert_eq!(tsv, "x\tlabel\tok\n0.5\ta,b\ttrue\n3\tc\tfalse\n");
    assert_eq!(t.floats("x"), vec![0.5, 3.0]);
    assert!(t.floats("missing").is_empty());

    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::default();
    let path = write_table(&t, &cfg, 11, dir.path()).unwrap();
    assert_eq!(path, dir.path().join("demo.csv"));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("demo.json")).unwrap()).unwrap();
    assert_eq!(meta["content_id"], content_id(csv.as_bytes()));
    assert_eq!(meta["rows"], 2);
    assert_eq!(meta["seed"], 11);
    assert_eq!(meta["columns"][1], "label");
}

#[test]
fn audit_flags_only_disagreements() {
    let mut a = Audit::default();
    let est = Estimate { value: 1.0, se: 0.1, n: 100 };
    assert!(a.check(0, "q", 1.25, &est, 0.0));
    assert!(!a.check(1, "q", 1.35, &est, 0.0));
    assert!(a.check(2, "q", 1.35, &est, 0.06));
    assert_eq!(a.checks, 3);
    assert_eq!(a.flags.len(), 1);
    assert_eq!(a.flags[0].row, 1);
    assert!((a.flags[0].allowed - 0.3).abs() < 1e-15);
}

#[test]
fn orientations_cover_the_first_sector_pair() {
    let o = draw_orientations(3, 2000, 8);
    assert_eq!(o, draw_orientations(3, 2000, 8));
    assert_ne!(o[..10], draw_orientations(4, 10, 8)[..]);
    assert!(o.iter().all(|x| (0.0..TAU).contains(&x.phi_pu) && (0.0..TAU / 8.0).contains(&x.phi_sr)));
    let mean_sr = o.iter().map(|x| x.phi_sr).sum::<f64>() / o.len() as f64;
    // U[0, π/4): mean π/8, sd π/(8√3)/√2000
    assert!((mean_sr - PI / 8.0).abs() < 4.0 * PI / (8.0 * 3f64.sqrt()) / 2000f64.sqrt());
}

proptest! {
    #[test]
    fn floats_round_trip_through_text(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let s = format_float(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn config_survives_toml_round_trip(
        rho in 0.0..0.99f64,
        p in -20.0..20.0f64,
        frames in 1u64..1_000_000,
        seed in any::<u32>(),
        values in prop::collection::vec(-10.0..10.0f64, 1..6),
    ) {
        let mut cfg = ExperimentConfig::default();
        cfg.scenario.rho = rho;
        cfg.scenario.p_bar_db = p;
        cfg.mc.frames = frames;
        cfg.mc.seed = seed as u64;
        cfg.sweep.values = values;
        let text = toml::to_string(&cfg).unwrap();
        let back = ExperimentConfig::from_toml_str(&text, "<round trip>").unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn stream_ids_are_injective(f1 in 0u64..64, i1 in any::<u32>(), f2 in 0u64..64, i2 in any::<u32>()) {
        let (a, b) = (streams::id(f1, i1 as u64), streams::id(f2, i2 as u64));
        prop_assert_eq!(a == b, (f1, i1) == (f2, i2));
    }

    #[test]
    fn agreement_is_symmetric_and_monotone_in_slack(
        a in -5.0..5.0f64, v in -5.0..5.0f64, se in 0.0..1.0f64, s1 in 0.0..1.0f64, s2 in 0.0..1.0f64,
    ) {
        let est = Estimate { value: v, se, n: 10 };
        let mirrored = Estimate { value: a, se, n: 10 };
        prop_assert_eq!(agrees(a, &est, s1), agrees(v, &mirrored, s1));
        if agrees(a, &est, s1.min(s2)) {
            prop_assert!(agrees(a, &est, s1.max(s2)));
        }
    }
}
