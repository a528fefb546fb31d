use darwinism::experiments::*;
use darwinism::information::FragmentSampler;
use darwinism::linalg::C64;
use darwinism::model::{CoefficientDistribution, Preset, PresetParams};
use darwinism::{Error, SubsystemLayout};

fn spec_a(n_env: usize) -> ExperimentSpec {
    ExperimentSpec::new(ModelSource::preset(Preset::A, n_env), InitialStateKind::QutritProduct)
}

#[test]
fn qutrit_product_amplitudes_are_uniform() {
    let layout = SubsystemLayout::uniform(3, 2, 10).unwrap();
    let psi = make_initial_state(&InitialStateKind::QutritProduct, &layout, 0).unwrap();
    let want = 1.0 / (3.0 * 1024.0f64).sqrt();
    assert!(psi.amplitudes().iter().all(|a| (a - C64::new(want, 0.0)).norm() < 1e-14));
    assert!((psi.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn y_product_amplitudes() {
    let layout = SubsystemLayout::uniform(2, 2, 11).unwrap();
    let psi = make_initial_state(&InitialStateKind::YProduct, &layout, 0).unwrap();
    let amps = psi.amplitudes();
    let scale = 2f64.powf(-6.0);
    for (idx, a) in amps.iter().enumerate() {
        let ones = idx.count_ones() as i32;
        let want = C64::new(0.0, 1.0).powi(ones) * scale;
        assert!((a - want).norm() < 1e-14, "index {idx}");
    }
}

#[test]
fn incompatible_layouts_are_rejected() {
    let layout = SubsystemLayout::uniform(2, 2, 3).unwrap();
    assert!(matches!(
        make_initial_state(&InitialStateKind::QutritProduct, &layout, 0),
        Err(Error::IncompatibleState(_))
    ));
    let qutrit = SubsystemLayout::uniform(3, 2, 3).unwrap();
    assert!(make_initial_state(&InitialStateKind::YProduct, &qutrit, 0).is_err());
}

#[test]
fn random_states_depend_only_on_the_state_seed() {
    let layout = SubsystemLayout::uniform(3, 2, 4).unwrap();
    for kind in [InitialStateKind::Ent, InitialStateKind::Sep, InitialStateKind::Prod, InitialStateKind::Sbf] {
        let a = make_initial_state(&kind, &layout, 5).unwrap();
        let b = make_initial_state(&kind, &layout, 5).unwrap();
        let c = make_initial_state(&kind, &layout, 6).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
        assert_ne!(a.amplitudes(), c.amplitudes());
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn runs_are_bit_identical_across_worker_counts() {
    let spec = spec_a(5).trials(6).linear_times(2.0, 5).seed(9).sampler(FragmentSampler::Random { k: 3 });
    let one = run_with(&spec, RunOptions { workers: Some(1) }).unwrap();
    let three = run_with(&spec, RunOptions { workers: Some(3) }).unwrap();
    assert_eq!(one.profile, three.profile);
    assert_eq!(one.trials, three.trials);
    let again = run(&spec).unwrap();
    assert_eq!(one.profile, again.profile);
}

#[test]
fn trial_seeds_follow_the_master_seed() {
    let spec = spec_a(3).trials(4).linear_times(1.0, 2).seed(100);
    let r = run(&spec).unwrap();
    let seeds: Vec<u64> = r.trials.iter().map(|t| t.seed).collect();
    assert_eq!(seeds, vec![100, 101, 102, 103]);
    assert_eq!(r.caveat, AVERAGING_CAVEAT);
}

#[test]
fn profile_csv_round_trips() {
    let spec = spec_a(4).trials(2).linear_times(1.0, 3).seed(1);
    let r = run(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    write_profile_csv(&r, std::fs::File::create(&path).unwrap()).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "time,fragment_size,mean_mi,mean_mi_normalized,stderr,trials,n_env");
    let rows = read_profile_csv(&path).unwrap();
    assert_eq!(rows, profile_rows(&r));
    assert_eq!(rows.len(), 3 * 5);

    let meta = dir.path().join("profile.json");
    write_metadata(&r, 0.15, &meta).unwrap();
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&meta).unwrap()).unwrap();
    assert_eq!(json["seeds"]["master"], 1);
    assert_eq!(json["verdict"]["overall"]["kind"], "supports_qd");
    assert_eq!(json["caveat"], AVERAGING_CAVEAT);
    let echoed: ExperimentSpec = serde_json::from_value(json["spec"].clone()).unwrap();
    assert_eq!(echoed, spec);
}

#[test]
fn resource_caps_are_enforced() {
    let mut spec = spec_a(3).trials(3);
    spec.max_trials = 2;
    assert!(matches!(run(&spec), Err(Error::ResourceCap(_))));
    let spec = spec_a(13);
    assert!(matches!(run(&spec), Err(Error::DimensionCap { .. })));
    assert!(run(&spec_a(3).trials(0)).is_err());
}

#[test]
fn demon_starts_uncorrelated_and_stays_normalized() {
    let spec = ExperimentSpec::new(ModelSource::preset(Preset::Demon, 6), InitialStateKind::Demon)
        .explicit_times(vec![0.0, 2.5, 6.0])
        .sampler(FragmentSampler::Exhaustive)
        .universe(UniverseMode::All);
    let d = run_demon(&spec).unwrap();
    let first = &d.result.profile.slices[0];
    assert!(first.cells.iter().all(|c| c.mean_mi.abs() < 1e-10));
    assert_eq!(d.r2.len(), 3);
    assert!(run_demon(&spec_a(3)).is_err());
}

#[test]
fn collision_universe_grows_with_opened_windows() {
    let model = darwinism::model::preset(Preset::I, 6, &PresetParams::default()).unwrap();
    assert_eq!(fragment_universe(&model, 0.0, UniverseMode::Opened), vec![1]);
    assert_eq!(fragment_universe(&model, 2.5, UniverseMode::Opened), vec![1, 2, 3]);
    assert_eq!(fragment_universe(&model, 2.5, UniverseMode::All).len(), 6);
}

#[test]
fn stderr_shrinks_like_inverse_root_trials() {
    let base = spec_a(6).explicit_times(vec![2.0]).sizes(vec![1]).seed(3);
    let se = |trials| {
        let r = run(&base.clone().trials(trials)).unwrap();
        r.profile.slices[0].cell(1).unwrap().stderr
    };
    let (s25, s100, s400) = (se(25), se(100), se(400));
    for (ratio, label) in [(s25 / s100, "25/100"), (s100 / s400, "100/400")] {
        assert!((ratio / 2.0 - 1.0).abs() <= 0.3, "{label}: ratio {ratio}");
    }
}

#[test]
fn coupling_sweep_shows_revival_only_for_discrete_support() {
    let base = ExperimentSpec::new(ModelSource::preset(Preset::Qubit, 6), InitialStateKind::Preset)
        .trials(40)
        .linear_times(4.0, 201);
    let axis = SweepAxis::DistributionKind(vec![
        CoefficientDistribution::unit_normal(),
        CoefficientDistribution::Rademacher { magnitude: 1.0 },
    ]);
    let sweep = run_sweep(&base, &axis, SweepMeasure::Decoherence { pair: (0, 1) }, RunOptions::default()).unwrap();
    let normal = sweep.entries[0].revival_distance().unwrap();
    let rademacher = sweep.entries[1].revival_distance().unwrap();
    // the grid misses the exact revival time pi/2 by 0.01
    assert!(rademacher < 1e-3, "{rademacher}");
    assert!(normal > 0.5, "{normal}");
    let mut table = Vec::new();
    write_sweep_summary(&sweep, 0.15, &mut table).unwrap();
    let table = String::from_utf8(table).unwrap();
    assert!(table.starts_with("distribution_kind,"));
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn replaced_unit_axis_needs_a_preset() {
    let mut base = spec_a(3);
    base.model = ModelSource::Inline {
        model: darwinism::model::ModelFile::from_json(r#"{"name": "x", "layout": [2, 2], "interactions": [{"system_op": "z", "env_site": 1, "env_op": "z"}]}"#).unwrap(),
    };
    let axis = SweepAxis::ReplacedUnitIndex(vec![1]);
    assert!(run_sweep(&base, &axis, SweepMeasure::Profile, RunOptions::default()).is_err());
}
