use darwinism::classifier::{
    check_initial_state, check_initial_state_for_model, classify, commutant, mixing_closure, pointer_observable, Overall, TaggedOp, VerdictReport,
};
use darwinism::experiments::{make_initial_state, InitialStateKind};
use darwinism::linalg::{commutator, hs_norm, kron, identity, ComplexMatrix, C64};
use darwinism::linalg::dense::dyad;
use darwinism::model::{preset, Preset, PresetParams};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Dimension of {X : [G, X] = 0 for all G}, from the rank of the stacked
/// superoperators `I (x) G - G^T (x) I` acting on column-stacked X.
fn brute_commutant_dim(gens: &[ComplexMatrix], d: usize) -> usize {
    if gens.is_empty() {
        return d * d;
    }
    let id = identity(d);
    let mut rows: Vec<ComplexMatrix> = Vec::new();
    for g in gens {
        rows.push(kron(&id, g) - kron(&g.transpose(), &id));
    }
    let mut stacked = DMatrix::<C64>::zeros(d * d * rows.len(), d * d);
    for (k, r) in rows.iter().enumerate() {
        stacked.view_mut((k * d * d, 0), (d * d, d * d)).copy_from(r);
    }
    let svd = stacked.svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-9 * smax.max(1.0)).count();
    d * d - rank
}

fn hermitian_from(d: usize, vals: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        for j in i..d {
            let re = vals[k % vals.len()];
            let im = vals[(k + 7) % vals.len()];
            k += 1;
            if i == j {
                m[(i, i)] = C64::new(re, 0.0);
            } else {
                m[(i, j)] = C64::new(re, im);
                m[(j, i)] = C64::new(re, -im);
            }
        }
    }
    m
}

/// A generator set with a prescribed block structure: random Hermitian blocks
/// on a partition of `d`, so the commutant is nontrivial in general.
fn block_diag(d: usize, split: usize, vals: &[f64], shift: usize) -> ComplexMatrix {
    let rotated: Vec<f64> = vals.iter().cycle().skip(shift).take(vals.len()).cloned().collect();
    let mut m = ComplexMatrix::zeros(d, d);
    let a = hermitian_from(split, &rotated);
    let b = hermitian_from(d - split, &rotated[1..]);
    m.view_mut((0, 0), (split, split)).copy_from(&a);
    m.view_mut((split, split), (d - split, d - split)).copy_from(&b);
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutant_is_sound_and_complete(
        d in 2usize..=4,
        n_gens in 0usize..3,
        split in 1usize..4,
        block in any::<bool>(),
        vals in prop::collection::vec(-1.0f64..1.0, 8..20),
    ) {
        let split = split.min(d - 1);
        let gens: Vec<ComplexMatrix> = (0..n_gens)
            .map(|k| if block { block_diag(d, split, &vals, 3 * k) } else {
                let rotated: Vec<f64> = vals.iter().cycle().skip(5 * k).take(vals.len()).cloned().collect();
                hermitian_from(d, &rotated)
            })
            .collect();
        let comm = commutant(&gens, d).unwrap();
        prop_assert_eq!(comm.dim(), brute_commutant_dim(&gens, d));
        for x in &comm.basis {
            for g in &gens {
                prop_assert!(hs_norm(&commutator(g, x).unwrap()) < 1e-9);
            }
        }
        if let Some(p) = pointer_observable(&comm).unwrap() {
            for g in &gens {
                prop_assert!(hs_norm(&commutator(g, &p.operator).unwrap()) < 1e-8);
            }
            let b = &p.basis;
            prop_assert!((b.adjoint() * b - identity(d)).iter().all(|z| z.norm() < 1e-9));
        }
    }
}

#[test]
fn preset_table() {
    use Overall::*;
    let expect = [
        (Preset::A, SupportsQd),
        (Preset::B, SupportsQd),
        (Preset::C, SupportsQd),
        (Preset::D, FailsNoPointer),
        (Preset::E, SupportsQd),
        (Preset::F, FailsNoPointer),
        (Preset::G, FailsNoPointer),
        (Preset::H, SupportsQd),
        (Preset::I, SupportsQd),
        (Preset::J, StatePrepPrefix { cutoff: 1.0 }),
        (Preset::K, StatePrepPrefix { cutoff: 5.0 }),
        (Preset::L, FailsNoPointer),
        (Preset::Demon, FailsNoPointer),
        (Preset::Qubit, SupportsQd),
    ];
    for (p, want) in expect {
        let model = preset(p, p.default_n_env(), &PresetParams::default()).unwrap();
        let v = classify(&model).unwrap();
        assert_eq!(v.overall, want, "{p}: {}", v.reason);
    }
}

#[test]
fn model_a_pointer_basis_diagonalizes_the_system_operator() {
    let model = preset(Preset::A, 10, &PresetParams::default()).unwrap();
    let v = classify(&model).unwrap();
    let p = v.pointer.unwrap();
    let s = darwinism::model::operators::gellmann_z2() + darwinism::model::operators::gellmann_x01();
    let rotated = p.basis.adjoint() * &s * &p.basis;
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                assert!(rotated[(i, j)].norm() < 1e-9);
            }
        }
    }
    assert!(!p.degenerate);
}

#[test]
fn model_l_reports_missing_pointer() {
    let model = preset(Preset::L, 12, &PresetParams::default()).unwrap();
    let v = classify(&model).unwrap();
    assert_eq!(v.overall, Overall::FailsNoPointer);
    assert!(v.reason.contains("no time-independent pointer observable"), "{}", v.reason);
}

#[test]
fn degenerate_mixing_counterexample() {
    let h_s = dyad(3, 0, 2) + dyad(3, 2, 0);
    let s1 = dyad(3, 0, 0) - dyad(3, 1, 1);
    let s2 = dyad(3, 0, 0) - dyad(3, 2, 2);
    let tag = |op: ComplexMatrix, site: Option<usize>, label: &str| TaggedOp { op, site, label: label.into() };
    let out = mixing_closure(&[tag(h_s.clone(), None, "H_S"), tag(s1, Some(1), "S1"), tag(s2, Some(2), "S2")], 9).unwrap();
    let w = out.witness().expect("mixing expected");
    assert!(hs_norm(&(&w.operator + h_s.scale(2.0))) <= 1e-10);
    assert_eq!(w.sites, vec![1, 2]);
}

#[test]
fn report_serializes() {
    let model = preset(Preset::D, 4, &PresetParams::default()).unwrap();
    let v = classify(&model).unwrap();
    let report = VerdictReport::new("D", &v);
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["overall"]["kind"], "fails_no_pointer");
}

#[test]
fn branching_check_separates_state_families() {
    let model = preset(Preset::A, 6, &PresetParams::default()).unwrap();
    let sbf = make_initial_state(&InitialStateKind::Sbf, model.layout(), 3).unwrap();
    let ent = make_initial_state(&InitialStateKind::Ent, model.layout(), 3).unwrap();
    let prod = make_initial_state(&InitialStateKind::Prod, model.layout(), 3).unwrap();
    // sbf branches along the computational basis of the system
    assert!(check_initial_state(&sbf, &identity(3), None, 1e-8).unwrap());
    assert!(!check_initial_state(&ent, &identity(3), None, 1e-8).unwrap());
    assert!(check_initial_state_for_model(&prod, &model, 1e-8).unwrap());
    assert!(!check_initial_state_for_model(&ent, &model, 1e-8).unwrap());
}
