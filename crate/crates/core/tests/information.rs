use darwinism::evolution::StateVector;
use darwinism::information::{
    entropy, mask_of, mutual_information, partial_trace, select_fragments, subsystem_entropy, binomial, FragmentSampler,
};
use darwinism::linalg::{ComplexMatrix, C64};
use darwinism::SubsystemLayout;
use proptest::prelude::*;

/// Reduced density matrix by forming the joint density matrix and summing
/// over the traced-out digits.
fn brute_partial_trace(psi: &StateVector, keep: &[usize]) -> ComplexMatrix {
    let layout = psi.layout();
    let sub: usize = keep.iter().map(|&s| layout.dim(s)).product();
    let amps = psi.amplitudes();
    let n = amps.len();
    let kept_index = |digits: &[usize]| keep.iter().fold(0, |acc, &s| acc * layout.dim(s) + digits[s]);
    let traced_equal = |a: &[usize], b: &[usize]| (0..layout.n_sites()).all(|s| keep.contains(&s) || a[s] == b[s]);
    let mut rho = ComplexMatrix::zeros(sub, sub);
    for i in 0..n {
        let di = layout.digits(i);
        for j in 0..n {
            let dj = layout.digits(j);
            if traced_equal(&di, &dj) {
                rho[(kept_index(&di), kept_index(&dj))] += amps[i] * amps[j].conj();
            }
        }
    }
    rho
}

fn state_strategy() -> impl Strategy<Value = StateVector> {
    (prop::collection::vec(2usize..=3, 2..=4))
        .prop_filter("dimension at most 64", |dims| dims.iter().product::<usize>() <= 64)
        .prop_flat_map(|dims| {
            let total: usize = dims.iter().product();
            (Just(dims), prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), total))
        })
        .prop_filter_map("non-zero", |(dims, amps)| {
            let layout = SubsystemLayout::new(dims).ok()?;
            let amps: Vec<C64> = amps.into_iter().map(|(a, b)| C64::new(a, b)).collect();
            StateVector::normalized(layout, amps).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn partial_trace_matches_joint_density_matrix(psi in state_strategy(), pick in any::<u64>()) {
        let n = psi.layout().n_sites();
        let keep: Vec<usize> = (0..n).filter(|s| pick >> s & 1 == 1).collect();
        prop_assume!(!keep.is_empty());
        let got = partial_trace(&psi, &keep).unwrap();
        let want = brute_partial_trace(&psi, &keep);
        prop_assert!((got - want).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn complementary_entropies_agree(psi in state_strategy(), pick in any::<u64>()) {
        let n = psi.layout().n_sites();
        let a: Vec<usize> = (0..n).filter(|s| pick >> s & 1 == 1).collect();
        let b: Vec<usize> = (0..n).filter(|s| pick >> s & 1 == 0).collect();
        prop_assume!(!a.is_empty() && !b.is_empty());
        let sa = entropy(&brute_partial_trace(&psi, &a)).unwrap();
        let sb = entropy(&brute_partial_trace(&psi, &b)).unwrap();
        prop_assert!((sa - sb).abs() < 1e-8);
        prop_assert!((subsystem_entropy(&psi, mask_of(&a)).unwrap() - sa).abs() < 1e-8);
    }

    #[test]
    fn mutual_information_is_bounded(psi in state_strategy(), pick in any::<u64>()) {
        let n = psi.layout().n_sites();
        let fragment: Vec<usize> = (1..n).filter(|s| pick >> s & 1 == 1).collect();
        let mi = mutual_information(&psi, &fragment).unwrap();
        let s_sys = subsystem_entropy(&psi, mask_of(&[0])).unwrap();
        prop_assert!(mi >= -1e-10);
        prop_assert!(mi <= 2.0 * s_sys + 1e-9);
        if fragment.len() == n - 1 {
            prop_assert!((mi - 2.0 * s_sys).abs() < 1e-8);
        }
    }

    #[test]
    fn sampled_fragments_are_distinct_subsets(n in 2usize..12, size in 1usize..6, k in 1usize..40, seed in any::<u64>()) {
        prop_assume!(size <= n);
        let universe: Vec<usize> = (1..=n).collect();
        let frags = select_fragments(&universe, size, FragmentSampler::Random { k }, seed, &[]);
        let total = binomial(n, size);
        match frags {
            Ok(frags) => {
                prop_assert_eq!(frags.len() as u128, (k as u128).min(total));
                let mut seen = std::collections::BTreeSet::new();
                for f in &frags {
                    prop_assert_eq!(f.len(), size);
                    prop_assert!(f.windows(2).all(|w| w[0] < w[1]));
                    prop_assert!(f.iter().all(|s| universe.contains(s)));
                    prop_assert!(seen.insert(f.clone()));
                }
            }
            Err(_) => prop_assert!(k as u128 > total),
        }
    }
}

#[test]
fn bell_pair_mutual_information_is_two_bits() {
    let layout = SubsystemLayout::uniform(2, 2, 1).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = StateVector::new(layout, vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)]).unwrap();
    assert!((mutual_information(&psi, &[1]).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn ghz_fragments_carry_one_bit() {
    let layout = SubsystemLayout::uniform(2, 2, 4).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); 32];
    amps[0] = C64::new(h, 0.0);
    amps[31] = C64::new(h, 0.0);
    let psi = StateVector::new(layout, amps).unwrap();
    for f in [vec![1], vec![1, 2], vec![2, 3, 4]] {
        assert!((mutual_information(&psi, &f).unwrap() - 1.0).abs() < 1e-12);
    }
    assert!((mutual_information(&psi, &[1, 2, 3, 4]).unwrap() - 2.0).abs() < 1e-12);
}
