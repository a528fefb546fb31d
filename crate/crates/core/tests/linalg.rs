use darwinism::linalg::{embed, embed_product, expm_action, hermitian_eig, kron, identity, ComplexMatrix, KrylovConfig, SparseOperator, C64};
use darwinism::model::operators::{pauli_x, pauli_z};
use darwinism::SubsystemLayout;
use proptest::prelude::*;

fn random_hermitian(d: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        for j in i..d {
            let (re, im) = entries[k % entries.len()];
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

/// exp(-i H t) psi through the full eigendecomposition.
fn dense_propagate(h: &ComplexMatrix, t: f64, psi: &[C64]) -> Vec<C64> {
    let (vals, vecs) = hermitian_eig(h).unwrap();
    let phases = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&e| C64::new(0.0, -e * t).exp()),
    ));
    let u = &vecs * phases * vecs.adjoint();
    let v = u * nalgebra::DVector::from_column_slice(psi);
    v.iter().copied().collect()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn krylov_matches_dense_exponential(
        d in 2usize..24,
        entries in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..64),
        amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 24),
        t in 0.0f64..5.0,
    ) {
        let h = random_hermitian(d, &entries);
        let mut psi: Vec<C64> = amps[..d].iter().map(|&(a, b)| C64::new(a, b)).collect();
        let n = norm(&psi);
        prop_assume!(n > 1e-3);
        psi.iter_mut().for_each(|z| *z /= n);
        let sparse = SparseOperator::from_dense(&h).unwrap();
        let got = expm_action(&sparse, t, &psi, &KrylovConfig::default()).unwrap();
        let want = dense_propagate(&h, t, &psi);
        let err = got.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-9, "max deviation {err}");
        prop_assert!((norm(&got) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn embedding_agrees_with_kronecker_products(site in 0usize..3, n_env in 1usize..3) {
        let layout = SubsystemLayout::uniform(3, 2, n_env).unwrap();
        prop_assume!(site < layout.n_sites());
        let local = if site == 0 {
            darwinism::model::operators::gellmann_x01()
        } else {
            pauli_x()
        };
        let mut full = identity(1);
        for s in 0..layout.n_sites() {
            let factor = if s == site { local.clone() } else { identity(layout.dim(s)) };
            full = kron(&full, &factor);
        }
        let embedded = embed(&local, site, &layout).unwrap().to_dense();
        prop_assert!((embedded - full).iter().all(|z| z.norm() < 1e-14));
    }
}

#[test]
fn product_embedding_of_two_sites() {
    let layout = SubsystemLayout::uniform(2, 2, 2).unwrap();
    let op = embed_product(&[(0, &pauli_z()), (2, &pauli_x())], &layout).unwrap().to_dense();
    let want = kron(&kron(&pauli_z(), &identity(2)), &pauli_x());
    assert!((op - want).iter().all(|z| z.norm() < 1e-14));
}
