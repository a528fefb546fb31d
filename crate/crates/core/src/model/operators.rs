//! Named local operators.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::dense::{dyad, from_rows, ComplexMatrix, I, ONE, ZERO};

pub fn pauli_x() -> ComplexMatrix {
    from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

pub fn pauli_y() -> ComplexMatrix {
    from_rows(&[&[ZERO, -I], &[I, ZERO]])
}

pub fn pauli_z() -> ComplexMatrix {
    from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]])
}

/// `(|0><0| + |1><1| - 2|2><2|) / sqrt(3)`.
pub fn gellmann_z2() -> ComplexMatrix {
    gellmann(8).expect("index in range")
}

/// `|0><1| + |1><0|` on a qutrit.
pub fn gellmann_x01() -> ComplexMatrix {
    gellmann(1).expect("index in range")
}

/// `|0><2| + |2><0|` on a qutrit.
pub fn gellmann_x02() -> ComplexMatrix {
    gellmann(4).expect("index in range")
}

/// Symmetric off-diagonal generator `|i><j| + |j><i|`.
pub fn sym_offdiag(dim: usize, i: usize, j: usize) -> ComplexMatrix {
    dyad(dim, i, j) + dyad(dim, j, i)
}

/// Antisymmetric off-diagonal generator `-i|i><j| + i|j><i|`.
pub fn asym_offdiag(dim: usize, i: usize, j: usize) -> ComplexMatrix {
    dyad(dim, i, j) * (-I) + dyad(dim, j, i) * I
}

/// Gell-Mann matrices `lambda_1..lambda_8` in the standard numbering.
pub fn gellmann(index: usize) -> Result<ComplexMatrix> {
    let m = match index {
        1 => sym_offdiag(3, 0, 1),
        2 => asym_offdiag(3, 0, 1),
        3 => dyad(3, 0, 0) - dyad(3, 1, 1),
        4 => sym_offdiag(3, 0, 2),
        5 => asym_offdiag(3, 0, 2),
        6 => sym_offdiag(3, 1, 2),
        7 => asym_offdiag(3, 1, 2),
        8 => (dyad(3, 0, 0) + dyad(3, 1, 1) - dyad(3, 2, 2) * C64::new(2.0, 0.0))
            .unscale(3f64.sqrt()),
        _ => return Err(Error::Parse(format!("no Gell-Mann matrix with index {index}"))),
    };
    Ok(m)
}

/// Resolve an operator name: `pauli_x|y|z`, `sigma_x|y|z`, `gellmann_1..8`,
/// `identity`, or a number-basis dyad `dyad_<i>_<j>` (dimension taken from `dim`).
pub fn by_name(name: &str, dim: usize) -> Result<ComplexMatrix> {
    let op = match name {
        "pauli_x" | "sigma_x" | "x" => pauli_x(),
        "pauli_y" | "sigma_y" | "y" => pauli_y(),
        "pauli_z" | "sigma_z" | "z" => pauli_z(),
        "identity" => ComplexMatrix::identity(dim, dim),
        _ => {
            if let Some(k) = name.strip_prefix("gellmann_") {
                let k: usize = k.parse().map_err(|_| Error::Parse(format!("bad operator name {name:?}")))?;
                gellmann(k)?
            } else if let Some(rest) = name.strip_prefix("dyad_") {
                let parts: Vec<usize> = rest
                    .split('_')
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Parse(format!("bad operator name {name:?}")))?;
                match parts.as_slice() {
                    [i, j] if *i < dim && *j < dim => dyad(dim, *i, *j),
                    _ => return Err(Error::Parse(format!("bad dyad {name:?} for dimension {dim}"))),
                }
            } else {
                return Err(Error::Parse(format!("unknown operator {name:?}")));
            }
        }
    };
    if op.nrows() != dim {
        return Err(Error::DimensionMismatch(format!(
            "operator {name:?} has dimension {} but the site has dimension {dim}",
            op.nrows()
        )));
    }
    Ok(op)
}

/// Truncated bosonic annihilation operator on `levels` Fock states.
pub fn annihilation(levels: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(levels, levels, |i, j| {
        if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { ZERO }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{is_hermitian, trace, HERMITIAN_TOL};

    #[test]
    fn gellmann_are_hermitian_traceless_and_normalized() {
        for k in 1..=8 {
            let g = gellmann(k).unwrap();
            assert!(is_hermitian(&g, HERMITIAN_TOL));
            assert!(trace(&g).norm() < 1e-15);
            // tr(l_a l_b) = 2 delta_ab
            assert!((trace(&(&g * &g)).re - 2.0).abs() < 1e-14);
        }
        assert!(gellmann(0).is_err());
        assert!(gellmann(9).is_err());
    }

    #[test]
    fn named_lookup() {
        assert_eq!(by_name("pauli_z", 2).unwrap(), pauli_z());
        assert_eq!(by_name("gellmann_8", 3).unwrap(), gellmann_z2());
        assert_eq!(by_name("dyad_0_2", 3).unwrap(), dyad(3, 0, 2));
        assert!(by_name("pauli_z", 3).is_err());
        assert!(by_name("dyad_0_3", 3).is_err());
        assert!(by_name("bogus", 2).is_err());
    }
}
