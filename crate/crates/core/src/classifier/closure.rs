use serde::Serialize;

use super::commutant::orthonormalize_against;
use crate::error::{Error, Result};
use crate::linalg::dense::{hs_norm, ComplexMatrix};

/// Commutators smaller than this fraction of `|g| |x|` count as vanishing.
pub const VANISHING_TOL: f64 = 1e-10;

/// A system-side operator entering the Hamiltonian. `site` is the environment
/// site it couples to, or `None` for system free terms.
#[derive(Debug, Clone)]
pub struct TaggedOp {
    pub op: ComplexMatrix,
    pub site: Option<usize>,
    pub label: String,
}

/// First nested commutator found that mixes two environment sites.
#[derive(Debug, Clone, Serialize)]
pub struct MixingWitness {
    pub sequence: String,
    pub sites: Vec<usize>,
    pub norm: f64,
    #[serde(skip)]
    pub operator: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub enum MixingOutcome {
    Free,
    Mixing(MixingWitness),
}

impl MixingOutcome {
    pub fn is_free(&self) -> bool {
        matches!(self, MixingOutcome::Free)
    }

    pub fn witness(&self) -> Option<&MixingWitness> {
        match self {
            MixingOutcome::Free => None,
            MixingOutcome::Mixing(w) => Some(w),
        }
    }
}

struct Generated {
    op: ComplexMatrix,
    norm: f64,
    desc: String,
}

/// Decide whether nested commutators of the system operators can couple two
/// environment sites.
///
/// Every sequence starts from an operator tagged with site `j`. Applying a
/// free term keeps the tag `{j}`, applying an operator of the same site keeps
/// it too, and applying an operator of another site `j'` produces a term
/// tagged `{j, j'}`, which must vanish. The operators reachable from site `j`
/// without leaving `{j}` span a finite-dimensional space, so tracking one
/// linearly independent generating set per site decides sequences of every
/// length. At most `max_ops` independent operators are kept per site; running
/// past that is reported as [`Error::ClosureInconclusive`].
pub fn mixing_closure(generators: &[TaggedOp], max_ops: usize) -> Result<MixingOutcome> {
    let mut sites: Vec<usize> = generators.iter().filter_map(|g| g.site).collect();
    sites.sort_unstable();
    sites.dedup();
    let gen_norms: Vec<f64> = generators.iter().map(|g| hs_norm(&g.op)).collect();

    for &site in &sites {
        let mut raw: Vec<Generated> = Vec::new();
        let mut ortho: Vec<ComplexMatrix> = Vec::new();
        let mut push = |op: ComplexMatrix, desc: String, raw: &mut Vec<Generated>| -> Result<()> {
            if let Some(b) = orthonormalize_against(&op, &ortho, 1e-9) {
                if ortho.len() >= max_ops {
                    return Err(Error::ClosureInconclusive { max_ops });
                }
                ortho.push(b);
                let norm = hs_norm(&op);
                raw.push(Generated { op, norm, desc });
            }
            Ok(())
        };
        for g in generators.iter().filter(|g| g.site == Some(site)) {
            push(g.op.clone(), g.label.clone(), &mut raw)?;
        }
        let mut next = 0;
        while next < raw.len() {
            for (g, &g_norm) in generators.iter().zip(&gen_norms) {
                let x = &raw[next];
                let y = &g.op * &x.op - &x.op * &g.op;
                let y_norm = hs_norm(&y);
                if y_norm <= VANISHING_TOL * g_norm * x.norm {
                    continue;
                }
                let desc = format!("[{}, {}]", g.label, x.desc);
                match g.site {
                    Some(other) if other != site => {
                        return Ok(MixingOutcome::Mixing(MixingWitness {
                            sequence: desc,
                            sites: vec![site.min(other), site.max(other)],
                            norm: y_norm,
                            operator: y,
                        }));
                    }
                    _ => push(y, desc, &mut raw)?,
                }
            }
            next += 1;
        }
    }
    Ok(MixingOutcome::Free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{dyad, hs_norm};
    use crate::model::operators::{gellmann_x01, gellmann_x02, gellmann_z2, pauli_x, pauli_z};

    fn tagged(op: ComplexMatrix, site: Option<usize>, label: &str) -> TaggedOp {
        TaggedOp { op, site, label: label.to_string() }
    }

    #[test]
    fn shared_operator_is_free() {
        let a = gellmann_z2() + gellmann_x01();
        let gens: Vec<_> = (1..=4).map(|j| tagged(a.clone(), Some(j), "A")).collect();
        assert!(mixing_closure(&gens, 9).unwrap().is_free());
    }

    #[test]
    fn non_commuting_sites_mix() {
        let gens = vec![tagged(gellmann_x02(), Some(1), "X02"), tagged(gellmann_x01(), Some(2), "X01")];
        let out = mixing_closure(&gens, 9).unwrap();
        let w = out.witness().unwrap();
        assert_eq!(w.sites, vec![1, 2]);
        assert!(w.norm > 0.1);
    }

    #[test]
    fn same_site_non_commuting_is_not_mixing() {
        let gens = vec![tagged(pauli_z(), Some(1), "Z"), tagged(pauli_x(), Some(1), "X")];
        assert!(mixing_closure(&gens, 4).unwrap().is_free());
    }

    #[test]
    fn degenerate_counterexample_mixes_at_second_order() {
        let h_s = dyad(3, 0, 2) + dyad(3, 2, 0);
        let s1 = dyad(3, 0, 0) - dyad(3, 1, 1);
        let s2 = dyad(3, 0, 0) - dyad(3, 2, 2);
        let gens = vec![tagged(h_s.clone(), None, "H_S"), tagged(s1, Some(1), "S1"), tagged(s2, Some(2), "S2")];
        let out = mixing_closure(&gens, 9).unwrap();
        let w = out.witness().unwrap();
        assert!(hs_norm(&(&w.operator + h_s.scale(2.0))) <= 1e-10, "{}", w.sequence);
    }

    #[test]
    fn too_small_budget_is_inconclusive() {
        let gens = vec![
            tagged(pauli_z(), None, "Z"),
            tagged(pauli_x(), Some(1), "X"),
        ];
        assert!(matches!(mixing_closure(&gens, 1), Err(Error::ClosureInconclusive { .. })));
    }
}
