use crate::error::{check_len, Result};
use crate::pauli::{Letter, PauliString};

/// Greedy first-fit grouping into qubit-wise compatible sets. Returns indices
/// into `paulis`; each string joins the first group it is compatible with.
pub fn tpb_group(paulis: &[PauliString]) -> Result<Vec<Vec<usize>>> {
    let Some(first) = paulis.first() else {
        return Ok(Vec::new());
    };
    let n = first.len();
    let mut groups: Vec<(PauliString, Vec<usize>)> = Vec::new();
    for (i, p) in paulis.iter().enumerate() {
        check_len(n, p.len())?;
        match groups.iter_mut().find(|(basis, _)| basis.qubitwise_compatible(p)) {
            Some((basis, members)) => {
                for q in (0..n).filter(|&q| p.letter(q) != Letter::I) {
                    basis.set(q, p.letter(q));
                }
                members.push(i);
            }
            None => groups.push((p.unsigned(), vec![i])),
        }
    }
    Ok(groups.into_iter().map(|(_, m)| m).collect())
}

/// The measurement basis shared by a group: the non-identity letter on each
/// qubit, identity where no member acts.
pub fn group_basis(paulis: &[PauliString], members: &[usize]) -> PauliString {
    let n = paulis[members[0]].len();
    let mut basis = PauliString::identity(n);
    for &i in members {
        for q in 0..n {
            if paulis[i].letter(q) != Letter::I {
                basis.set(q, paulis[i].letter(q));
            }
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(v: &[&str]) -> Vec<PauliString> {
        v.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(tpb_group(&ps(&["ZI", "IZ", "ZZ"])).unwrap(), vec![vec![0, 1, 2]]);
        assert_eq!(tpb_group(&ps(&["X", "Z"])).unwrap(), vec![vec![0], vec![1]]);
        let p = ps(&["XI", "IY", "XY", "ZZ"]);
        let g = tpb_group(&p).unwrap();
        assert_eq!(g, vec![vec![0, 1, 2], vec![3]]);
        assert_eq!(group_basis(&p, &g[0]), "XY".parse().unwrap());
        assert!(tpb_group(&ps(&["X", "ZZ"])).is_err());
    }
}
