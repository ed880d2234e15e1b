//! One-molecule-per-line JSON interchange:
//! `{"atoms": ["C","O"], "bonds": [[0,1,"SINGLE"]]}`.
//!
//! Atoms are listed compactly (no null padding); bond entries are
//! `[i, j, kind]` with `i < j`.

use serde::{Deserialize, Serialize};

use super::{AtomSymbol, MolError, MolMode, MoleculeGraph, Result};

#[derive(Debug, Serialize, Deserialize)]
struct MolRecord {
    atoms: Vec<String>,
    bonds: Vec<(usize, usize, String)>,
}

/// Serializes a molecule as one JSON line (no trailing newline). Slots are
/// compacted: null gaps between atoms are squeezed out and bond indices
/// renumbered, so the line is padding-independent.
pub fn molecule_to_json_line(mol: &MoleculeGraph) -> String {
    let heavy = mol.heavy_atoms();
    let mut remap = vec![usize::MAX; mol.max_atoms()];
    for (new, &old) in heavy.iter().enumerate() {
        remap[old] = new;
    }
    let record = MolRecord {
        atoms: heavy.iter().map(|&i| mol.atom(i).token().to_string()).collect(),
        bonds: mol
            .bond_pairs()
            .into_iter()
            .map(|(i, j, kind)| (remap[i], remap[j], kind.token().to_string()))
            .collect(),
    };
    serde_json::to_string(&record).expect("record serialization cannot fail")
}

/// Parses one JSON line into a molecule of the given mode.
pub fn molecule_from_json_line(line: &str, mode: MolMode) -> Result<MoleculeGraph> {
    let record: MolRecord =
        serde_json::from_str(line).map_err(|e| MolError::BadRecord(e.to_string()))?;
    let atoms = record
        .atoms
        .iter()
        .map(|t| AtomSymbol::from_token(t))
        .collect::<Result<Vec<_>>>()?;
    if atoms.iter().any(|&a| a == AtomSymbol::Null) {
        return Err(MolError::BadRecord("null atoms are implicit, not listed".into()));
    }
    let bonds = record
        .bonds
        .iter()
        .map(|(i, j, t)| Ok((*i, *j, super::BondKind::from_token(t)?)))
        .collect::<Result<Vec<_>>>()?;
    MoleculeGraph::from_parts(mode, &atoms, &bonds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::BondKind;

    #[test]
    fn documented_example_roundtrip() {
        let line = r#"{"atoms":["C","O"],"bonds":[[0,1,"DOUBLE"]]}"#;
        let mol = molecule_from_json_line(line, MolMode::Small).unwrap();
        assert_eq!(mol.n_heavy_atoms(), 2);
        assert_eq!(mol.bond(0, 1), BondKind::Double);
        assert_eq!(mol.is_valid(), Ok(()));
        assert_eq!(molecule_to_json_line(&mol), line);
    }

    #[test]
    fn unknown_tokens_rejected() {
        assert!(molecule_from_json_line(r#"{"atoms":["Zz"],"bonds":[]}"#, MolMode::Small).is_err());
        assert!(molecule_from_json_line(
            r#"{"atoms":["C","C"],"bonds":[[0,1,"QUAD"]]}"#,
            MolMode::Small
        )
        .is_err());
        assert!(molecule_from_json_line("not json", MolMode::Small).is_err());
    }

    #[test]
    fn out_of_mode_symbol_rejected() {
        assert!(molecule_from_json_line(r#"{"atoms":["S"],"bonds":[]}"#, MolMode::Small).is_err());
        assert!(molecule_from_json_line(r#"{"atoms":["S"],"bonds":[]}"#, MolMode::Large).is_ok());
    }
}
