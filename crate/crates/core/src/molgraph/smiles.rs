//! Deterministic SMILES emission.
//!
//! Depth-first traversal from the lowest-index atom, neighbours in index
//! order, ring closures numbered from 1 in back-edge discovery order. Bonds
//! are emitted as typed symbols ("", "=", "#", ":") with no aromatic
//! perception; ring-closure bond symbols are written at both endpoints. The
//! wildcard atom X is emitted as `*`.

use super::{AtomSymbol, BondKind, MolError, MoleculeGraph, Result};

fn bond_symbol(kind: BondKind) -> &'static str {
    match kind {
        BondKind::Null => "",
        BondKind::Single => "",
        BondKind::Double => "=",
        BondKind::Triple => "#",
        BondKind::Aromatic => ":",
    }
}

fn atom_text(symbol: AtomSymbol) -> &'static str {
    match symbol {
        AtomSymbol::X => "*",
        other => other.token(),
    }
}

#[derive(Default)]
struct Traversal {
    /// Tree children per atom, in visit order.
    children: Vec<Vec<usize>>,
    /// Ring-closure digits attached to each atom: (digit, bond kind).
    ring_digits: Vec<Vec<(usize, BondKind)>>,
}

/// Writes a valid molecule as SMILES. Invalid molecules are refused: the
/// traversal relies on connectivity.
pub fn to_smiles(mol: &MoleculeGraph) -> Result<String> {
    mol.is_valid().map_err(MolError::InvalidMolecule)?;
    let heavy = mol.heavy_atoms();
    let root = heavy[0];
    let n = mol.max_atoms();

    // Pass 1: DFS to build the spanning tree and assign ring digits.
    // Recursion depth is bounded by the 32-atom capacity.
    let mut t = Traversal {
        children: vec![Vec::new(); n],
        ring_digits: vec![Vec::new(); n],
    };
    let mut visited = vec![false; n];
    let mut ring_seen = vec![false; n * n];
    let mut next_digit = 1;
    dfs(mol, root, usize::MAX, &mut visited, &mut ring_seen, &mut next_digit, &mut t);

    // Pass 2: emit.
    let mut out = String::new();
    emit(mol, &t, root, BondKind::Null, &mut out);
    Ok(out)
}

fn dfs(
    mol: &MoleculeGraph,
    atom: usize,
    parent: usize,
    visited: &mut [bool],
    ring_seen: &mut [bool],
    next_digit: &mut usize,
    t: &mut Traversal,
) {
    let n = mol.max_atoms();
    visited[atom] = true;
    for next in 0..n {
        if next == atom || next == parent || mol.bond(atom, next) == BondKind::Null {
            continue;
        }
        if visited[next] {
            // Back edge → ring closure, recorded once per unordered pair.
            let key = atom.min(next) * n + atom.max(next);
            if !ring_seen[key] {
                ring_seen[key] = true;
                let kind = mol.bond(atom, next);
                t.ring_digits[atom].push((*next_digit, kind));
                t.ring_digits[next].push((*next_digit, kind));
                *next_digit += 1;
            }
        } else {
            t.children[atom].push(next);
            dfs(mol, next, atom, visited, ring_seen, next_digit, t);
        }
    }
}

fn emit(mol: &MoleculeGraph, t: &Traversal, atom: usize, inbound: BondKind, out: &mut String) {
    out.push_str(bond_symbol(inbound));
    out.push_str(atom_text(mol.atom(atom)));
    for &(digit, kind) in &t.ring_digits[atom] {
        out.push_str(bond_symbol(kind));
        out.push_str(&digit.to_string());
    }
    let children = &t.children[atom];
    for (idx, &child) in children.iter().enumerate() {
        let bond = mol.bond(atom, child);
        if idx + 1 < children.len() {
            out.push('(');
            emit(mol, t, child, bond, out);
            out.push(')');
        } else {
            emit(mol, t, child, bond, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::MolMode;

    fn mol(atoms: &[AtomSymbol], bonds: &[(usize, usize, BondKind)]) -> MoleculeGraph {
        MoleculeGraph::from_parts(MolMode::Small, atoms, bonds).unwrap()
    }

    #[test]
    fn single_atom() {
        assert_eq!(to_smiles(&mol(&[AtomSymbol::C], &[])).unwrap(), "C");
    }

    #[test]
    fn two_atom_chain() {
        let m = mol(&[AtomSymbol::C, AtomSymbol::O], &[(0, 1, BondKind::Single)]);
        assert_eq!(to_smiles(&m).unwrap(), "CO");
    }

    #[test]
    fn double_bond_symbol() {
        let m = mol(&[AtomSymbol::C, AtomSymbol::O], &[(0, 1, BondKind::Double)]);
        assert_eq!(to_smiles(&m).unwrap(), "C=O");
    }

    #[test]
    fn triangle_ring_closure() {
        let m = mol(
            &[AtomSymbol::C, AtomSymbol::C, AtomSymbol::C],
            &[(0, 1, BondKind::Single), (1, 2, BondKind::Single), (0, 2, BondKind::Single)],
        );
        assert_eq!(to_smiles(&m).unwrap(), "C1CC1");
    }

    #[test]
    fn branch_parentheses() {
        // Central carbon bonded to N, O, F: branches in index order.
        let m = mol(
            &[AtomSymbol::C, AtomSymbol::N, AtomSymbol::O, AtomSymbol::F],
            &[(0, 1, BondKind::Single), (0, 2, BondKind::Single), (0, 3, BondKind::Single)],
        );
        assert_eq!(to_smiles(&m).unwrap(), "C(N)(O)F");
    }

    #[test]
    fn invalid_molecule_refused() {
        let m = mol(
            &[AtomSymbol::C, AtomSymbol::C, AtomSymbol::O, AtomSymbol::O],
            &[(0, 1, BondKind::Single), (2, 3, BondKind::Single)],
        );
        assert!(matches!(to_smiles(&m), Err(MolError::InvalidMolecule(_))));
    }
}
