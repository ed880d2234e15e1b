//! Reader for the V2000 connection-table subset of SDF.
//!
//! Per record: 3 header lines, a counts line (`aaa bbb ... V2000`), the atom
//! block (element symbol read, coordinates ignored), the bond block
//! (1-based indices, bond types 1/2/3/4), then anything up to `M  END`;
//! records are separated by `$$$$`. Explicit hydrogens are dropped (the
//! graph model is heavy-atom only); molecules with other out-of-alphabet
//! elements, unsupported bond types, or too many heavy atoms are skipped and
//! counted rather than failing the whole file.

use super::{AtomSymbol, BondKind, MolError, MolMode, MoleculeGraph, Result};

/// Parse outcome: the accepted molecules plus how many records were skipped.
#[derive(Debug, Clone)]
pub struct SdfParse {
    pub molecules: Vec<MoleculeGraph>,
    pub skipped: usize,
}

fn parse_err(line: usize, message: impl Into<String>) -> MolError {
    MolError::Parse { line, message: message.into() }
}

pub fn parse_sdf(text: &str, mode: MolMode) -> Result<SdfParse> {
    let lines: Vec<&str> = text.lines().collect();
    let mut molecules = Vec::new();
    let mut skipped = 0;
    let mut pos = 0;

    while pos < lines.len() {
        // Tolerate blank space between records and at EOF.
        if lines[pos..].iter().all(|l| l.trim().is_empty()) {
            break;
        }
        if pos + 4 > lines.len() {
            return Err(parse_err(lines.len(), "truncated record header"));
        }
        let counts_line_no = pos + 4; // 1-based line number of the counts line
        let counts = lines[pos + 3];
        let tokens: Vec<&str> = counts.split_whitespace().collect();
        if tokens.len() < 3 || tokens.last() != Some(&"V2000") {
            return Err(parse_err(counts_line_no, format!("malformed counts line {counts:?}")));
        }
        let n_atoms: usize = tokens[0]
            .parse()
            .map_err(|_| parse_err(counts_line_no, "bad atom count"))?;
        let n_bonds: usize = tokens[1]
            .parse()
            .map_err(|_| parse_err(counts_line_no, "bad bond count"))?;

        let atom_start = pos + 4;
        let mut symbols = Vec::with_capacity(n_atoms);
        for k in 0..n_atoms {
            let line_no = atom_start + k + 1;
            let line = lines
                .get(atom_start + k)
                .ok_or_else(|| parse_err(lines.len(), "truncated atom block"))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 4 {
                return Err(parse_err(line_no, format!("malformed atom line {line:?}")));
            }
            symbols.push(fields[3].to_string());
        }

        let bond_start = atom_start + n_atoms;
        let mut raw_bonds = Vec::with_capacity(n_bonds);
        for k in 0..n_bonds {
            let line_no = bond_start + k + 1;
            let line = lines
                .get(bond_start + k)
                .ok_or_else(|| parse_err(lines.len(), "truncated bond block"))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 3 {
                return Err(parse_err(line_no, format!("malformed bond line {line:?}")));
            }
            let i: usize =
                fields[0].parse().map_err(|_| parse_err(line_no, "bad bond index"))?;
            let j: usize =
                fields[1].parse().map_err(|_| parse_err(line_no, "bad bond index"))?;
            let ty: usize =
                fields[2].parse().map_err(|_| parse_err(line_no, "bad bond type"))?;
            if i == 0 || j == 0 || i > n_atoms || j > n_atoms {
                return Err(parse_err(line_no, format!("bond indices {i},{j} out of range")));
            }
            raw_bonds.push((i - 1, j - 1, ty));
        }

        // Consume the rest of the connection table up to `M  END`, then the
        // record terminator.
        let mut cursor = bond_start + n_bonds;
        loop {
            let line = lines
                .get(cursor)
                .ok_or_else(|| parse_err(lines.len(), "record not terminated by M  END"))?;
            cursor += 1;
            if line.trim_start().starts_with("M") && line.contains("END") {
                break;
            }
        }
        while cursor < lines.len() && lines[cursor].trim() != "$$$$" {
            cursor += 1;
        }
        pos = (cursor + 1).min(lines.len());

        match build_molecule(&symbols, &raw_bonds, mode) {
            Some(mol) => molecules.push(mol),
            None => skipped += 1,
        }
    }

    Ok(SdfParse { molecules, skipped })
}

/// Maps a raw record to a heavy-atom graph, or `None` when it falls outside
/// the active alphabet or capacity.
fn build_molecule(
    symbols: &[String],
    raw_bonds: &[(usize, usize, usize)],
    mode: MolMode,
) -> Option<MoleculeGraph> {
    // Hydrogens are implicit in the graph model: drop them and their bonds.
    let mut remap = vec![None; symbols.len()];
    let mut atoms = Vec::new();
    for (idx, raw) in symbols.iter().enumerate() {
        if raw == "H" {
            continue;
        }
        let symbol = match AtomSymbol::from_token(raw) {
            Ok(s) if s != AtomSymbol::Null && mode.atom_channel(s).is_some() => s,
            // In large mode unknown heavy elements become the wildcard X.
            _ if mode == MolMode::Large => AtomSymbol::X,
            _ => return None,
        };
        remap[idx] = Some(atoms.len());
        atoms.push(symbol);
    }
    if atoms.is_empty() || atoms.len() > mode.max_atoms() {
        return None;
    }
    let mut bonds = Vec::new();
    for &(i, j, ty) in raw_bonds {
        let kind = match ty {
            1 => BondKind::Single,
            2 => BondKind::Double,
            3 => BondKind::Triple,
            4 => BondKind::Aromatic,
            _ => return None,
        };
        match (remap[i], remap[j]) {
            (Some(a), Some(b)) => bonds.push((a, b, kind)),
            // Bond to a dropped hydrogen.
            _ => continue,
        }
    }
    MoleculeGraph::from_parts(mode, &atoms, &bonds).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "sample\n  spec\ncomment\n  3  2  0  0  0  0  0  0  0  0999 V2000\n    0.0000    0.0000    0.0000 C   0  0\n    0.0000    0.0000    0.0000 O   0  0\n    0.0000    0.0000    0.0000 C   0  0\n  1  2  1  0\n  2  3  1  0\nM  END\n$$$$\n";

    #[test]
    fn sample_record_parses() {
        let parsed = parse_sdf(SAMPLE, MolMode::Small).unwrap();
        assert_eq!(parsed.molecules.len(), 1);
        assert_eq!(parsed.skipped, 0);
        let mol = &parsed.molecules[0];
        assert_eq!(mol.n_heavy_atoms(), 3);
        assert_eq!(mol.atom(0), AtomSymbol::C);
        assert_eq!(mol.atom(1), AtomSymbol::O);
        assert_eq!(mol.atom(2), AtomSymbol::C);
        assert_eq!(mol.bond(0, 1), BondKind::Single);
        assert_eq!(mol.bond(1, 2), BondKind::Single);
        assert_eq!(mol.bond(0, 2), BondKind::Null);
    }

    #[test]
    fn empty_input_is_empty_list() {
        let parsed = parse_sdf("", MolMode::Small).unwrap();
        assert!(parsed.molecules.is_empty());
        assert_eq!(parsed.skipped, 0);
    }

    #[test]
    fn short_atom_block_errors_at_line() {
        let bad = "m\n\n\n  2  0  0 V2000\n    0.0 0.0 0.0 C 0\nM  END\n$$$$\n";
        let err = parse_sdf(bad, MolMode::Small).unwrap_err();
        match err {
            MolError::Parse { line, .. } => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn explicit_hydrogens_are_dropped() {
        let methane = "m\n\n\n  5  4  0 V2000\n 0 0 0 C 0\n 0 0 0 H 0\n 0 0 0 H 0\n 0 0 0 H 0\n 0 0 0 H 0\n 1 2 1 0\n 1 3 1 0\n 1 4 1 0\n 1 5 1 0\nM  END\n$$$$\n";
        let parsed = parse_sdf(methane, MolMode::Small).unwrap();
        assert_eq!(parsed.molecules.len(), 1);
        assert_eq!(parsed.molecules[0].n_heavy_atoms(), 1);
        assert_eq!(parsed.molecules[0].is_valid(), Ok(()));
    }

    #[test]
    fn out_of_alphabet_element_skips_record_in_small_mode() {
        let with_si = "m\n\n\n  2  1  0 V2000\n 0 0 0 Si 0\n 0 0 0 C 0\n 1 2 1 0\nM  END\n$$$$\n";
        let parsed = parse_sdf(with_si, MolMode::Small).unwrap();
        assert!(parsed.molecules.is_empty());
        assert_eq!(parsed.skipped, 1);
        // Large mode folds it into the wildcard symbol instead.
        let parsed = parse_sdf(with_si, MolMode::Large).unwrap();
        assert_eq!(parsed.molecules.len(), 1);
        assert_eq!(parsed.molecules[0].atom(0), AtomSymbol::X);
    }

    #[test]
    fn aromatic_bond_type_maps() {
        let benzene_fragment =
            "m\n\n\n  2  1  0 V2000\n 0 0 0 C 0\n 0 0 0 C 0\n 1 2 4 0\nM  END\n$$$$\n";
        let parsed = parse_sdf(benzene_fragment, MolMode::Small).unwrap();
        assert_eq!(parsed.molecules[0].bond(0, 1), BondKind::Aromatic);
    }

    #[test]
    fn two_records_parse_in_order() {
        let two = format!("{SAMPLE}{SAMPLE}");
        let parsed = parse_sdf(&two, MolMode::Small).unwrap();
        assert_eq!(parsed.molecules.len(), 2);
        assert_eq!(parsed.molecules[0], parsed.molecules[1]);
    }
}
