//! Molecular graphs as typed atom vectors plus typed symmetric bond
//! matrices, with valence-based validity, ring counting, documented property
//! proxies, SMILES emission, and an SDF/JSONL ingestion subset.
//!
//! Two modes exist: small (up to 9 heavy atoms over {C, N, O, F}, the QM9
//! regime) and large (up to 32 heavy atoms over {C, N, O, S, F, X}, where X
//! stands for any element outside the list). Hydrogens are implicit
//! throughout; only heavy atoms are modeled.

mod jsonl;
mod sdf;
mod smiles;

pub use jsonl::{molecule_from_json_line, molecule_to_json_line};
pub use sdf::{parse_sdf, SdfParse};
pub use smiles::to_smiles;

use ndarray::{ArrayView2, ArrayView3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MolError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("atom symbol {symbol:?} is not in the {mode:?}-mode alphabet")]
    SymbolNotInMode { symbol: AtomSymbol, mode: MolMode },
    #[error("unknown atom symbol {0:?}")]
    UnknownSymbol(String),
    #[error("unknown bond kind {0:?}")]
    UnknownBond(String),
    #[error("bond matrix must be symmetric (differs at {i},{j})")]
    AsymmetricBonds { i: usize, j: usize },
    #[error("self-bond at atom {0}")]
    SelfBond(usize),
    #[error("bond between {i} and {j} touches an absent atom")]
    BondToNull { i: usize, j: usize },
    #[error("molecule is invalid: {0}")]
    InvalidMolecule(Invalidity),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("canonical form only supported up to {max} heavy atoms, got {got}")]
    TooManyAtomsForCanonical { max: usize, got: usize },
    #[error("bad molecule record: {0}")]
    BadRecord(String),
}

pub type Result<T> = std::result::Result<T, MolError>;

/// Heavy-atom symbols. `Null` marks an unused slot; `X` is "any element
/// outside the named set" and only exists in large mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AtomSymbol {
    Null,
    C,
    N,
    O,
    S,
    F,
    X,
}

impl AtomSymbol {
    /// Maximum total bond order the atom supports. Aromatic bonds count 1.5.
    pub fn max_valence(self) -> f64 {
        match self {
            AtomSymbol::Null => 0.0,
            AtomSymbol::C => 4.0,
            AtomSymbol::N => 3.0,
            AtomSymbol::O => 2.0,
            AtomSymbol::S => 6.0,
            AtomSymbol::F => 1.0,
            AtomSymbol::X => 4.0,
        }
    }

    /// Additive octanol/water partition proxy. These constants are
    /// crate-defined stand-ins, not fitted fragment contributions.
    pub fn logp_contribution(self) -> f64 {
        match self {
            AtomSymbol::Null => 0.0,
            AtomSymbol::C => 0.40,
            AtomSymbol::N => -0.45,
            AtomSymbol::O => -0.55,
            AtomSymbol::S => 0.30,
            AtomSymbol::F => 0.15,
            AtomSymbol::X => 0.0,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            AtomSymbol::Null => "∅",
            AtomSymbol::C => "C",
            AtomSymbol::N => "N",
            AtomSymbol::O => "O",
            AtomSymbol::S => "S",
            AtomSymbol::F => "F",
            AtomSymbol::X => "X",
        }
    }

    pub fn from_token(token: &str) -> Result<Self> {
        match token {
            "∅" => Ok(AtomSymbol::Null),
            "C" => Ok(AtomSymbol::C),
            "N" => Ok(AtomSymbol::N),
            "O" => Ok(AtomSymbol::O),
            "S" => Ok(AtomSymbol::S),
            "F" => Ok(AtomSymbol::F),
            "X" => Ok(AtomSymbol::X),
            other => Err(MolError::UnknownSymbol(other.to_string())),
        }
    }
}

/// Bond kinds; `Null` is the absent bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BondKind {
    Null,
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondKind {
    pub fn order(self) -> f64 {
        match self {
            BondKind::Null => 0.0,
            BondKind::Single => 1.0,
            BondKind::Double => 2.0,
            BondKind::Triple => 3.0,
            BondKind::Aromatic => 1.5,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            BondKind::Null => "NONE",
            BondKind::Single => "SINGLE",
            BondKind::Double => "DOUBLE",
            BondKind::Triple => "TRIPLE",
            BondKind::Aromatic => "AROMATIC",
        }
    }

    pub fn from_token(token: &str) -> Result<Self> {
        match token {
            "NONE" => Ok(BondKind::Null),
            "SINGLE" => Ok(BondKind::Single),
            "DOUBLE" => Ok(BondKind::Double),
            "TRIPLE" => Ok(BondKind::Triple),
            "AROMATIC" => Ok(BondKind::Aromatic),
            other => Err(MolError::UnknownBond(other.to_string())),
        }
    }
}

/// Ordered bond alphabet shared by both modes (channel order is decode
/// order: ties resolve toward `Null`).
pub const BOND_ALPHABET: [BondKind; 5] = [
    BondKind::Null,
    BondKind::Single,
    BondKind::Double,
    BondKind::Triple,
    BondKind::Aromatic,
];

/// Graph capacity and atom alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MolMode {
    Small,
    Large,
}

const SMALL_ALPHABET: [AtomSymbol; 5] =
    [AtomSymbol::Null, AtomSymbol::C, AtomSymbol::N, AtomSymbol::O, AtomSymbol::F];
const LARGE_ALPHABET: [AtomSymbol; 7] = [
    AtomSymbol::Null,
    AtomSymbol::C,
    AtomSymbol::N,
    AtomSymbol::O,
    AtomSymbol::S,
    AtomSymbol::F,
    AtomSymbol::X,
];

impl MolMode {
    pub fn max_atoms(self) -> usize {
        match self {
            MolMode::Small => 9,
            MolMode::Large => 32,
        }
    }

    /// Ordered atom alphabet; the null symbol is always channel 0.
    pub fn atom_alphabet(self) -> &'static [AtomSymbol] {
        match self {
            MolMode::Small => &SMALL_ALPHABET,
            MolMode::Large => &LARGE_ALPHABET,
        }
    }

    pub fn n_atom_channels(self) -> usize {
        self.atom_alphabet().len()
    }

    pub fn n_bond_channels(self) -> usize {
        BOND_ALPHABET.len()
    }

    pub fn atom_channel(self, symbol: AtomSymbol) -> Option<usize> {
        self.atom_alphabet().iter().position(|&s| s == symbol)
    }

    /// Flattened one-hot length: atoms·|A| + atoms²·|B|.
    pub fn one_hot_len(self) -> usize {
        let n = self.max_atoms();
        n * self.n_atom_channels() + n * n * self.n_bond_channels()
    }
}

fn bond_channel(kind: BondKind) -> usize {
    BOND_ALPHABET.iter().position(|&k| k == kind).expect("kind in alphabet")
}

/// Why a molecule failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invalidity {
    Empty,
    ValenceExceeded { atom: usize },
    Disconnected,
    IsolatedAtom { atom: usize },
}

impl std::fmt::Display for Invalidity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Invalidity::Empty => write!(f, "empty molecule"),
            Invalidity::ValenceExceeded { atom } => write!(f, "valence exceeded at atom {atom}"),
            Invalidity::Disconnected => write!(f, "disconnected"),
            Invalidity::IsolatedAtom { atom } => write!(f, "isolated atom {atom}"),
        }
    }
}

/// Proxy property scores for a molecule. The constants are documented,
/// crate-defined substitutes for fingerprint-based estimators, so the
/// numbers are comparable within this toolkit only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyScores {
    pub logp_proxy: f64,
    pub druglike_proxy: f64,
    pub sa_proxy: f64,
}

/// Typed atom vector plus typed symmetric bond matrix with fixed capacity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoleculeGraph {
    mode: MolMode,
    atoms: Vec<AtomSymbol>,
    bonds: Vec<BondKind>,
}

impl MoleculeGraph {
    pub fn empty(mode: MolMode) -> Self {
        let n = mode.max_atoms();
        MoleculeGraph { mode, atoms: vec![AtomSymbol::Null; n], bonds: vec![BondKind::Null; n * n] }
    }

    /// Builds from full-capacity vectors, enforcing the structural
    /// invariants: symmetric bonds, null diagonal, no bonds at null atoms,
    /// symbols restricted to the mode's alphabet.
    pub fn new(mode: MolMode, atoms: Vec<AtomSymbol>, bonds: Vec<BondKind>) -> Result<Self> {
        let n = mode.max_atoms();
        if atoms.len() != n || bonds.len() != n * n {
            return Err(MolError::ShapeMismatch(format!(
                "expected {n} atoms and {} bonds, got {} and {}",
                n * n,
                atoms.len(),
                bonds.len()
            )));
        }
        for &symbol in &atoms {
            if mode.atom_channel(symbol).is_none() {
                return Err(MolError::SymbolNotInMode { symbol, mode });
            }
        }
        let graph = MoleculeGraph { mode, atoms, bonds };
        for i in 0..n {
            if graph.bond(i, i) != BondKind::Null {
                return Err(MolError::SelfBond(i));
            }
            for j in (i + 1)..n {
                if graph.bond(i, j) != graph.bond(j, i) {
                    return Err(MolError::AsymmetricBonds { i, j });
                }
                if graph.bond(i, j) != BondKind::Null
                    && (graph.atoms[i] == AtomSymbol::Null || graph.atoms[j] == AtomSymbol::Null)
                {
                    return Err(MolError::BondToNull { i, j });
                }
            }
        }
        Ok(graph)
    }

    /// Builds from a compact atom list and sparse bond list, padding to the
    /// mode capacity.
    pub fn from_parts(
        mode: MolMode,
        atom_list: &[AtomSymbol],
        bond_list: &[(usize, usize, BondKind)],
    ) -> Result<Self> {
        let n = mode.max_atoms();
        if atom_list.len() > n {
            return Err(MolError::ShapeMismatch(format!(
                "{} atoms exceed {mode:?}-mode capacity {n}",
                atom_list.len()
            )));
        }
        let mut atoms = atom_list.to_vec();
        atoms.resize(n, AtomSymbol::Null);
        let mut bonds = vec![BondKind::Null; n * n];
        for &(i, j, kind) in bond_list {
            if i >= n || j >= n {
                return Err(MolError::ShapeMismatch(format!("bond ({i},{j}) out of range")));
            }
            if i == j {
                return Err(MolError::SelfBond(i));
            }
            bonds[i * n + j] = kind;
            bonds[j * n + i] = kind;
        }
        MoleculeGraph::new(mode, atoms, bonds)
    }

    pub fn mode(&self) -> MolMode {
        self.mode
    }

    pub fn max_atoms(&self) -> usize {
        self.mode.max_atoms()
    }

    pub fn atom(&self, i: usize) -> AtomSymbol {
        self.atoms[i]
    }

    pub fn atoms(&self) -> &[AtomSymbol] {
        &self.atoms
    }

    pub fn bond(&self, i: usize, j: usize) -> BondKind {
        self.bonds[i * self.max_atoms() + j]
    }

    /// Indices of occupied slots.
    pub fn heavy_atoms(&self) -> Vec<usize> {
        (0..self.max_atoms()).filter(|&i| self.atoms[i] != AtomSymbol::Null).collect()
    }

    pub fn n_heavy_atoms(&self) -> usize {
        self.atoms.iter().filter(|&&a| a != AtomSymbol::Null).count()
    }

    /// Unordered present bonds (i < j).
    pub fn bond_pairs(&self) -> Vec<(usize, usize, BondKind)> {
        let n = self.max_atoms();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let kind = self.bond(i, j);
                if kind != BondKind::Null {
                    out.push((i, j, kind));
                }
            }
        }
        out
    }

    pub fn bond_order_sum(&self, i: usize) -> f64 {
        (0..self.max_atoms()).map(|j| self.bond(i, j).order()).sum()
    }

    /// Chemical validity: non-empty, valences respected (tolerance 1e-9 for
    /// the aromatic half-orders), one connected component, and no isolated
    /// atoms once two or more are present.
    pub fn is_valid(&self) -> std::result::Result<(), Invalidity> {
        let heavy = self.heavy_atoms();
        if heavy.is_empty() {
            return Err(Invalidity::Empty);
        }
        for &i in &heavy {
            if self.bond_order_sum(i) > self.atoms[i].max_valence() + 1e-9 {
                return Err(Invalidity::ValenceExceeded { atom: i });
            }
        }
        if self.component_count(&heavy) != 1 {
            return Err(Invalidity::Disconnected);
        }
        if heavy.len() >= 2 {
            for &i in &heavy {
                if !heavy.iter().any(|&j| j != i && self.bond(i, j) != BondKind::Null) {
                    return Err(Invalidity::IsolatedAtom { atom: i });
                }
            }
        }
        Ok(())
    }

    fn component_count(&self, heavy: &[usize]) -> usize {
        let mut visited = vec![false; self.max_atoms()];
        let mut components = 0;
        for &start in heavy {
            if visited[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            visited[start] = true;
            while let Some(i) = stack.pop() {
                for &j in heavy {
                    if !visited[j] && self.bond(i, j) != BondKind::Null {
                        visited[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        components
    }

    /// Cycle rank: bonds − atoms + components over the occupied subgraph.
    pub fn count_rings(&self) -> usize {
        let heavy = self.heavy_atoms();
        if heavy.is_empty() {
            return 0;
        }
        let bonds = self.bond_pairs().len();
        let components = self.component_count(&heavy);
        (bonds + components).saturating_sub(heavy.len())
    }

    /// Proxy scores; invalid molecules score zero across the board.
    pub fn property_scores(&self) -> PropertyScores {
        if self.is_valid().is_err() {
            return PropertyScores { logp_proxy: 0.0, druglike_proxy: 0.0, sa_proxy: 0.0 };
        }
        let heavy = self.heavy_atoms();
        let logp: f64 = heavy.iter().map(|&i| self.atoms[i].logp_contribution()).sum();
        let rings = self.count_rings();
        let heteroatoms = heavy.iter().filter(|&&i| self.atoms[i] != AtomSymbol::C).count();
        let rules = [
            heavy.len() >= 2 && heavy.len() <= self.max_atoms(),
            heteroatoms >= 1,
            rings <= 2,
            (-2.0..=2.0).contains(&logp),
        ];
        let druglike = rules.iter().filter(|&&r| r).count() as f64 / rules.len() as f64;
        let triples =
            self.bond_pairs().iter().filter(|&&(_, _, k)| k == BondKind::Triple).count();
        let sa = (1.0
            - 0.15 * rings as f64
            - 0.15 * triples as f64
            - 0.05 * (heavy.len() as f64 - 6.0).max(0.0))
        .clamp(0.0, 1.0);
        PropertyScores { logp_proxy: logp, druglike_proxy: druglike, sa_proxy: sa }
    }

    /// Flattened one-hot encoding: atom channels row by row, then the full
    /// bond-channel cube.
    pub fn one_hot(&self) -> Vec<f64> {
        let n = self.max_atoms();
        let na = self.mode.n_atom_channels();
        let nb = self.mode.n_bond_channels();
        let mut out = vec![0.0; self.mode.one_hot_len()];
        for i in 0..n {
            let channel = self.mode.atom_channel(self.atoms[i]).expect("validated symbol");
            out[i * na + channel] = 1.0;
        }
        let bond_base = n * na;
        for i in 0..n {
            for j in 0..n {
                let channel = bond_channel(self.bond(i, j));
                out[bond_base + (i * n + j) * nb + channel] = 1.0;
            }
        }
        out
    }

    /// Mode- and padding-independent canonical form: the lexicographically
    /// smallest (atoms, bonds) serialization over all relabelings of the
    /// occupied atoms. Exhaustive permutation, so only small graphs qualify.
    pub fn canonical_key(&self) -> Result<Vec<u8>> {
        const MAX_CANONICAL: usize = 8;
        let heavy = self.heavy_atoms();
        let k = heavy.len();
        if k > MAX_CANONICAL {
            return Err(MolError::TooManyAtomsForCanonical { max: MAX_CANONICAL, got: k });
        }
        let symbol_code = |s: AtomSymbol| s as u8;
        let bond_code = |b: BondKind| b as u8;
        let mut perm: Vec<usize> = (0..k).collect();
        let mut best: Option<Vec<u8>> = None;
        loop {
            let mut key = Vec::with_capacity(1 + k + k * k);
            key.push(k as u8);
            for &p in &perm {
                key.push(symbol_code(self.atoms[heavy[p]]));
            }
            for a in 0..k {
                for b in (a + 1)..k {
                    key.push(bond_code(self.bond(heavy[perm[a]], heavy[perm[b]])));
                }
            }
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        Ok(best.expect("at least the identity permutation"))
    }
}

fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Argmax decode of atom and bond logits into a structurally sound graph:
/// ties break toward channel 0 (the null symbol/bond), the upper triangle
/// is mirrored, and bonds touching decoded-null atoms are forced to null.
pub fn decode_graph(
    atom_logits: ArrayView2<f64>,
    bond_logits: ArrayView3<f64>,
    mode: MolMode,
) -> Result<MoleculeGraph> {
    let n = mode.max_atoms();
    let na = mode.n_atom_channels();
    let nb = mode.n_bond_channels();
    if atom_logits.dim() != (n, na) {
        return Err(MolError::ShapeMismatch(format!(
            "atom logits {:?}, expected ({n}, {na})",
            atom_logits.dim()
        )));
    }
    if bond_logits.dim() != (n, n, nb) {
        return Err(MolError::ShapeMismatch(format!(
            "bond logits {:?}, expected ({n}, {n}, {nb})",
            bond_logits.dim()
        )));
    }
    let alphabet = mode.atom_alphabet();
    let mut atoms = vec![AtomSymbol::Null; n];
    for i in 0..n {
        let row = atom_logits.row(i);
        atoms[i] = alphabet[argmax_lowest_tie(row.iter().copied())];
    }
    let mut bonds = vec![BondKind::Null; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            if atoms[i] == AtomSymbol::Null || atoms[j] == AtomSymbol::Null {
                continue;
            }
            let channel =
                argmax_lowest_tie((0..nb).map(|c| bond_logits[[i, j, c]]));
            let kind = BOND_ALPHABET[channel];
            bonds[i * n + j] = kind;
            bonds[j * n + i] = kind;
        }
    }
    MoleculeGraph::new(mode, atoms, bonds)
}

fn argmax_lowest_tie(values: impl Iterator<Item = f64>) -> usize {
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for (i, v) in values.enumerate() {
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    best_idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{Array2, Array3};

    fn formaldehyde() -> MoleculeGraph {
        MoleculeGraph::from_parts(
            MolMode::Small,
            &[AtomSymbol::C, AtomSymbol::O],
            &[(0, 1, BondKind::Double)],
        )
        .unwrap()
    }

    #[test]
    fn formaldehyde_is_valid() {
        assert_eq!(formaldehyde().is_valid(), Ok(()));
    }

    #[test]
    fn overbonded_oxygen_reports_atom_zero() {
        let mol = MoleculeGraph::from_parts(
            MolMode::Small,
            &[AtomSymbol::O, AtomSymbol::F],
            &[(0, 1, BondKind::Triple)],
        )
        .unwrap();
        assert_eq!(mol.is_valid(), Err(Invalidity::ValenceExceeded { atom: 0 }));
        assert_eq!(mol.is_valid().unwrap_err().to_string(), "valence exceeded at atom 0");
    }

    #[test]
    fn two_fragments_are_disconnected() {
        let mol = MoleculeGraph::from_parts(
            MolMode::Small,
            &[AtomSymbol::C, AtomSymbol::C, AtomSymbol::O, AtomSymbol::O],
            &[(0, 1, BondKind::Single), (2, 3, BondKind::Single)],
        )
        .unwrap();
        assert_eq!(mol.is_valid(), Err(Invalidity::Disconnected));
    }

    #[test]
    fn empty_graph_is_invalid_but_scores_zero() {
        let mol = MoleculeGraph::empty(MolMode::Small);
        assert_eq!(mol.is_valid(), Err(Invalidity::Empty));
        let scores = mol.property_scores();
        assert_eq!(scores.logp_proxy, 0.0);
        assert_eq!(scores.druglike_proxy, 0.0);
        assert_eq!(scores.sa_proxy, 0.0);
    }

    #[test]
    fn ring_counts() {
        let chain = MoleculeGraph::from_parts(
            MolMode::Small,
            &[AtomSymbol::C; 3],
            &[(0, 1, BondKind::Single), (1, 2, BondKind::Single)],
        )
        .unwrap();
        assert_eq!(chain.count_rings(), 0);
        let triangle = MoleculeGraph::from_parts(
            MolMode::Small,
            &[AtomSymbol::C; 3],
            &[(0, 1, BondKind::Single), (1, 2, BondKind::Single), (0, 2, BondKind::Single)],
        )
        .unwrap();
        assert_eq!(triangle.count_rings(), 1);
        assert_eq!(MoleculeGraph::empty(MolMode::Small).count_rings(), 0);
    }

    #[test]
    fn adding_a_bond_between_connected_atoms_adds_a_ring() {
        let chain = MoleculeGraph::from_parts(
            MolMode::Small,
            &[AtomSymbol::C; 4],
            &[(0, 1, BondKind::Single), (1, 2, BondKind::Single), (2, 3, BondKind::Single)],
        )
        .unwrap();
        let ringed = MoleculeGraph::from_parts(
            MolMode::Small,
            &[AtomSymbol::C; 4],
            &[
                (0, 1, BondKind::Single),
                (1, 2, BondKind::Single),
                (2, 3, BondKind::Single),
                (0, 3, BondKind::Single),
            ],
        )
        .unwrap();
        assert_eq!(ringed.count_rings(), chain.count_rings() + 1);
    }

    #[test]
    fn property_scores_match_hand_values() {
        let scores = formaldehyde().property_scores();
        assert!((scores.logp_proxy + 0.15).abs() < 1e-12);
        assert_eq!(scores.druglike_proxy, 1.0);
        let triangle = MoleculeGraph::from_parts(
            MolMode::Small,
            &[AtomSymbol::C; 3],
            &[(0, 1, BondKind::Single), (1, 2, BondKind::Single), (0, 2, BondKind::Single)],
        )
        .unwrap();
        assert!((triangle.property_scores().sa_proxy - 0.85).abs() < 1e-12);
    }

    #[test]
    fn property_scores_are_permutation_invariant() {
        let a = MoleculeGraph::from_parts(
            MolMode::Small,
            &[AtomSymbol::C, AtomSymbol::N, AtomSymbol::O],
            &[(0, 1, BondKind::Single), (1, 2, BondKind::Double)],
        )
        .unwrap();
        let b = MoleculeGraph::from_parts(
            MolMode::Small,
            &[AtomSymbol::O, AtomSymbol::N, AtomSymbol::C],
            &[(2, 1, BondKind::Single), (1, 0, BondKind::Double)],
        )
        .unwrap();
        let (pa, pb) = (a.property_scores(), b.property_scores());
        assert!((pa.logp_proxy - pb.logp_proxy).abs() < 1e-12);
        assert_eq!(pa.druglike_proxy, pb.druglike_proxy);
        assert_eq!(pa.sa_proxy, pb.sa_proxy);
        assert_eq!(a.canonical_key().unwrap(), b.canonical_key().unwrap());
    }

    #[test]
    fn decode_one_hot_logits() {
        let mode = MolMode::Small;
        let n = mode.max_atoms();
        let mut atom_logits = Array2::zeros((n, 5));
        atom_logits[[0, 1]] = 5.0; // C
        atom_logits[[1, 3]] = 5.0; // O
        let mut bond_logits = Array3::zeros((n, n, 5));
        bond_logits[[0, 1, 2]] = 5.0; // DOUBLE
        let decoded = decode_graph(atom_logits.view(), bond_logits.view(), mode).unwrap();
        assert_eq!(decoded, formaldehyde());
    }

    #[test]
    fn decode_all_null_and_tie_rule() {
        let mode = MolMode::Small;
        let n = mode.max_atoms();
        let decoded = decode_graph(
            Array2::zeros((n, 5)).view(),
            Array3::zeros((n, n, 5)).view(),
            mode,
        )
        .unwrap();
        assert_eq!(decoded.n_heavy_atoms(), 0);
    }

    #[test]
    fn decode_masks_bonds_to_null_atoms() {
        let mode = MolMode::Small;
        let n = mode.max_atoms();
        let mut atom_logits = Array2::zeros((n, 5));
        atom_logits[[0, 1]] = 5.0; // only atom 0 is C, slot 1 stays null
        let mut bond_logits = Array3::zeros((n, n, 5));
        bond_logits[[0, 1, 1]] = 5.0; // SINGLE toward a null slot
        let decoded = decode_graph(atom_logits.view(), bond_logits.view(), mode).unwrap();
        assert_eq!(decoded.bond(0, 1), BondKind::Null);
    }

    #[test]
    fn structural_invariants_enforced() {
        let n = MolMode::Small.max_atoms();
        let mut bonds = vec![BondKind::Null; n * n];
        bonds[1] = BondKind::Single; // (0,1) without mirror
        let atoms = vec![AtomSymbol::C; n];
        assert!(matches!(
            MoleculeGraph::new(MolMode::Small, atoms.clone(), bonds),
            Err(MolError::AsymmetricBonds { .. })
        ));
        let mut bonds = vec![BondKind::Null; n * n];
        bonds[0] = BondKind::Single; // self-bond
        assert!(matches!(
            MoleculeGraph::new(MolMode::Small, atoms, bonds),
            Err(MolError::SelfBond(0))
        ));
        // Small mode rejects sulfur.
        assert!(matches!(
            MoleculeGraph::from_parts(MolMode::Small, &[AtomSymbol::S], &[]),
            Err(MolError::SymbolNotInMode { .. })
        ));
    }

    #[test]
    fn one_hot_shape_and_content() {
        let mol = formaldehyde();
        let v = mol.one_hot();
        assert_eq!(v.len(), MolMode::Small.one_hot_len());
        assert_eq!(v.iter().filter(|&&x| x == 1.0).count(), 9 + 81);
        // Atom 0 channel: C is alphabet index 1.
        assert_eq!(v[1], 1.0);
    }
}
