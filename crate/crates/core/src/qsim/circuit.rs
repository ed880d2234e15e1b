//! Gate programs: monolithic circuits, patched compositions, the GAN ansatz,
//! and seeded random circuits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Gate, GateKind, QsimError, Result, StateVector};
use crate::rng::{seeded, streams};

/// Ordered gate program over `n_params` trainable slots.
///
/// Running a circuit always means: start at |0...0⟩, apply one RY per qubit
/// with the caller's initialization angles, apply the gate list, then read
/// all-qubit Z expectations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamCircuit {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub gates: Vec<Gate>,
    pub n_params: usize,
}

impl ParamCircuit {
    pub fn new(n_qubits: usize, n_layers: usize, gates: Vec<Gate>, n_params: usize) -> Result<Self> {
        let circuit = ParamCircuit { n_qubits, n_layers, gates, n_params };
        circuit.validate()?;
        Ok(circuit)
    }

    /// Structural invariants: indices in range, every slot in
    /// `[0, n_params)` referenced by exactly one gate.
    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(QsimError::ZeroQubits);
        }
        if self.n_qubits > super::MAX_QUBITS {
            return Err(QsimError::TooManyQubits { requested: self.n_qubits });
        }
        let mut seen = vec![0usize; self.n_params];
        for gate in &self.gates {
            gate.validate(self.n_qubits, self.n_params)?;
            if let Some(slot) = gate.param_slot {
                seen[slot] += 1;
            }
        }
        if let Some(slot) = seen.iter().position(|&c| c != 1) {
            return Err(QsimError::InvalidCircuit(format!(
                "param slot {slot} referenced {} times, expected exactly once",
                seen[slot]
            )));
        }
        Ok(())
    }

    /// Evolves |0...0⟩ through the initialization RYs and the gate list,
    /// returning the final state.
    pub fn final_state(&self, params: &[f64], init_angles: &[f64]) -> Result<StateVector> {
        if params.len() != self.n_params {
            return Err(QsimError::ParamCountMismatch { expected: self.n_params, got: params.len() });
        }
        if init_angles.len() != self.n_qubits {
            return Err(QsimError::InitAngleCountMismatch {
                expected: self.n_qubits,
                got: init_angles.len(),
            });
        }
        let mut state = StateVector::zero_state(self.n_qubits)?;
        for (q, &angle) in init_angles.iter().enumerate() {
            state.apply_resolved(GateKind::RY, q, None, angle);
        }
        for gate in &self.gates {
            state.apply_gate(gate, params)?;
        }
        Ok(state)
    }

    pub fn run(&self, params: &[f64], init_angles: &[f64]) -> Result<Vec<f64>> {
        Ok(self.final_state(params, init_angles)?.all_z_expectations())
    }

    /// Kind of the gate owning `slot`, used to pick the shift rule.
    pub(crate) fn slot_kind(&self, slot: usize) -> Option<GateKind> {
        self.gates.iter().find(|g| g.param_slot == Some(slot)).map(|g| g.kind)
    }
}

/// Independent sub-circuits over consecutive disjoint qubit ranges.
///
/// Sub-circuit `k` owns global qubits `[offset_k, offset_k + n_k)` and global
/// parameter slots `[poffset_k, poffset_k + p_k)`, where the offsets are the
/// running sums of the preceding sub-circuits. Running the patched circuit
/// runs each sub-circuit on its own statevector and concatenates the
/// expectation vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchedCircuit {
    pub sub_circuits: Vec<ParamCircuit>,
}

impl PatchedCircuit {
    pub fn new(sub_circuits: Vec<ParamCircuit>) -> Result<Self> {
        if sub_circuits.is_empty() {
            return Err(QsimError::InvalidCircuit("patched circuit needs sub-circuits".into()));
        }
        for sub in &sub_circuits {
            sub.validate()?;
        }
        Ok(PatchedCircuit { sub_circuits })
    }

    pub fn n_qubits(&self) -> usize {
        self.sub_circuits.iter().map(|c| c.n_qubits).sum()
    }

    pub fn n_params(&self) -> usize {
        self.sub_circuits.iter().map(|c| c.n_params).sum()
    }

    pub fn run(&self, params: &[f64], init_angles: &[f64]) -> Result<Vec<f64>> {
        if params.len() != self.n_params() {
            return Err(QsimError::ParamCountMismatch {
                expected: self.n_params(),
                got: params.len(),
            });
        }
        if init_angles.len() != self.n_qubits() {
            return Err(QsimError::InitAngleCountMismatch {
                expected: self.n_qubits(),
                got: init_angles.len(),
            });
        }
        let mut features = Vec::with_capacity(self.n_qubits());
        let mut qoff = 0;
        let mut poff = 0;
        for sub in &self.sub_circuits {
            let sub_feats = sub.run(
                &params[poff..poff + sub.n_params],
                &init_angles[qoff..qoff + sub.n_qubits],
            )?;
            features.extend_from_slice(&sub_feats);
            qoff += sub.n_qubits;
            poff += sub.n_params;
        }
        Ok(features)
    }

    /// The equivalent monolithic circuit: every sub-circuit's gates embedded
    /// into one program with qubit indices and parameter slots offset. Used
    /// to check patched runs against a full-width statevector simulation.
    pub fn flatten(&self) -> Result<ParamCircuit> {
        let n_qubits = self.n_qubits();
        let n_params = self.n_params();
        let n_layers = self.sub_circuits.iter().map(|c| c.n_layers).max().unwrap_or(0);
        let mut gates = Vec::new();
        let mut qoff = 0;
        let mut poff = 0;
        for sub in &self.sub_circuits {
            for gate in &sub.gates {
                gates.push(Gate {
                    kind: gate.kind,
                    target: gate.target + qoff,
                    control: gate.control.map(|c| c + qoff),
                    param_slot: gate.param_slot.map(|s| s + poff),
                });
            }
            qoff += sub.n_qubits;
            poff += sub.n_params;
        }
        ParamCircuit::new(n_qubits, n_layers, gates, n_params)
    }
}

/// A generator's quantum stage: one full-width circuit or a patched set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GeneratorCircuit {
    Monolithic(ParamCircuit),
    Patched(PatchedCircuit),
}

impl GeneratorCircuit {
    pub fn n_qubits(&self) -> usize {
        match self {
            GeneratorCircuit::Monolithic(c) => c.n_qubits,
            GeneratorCircuit::Patched(p) => p.n_qubits(),
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            GeneratorCircuit::Monolithic(c) => c.n_params,
            GeneratorCircuit::Patched(p) => p.n_params(),
        }
    }

    /// Feature vector of all-qubit Z expectations (length `n_qubits`).
    pub fn run(&self, params: &[f64], init_angles: &[f64]) -> Result<Vec<f64>> {
        match self {
            GeneratorCircuit::Monolithic(c) => c.run(params, init_angles),
            GeneratorCircuit::Patched(p) => p.run(params, init_angles),
        }
    }
}

/// The GAN generator ansatz. Per layer: an RY on every qubit
/// (initialization of the layer's rotations, N slots) followed by a linear
/// chain of CRY entanglers on neighbouring pairs (N−1 slots), so a circuit
/// of L layers over N qubits carries exactly L·(2N−1) parameters.
pub fn build_qgan_ansatz(n_qubits: usize, n_layers: usize) -> Result<ParamCircuit> {
    if n_qubits < 2 {
        return Err(QsimError::AnsatzTooSmall(n_qubits));
    }
    if n_layers == 0 {
        return Err(QsimError::InvalidCircuit("ansatz needs at least one layer".into()));
    }
    let mut gates = Vec::new();
    let mut slot = 0;
    for _ in 0..n_layers {
        for q in 0..n_qubits {
            gates.push(Gate::ry(q, slot));
            slot += 1;
        }
        for q in 0..n_qubits - 1 {
            gates.push(Gate::cry(q, q + 1, slot));
            slot += 1;
        }
    }
    ParamCircuit::new(n_qubits, n_layers, gates, slot)
}

/// A circuit whose rotation angles are fixed at construction and never
/// trained. The slots still exist so the same run/gradient machinery
/// applies; `params` is simply not handed to an optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrozenCircuit {
    pub circuit: ParamCircuit,
    pub params: Vec<f64>,
}

impl FrozenCircuit {
    pub fn run(&self, init_angles: &[f64]) -> Result<Vec<f64>> {
        self.circuit.run(&self.params, init_angles)
    }
}

/// Seeded random circuit: `depth` layers, each drawing one gate per qubit
/// from {RX, RY, RZ, CNOT} with rotation angles uniform in [0, 2π). A given
/// seed always reproduces the same gate list and angles.
pub fn random_circuit(seed: u64, n_qubits: usize, depth: usize) -> Result<FrozenCircuit> {
    if n_qubits == 0 {
        return Err(QsimError::ZeroQubits);
    }
    if depth == 0 {
        return Err(QsimError::InvalidCircuit("random circuit needs depth >= 1".into()));
    }
    let mut rng = seeded(seed, streams::CIRCUIT_RANDOM);
    let mut gates = Vec::new();
    let mut params = Vec::new();
    for _ in 0..depth {
        for q in 0..n_qubits {
            // Single-qubit systems can only draw rotations.
            let choice = if n_qubits == 1 { rng.gen_range(0..3) } else { rng.gen_range(0..4) };
            match choice {
                0 | 1 | 2 => {
                    let slot = params.len();
                    params.push(rng.gen_range(0.0..std::f64::consts::TAU));
                    let gate = match choice {
                        0 => Gate::rx(q, slot),
                        1 => Gate::ry(q, slot),
                        _ => Gate::rz(q, slot),
                    };
                    gates.push(gate);
                }
                _ => {
                    let offset = rng.gen_range(1..n_qubits);
                    gates.push(Gate::cnot(q, (q + offset) % n_qubits));
                }
            }
        }
    }
    let n_params = params.len();
    let circuit = ParamCircuit::new(n_qubits, depth, gates, n_params)?;
    Ok(FrozenCircuit { circuit, params })
}
