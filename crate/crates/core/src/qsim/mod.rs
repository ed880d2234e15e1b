//! Dense statevector simulation of parameterized quantum circuits.
//!
//! A state over `n` qubits is a vector of `2^n` complex amplitudes; qubit `q`
//! corresponds to bit `q` of the basis index (qubit 0 is the least
//! significant bit). Gates act in place, measurement is exact: outputs are
//! Pauli-Z expectation values in the infinite-shot limit, never sampled.
//!
//! Circuits are gate programs over trainable parameter slots
//! ([`ParamCircuit`]), optionally partitioned into independent sub-circuits
//! over disjoint qubit ranges ([`PatchedCircuit`]). Analytic gradients come
//! from the parameter-shift rule in [`grad`].

mod circuit;
pub mod grad;

pub use circuit::{
    build_qgan_ansatz, random_circuit, FrozenCircuit, GeneratorCircuit, ParamCircuit,
    PatchedCircuit,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on simulated qubits; the dense representation is 16 B per
/// amplitude, so 20 qubits is already 16 MiB per state.
pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum QsimError {
    #[error("qubit index {qubit} out of range for {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("{requested} qubits requested, cap is {MAX_QUBITS}")]
    TooManyQubits { requested: usize },
    #[error("state needs at least one qubit")]
    ZeroQubits,
    #[error("control and target are both qubit {qubit}")]
    ControlEqualsTarget { qubit: usize },
    #[error("gate {kind:?} requires a parameter slot")]
    MissingParamSlot { kind: GateKind },
    #[error("gate {kind:?} does not take a parameter slot")]
    UnexpectedParamSlot { kind: GateKind },
    #[error("gate {kind:?} requires a control qubit")]
    MissingControl { kind: GateKind },
    #[error("gate {kind:?} does not take a control qubit")]
    UnexpectedControl { kind: GateKind },
    #[error("parameter slot {slot} out of range for {n_params} parameters")]
    ParamSlotOutOfRange { slot: usize, n_params: usize },
    #[error("expected {expected} parameters, got {got}")]
    ParamCountMismatch { expected: usize, got: usize },
    #[error("expected {expected} initialization angles, got {got}")]
    InitAngleCountMismatch { expected: usize, got: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("ansatz needs at least 2 qubits, got {0}")]
    AnsatzTooSmall(usize),
}

pub type Result<T> = std::result::Result<T, QsimError>;

/// Gate kinds supported by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    H,
    RX,
    RY,
    RZ,
    CNOT,
    CZ,
    CRY,
}

impl GateKind {
    pub fn is_parameterized(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CRY)
    }

    pub fn is_controlled(self) -> bool {
        matches!(self, GateKind::CNOT | GateKind::CZ | GateKind::CRY)
    }
}

/// One gate application. Parameterized kinds reference a slot in an external
/// parameter vector rather than storing an angle, so the same circuit can be
/// evaluated at many parameter settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    pub param_slot: Option<usize>,
}

impl Gate {
    pub fn h(target: usize) -> Self {
        Gate { kind: GateKind::H, target, control: None, param_slot: None }
    }

    pub fn rx(target: usize, slot: usize) -> Self {
        Gate { kind: GateKind::RX, target, control: None, param_slot: Some(slot) }
    }

    pub fn ry(target: usize, slot: usize) -> Self {
        Gate { kind: GateKind::RY, target, control: None, param_slot: Some(slot) }
    }

    pub fn rz(target: usize, slot: usize) -> Self {
        Gate { kind: GateKind::RZ, target, control: None, param_slot: Some(slot) }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::CNOT, target, control: Some(control), param_slot: None }
    }

    pub fn cz(control: usize, target: usize) -> Self {
        Gate { kind: GateKind::CZ, target, control: Some(control), param_slot: None }
    }

    pub fn cry(control: usize, target: usize, slot: usize) -> Self {
        Gate { kind: GateKind::CRY, target, control: Some(control), param_slot: Some(slot) }
    }

    /// Structural check against a qubit count and parameter count.
    pub fn validate(&self, n_qubits: usize, n_params: usize) -> Result<()> {
        if self.target >= n_qubits {
            return Err(QsimError::QubitOutOfRange { qubit: self.target, n_qubits });
        }
        match (self.kind.is_controlled(), self.control) {
            (true, None) => return Err(QsimError::MissingControl { kind: self.kind }),
            (false, Some(_)) => return Err(QsimError::UnexpectedControl { kind: self.kind }),
            (true, Some(c)) => {
                if c >= n_qubits {
                    return Err(QsimError::QubitOutOfRange { qubit: c, n_qubits });
                }
                if c == self.target {
                    return Err(QsimError::ControlEqualsTarget { qubit: c });
                }
            }
            (false, None) => {}
        }
        match (self.kind.is_parameterized(), self.param_slot) {
            (true, None) => return Err(QsimError::MissingParamSlot { kind: self.kind }),
            (false, Some(_)) => return Err(QsimError::UnexpectedParamSlot { kind: self.kind }),
            (true, Some(s)) => {
                if s >= n_params {
                    return Err(QsimError::ParamSlotOutOfRange { slot: s, n_params });
                }
            }
            (false, None) => {}
        }
        Ok(())
    }
}

/// Dense complex amplitude vector over `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state |0...0⟩.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(QsimError::ZeroQubits);
        }
        if n_qubits > MAX_QUBITS {
            return Err(QsimError::TooManyQubits { requested: n_qubits });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `gate`, reading any rotation angle from `params` through the
    /// gate's slot. Unitarity keeps the norm at 1; debug builds verify it.
    pub fn apply_gate(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        gate.validate(self.n_qubits, usize::MAX)?;
        let angle = match gate.param_slot {
            Some(slot) => {
                if slot >= params.len() {
                    return Err(QsimError::ParamSlotOutOfRange {
                        slot,
                        n_params: params.len(),
                    });
                }
                params[slot]
            }
            None => 0.0,
        };
        self.apply_resolved(gate.kind, gate.target, gate.control, angle);
        #[cfg(debug_assertions)]
        debug_assert!(
            (self.norm_sq() - 1.0).abs() < 1e-10,
            "norm drifted after {:?}",
            gate.kind
        );
        Ok(())
    }

    /// Gate application with a concrete angle (no slot indirection). Used by
    /// the quanvolution filter and the VAE quantum layers, whose angles are
    /// data-dependent rather than drawn from a parameter vector.
    pub fn apply_resolved(
        &mut self,
        kind: GateKind,
        target: usize,
        control: Option<usize>,
        angle: f64,
    ) {
        match kind {
            GateKind::H => self.single_qubit(
                target,
                [
                    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    Complex64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
                ],
            ),
            GateKind::RX => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                self.single_qubit(
                    target,
                    [
                        Complex64::new(c, 0.0),
                        Complex64::new(0.0, -s),
                        Complex64::new(0.0, -s),
                        Complex64::new(c, 0.0),
                    ],
                );
            }
            GateKind::RY => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                self.rotate_y_pairs(target, None, c, s);
            }
            GateKind::RZ => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                let phase0 = Complex64::new(c, -s);
                let phase1 = Complex64::new(c, s);
                let bit = 1usize << target;
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    *amp *= if i & bit == 0 { phase0 } else { phase1 };
                }
            }
            GateKind::CNOT => {
                let control = control.expect("validated");
                let cbit = 1usize << control;
                let tbit = 1usize << target;
                for i in 0..self.amps.len() {
                    if i & cbit != 0 && i & tbit == 0 {
                        self.amps.swap(i, i | tbit);
                    }
                }
            }
            GateKind::CZ => {
                let control = control.expect("validated");
                let mask = (1usize << control) | (1usize << target);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            GateKind::CRY => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                self.rotate_y_pairs(target, control, c, s);
            }
        }
    }

    /// RY rotation on the (|t=0⟩, |t=1⟩) pairs, restricted to the control=1
    /// subspace when a control is given. RY is real:
    /// a0' = c·a0 − s·a1, a1' = s·a0 + c·a1.
    fn rotate_y_pairs(&mut self, target: usize, control: Option<usize>, c: f64, s: f64) {
        let tbit = 1usize << target;
        let cmask = control.map_or(0, |q| 1usize << q);
        for i in 0..self.amps.len() {
            if i & tbit == 0 && i & cmask == cmask {
                let j = i | tbit;
                let a0 = self.amps[i];
                let a1 = self.amps[j];
                self.amps[i] = c * a0 - s * a1;
                self.amps[j] = s * a0 + c * a1;
            }
        }
    }

    /// General single-qubit unitary `[[m00, m01], [m10, m11]]` on `target`.
    fn single_qubit(&mut self, target: usize, m: [Complex64; 4]) {
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & tbit == 0 {
                let j = i | tbit;
                let a0 = self.amps[i];
                let a1 = self.amps[j];
                self.amps[i] = m[0] * a0 + m[1] * a1;
                self.amps[j] = m[2] * a0 + m[3] * a1;
            }
        }
    }

    /// ⟨Z⟩ on `qubit`: Σ_b (−1)^{bit_q(b)} |amp_b|².
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(QsimError::QubitOutOfRange { qubit, n_qubits: self.n_qubits });
        }
        let bit = 1usize << qubit;
        let mut acc = 0.0;
        for (i, amp) in self.amps.iter().enumerate() {
            let p = amp.norm_sqr();
            if i & bit == 0 {
                acc += p;
            } else {
                acc -= p;
            }
        }
        Ok(acc)
    }

    /// ⟨Z⟩ on every qubit, low-to-high.
    pub fn all_z_expectations(&self) -> Vec<f64> {
        (0..self.n_qubits)
            .map(|q| self.expectation_z(q).expect("qubit in range"))
            .collect()
    }
}

/// Pure-function form of gate application: consumes a state, returns the
/// evolved one.
pub fn apply_gate(mut state: StateVector, gate: &Gate, params: &[f64]) -> Result<StateVector> {
    state.apply_gate(gate, params)?;
    Ok(state)
}
