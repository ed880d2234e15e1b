//! Analytic circuit gradients via the parameter-shift rule.
//!
//! Plain rotations (RX/RY/RZ) have generators with eigenvalues ±1/2, so
//! ∂f/∂θ = [f(θ+π/2) − f(θ−π/2)]/2 exactly. Controlled rotations add a zero
//! eigenvalue, which splits the spectrum into two frequencies and requires
//! the four-term rule with shifts π/2 and 3π/2.

use super::{GateKind, GeneratorCircuit, ParamCircuit, QsimError, Result};

/// Jacobian of all output features w.r.t. all circuit parameters,
/// `jac[feature][param]`, exact up to floating-point roundoff.
pub fn param_shift_grad(
    circuit: &GeneratorCircuit,
    params: &[f64],
    init_angles: &[f64],
) -> Result<Vec<Vec<f64>>> {
    match circuit {
        GeneratorCircuit::Monolithic(c) => mono_jacobian(c, params, init_angles),
        GeneratorCircuit::Patched(p) => {
            // Sub-circuits are independent, so the Jacobian is block
            // diagonal; computing each block on its own statevector avoids
            // re-running unaffected subs for every shift.
            let n_feat = p.n_qubits();
            let n_par = p.n_params();
            if params.len() != n_par {
                return Err(QsimError::ParamCountMismatch { expected: n_par, got: params.len() });
            }
            if init_angles.len() != n_feat {
                return Err(QsimError::InitAngleCountMismatch {
                    expected: n_feat,
                    got: init_angles.len(),
                });
            }
            let mut jac = vec![vec![0.0; n_par]; n_feat];
            let mut qoff = 0;
            let mut poff = 0;
            for sub in &p.sub_circuits {
                let block = mono_jacobian(
                    sub,
                    &params[poff..poff + sub.n_params],
                    &init_angles[qoff..qoff + sub.n_qubits],
                )?;
                for (f, row) in block.iter().enumerate() {
                    for (s, &v) in row.iter().enumerate() {
                        jac[qoff + f][poff + s] = v;
                    }
                }
                qoff += sub.n_qubits;
                poff += sub.n_params;
            }
            Ok(jac)
        }
    }
}

fn mono_jacobian(circuit: &ParamCircuit, params: &[f64], init_angles: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n_feat = circuit.n_qubits;
    let mut jac = vec![vec![0.0; circuit.n_params]; n_feat];
    let mut shifted = params.to_vec();
    for slot in 0..circuit.n_params {
        let kind = circuit
            .slot_kind(slot)
            .ok_or_else(|| QsimError::InvalidCircuit(format!("slot {slot} unreferenced")))?;
        let column = match kind {
            GateKind::RX | GateKind::RY | GateKind::RZ => {
                two_term(circuit, &mut shifted, slot, init_angles)?
            }
            GateKind::CRY => four_term(circuit, &mut shifted, slot, init_angles)?,
            other => {
                return Err(QsimError::InvalidCircuit(format!(
                    "gate {other:?} is not differentiable"
                )))
            }
        };
        for (f, v) in column.into_iter().enumerate() {
            jac[f][slot] = v;
        }
    }
    Ok(jac)
}

fn eval_at(
    circuit: &ParamCircuit,
    shifted: &mut [f64],
    slot: usize,
    delta: f64,
    init_angles: &[f64],
) -> Result<Vec<f64>> {
    let original = shifted[slot];
    shifted[slot] = original + delta;
    let out = circuit.run(shifted, init_angles);
    shifted[slot] = original;
    out
}

fn two_term(
    circuit: &ParamCircuit,
    shifted: &mut [f64],
    slot: usize,
    init_angles: &[f64],
) -> Result<Vec<f64>> {
    let s = std::f64::consts::FRAC_PI_2;
    let plus = eval_at(circuit, shifted, slot, s, init_angles)?;
    let minus = eval_at(circuit, shifted, slot, -s, init_angles)?;
    Ok(plus.iter().zip(&minus).map(|(p, m)| (p - m) / 2.0).collect())
}

fn four_term(
    circuit: &ParamCircuit,
    shifted: &mut [f64],
    slot: usize,
    init_angles: &[f64],
) -> Result<Vec<f64>> {
    let sqrt2 = std::f64::consts::SQRT_2;
    let c_near = (sqrt2 + 1.0) / (4.0 * sqrt2);
    let c_far = (sqrt2 - 1.0) / (4.0 * sqrt2);
    let s1 = std::f64::consts::FRAC_PI_2;
    let s2 = 3.0 * std::f64::consts::FRAC_PI_2;
    let p1 = eval_at(circuit, shifted, slot, s1, init_angles)?;
    let m1 = eval_at(circuit, shifted, slot, -s1, init_angles)?;
    let p2 = eval_at(circuit, shifted, slot, s2, init_angles)?;
    let m2 = eval_at(circuit, shifted, slot, -s2, init_angles)?;
    Ok((0..p1.len())
        .map(|f| c_near * (p1[f] - m1[f]) - c_far * (p2[f] - m2[f]))
        .collect())
}

/// Central finite-difference Jacobian, the verification oracle for
/// [`param_shift_grad`]. Shares nothing with the shift rules beyond the
/// circuit evaluation being differentiated.
pub fn finite_diff_grad(
    circuit: &GeneratorCircuit,
    params: &[f64],
    init_angles: &[f64],
    h: f64,
) -> Result<Vec<Vec<f64>>> {
    let n_feat = circuit.n_qubits();
    let mut jac = vec![vec![0.0; params.len()]; n_feat];
    let mut work = params.to_vec();
    for slot in 0..params.len() {
        let original = work[slot];
        work[slot] = original + h;
        let plus = circuit.run(&work, init_angles)?;
        work[slot] = original - h;
        let minus = circuit.run(&work, init_angles)?;
        work[slot] = original;
        for f in 0..n_feat {
            jac[f][slot] = (plus[f] - minus[f]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Max deviation between the analytic and finite-difference Jacobians,
/// relative to the Jacobian's own scale (its largest entry magnitude,
/// floored to avoid dividing by an all-zero gradient).
pub fn gradcheck_rel_error(
    circuit: &GeneratorCircuit,
    params: &[f64],
    init_angles: &[f64],
    h: f64,
) -> Result<f64> {
    let analytic = param_shift_grad(circuit, params, init_angles)?;
    let numeric = finite_diff_grad(circuit, params, init_angles, h)?;
    let mut max_abs_err = 0.0f64;
    let mut scale = 0.0f64;
    for (ra, rn) in analytic.iter().zip(&numeric) {
        for (&a, &n) in ra.iter().zip(rn) {
            max_abs_err = max_abs_err.max((a - n).abs());
            scale = scale.max(n.abs());
        }
    }
    Ok(max_abs_err / scale.max(1e-12))
}
