//! Adam with bias correction; the only optimizer in the crate.

use serde::{Deserialize, Serialize};

use super::{NnError, Result};

/// First/second moment state for one parameter block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub step: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(n_params: usize) -> Self {
        AdamState {
            step: 0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// One Adam update in place. `block` names the parameter block in the
    /// error raised for non-finite gradients.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64, block: &str) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(NnError::ShapeMismatch(format!(
                "adam block {block}: state {} / params {} / grads {}",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
            return Err(NnError::NonFinite(format!("gradient of {block} (index {i})")));
        }
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}

/// Free-function form matching the rest of the crate's op-style API.
pub fn adam_step(state: &mut AdamState, params: &mut [f64], grads: &[f64], lr: f64) -> Result<()> {
    state.step(params, grads, lr, "parameters")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut state = AdamState::new(3);
        let mut params = vec![1.0, -2.0, 0.5];
        let before = params.clone();
        adam_step(&mut state, &mut params, &[0.0, 0.0, 0.0], 0.01).unwrap();
        assert_eq!(params, before);
    }

    #[test]
    fn first_step_is_signed_lr() {
        let lr = 1e-3;
        for g in [1.0, -0.25, 4.0] {
            let mut state = AdamState::new(1);
            let mut params = vec![0.0];
            adam_step(&mut state, &mut params, &[g], lr).unwrap();
            assert!(
                (params[0] + lr * g.signum()).abs() < 1e-6,
                "g {g} step {}",
                params[0]
            );
        }
    }

    #[test]
    fn identical_runs_identical_trajectories() {
        let run = || {
            let mut state = AdamState::new(2);
            let mut params = vec![0.3, -0.7];
            for k in 0..50 {
                let grads = [params[0] * 0.5 + k as f64 * 0.01, params[1].sin()];
                adam_step(&mut state, &mut params, &grads, 1e-2).unwrap();
            }
            params
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn nan_gradient_names_the_block() {
        let mut state = AdamState::new(1);
        let mut params = vec![0.0];
        let err = state.step(&mut params, &[f64::NAN], 1e-3, "critic.weights").unwrap_err();
        assert!(err.to_string().contains("critic.weights"));
    }
}
