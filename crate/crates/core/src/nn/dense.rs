//! Dense layers, MLPs, reverse-mode gradients, and spectral normalization.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{matmul, Activation, NnError, Result, Tensor};

/// Persistent power-iteration state for spectral normalization. `sigma`
/// estimates the top singular value of the wrapped weight matrix; dividing
/// by it keeps the layer roughly 1-Lipschitz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralNorm {
    pub u: Array1<f64>,
    pub v: Array1<f64>,
    pub iterations: usize,
}

const SIGMA_FLOOR: f64 = 1e-12;

impl SpectralNorm {
    pub fn new(out_dim: usize, in_dim: usize, iterations: usize, rng: &mut impl Rng) -> Self {
        let mut u = Array1::from_shape_fn(out_dim, |_| rng.gen_range(-1.0..1.0));
        let mut v = Array1::from_shape_fn(in_dim, |_| rng.gen_range(-1.0..1.0));
        normalize(&mut u);
        normalize(&mut v);
        SpectralNorm { u, v, iterations }
    }

    /// Runs the configured number of power-iteration rounds against `w`,
    /// updating the persistent vectors.
    pub fn power_iterate(&mut self, w: &Array2<f64>) {
        for _ in 0..self.iterations {
            let mut v = w.t().dot(&self.u);
            if normalize(&mut v) {
                self.v = v;
            }
            let mut u = w.dot(&self.v);
            if normalize(&mut u) {
                self.u = u;
            }
        }
    }

    /// σ̂ = uᵀ W v with the current vectors, floored away from zero.
    pub fn sigma(&self, w: &Array2<f64>) -> f64 {
        self.u.dot(&w.dot(&self.v)).max(SIGMA_FLOOR)
    }
}

fn normalize(x: &mut Array1<f64>) -> bool {
    let norm = x.dot(&*x).sqrt();
    if norm > SIGMA_FLOOR {
        x.mapv_inplace(|v| v / norm);
        true
    } else {
        false
    }
}

/// `W / σ̂(W)` with `iterations` fresh power-iteration rounds started from a
/// deterministic direction. A zero matrix comes back unchanged because σ̂ is
/// floored.
pub fn spectral_normalize(weights: &Array2<f64>, iterations: usize) -> Array2<f64> {
    let (out_dim, in_dim) = weights.dim();
    let mut sn = SpectralNorm {
        u: Array1::from_elem(out_dim, 1.0 / (out_dim as f64).sqrt()),
        v: Array1::from_elem(in_dim, 1.0 / (in_dim as f64).sqrt()),
        iterations: iterations.max(1),
    };
    sn.power_iterate(weights);
    weights / sn.sigma(weights)
}

/// Fully connected layer: `activation(W·x + b)`, with optional spectral
/// normalization of `W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
    pub spectral_norm: Option<SpectralNorm>,
}

impl DenseLayer {
    /// He-style uniform init scaled by fan-in; zero bias.
    pub fn seeded(out_dim: usize, in_dim: usize, activation: Activation, rng: &mut impl Rng) -> Self {
        let bound = (6.0 / in_dim as f64).sqrt();
        let weights = Array2::from_shape_fn((out_dim, in_dim), |_| rng.gen_range(-bound..bound));
        DenseLayer { weights, bias: Array1::zeros(out_dim), activation, spectral_norm: None }
    }

    pub fn zeros(out_dim: usize, in_dim: usize, activation: Activation) -> Self {
        DenseLayer {
            weights: Array2::zeros((out_dim, in_dim)),
            bias: Array1::zeros(out_dim),
            activation,
            spectral_norm: None,
        }
    }

    pub fn with_spectral_norm(mut self, iterations: usize, rng: &mut impl Rng) -> Self {
        let (out_dim, in_dim) = self.weights.dim();
        let mut sn = SpectralNorm::new(out_dim, in_dim, iterations, rng);
        // Warm up so u, v are aligned with the top singular pair before the
        // first forward; a raw random pair can make uᵀWv tiny or negative.
        sn.power_iterate(&self.weights);
        self.spectral_norm = Some(sn);
        self
    }

    pub fn out_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    /// Effective weights and σ̂ without touching the power-iteration state.
    fn effective_weights(&self) -> (Array2<f64>, f64) {
        match &self.spectral_norm {
            Some(sn) => {
                let sigma = sn.sigma(&self.weights);
                (&self.weights / sigma, sigma)
            }
            None => (self.weights.clone(), 1.0),
        }
    }

    /// Single forward on a tensor whose last dimension is the feature axis;
    /// leading dimensions are treated as batch. Spectral norm, if present,
    /// is applied with the persisted vectors (no update).
    pub fn forward_tensor(&self, input: &Tensor) -> Result<Tensor> {
        input.check_finite("dense input")?;
        let in_dim = self.in_dim();
        let last = *input.shape().last().ok_or_else(|| {
            NnError::ShapeMismatch("dense input needs at least one dimension".into())
        })?;
        if last != in_dim {
            return Err(NnError::ShapeMismatch(format!(
                "dense layer expects last dim {in_dim}, got {last}"
            )));
        }
        let batch = input.len() / in_dim;
        let x = ndarray::ArrayView2::from_shape((batch, in_dim), input.data())
            .map_err(|e| NnError::ShapeMismatch(e.to_string()))?;
        let (w_eff, _) = self.effective_weights();
        let mut pre = matmul(x, w_eff.t());
        pre += &self.bias;
        pre.mapv_inplace(|p| self.activation.apply(p));
        let mut out_shape = input.shape().to_vec();
        *out_shape.last_mut().unwrap() = self.out_dim();
        Tensor::new(out_shape, pre.into_raw_vec_and_offset().0)
    }
}

/// Per-layer values recorded by a forward pass, consumed by `backward`.
#[derive(Debug, Clone)]
pub struct MlpCache {
    inputs: Vec<Array2<f64>>,
    pres: Vec<Array2<f64>>,
    eff: Vec<(Array2<f64>, f64)>,
}

impl MlpCache {
    /// Activation-derivative mask of layer `l` (batch × out).
    pub fn mask(&self, layer: usize, activation: Activation) -> Array2<f64> {
        self.pres[layer].mapv(|p| activation.derivative(p))
    }
}

/// Parameter gradients for an MLP, one entry per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrads {
    pub weights: Vec<Array2<f64>>,
    pub bias: Vec<Array1<f64>>,
}

impl MlpGrads {
    pub fn zeros_like(mlp: &Mlp) -> Self {
        MlpGrads {
            weights: mlp.layers.iter().map(|l| Array2::zeros(l.weights.dim())).collect(),
            bias: mlp.layers.iter().map(|l| Array1::zeros(l.bias.len())).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &MlpGrads, scale: f64) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            a.scaled_add(scale, b);
        }
        for (a, b) in self.bias.iter_mut().zip(&other.bias) {
            a.scaled_add(scale, b);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for w in &mut self.weights {
            w.mapv_inplace(|v| v * factor);
        }
        for b in &mut self.bias {
            b.mapv_inplace(|v| v * factor);
        }
    }
}

/// Plain feed-forward network over a fixed layer list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<DenseLayer>,
}

impl Mlp {
    /// `dims = [in, h1, ..., out]`; hidden layers get `hidden_act`, the last
    /// layer gets `out_act`.
    pub fn seeded(
        dims: &[usize],
        hidden_act: Activation,
        out_act: Activation,
        rng: &mut impl Rng,
    ) -> Self {
        assert!(dims.len() >= 2, "an MLP needs at least one layer");
        let layers = (1..dims.len())
            .map(|i| {
                let act = if i + 1 == dims.len() { out_act } else { hidden_act };
                DenseLayer::seeded(dims[i], dims[i - 1], act, rng)
            })
            .collect();
        Mlp { layers }
    }

    pub fn with_spectral_norm(mut self, iterations: usize, rng: &mut impl Rng) -> Self {
        self.layers =
            self.layers.into_iter().map(|l| l.with_spectral_norm(iterations, rng)).collect();
        self
    }

    pub fn in_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.in_dim())
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.out_dim())
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.param_count()).sum()
    }

    /// Forward pass recording the values `backward` needs. Spectral-norm
    /// vectors are read, not updated; call [`Mlp::refresh_spectral_norm`]
    /// once per training step first.
    pub fn forward(&self, x: &Array2<f64>) -> Result<(Array2<f64>, MlpCache)> {
        if x.ncols() != self.in_dim() {
            return Err(NnError::ShapeMismatch(format!(
                "mlp expects {} inputs, got {}",
                self.in_dim(),
                x.ncols()
            )));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(NnError::NonFinite("mlp input".into()));
        }
        let mut cache = MlpCache { inputs: Vec::new(), pres: Vec::new(), eff: Vec::new() };
        let mut current = x.clone();
        for layer in &self.layers {
            let (w_eff, sigma) = layer.effective_weights();
            let mut pre = matmul(current.view(), w_eff.t());
            pre += &layer.bias;
            if !pre.iter().all(|v| v.is_finite()) {
                return Err(NnError::NonFinite("dense pre-activation".into()));
            }
            cache.inputs.push(current);
            let post = pre.mapv(|p| layer.activation.apply(p));
            cache.pres.push(pre);
            cache.eff.push((w_eff, sigma));
            current = post;
        }
        Ok((current, cache))
    }

    /// Output only, discarding the cache.
    pub fn predict(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        Ok(self.forward(x)?.0)
    }

    /// Advances the power iteration of every spectral-normalized layer.
    pub fn refresh_spectral_norm(&mut self) {
        for layer in &mut self.layers {
            if let Some(sn) = &mut layer.spectral_norm {
                sn.power_iterate(&layer.weights);
            }
        }
    }

    /// Reverse-mode gradients. `grad_out` is ∂L/∂output (batch × out);
    /// returns parameter gradients and ∂L/∂input.
    pub fn backward(&self, cache: &MlpCache, grad_out: &Array2<f64>) -> (MlpGrads, Array2<f64>) {
        let mut grads = MlpGrads {
            weights: Vec::with_capacity(self.layers.len()),
            bias: Vec::with_capacity(self.layers.len()),
        };
        let mut delta = grad_out.clone();
        for (l, layer) in self.layers.iter().enumerate().rev() {
            // δ_l = ∂L/∂pre_l.
            let mask = cache.mask(l, layer.activation);
            delta = &delta * &mask;
            let (w_eff, sigma) = &cache.eff[l];
            let g_eff = matmul(delta.t(), cache.inputs[l].view());
            let g_w = match &layer.spectral_norm {
                Some(sn) => {
                    // W̄ = W/σ with σ = uᵀWv: dW = (G − ⟨G, W̄⟩·u vᵀ)/σ.
                    let inner = (&g_eff * w_eff).sum();
                    let mut g = g_eff;
                    let uv = outer(&sn.u, &sn.v);
                    g.scaled_add(-inner, &uv);
                    g.mapv_inplace(|v| v / sigma);
                    g
                }
                None => g_eff,
            };
            grads.weights.push(g_w);
            grads.bias.push(delta.sum_axis(Axis(0)));
            delta = matmul(delta.view(), w_eff.view());
        }
        grads.weights.reverse();
        grads.bias.reverse();
        (grads, delta)
    }

    /// Pre-activation deltas for a critic with unit output gradient,
    /// together with ∂output/∂input. Shared by the gradient-penalty path,
    /// which needs the deltas again for its tangent pass.
    pub fn unit_output_deltas(&self, cache: &MlpCache) -> (Vec<Array2<f64>>, Array2<f64>) {
        let batch = cache.inputs[0].nrows();
        let mut delta = Array2::from_elem((batch, self.out_dim()), 1.0);
        let mut deltas = vec![Array2::zeros((0, 0)); self.layers.len()];
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let mask = cache.mask(l, layer.activation);
            delta = &delta * &mask;
            deltas[l] = delta.clone();
            delta = matmul(delta.view(), cache.eff[l].0.view());
        }
        (deltas, delta)
    }

    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            out.extend(layer.weights.iter());
            out.extend(layer.bias.iter());
        }
        out
    }

    pub fn set_flat_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.param_count());
        let mut offset = 0;
        for layer in &mut self.layers {
            for w in layer.weights.iter_mut() {
                *w = params[offset];
                offset += 1;
            }
            for b in layer.bias.iter_mut() {
                *b = params[offset];
                offset += 1;
            }
        }
    }
}

fn outer(u: &Array1<f64>, v: &Array1<f64>) -> Array2<f64> {
    let mut out = Array2::zeros((u.len(), v.len()));
    for (i, &ui) in u.iter().enumerate() {
        for (j, &vj) in v.iter().enumerate() {
            out[[i, j]] = ui * vj;
        }
    }
    out
}

/// Adam over every parameter of an MLP, one moment pair per layer block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MlpOptimizer {
    weight_states: Vec<super::AdamState>,
    bias_states: Vec<super::AdamState>,
}

impl MlpOptimizer {
    pub fn new(mlp: &Mlp) -> Self {
        MlpOptimizer {
            weight_states: mlp.layers.iter().map(|l| super::AdamState::new(l.weights.len())).collect(),
            bias_states: mlp.layers.iter().map(|l| super::AdamState::new(l.bias.len())).collect(),
        }
    }

    pub fn step(&mut self, mlp: &mut Mlp, grads: &MlpGrads, lr: f64) -> Result<()> {
        for (l, layer) in mlp.layers.iter_mut().enumerate() {
            let w = layer.weights.as_slice_mut().expect("standard layout");
            let gw = grads.weights[l].as_slice().expect("standard layout");
            self.weight_states[l].step(w, gw, lr, &format!("layer{l}.weights"))?;
            let b = layer.bias.as_slice_mut().expect("standard layout");
            let gb = grads.bias[l].as_slice().expect("standard layout");
            self.bias_states[l].step(b, gb, lr, &format!("layer{l}.bias"))?;
        }
        Ok(())
    }
}
