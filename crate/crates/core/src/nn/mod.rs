//! Minimal neural-network stack: dense and 3D-convolution layers with
//! reverse-mode gradients, Adam, LeakyReLU/tanh activations, and spectral
//! normalization. Double precision throughout; batches are `(batch, features)`
//! matrices and every layer boundary rejects non-finite values.

mod adam;
mod conv3d;
mod dense;

pub use adam::{adam_step, AdamState};
pub use conv3d::Conv3DLayer;
pub use dense::{spectral_normalize, DenseLayer, Mlp, MlpCache, MlpGrads, MlpOptimizer, SpectralNorm};

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// LeakyReLU negative slope, fixed crate-wide.
pub const LEAKY_SLOPE: f64 = 0.01;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("kernel size {k} exceeds input extent {extent}")]
    KernelTooLarge { k: usize, extent: usize },
    #[error("invalid layer config: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, NnError>;

/// Row-major dense tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(NnError::ShapeMismatch(format!(
                "shape {shape:?} implies {expected} values, got {}",
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n: usize = shape.iter().product();
        Tensor { shape, data: vec![0.0; n] }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn check_finite(&self, context: &str) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(NnError::NonFinite(context.to_string()))
        }
    }
}

/// Elementwise activation applied after a layer's affine map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    None,
    LeakyRelu,
    Tanh,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::None => x,
            Activation::LeakyRelu => {
                if x >= 0.0 {
                    x
                } else {
                    LEAKY_SLOPE * x
                }
            }
            Activation::Tanh => x.tanh(),
        }
    }

    /// Derivative as a function of the pre-activation value.
    #[inline]
    pub fn derivative(self, pre: f64) -> f64 {
        match self {
            Activation::None => 1.0,
            Activation::LeakyRelu => {
                if pre >= 0.0 {
                    1.0
                } else {
                    LEAKY_SLOPE
                }
            }
            Activation::Tanh => {
                let t = pre.tanh();
                1.0 - t * t
            }
        }
    }
}

/// `a · b` through matrixmultiply's packed dgemm. All dense-layer products
/// funnel through here; strides are taken from the views, so transposed
/// views multiply without copying.
pub fn matmul(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Array2<f64> {
    let (m, ka) = a.dim();
    let (kb, n) = b.dim();
    assert_eq!(ka, kb, "inner dimensions differ: {ka} vs {kb}");
    let mut c = Array2::<f64>::zeros((m, n));
    unsafe {
        matrixmultiply::dgemm(
            m,
            ka,
            n,
            1.0,
            a.as_ptr(),
            a.stride_of(ndarray::Axis(0)),
            a.stride_of(ndarray::Axis(1)),
            b.as_ptr(),
            b.stride_of(ndarray::Axis(0)),
            b.stride_of(ndarray::Axis(1)),
            0.0,
            c.as_mut_ptr(),
            c.stride_of(ndarray::Axis(0)),
            c.stride_of(ndarray::Axis(1)),
        );
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn tensor_shape_product_enforced() {
        assert!(Tensor::new(vec![2, 3], vec![0.0; 6]).is_ok());
        assert!(Tensor::new(vec![2, 3], vec![0.0; 5]).is_err());
    }

    #[test]
    fn leaky_relu_values() {
        assert_eq!(Activation::LeakyRelu.apply(-1.0), -0.01);
        assert_eq!(Activation::LeakyRelu.apply(2.0), 2.0);
        // f(a) + f(−a) = a(1 − slope) for a > 0.
        for a in [0.5, 1.0, 3.25] {
            let lhs = Activation::LeakyRelu.apply(a) + Activation::LeakyRelu.apply(-a);
            assert!((lhs - a * (1.0 - LEAKY_SLOPE)).abs() < 1e-15);
        }
    }

    #[test]
    fn matmul_matches_ndarray_dot() {
        let a = array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
        let b = array![[7.0, 8.0], [9.0, 10.0], [11.0, 12.0]];
        let c = matmul(a.view(), b.view());
        assert_eq!(c, a.dot(&b));
        // Transposed view path.
        let ct = matmul(b.t(), a.t());
        assert_eq!(ct, b.t().dot(&a.t()));
    }
}
