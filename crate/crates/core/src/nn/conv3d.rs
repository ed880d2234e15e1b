//! Valid-padding 3D convolution over `[channels, depth, height, width]`
//! tensors. No bias, no activation: the voxel pipelines follow the raw
//! convolution with their own heads.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{NnError, Result, Tensor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conv3DLayer {
    /// `[out_ch, in_ch, k, k, k]`.
    pub kernels: Tensor,
    pub stride: usize,
    pub trainable: bool,
}

impl Conv3DLayer {
    pub fn new(kernels: Tensor, stride: usize, trainable: bool) -> Result<Self> {
        if kernels.shape().len() != 5 {
            return Err(NnError::ShapeMismatch(format!(
                "conv kernels need 5 dims, got {:?}",
                kernels.shape()
            )));
        }
        let k = kernels.shape()[2];
        if k == 0 || kernels.shape()[3] != k || kernels.shape()[4] != k {
            return Err(NnError::BadConfig("conv kernels must be cubic and non-empty".into()));
        }
        if stride == 0 {
            return Err(NnError::BadConfig("stride must be >= 1".into()));
        }
        Ok(Conv3DLayer { kernels, stride, trainable })
    }

    /// He-style uniform init scaled by fan-in (`in_ch · k³`).
    pub fn seeded(
        out_ch: usize,
        in_ch: usize,
        k: usize,
        stride: usize,
        trainable: bool,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let fan_in = (in_ch * k * k * k) as f64;
        let bound = (6.0 / fan_in).sqrt();
        let n = out_ch * in_ch * k * k * k;
        let data: Vec<f64> = (0..n).map(|_| rng.gen_range(-bound..bound)).collect();
        Conv3DLayer::new(Tensor::new(vec![out_ch, in_ch, k, k, k], data)?, stride, trainable)
    }

    pub fn out_channels(&self) -> usize {
        self.kernels.shape()[0]
    }

    pub fn in_channels(&self) -> usize {
        self.kernels.shape()[1]
    }

    pub fn kernel_size(&self) -> usize {
        self.kernels.shape()[2]
    }

    fn check_input(&self, input: &Tensor) -> Result<(usize, usize, usize, usize)> {
        let shape = input.shape();
        if shape.len() != 4 {
            return Err(NnError::ShapeMismatch(format!(
                "conv input needs [C,D,H,W], got {shape:?}"
            )));
        }
        let (c, d, h, w) = (shape[0], shape[1], shape[2], shape[3]);
        if c != self.in_channels() {
            return Err(NnError::ShapeMismatch(format!(
                "conv expects {} input channels, got {c}",
                self.in_channels()
            )));
        }
        let k = self.kernel_size();
        for extent in [d, h, w] {
            if k > extent {
                return Err(NnError::KernelTooLarge { k, extent });
            }
        }
        Ok((c, d, h, w))
    }

    fn out_extent(&self, extent: usize) -> usize {
        (extent - self.kernel_size()) / self.stride + 1
    }

    /// `[C,D,H,W] → [out_ch, od, oh, ow]` with valid padding.
    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        input.check_finite("conv3d input")?;
        let (c, d, h, w) = self.check_input(input)?;
        let k = self.kernel_size();
        let s = self.stride;
        let (od, oh, ow) = (self.out_extent(d), self.out_extent(h), self.out_extent(w));
        let out_ch = self.out_channels();
        let x = input.data();
        let ker = self.kernels.data();
        let mut out = vec![0.0; out_ch * od * oh * ow];
        for oc in 0..out_ch {
            for z in 0..od {
                for y in 0..oh {
                    for xo in 0..ow {
                        let mut acc = 0.0;
                        for ic in 0..c {
                            for kz in 0..k {
                                for ky in 0..k {
                                    let xi = ((ic * d + z * s + kz) * h + y * s + ky) * w + xo * s;
                                    let ki = (((oc * c + ic) * k + kz) * k + ky) * k;
                                    for kx in 0..k {
                                        acc += x[xi + kx] * ker[ki + kx];
                                    }
                                }
                            }
                        }
                        out[((oc * od + z) * oh + y) * ow + xo] = acc;
                    }
                }
            }
        }
        Tensor::new(vec![out_ch, od, oh, ow], out)
    }

    /// Gradients w.r.t. kernels (None when frozen) and the input.
    pub fn backward(&self, input: &Tensor, grad_out: &Tensor) -> Result<(Option<Tensor>, Tensor)> {
        let (c, d, h, w) = self.check_input(input)?;
        let k = self.kernel_size();
        let s = self.stride;
        let (od, oh, ow) = (self.out_extent(d), self.out_extent(h), self.out_extent(w));
        let out_ch = self.out_channels();
        if grad_out.shape() != [out_ch, od, oh, ow] {
            return Err(NnError::ShapeMismatch(format!(
                "conv grad_out shape {:?}, expected {:?}",
                grad_out.shape(),
                [out_ch, od, oh, ow]
            )));
        }
        let x = input.data();
        let ker = self.kernels.data();
        let go = grad_out.data();
        let mut gx = vec![0.0; x.len()];
        let mut gk = if self.trainable { vec![0.0; ker.len()] } else { Vec::new() };
        for oc in 0..out_ch {
            for z in 0..od {
                for y in 0..oh {
                    for xo in 0..ow {
                        let g = go[((oc * od + z) * oh + y) * ow + xo];
                        if g == 0.0 {
                            continue;
                        }
                        for ic in 0..c {
                            for kz in 0..k {
                                for ky in 0..k {
                                    let xi = ((ic * d + z * s + kz) * h + y * s + ky) * w + xo * s;
                                    let ki = (((oc * c + ic) * k + kz) * k + ky) * k;
                                    for kx in 0..k {
                                        gx[xi + kx] += g * ker[ki + kx];
                                        if self.trainable {
                                            gk[ki + kx] += g * x[xi + kx];
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let kernel_grads = if self.trainable {
            Some(Tensor::new(self.kernels.shape().to_vec(), gk)?)
        } else {
            None
        };
        Ok((kernel_grads, Tensor::new(vec![c, d, h, w], gx)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_dimension_contract() {
        let mut rng = crate::rng::seeded(1, 2);
        let conv = Conv3DLayer::seeded(28, 14, 4, 4, false, &mut rng).unwrap();
        let input = Tensor::zeros(vec![14, 32, 32, 32]);
        let out = conv.forward(&input).unwrap();
        assert_eq!(out.shape(), &[28, 8, 8, 8]);
        assert_eq!(out.len(), 14336);
    }

    #[test]
    fn delta_kernel_is_identity() {
        let kernels = Tensor::new(vec![1, 1, 1, 1, 1], vec![1.0]).unwrap();
        let conv = Conv3DLayer::new(kernels, 1, false).unwrap();
        let input = Tensor::new(vec![1, 2, 2, 2], (1..=8).map(f64::from).collect()).unwrap();
        let out = conv.forward(&input).unwrap();
        assert_eq!(out.data(), input.data());
    }

    #[test]
    fn zero_kernels_zero_output() {
        let conv = Conv3DLayer::new(Tensor::zeros(vec![2, 3, 2, 2, 2]), 2, false).unwrap();
        let mut input = Tensor::zeros(vec![3, 4, 4, 4]);
        input.data_mut().iter_mut().enumerate().for_each(|(i, v)| *v = i as f64);
        let out = conv.forward(&input).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_one_kernel_partitions_input() {
        // k = stride: receptive fields tile the input, so summing all
        // outputs of a constant-1 kernel equals summing the input.
        let k = 2;
        let kernels = Tensor::new(vec![1, 1, k, k, k], vec![1.0; k * k * k]).unwrap();
        let conv = Conv3DLayer::new(kernels, k, false).unwrap();
        let mut rng = crate::rng::seeded(3, 3);
        let data: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let input = Tensor::new(vec![1, 4, 4, 4], data).unwrap();
        let out = conv.forward(&input).unwrap();
        let total_in: f64 = input.data().iter().sum();
        let total_out: f64 = out.data().iter().sum();
        assert!((total_in - total_out).abs() < 1e-12);
    }

    #[test]
    fn frozen_layer_yields_no_kernel_grads() {
        let mut rng = crate::rng::seeded(4, 4);
        let conv = Conv3DLayer::seeded(2, 1, 2, 2, false, &mut rng).unwrap();
        let input = Tensor::zeros(vec![1, 4, 4, 4]);
        let out = conv.forward(&input).unwrap();
        let grad_out = Tensor::new(out.shape().to_vec(), vec![1.0; out.len()]).unwrap();
        let (gk, gx) = conv.backward(&input, &grad_out).unwrap();
        assert!(gk.is_none());
        assert_eq!(gx.shape(), input.shape());
    }

    #[test]
    fn kernel_too_large_rejected() {
        let conv = Conv3DLayer::new(Tensor::zeros(vec![1, 1, 5, 5, 5]), 1, false).unwrap();
        let input = Tensor::zeros(vec![1, 4, 4, 4]);
        assert!(matches!(conv.forward(&input), Err(NnError::KernelTooLarge { k: 5, extent: 4 })));
    }

    #[test]
    fn conv_gradients_match_finite_differences() {
        let mut rng = crate::rng::seeded(5, 5);
        let mut conv = Conv3DLayer::seeded(2, 2, 2, 2, true, &mut rng).unwrap();
        let data: Vec<f64> = (0..2 * 4 * 4 * 4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let input = Tensor::new(vec![2, 4, 4, 4], data).unwrap();
        // Loss = 0.5 Σ out², so grad_out = out.
        let out = conv.forward(&input).unwrap();
        let grad_out = out.clone();
        let (gk, gx) = conv.backward(&input, &grad_out).unwrap();
        let gk = gk.unwrap();
        let h = 1e-5;
        let loss = |c: &Conv3DLayer, x: &Tensor| -> f64 {
            c.forward(x).unwrap().data().iter().map(|v| 0.5 * v * v).sum()
        };
        // Spot-check a handful of kernel and input coordinates.
        for idx in [0usize, 7, 13, 21] {
            let mut plus = conv.clone();
            plus.kernels.data_mut()[idx] += h;
            let mut minus = conv.clone();
            minus.kernels.data_mut()[idx] -= h;
            let fd = (loss(&plus, &input) - loss(&minus, &input)) / (2.0 * h);
            assert!(
                (fd - gk.data()[idx]).abs() < 1e-6 * fd.abs().max(1.0),
                "kernel idx {idx}: fd {fd} analytic {}",
                gk.data()[idx]
            );
        }
        for idx in [0usize, 17, 63, 100] {
            let mut xp = input.clone();
            xp.data_mut()[idx] += h;
            let mut xm = input.clone();
            xm.data_mut()[idx] -= h;
            let fd = (loss(&conv, &xp) - loss(&conv, &xm)) / (2.0 * h);
            assert!(
                (fd - gx.data()[idx]).abs() < 1e-6 * fd.abs().max(1.0),
                "input idx {idx}: fd {fd} analytic {}",
                gx.data()[idx]
            );
        }
        conv.trainable = false;
        let (none_gk, _) = conv.backward(&input, &grad_out).unwrap();
        assert!(none_gk.is_none());
    }
}
