//! Building blocks: dense, batch-norm and convolution layers.

use candle_core::{Tensor, Var, D};

use crate::params::ParamStore;
use crate::{NnError, Result};

pub const LEAKY_SLOPE: f64 = 0.01;

pub fn leaky_relu(x: &Tensor) -> Result<Tensor> {
    Ok(candle_nn::ops::leaky_relu(x, LEAKY_SLOPE)?)
}

fn key(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

#[derive(Debug, Clone)]
pub struct Linear {
    weight: Var,
    bias: Option<Var>,
    inputs: usize,
}

impl Linear {
    pub fn new(store: &mut ParamStore, prefix: &str, inputs: usize, outputs: usize, bias: bool) -> Result<Self> {
        let bound = 1.0 / (inputs as f64).sqrt();
        let weight = store.uniform(&key(prefix, "weight"), &[outputs, inputs], bound)?;
        let bias = if bias {
            Some(store.uniform(&key(prefix, "bias"), &[outputs], bound)?)
        } else {
            None
        };
        Ok(Self { weight, bias, inputs })
    }

    pub fn weight(&self) -> &Var {
        &self.weight
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        if x.dim(D::Minus1)? != self.inputs {
            return Err(NnError::shape(format!(
                "dense layer expects {} inputs, got shape {:?}",
                self.inputs,
                x.dims()
            )));
        }
        let y = x.matmul(&self.weight.as_tensor().t()?)?;
        Ok(match &self.bias {
            Some(b) => y.broadcast_add(b.as_tensor())?,
            None => y,
        })
    }
}

/// Batch normalisation over axis 1 of a `(batch, C)` or `(batch, C, H, W)` tensor.
#[derive(Debug, Clone)]
pub struct BatchNorm {
    gamma: Var,
    beta: Var,
    running_mean: Var,
    running_var: Var,
    channels: usize,
    eps: f64,
    momentum: f64,
}

impl BatchNorm {
    pub fn new(store: &mut ParamStore, prefix: &str, channels: usize) -> Result<Self> {
        Ok(Self {
            gamma: store.constant(&key(prefix, "gamma"), &[channels], 1.0)?,
            beta: store.constant(&key(prefix, "beta"), &[channels], 0.0)?,
            running_mean: store.buffer(&key(prefix, "running_mean"), &[channels], 0.0)?,
            running_var: store.buffer(&key(prefix, "running_var"), &[channels], 1.0)?,
            channels,
            eps: 1e-5,
            momentum: 0.1,
        })
    }

    pub fn forward(&self, x: &Tensor, train: bool) -> Result<Tensor> {
        let dims = x.dims().to_vec();
        if dims.len() < 2 || dims[1] != self.channels {
            return Err(NnError::shape(format!(
                "batch-norm over {} channels got shape {dims:?}",
                self.channels
            )));
        }
        let mut bshape = vec![1usize; dims.len()];
        bshape[1] = self.channels;
        let reduce: Vec<usize> = (0..dims.len()).filter(|&d| d != 1).collect();
        let count = x.elem_count() / self.channels;

        let (mean, var) = if train && count > 1 {
            let mean = x.sum_keepdim(reduce.clone())?.affine(1.0 / count as f64, 0.0)?;
            let centered = x.broadcast_sub(&mean)?;
            let var = centered.sqr()?.sum_keepdim(reduce)?.affine(1.0 / count as f64, 0.0)?;
            let m = self.momentum;
            let unbiased = count as f64 / (count as f64 - 1.0);
            let new_mean = ((self.running_mean.as_tensor() * (1.0 - m))? + (mean.detach().flatten_all()? * m)?)?;
            let new_var =
                ((self.running_var.as_tensor() * (1.0 - m))? + (var.detach().flatten_all()? * (m * unbiased))?)?;
            self.running_mean.set(&new_mean)?;
            self.running_var.set(&new_var)?;
            (mean, var)
        } else {
            (
                self.running_mean.as_tensor().reshape(bshape.clone())?,
                self.running_var.as_tensor().reshape(bshape.clone())?,
            )
        };
        let normed = x.broadcast_sub(&mean)?.broadcast_div(&(var + self.eps)?.sqrt()?)?;
        Ok(normed
            .broadcast_mul(&self.gamma.as_tensor().reshape(bshape.clone())?)?
            .broadcast_add(&self.beta.as_tensor().reshape(bshape)?)?)
    }
}

/// 1-D convolution over `(batch, C_in, L)` with same padding.
#[derive(Debug, Clone)]
pub struct Conv1d {
    weight: Var,
    bias: Var,
    padding: usize,
}

impl Conv1d {
    pub fn new(store: &mut ParamStore, prefix: &str, inputs: usize, outputs: usize, kernel: usize) -> Result<Self> {
        let bound = 1.0 / ((inputs * kernel) as f64).sqrt();
        Ok(Self {
            weight: store.uniform(&key(prefix, "weight"), &[outputs, inputs, kernel], bound)?,
            bias: store.uniform(&key(prefix, "bias"), &[outputs], bound)?,
            padding: kernel / 2,
        })
    }

    /// Kernel and bias set to fixed values instead of random ones.
    pub fn with_constants(
        store: &mut ParamStore,
        prefix: &str,
        inputs: usize,
        outputs: usize,
        kernel: usize,
        weight: f64,
        bias: f64,
    ) -> Result<Self> {
        Ok(Self {
            weight: store.constant(&key(prefix, "weight"), &[outputs, inputs, kernel], weight)?,
            bias: store.constant(&key(prefix, "bias"), &[outputs], bias)?,
            padding: kernel / 2,
        })
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let (_, cin, _) = x.dims3()?;
        let want = self.weight.dim(1)?;
        if cin != want {
            return Err(NnError::shape(format!("conv1d expects {want} channels, got {cin}")));
        }
        // As a 1×k 2-D convolution: candle's conv1d weight gradient is wrong
        // for more than one input channel.
        let (o, i, k) = self.weight.dims3()?;
        let w = self.weight.as_tensor().reshape((o, i, 1, k))?;
        let x = x.unsqueeze(2)?.pad_with_zeros(3, self.padding, self.padding)?;
        let y = x.conv2d(&w, 0, 1, 1, 1)?.squeeze(2)?;
        Ok(y.broadcast_add(&self.bias.as_tensor().reshape((1, o, 1))?)?)
    }
}

/// 2-D convolution over `(batch, C_in, H, W)`; no bias (always followed by batch-norm).
#[derive(Debug, Clone)]
pub struct Conv2d {
    weight: Var,
    stride: usize,
    padding: usize,
}

impl Conv2d {
    pub fn new(
        store: &mut ParamStore,
        prefix: &str,
        inputs: usize,
        outputs: usize,
        kernel: usize,
        stride: usize,
    ) -> Result<Self> {
        // He-uniform for leaky/ReLU stacks.
        let bound = (6.0 / (inputs * kernel * kernel) as f64).sqrt();
        Ok(Self {
            weight: store.uniform(&key(prefix, "weight"), &[outputs, inputs, kernel, kernel], bound)?,
            stride,
            padding: kernel / 2,
        })
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        Ok(x.conv2d(self.weight.as_tensor(), self.padding, self.stride, 1, 1)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use candle_core::{DType, Device};

    #[test]
    fn batch_norm_standardises_in_training_mode() {
        let mut store = ParamStore::new("bn", 0, DType::F64);
        let bn = BatchNorm::new(&mut store, "", 2).unwrap();
        let x = Tensor::new(&[[1.0f64, 10.0], [3.0, 20.0], [5.0, 30.0]], &Device::Cpu).unwrap();
        let y = bn.forward(&x, true).unwrap().to_vec2::<f64>().unwrap();
        for c in 0..2 {
            let col: Vec<f64> = y.iter().map(|r| r[c]).collect();
            let mean = col.iter().sum::<f64>() / 3.0;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0;
            assert!(mean.abs() < 1e-12);
            assert!((var - 1.0).abs() < 1e-4);
        }
        let rm = store.get("running_mean").unwrap().to_vec1::<f64>().unwrap();
        assert!((rm[0] - 0.3).abs() < 1e-12 && (rm[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn batch_norm_inference_uses_running_stats() {
        let mut store = ParamStore::new("bn", 0, DType::F64);
        let bn = BatchNorm::new(&mut store, "", 1).unwrap();
        let x = Tensor::new(&[[2.0f64], [4.0]], &Device::Cpu).unwrap();
        let y = bn.forward(&x, false).unwrap().to_vec2::<f64>().unwrap();
        assert!((y[0][0] - 2.0 / (1.0 + 1e-5f64).sqrt()).abs() < 1e-12);
        assert_eq!(store.get("running_mean").unwrap().to_vec1::<f64>().unwrap(), vec![0.0]);
    }

    #[test]
    fn conv1d_same_padding_keeps_length() {
        let mut store = ParamStore::new("c", 0, DType::F32);
        let conv = Conv1d::new(&mut store, "", 2, 8, 5).unwrap();
        let x = Tensor::zeros((3, 2, 16), DType::F32, &Device::Cpu).unwrap();
        assert_eq!(conv.forward(&x).unwrap().dims(), &[3, 8, 16]);
        assert!(conv
            .forward(&Tensor::zeros((3, 1, 16), DType::F32, &Device::Cpu).unwrap())
            .is_err());
    }

    #[test]
    fn conv1d_output_and_weight_gradient_match_direct_sums() {
        let (b, ci, co, len, k) = (2, 3, 4, 7, 5);
        let mut store = ParamStore::new("c", 1, DType::F64);
        let conv = Conv1d::new(&mut store, "", ci, co, k).unwrap();
        let x = Tensor::randn(0f64, 1.0, (b, ci, len), &Device::Cpu).unwrap();
        let r = Tensor::randn(0f64, 1.0, (b, co, len), &Device::Cpu).unwrap();
        let y = conv.forward(&x).unwrap();
        let grads = (&y * &r).unwrap().sum_all().unwrap().backward().unwrap();

        let w = store.get("weight").unwrap();
        let gw = grads.get(w.as_tensor()).unwrap().to_vec3::<f64>().unwrap();
        let (wv, bv) = (
            w.to_vec3::<f64>().unwrap(),
            store.get("bias").unwrap().to_vec1::<f64>().unwrap(),
        );
        let (xv, rv, yv) = (
            x.to_vec3::<f64>().unwrap(),
            r.to_vec3::<f64>().unwrap(),
            y.to_vec3::<f64>().unwrap(),
        );
        let at = |n: usize, i: usize, pos: isize| {
            if pos < 0 || pos >= len as isize {
                0.0
            } else {
                xv[n][i][pos as usize]
            }
        };
        let pad = (k / 2) as isize;
        for o in 0..co {
            for n in 0..b {
                for l in 0..len {
                    let mut want = bv[o];
                    for i in 0..ci {
                        for t in 0..k {
                            want += wv[o][i][t] * at(n, i, l as isize + t as isize - pad);
                        }
                    }
                    assert!((yv[n][o][l] - want).abs() < 1e-12);
                }
            }
            for i in 0..ci {
                for t in 0..k {
                    let want: f64 = (0..b)
                        .flat_map(|n| (0..len).map(move |l| (n, l)))
                        .map(|(n, l)| rv[n][o][l] * at(n, i, l as isize + t as isize - pad))
                        .sum();
                    assert!((gw[o][i][t] - want).abs() < 1e-10, "w[{o}][{i}][{t}]");
                }
            }
        }
    }

    #[test]
    fn linear_rejects_wrong_width() {
        let mut store = ParamStore::new("l", 0, DType::F32);
        let l = Linear::new(&mut store, "fc", 4, 3, true).unwrap();
        assert!(l
            .forward(&Tensor::zeros((2, 5), DType::F32, &Device::Cpu).unwrap())
            .is_err());
        assert_eq!(
            l.forward(&Tensor::zeros((2, 4), DType::F32, &Device::Cpu).unwrap())
                .unwrap()
                .dims(),
            &[2, 3]
        );
    }
}
