//! The asymmetric autoencoder: multilayer tanh encoder with batch
//! normalization, linear single-layer decoder with bias, a fixed
//! mixed-frequency aggregation layer, masked squared-error loss,
//! backpropagation, and ADAM.

mod adam;
mod backprop;
mod forward;

pub use adam::adam_step;
pub use backprop::backprop_grads;
pub use forward::{
    decode_linear, encode_forward, forward_batch, masked_mse, mm_aggregate, BatchCache,
    EncodeCache, QuarterlyTarget, TrainBatch,
};

use ndarray::{Array1, Array2, ArrayViewD, ArrayViewMutD};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{cast, Scalar};

/// Numerical floor inside batch-norm standard deviations.
pub(crate) const BN_EPS: f64 = 1e-5;
/// Running-statistics momentum (not specified upstream; conventional value).
pub(crate) const BN_MOMENTUM: f64 = 0.9;

/// Link function of the encoder layers.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Identity,
}

/// Forward-pass mode: batch statistics vs running statistics.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Mode {
    Train,
    Infer,
}

/// Architecture of the encoding network.
///
/// The production model always uses `standard()`: exactly three tanh hidden
/// layers with batch normalization after the first two affine maps. The raw
/// constructor admits degenerate shapes (single linear layer, no batch norm)
/// used by diagnostics such as the PCA-equivalence check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub input_width: usize,
    /// Hidden layer widths; the last entry is the number of factors r.
    pub hidden: Vec<usize>,
    /// Indices of hidden layers with batch normalization before the link.
    pub batchnorm_positions: Vec<usize>,
    pub activation: Activation,
}

impl EncoderSpec {
    /// The production encoder: 3 tanh layers, batch norm at layers 0 and 1.
    pub fn standard(input_width: usize, h1: usize, h2: usize, r: usize) -> Result<Self> {
        let spec = EncoderSpec {
            input_width,
            hidden: vec![h1, h2, r],
            batchnorm_positions: vec![0, 1],
            activation: Activation::Tanh,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_width == 0 {
            return Err(Error::BadEncoderSpec("input width must be positive".into()));
        }
        if self.hidden.is_empty() || self.hidden.len() > 3 {
            return Err(Error::BadEncoderSpec(format!(
                "need 1-3 hidden layers, got {}",
                self.hidden.len()
            )));
        }
        if self.hidden.iter().any(|&w| w == 0) {
            return Err(Error::BadEncoderSpec("zero-width hidden layer".into()));
        }
        if self.n_factors() >= self.input_width {
            return Err(Error::BadEncoderSpec(format!(
                "factor width {} must be below input width {}",
                self.n_factors(),
                self.input_width
            )));
        }
        if self.batchnorm_positions.len() > 2 {
            return Err(Error::BadEncoderSpec(
                "at most two batch normalization layers".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for &p in &self.batchnorm_positions {
            if p >= self.hidden.len() {
                return Err(Error::BadEncoderSpec(format!(
                    "batch norm position {p} outside hidden layers"
                )));
            }
            if !seen.insert(p) {
                return Err(Error::BadEncoderSpec(format!(
                    "duplicate batch norm position {p}"
                )));
            }
        }
        Ok(())
    }

    /// Width of the code layer (number of factors).
    pub fn n_factors(&self) -> usize {
        *self.hidden.last().unwrap()
    }

    /// Layer widths including the input: `[input, h1, ..., r]`.
    fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.input_width];
        w.extend_from_slice(&self.hidden);
        w
    }

    /// Position of a hidden layer inside `batchnorm_positions`, if any.
    pub(crate) fn bn_slot(&self, layer: usize) -> Option<usize> {
        self.batchnorm_positions.iter().position(|&p| p == layer)
    }
}

/// Fixed 5-tap aggregation mapping monthly log-growth onto quarterly
/// log-growth. The weights are constants, never touched by gradients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MMWeights<F> {
    weights: [F; 5],
}

impl<F: Scalar> MMWeights<F> {
    /// `[1, 2, 3, 2, 1] / 3`.
    pub fn standard() -> Self {
        let third = F::one() / cast::<F>(3.0);
        MMWeights {
            weights: [
                third,
                cast::<F>(2.0) * third,
                F::one(),
                cast::<F>(2.0) * third,
                third,
            ],
        }
    }

    pub fn weights(&self) -> &[F; 5] {
        &self.weights
    }

    /// Dot product against an exactly-5-long window (debug-asserted).
    pub fn aggregate_slice(&self, window: &[F]) -> F {
        debug_assert_eq!(window.len(), 5);
        self.weights
            .iter()
            .zip(window)
            .fold(F::zero(), |s, (&w, &v)| s + w * v)
    }
}

/// ADAM hyperparameters; `default()` is the conventional setting.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && self.beta1 > 0.0
            && (0.0..1.0).contains(&self.beta2)
            && self.beta2 > 0.0
            && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::BadTrainConfig(
                "adam requires lr > 0, 0 < beta1, beta2 < 1, epsilon > 0".into(),
            ))
        }
    }
}

/// Every trainable tensor of the network, in a fixed walk order. Gradients
/// and ADAM moment buffers reuse this shape.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamSet<F> {
    /// Per hidden layer, (n_in, n_out).
    pub weights: Vec<Array2<F>>,
    pub biases: Vec<Array1<F>>,
    /// Per batch-norm layer: scale gamma.
    pub bn_scale: Vec<Array1<F>>,
    /// Per batch-norm layer: shift beta.
    pub bn_shift: Vec<Array1<F>>,
    /// Decoder loadings, n_series x r.
    pub loadings: Array2<F>,
    /// Decoder bias, n_series.
    pub decoder_bias: Array1<F>,
}

impl<F: Scalar> ParamSet<F> {
    pub fn zeros_like(&self) -> Self {
        ParamSet {
            weights: self.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            biases: self.biases.iter().map(|b| Array1::zeros(b.dim())).collect(),
            bn_scale: self.bn_scale.iter().map(|g| Array1::zeros(g.dim())).collect(),
            bn_shift: self.bn_shift.iter().map(|b| Array1::zeros(b.dim())).collect(),
            loadings: Array2::zeros(self.loadings.dim()),
            decoder_bias: Array1::zeros(self.decoder_bias.dim()),
        }
    }

    /// Views over every tensor, in the canonical walk order.
    pub fn tensors(&self) -> Vec<ArrayViewD<'_, F>> {
        let mut out: Vec<ArrayViewD<'_, F>> = Vec::new();
        out.extend(self.weights.iter().map(|w| w.view().into_dyn()));
        out.extend(self.biases.iter().map(|b| b.view().into_dyn()));
        out.extend(self.bn_scale.iter().map(|g| g.view().into_dyn()));
        out.extend(self.bn_shift.iter().map(|b| b.view().into_dyn()));
        out.push(self.loadings.view().into_dyn());
        out.push(self.decoder_bias.view().into_dyn());
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<ArrayViewMutD<'_, F>> {
        let mut out: Vec<ArrayViewMutD<'_, F>> = Vec::new();
        out.extend(self.weights.iter_mut().map(|w| w.view_mut().into_dyn()));
        out.extend(self.biases.iter_mut().map(|b| b.view_mut().into_dyn()));
        out.extend(self.bn_scale.iter_mut().map(|g| g.view_mut().into_dyn()));
        out.extend(self.bn_shift.iter_mut().map(|b| b.view_mut().into_dyn()));
        out.push(self.loadings.view_mut().into_dyn());
        out.push(self.decoder_bias.view_mut().into_dyn());
        out
    }

    pub fn n_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|x| x.is_finite()))
    }
}

/// Running batch-norm statistics (inference mode), one per BN layer.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BnRunning<F> {
    pub mean: Array1<F>,
    pub var: Array1<F>,
}

/// Full parameter state of the autoencoder plus optimizer buffers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkState<F> {
    pub spec: EncoderSpec,
    pub params: ParamSet<F>,
    pub bn_running: Vec<BnRunning<F>>,
    pub mm: MMWeights<F>,
    pub(crate) adam_m: ParamSet<F>,
    pub(crate) adam_v: ParamSet<F>,
    pub(crate) step: u64,
}

/// Gaussian weight initialization with variance `2 / (n_in + n_out)`.
pub fn xavier_init<F: Scalar, R: Rng>(n_in: usize, n_out: usize, rng: &mut R) -> Array2<F> {
    assert!(n_in >= 1 && n_out >= 1);
    let std = (2.0 / (n_in + n_out) as f64).sqrt();
    let mut w = Array2::zeros((n_in, n_out));
    for x in w.iter_mut() {
        let draw: f64 = rng.sample(StandardNormal);
        *x = cast::<F>(std * draw);
    }
    w
}

impl<F: Scalar> NetworkState<F> {
    /// Xavier-initializes a network for `n_series` outputs: Gaussian weights,
    /// zero biases, unit batch-norm scale, zero shift, zero optimizer state.
    pub fn init<R: Rng>(spec: EncoderSpec, n_series: usize, rng: &mut R) -> Result<Self> {
        spec.validate()?;
        let widths = spec.widths();
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..spec.hidden.len() {
            weights.push(xavier_init::<F, R>(widths[l], widths[l + 1], rng));
            biases.push(Array1::zeros(widths[l + 1]));
        }
        let mut bn_scale = Vec::new();
        let mut bn_shift = Vec::new();
        let mut bn_running = Vec::new();
        for &p in &spec.batchnorm_positions {
            let w = spec.hidden[p];
            bn_scale.push(Array1::from_elem(w, F::one()));
            bn_shift.push(Array1::zeros(w));
            bn_running.push(BnRunning {
                mean: Array1::zeros(w),
                var: Array1::from_elem(w, F::one()),
            });
        }
        let r = spec.n_factors();
        // decoder is a linear r -> n_series map; xavier over that shape,
        // stored transposed as (n_series, r)
        let mut loadings = Array2::zeros((n_series, r));
        let std = (2.0 / (r + n_series) as f64).sqrt();
        for x in loadings.iter_mut() {
            let draw: f64 = rng.sample(StandardNormal);
            *x = cast::<F>(std * draw);
        }
        let params = ParamSet {
            weights,
            biases,
            bn_scale,
            bn_shift,
            loadings,
            decoder_bias: Array1::zeros(n_series),
        };
        let adam_m = params.zeros_like();
        let adam_v = params.zeros_like();
        Ok(NetworkState {
            spec,
            params,
            bn_running,
            mm: MMWeights::standard(),
            adam_m,
            adam_v,
            step: 0,
        })
    }

    pub fn n_series(&self) -> usize {
        self.params.decoder_bias.len()
    }

    pub fn n_factors(&self) -> usize {
        self.spec.n_factors()
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Zeroes the ADAM moment buffers and the step counter.
    pub fn reset_adam(&mut self) {
        self.adam_m = self.params.zeros_like();
        self.adam_v = self.params.zeros_like();
        self.step = 0;
    }

    /// Folds a train-mode forward pass's batch statistics into the running
    /// statistics (exponential moving average).
    pub fn update_running_stats(&mut self, cache: &EncodeCache<F>) {
        let momentum = cast::<F>(BN_MOMENTUM);
        let rest = F::one() - momentum;
        for (slot, stats) in cache.batch_stats().iter().enumerate() {
            if let Some((mean, var)) = stats {
                let run = &mut self.bn_running[slot];
                run.mean = &run.mean * momentum + &(mean * rest);
                run.var = &run.var * momentum + &(var * rest);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn xavier_unit_case_has_unit_variance_parameter() {
        // n_in = n_out = 1: variance 2/(1+1) = 1
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let draws: Vec<f64> = (0..20_000)
            .map(|_| xavier_init::<f64, _>(1, 1, &mut rng)[[0, 0]])
            .collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!((var - 1.0).abs() < 0.05, "sample variance {var}");
    }

    #[test]
    fn xavier_large_matrix_variance_within_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = xavier_init::<f64, _>(100, 100, &mut rng);
        let n = w.len() as f64;
        let mean = w.sum() / n;
        let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        assert!((0.009..=0.011).contains(&var), "sample variance {var}");
    }

    #[test]
    fn xavier_deterministic_under_seed() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        let wa = xavier_init::<f64, _>(4, 3, &mut a);
        let wb = xavier_init::<f64, _>(4, 3, &mut b);
        assert_eq!(wa, wb);
    }

    #[test]
    fn standard_spec_shape() {
        let spec = EncoderSpec::standard(20, 12, 6, 3).unwrap();
        assert_eq!(spec.hidden, vec![12, 6, 3]);
        assert_eq!(spec.batchnorm_positions, vec![0, 1]);
        assert_eq!(spec.n_factors(), 3);
        assert!(EncoderSpec::standard(3, 4, 4, 3).is_err()); // r >= input
    }

    #[test]
    fn spec_validation_rejects_bad_shapes() {
        let bad = EncoderSpec {
            input_width: 10,
            hidden: vec![4, 4, 4, 2],
            batchnorm_positions: vec![],
            activation: Activation::Tanh,
        };
        assert!(bad.validate().is_err());
        let bad = EncoderSpec {
            input_width: 10,
            hidden: vec![4, 2],
            batchnorm_positions: vec![5],
            activation: Activation::Tanh,
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn mm_weights_sum_to_three() {
        let w: MMWeights<f64> = MMWeights::standard();
        let s: f64 = w.weights().iter().sum();
        assert!((s - 3.0).abs() < 1e-15);
    }

    #[test]
    fn init_is_deterministic_and_finite() {
        let spec = EncoderSpec::standard(8, 6, 4, 2).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(5);
        let mut r2 = ChaCha8Rng::seed_from_u64(5);
        let s1 = NetworkState::<f64>::init(spec.clone(), 4, &mut r1).unwrap();
        let s2 = NetworkState::<f64>::init(spec, 4, &mut r2).unwrap();
        assert!(s1.params.all_finite());
        assert_eq!(s1.params.loadings, s2.params.loadings);
        assert_eq!(s1.params.weights[0], s2.params.weights[0]);
    }
}
