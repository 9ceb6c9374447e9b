//! Forward passes: encoder with batch normalization, linear decoder, the
//! fixed mixed-frequency aggregation, and the masked squared-error loss.

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::num::{cast, Scalar};

use super::{Activation, MMWeights, Mode, NetworkState, BN_EPS};

/// Per-batch-norm-layer cache needed by the backward pass.
#[derive(Clone, Debug)]
pub(crate) struct BnCache<F> {
    /// Pre-normalization affine output.
    pub pre: Array2<F>,
    /// Normalized values before scale/shift.
    pub x_hat: Array2<F>,
    pub mean: Array1<F>,
    pub inv_std: Array1<F>,
    /// Batch variance (biased), recorded for running-statistics updates.
    pub var: Array1<F>,
    /// Whether batch statistics were used (train mode).
    pub batch_mode: bool,
}

/// Everything the encoder backward pass needs, plus the factor outputs.
#[derive(Clone, Debug)]
pub struct EncodeCache<F> {
    /// Input to each dense layer (layer 0 sees the network input).
    pub(crate) layer_inputs: Vec<Array2<F>>,
    /// Post-activation output of each layer.
    pub(crate) activations: Vec<Array2<F>>,
    pub(crate) bn: Vec<Option<BnCache<F>>>,
    pub(crate) mode: Mode,
}

impl<F: Scalar> EncodeCache<F> {
    /// Factors produced by the pass (output of the last layer).
    pub fn factors(&self) -> &Array2<F> {
        self.activations.last().expect("at least one layer")
    }

    /// Batch statistics per BN slot (None when the layer ran in infer mode).
    pub(crate) fn batch_stats(&self) -> Vec<Option<(Array1<F>, Array1<F>)>> {
        let mut out = Vec::new();
        for cache in self.bn.iter().flatten() {
            if cache.batch_mode {
                out.push(Some((cache.mean.clone(), cache.var.clone())));
            } else {
                out.push(None);
            }
        }
        out
    }
}

/// Runs the encoder on a batch (rows = observations).
///
/// Each layer computes `link(W h + b)`, with batch normalization applied
/// between the affine map and the link at the configured positions: batch
/// statistics in train mode, running statistics in infer mode.
pub fn encode_forward<F: Scalar>(
    state: &NetworkState<F>,
    x: ArrayView2<F>,
    mode: Mode,
) -> Result<(Array2<F>, EncodeCache<F>)> {
    let spec = &state.spec;
    if x.ncols() != spec.input_width {
        return Err(Error::WidthMismatch {
            expected: spec.input_width,
            got: x.ncols(),
        });
    }
    let uses_bn = !spec.batchnorm_positions.is_empty();
    if mode == Mode::Train && uses_bn && x.nrows() < 2 {
        return Err(Error::BatchTooSmall(x.nrows()));
    }
    let mut layer_inputs = Vec::with_capacity(spec.hidden.len());
    let mut activations = Vec::with_capacity(spec.hidden.len());
    let mut bn_caches: Vec<Option<BnCache<F>>> = vec![None; spec.hidden.len()];
    let mut h = x.to_owned();
    for layer in 0..spec.hidden.len() {
        layer_inputs.push(h.clone());
        let mut z = h.dot(&state.params.weights[layer]) + &state.params.biases[layer];
        if let Some(slot) = spec.bn_slot(layer) {
            let (normalized, cache) = batch_norm(state, slot, &z, mode);
            bn_caches[layer] = Some(cache);
            z = normalized;
        }
        let a = match spec.activation {
            Activation::Tanh => z.mapv(|v| v.tanh()),
            Activation::Identity => z,
        };
        activations.push(a.clone());
        h = a;
    }
    let cache = EncodeCache {
        layer_inputs,
        activations,
        bn: bn_caches,
        mode,
    };
    Ok((cache.factors().clone(), cache))
}

fn batch_norm<F: Scalar>(
    state: &NetworkState<F>,
    slot: usize,
    z: &Array2<F>,
    mode: Mode,
) -> (Array2<F>, BnCache<F>) {
    let eps = cast::<F>(BN_EPS);
    let gamma = &state.params.bn_scale[slot];
    let beta = &state.params.bn_shift[slot];
    let (mean, var, batch_mode) = match mode {
        Mode::Train => {
            let rows = F::from_usize(z.nrows()).unwrap();
            let mean = z.sum_axis(Axis(0)) / rows;
            let centered = z - &mean;
            let var = centered.mapv(|v| v * v).sum_axis(Axis(0)) / rows;
            (mean, var, true)
        }
        Mode::Infer => (
            state.bn_running[slot].mean.clone(),
            state.bn_running[slot].var.clone(),
            false,
        ),
    };
    let inv_std = var.mapv(|v| F::one() / (v + eps).sqrt());
    let x_hat = (z - &mean) * &inv_std;
    let out = &x_hat * gamma + beta;
    let cache = BnCache {
        pre: z.clone(),
        x_hat,
        mean,
        inv_std,
        var,
        batch_mode,
    };
    (out, cache)
}

/// Linear decoder: `loadings . factors + bias` for every series, at monthly
/// frequency. Quarterly series get a latent monthly fitted value here and
/// are aggregated downstream.
pub fn decode_linear<F: Scalar>(
    state: &NetworkState<F>,
    factors: ArrayView2<F>,
) -> Result<Array2<F>> {
    let r = state.n_factors();
    if factors.ncols() != r {
        return Err(Error::WidthMismatch {
            expected: r,
            got: factors.ncols(),
        });
    }
    Ok(factors.dot(&state.params.loadings.t()) + &state.params.decoder_bias)
}

/// Aggregates exactly 5 consecutive monthly fitted values (newest first)
/// into a quarterly fitted value. Pure linear map, no parameters.
pub fn mm_aggregate<F: Scalar>(window: &[F], w: &MMWeights<F>) -> Result<F> {
    if window.len() != 5 {
        return Err(Error::BadAggregationWindow(window.len()));
    }
    Ok(w.aggregate_slice(window))
}

/// Mean of squared errors over observed entries only.
pub fn masked_mse<F: Scalar>(
    targets: ArrayView2<F>,
    fitted: ArrayView2<F>,
    mask: ArrayView2<bool>,
) -> Result<F> {
    if targets.dim() != fitted.dim() || targets.dim() != mask.dim() {
        return Err(Error::Invalid(format!(
            "masked_mse shape mismatch: targets {:?}, fitted {:?}, mask {:?}",
            targets.dim(),
            fitted.dim(),
            mask.dim()
        )));
    }
    let mut sum = F::zero();
    let mut count = 0usize;
    for ((t, f), &m) in targets.iter().zip(fitted.iter()).zip(mask.iter()) {
        if m {
            let d = *t - *f;
            sum = sum + d * d;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::AllMasked);
    }
    Ok(sum / F::from_usize(count).unwrap())
}

/// A quarterly scoring target inside a batch: the observed value and the
/// batch-row positions of the five monthly latents `[t, t-1, ..., t-4]`.
#[derive(Clone, Debug)]
pub struct QuarterlyTarget<F> {
    pub series: usize,
    pub rows: [usize; 5],
    pub target: F,
}

/// One training batch. `inputs` may contain auxiliary rows that exist only
/// to supply lagged monthly latents to quarterly windows; such rows carry an
/// all-false monthly mask.
#[derive(Clone, Debug)]
pub struct TrainBatch<F> {
    pub inputs: Array2<F>,
    pub monthly_targets: Array2<F>,
    pub monthly_mask: Array2<bool>,
    pub quarterly: Vec<QuarterlyTarget<F>>,
}

impl<F: Scalar> TrainBatch<F> {
    pub fn scored_count(&self) -> usize {
        self.monthly_mask.iter().filter(|&&m| m).count() + self.quarterly.len()
    }
}

/// Cache of a full forward pass over a batch (encoder + decoder).
#[derive(Clone, Debug)]
pub struct BatchCache<F> {
    pub encode: EncodeCache<F>,
    pub decoded: Array2<F>,
    pub loss: F,
}

/// Forward pass over a batch with the full loss: masked monthly squared
/// errors plus quarterly squared errors through the aggregation layer,
/// averaged over the number of scored entries.
pub fn forward_batch<F: Scalar>(
    state: &NetworkState<F>,
    batch: &TrainBatch<F>,
    mode: Mode,
) -> Result<(F, BatchCache<F>)> {
    if batch.scored_count() == 0 {
        return Err(Error::AllMasked);
    }
    let (factors, encode) = encode_forward(state, batch.inputs.view(), mode)?;
    let decoded = decode_linear(state, factors.view())?;
    let mut sum = F::zero();
    for ((t, f), &m) in batch
        .monthly_targets
        .iter()
        .zip(decoded.iter())
        .zip(batch.monthly_mask.iter())
    {
        if m {
            let d = *t - *f;
            sum = sum + d * d;
        }
    }
    for q in &batch.quarterly {
        let window: Vec<F> = q.rows.iter().map(|&row| decoded[[row, q.series]]).collect();
        let fitted = state.mm.aggregate_slice(&window);
        let d = q.target - fitted;
        sum = sum + d * d;
    }
    let loss = sum / F::from_usize(batch.scored_count()).unwrap();
    Ok((
        loss,
        BatchCache {
            encode,
            decoded,
            loss,
        },
    ))
}
