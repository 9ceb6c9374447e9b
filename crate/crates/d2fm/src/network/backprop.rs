//! Exact analytic gradients of the batch loss with respect to every
//! trainable parameter, including the batch-norm backward pass. The
//! aggregation layer is a constant linear map and contributes only its
//! fixed weights to the chain.

use ndarray::{Array2, Axis};

use crate::error::{Error, Result};
use crate::num::{cast, Scalar};

use super::forward::{BatchCache, BnCache, TrainBatch};
use super::{Activation, NetworkState, ParamSet};

/// Backward pass over a cached forward evaluation of `batch`.
pub fn backprop_grads<F: Scalar>(
    state: &NetworkState<F>,
    batch: &TrainBatch<F>,
    cache: &BatchCache<F>,
) -> Result<ParamSet<F>> {
    let scored = batch.scored_count();
    if scored == 0 {
        return Err(Error::AllMasked);
    }
    let scale = cast::<F>(2.0) / F::from_usize(scored).unwrap();
    let decoded = &cache.decoded;

    // d loss / d decoded
    let mut d_out: Array2<F> = Array2::zeros(decoded.dim());
    for ((row, col), &m) in batch.monthly_mask.indexed_iter() {
        if m {
            d_out[[row, col]] =
                scale * (decoded[[row, col]] - batch.monthly_targets[[row, col]]);
        }
    }
    for q in &batch.quarterly {
        let window: Vec<F> = q.rows.iter().map(|&r| decoded[[r, q.series]]).collect();
        let fitted = state.mm.aggregate_slice(&window);
        let g = scale * (fitted - q.target);
        for (j, &r) in q.rows.iter().enumerate() {
            d_out[[r, q.series]] += state.mm.weights()[j] * g;
        }
    }

    let mut grads = state.params.zeros_like();

    // decoder: decoded = factors . loadings' + bias
    let factors = cache.encode.factors();
    grads.loadings = d_out.t().dot(factors);
    grads.decoder_bias = d_out.sum_axis(Axis(0));
    let mut d_act = d_out.dot(&state.params.loadings); // d loss / d factors

    // encoder layers, backwards
    for layer in (0..state.spec.hidden.len()).rev() {
        let a = &cache.encode.activations[layer];
        let mut d_z = match state.spec.activation {
            Activation::Tanh => {
                let one = F::one();
                let mut d = d_act;
                d.zip_mut_with(a, |g, &v| *g = *g * (one - v * v));
                d
            }
            Activation::Identity => d_act,
        };
        if let (Some(slot), Some(bn)) = (state.spec.bn_slot(layer), cache.encode.bn[layer].as_ref())
        {
            d_z = bn_backward(state, slot, bn, d_z, &mut grads);
        }
        let x = &cache.encode.layer_inputs[layer];
        grads.weights[layer] = x.t().dot(&d_z);
        grads.biases[layer] = d_z.sum_axis(Axis(0));
        d_act = d_z.dot(&state.params.weights[layer].t());
    }

    if !grads.all_finite() {
        return Err(Error::NonFinite("gradients"));
    }
    Ok(grads)
}

/// Batch-norm backward. In batch mode the statistics are functions of the
/// inputs and the full three-term formula applies; in infer mode they are
/// constants and only the elementwise scale survives.
fn bn_backward<F: Scalar>(
    state: &NetworkState<F>,
    slot: usize,
    bn: &BnCache<F>,
    d_y: Array2<F>,
    grads: &mut ParamSet<F>,
) -> Array2<F> {
    let gamma = &state.params.bn_scale[slot];
    grads.bn_shift[slot] = d_y.sum_axis(Axis(0));
    grads.bn_scale[slot] = (&d_y * &bn.x_hat).sum_axis(Axis(0));
    let d_xhat = &d_y * gamma;
    if !bn.batch_mode {
        return d_xhat * &bn.inv_std;
    }
    let rows = F::from_usize(d_y.nrows()).unwrap();
    let centered = &bn.pre - &bn.mean;
    let half = cast::<F>(0.5);
    let two = cast::<F>(2.0);
    // d var = sum d_xhat * centered * (-1/2) inv_std^3
    let inv_std3 = bn.inv_std.mapv(|v| v * v * v);
    let d_var = (&d_xhat * &centered).sum_axis(Axis(0)).mapv(|v| -half * v) * &inv_std3;
    // d mean = -sum d_xhat * inv_std + d_var * mean(-2 centered)
    let d_mean_a = (&d_xhat).sum_axis(Axis(0)).mapv(|v| -v) * &bn.inv_std;
    let d_mean_b = &d_var * &centered.sum_axis(Axis(0)).mapv(|v| -two * v / rows);
    let d_mean = d_mean_a + d_mean_b;
    // d x = d_xhat * inv_std + d_var * 2 centered / rows + d_mean / rows
    let term1 = d_xhat * &bn.inv_std;
    let term2 = centered.mapv(|v| two * v / rows) * &d_var;
    let term3 = d_mean.mapv(|v| v / rows);
    term1 + term2 + &term3
}
