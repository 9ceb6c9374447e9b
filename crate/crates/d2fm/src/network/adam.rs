//! ADAM update with bias correction.

use ndarray::Zip;

use crate::error::{Error, Result};
use crate::num::{cast, Scalar};

use super::{AdamConfig, NetworkState, ParamSet};

/// One ADAM step over every trainable tensor. Increments the step counter;
/// the aggregation weights are not parameters and are never touched.
pub fn adam_step<F: Scalar>(
    state: &mut NetworkState<F>,
    grads: &ParamSet<F>,
    config: &AdamConfig,
) -> Result<()> {
    if !grads.all_finite() {
        return Err(Error::NonFinite("adam gradients"));
    }
    state.step += 1;
    let t = state.step as i32;
    let b1 = cast::<F>(config.beta1);
    let b2 = cast::<F>(config.beta2);
    let lr = cast::<F>(config.learning_rate);
    let eps = cast::<F>(config.epsilon);
    let one = F::one();
    let corr1 = one - b1.powi(t);
    let corr2 = one - b2.powi(t);

    let mut params = state.params.tensors_mut();
    let mut moments = state.adam_m.tensors_mut();
    let mut velocities = state.adam_v.tensors_mut();
    let grad_views = grads.tensors();
    debug_assert_eq!(params.len(), grad_views.len());
    for i in 0..params.len() {
        Zip::from(&mut params[i])
            .and(&mut moments[i])
            .and(&mut velocities[i])
            .and(&grad_views[i])
            .for_each(|p, m, v, &g| {
                *m = b1 * *m + (one - b1) * g;
                *v = b2 * *v + (one - b2) * g * g;
                let m_hat = *m / corr1;
                let v_hat = *v / corr2;
                *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
            });
    }
    Ok(())
}
