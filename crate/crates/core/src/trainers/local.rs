use rand::Rng;

use super::TrainError;
use crate::objectives::ClientObjective;

/// Coordinates beyond this magnitude count as divergence.
pub const DIVERGENCE_THRESHOLD: f64 = 1e100;

/// `K` sequential stochastic-gradient steps from `x0`.
///
/// With `clip`, each stochastic gradient is rescaled to L2 norm at most `clip`
/// before the step is applied.
pub fn local_sgd<R: Rng + ?Sized>(
    client: &ClientObjective,
    x0: &[f64],
    k: usize,
    eta: f64,
    clip: Option<f64>,
    rng: &mut R,
) -> Result<Vec<f64>, TrainError> {
    client.check_dim(x0)?;
    let mut x = x0.to_vec();
    let mut g = vec![0.0; x.len()];
    local_steps_in_place(client, &mut x, k, eta, clip, rng, &mut g)
        .map_err(|step| TrainError::Diverged { step })?;
    Ok(x)
}

/// Runs the steps on `x`; on divergence returns the offending step index.
pub(crate) fn local_steps_in_place<R: Rng + ?Sized>(
    client: &ClientObjective,
    x: &mut [f64],
    k: usize,
    eta: f64,
    clip: Option<f64>,
    rng: &mut R,
    g: &mut [f64],
) -> Result<(), usize> {
    for step in 0..k {
        client.stochastic_gradient_unchecked(x, rng, g);
        if let Some(c) = clip {
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > c {
                let scale = c / norm;
                g.iter_mut().for_each(|v| *v *= scale);
            }
        }
        for (xi, gi) in x.iter_mut().zip(g.iter()) {
            *xi -= eta * gi;
        }
        if diverged(x) {
            return Err(step);
        }
    }
    Ok(())
}

#[inline]
pub(crate) fn diverged(x: &[f64]) -> bool {
    x.iter()
        .any(|v| v.is_nan() || v.abs() > DIVERGENCE_THRESHOLD)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::QuadraticClient;
    use crate::rng::noise_stream;

    fn half_square() -> ClientObjective {
        QuadraticClient::new(1.0, 0.0).into()
    }

    #[test]
    fn zero_steps_is_identity() {
        let x = local_sgd(
            &half_square(),
            &[3.0],
            0,
            0.5,
            None,
            &mut noise_stream(0, 0),
        )
        .unwrap();
        assert_eq!(x, vec![3.0]);
    }

    #[test]
    fn geometric_contraction() {
        let x = local_sgd(
            &half_square(),
            &[1.0],
            2,
            0.5,
            None,
            &mut noise_stream(0, 0),
        )
        .unwrap();
        assert_eq!(x, vec![0.25]);
    }

    #[test]
    fn clipping_caps_step_length() {
        // gradient of ½x² + 0 at x = 10 is 10
        let x = local_sgd(
            &half_square(),
            &[10.0],
            1,
            0.1,
            Some(1.0),
            &mut noise_stream(0, 0),
        )
        .unwrap();
        assert!((10.0 - x[0] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn divergence_reports_step() {
        // contraction factor 1 − 3·1 = −2 per step: |x| doubles until it passes 1e100
        let c: ClientObjective = QuadraticClient::new(1.0, 0.0).into();
        match local_sgd(&c, &[1.0], 1000, 3.0, None, &mut noise_stream(0, 0)) {
            Err(TrainError::Diverged { step }) => assert_eq!(step, 332),
            other => panic!("{other:?}"),
        }
    }
}
