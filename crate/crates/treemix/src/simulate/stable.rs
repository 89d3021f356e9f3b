//! Positive alpha-stable sampling via the Kanter transform.

use rand::Rng;
use rand_distr::{Exp1, Open01};

use crate::error::{Error, Result};

/// Draws S with Laplace transform E[exp(-t S)] = exp(-t^alpha).
/// At alpha = 1 the law is degenerate at 1 and that value is returned exactly.
///
/// The Kanter construction: with U uniform on (0,1) and W unit exponential,
///   A(u) = [sin(alpha pi u)^alpha sin((1-alpha) pi u)^(1-alpha) / sin(pi u)]^(1/(1-alpha))
///   S = (A(U) / W)^((1-alpha)/alpha).
/// Evaluated in log space; the raw powers underflow for small alpha.
pub fn sample_positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("alpha = {alpha} outside (0,1]")));
    }
    if alpha == 1.0 {
        return Ok(1.0);
    }
    let u: f64 = rng.sample(Open01);
    let w: f64 = rng.sample(Exp1);
    let pi_u = std::f64::consts::PI * u;
    let ln_a = (alpha * (alpha * pi_u).sin().ln()
        + (1.0 - alpha) * ((1.0 - alpha) * pi_u).sin().ln()
        - pi_u.sin().ln())
        / (1.0 - alpha);
    Ok((((1.0 - alpha) / alpha) * (ln_a - w.ln())).exp())
}
