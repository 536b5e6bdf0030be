use rand::RngCore;

use crate::rng::uniform_open01;
use crate::{Error, Result};

/// Inverse CDF of Laplace(0, `scale`): `-b * sgn(u - 1/2) * ln(1 - 2|u - 1/2|)`.
pub fn laplace_from_uniform(u: f64, scale: f64) -> f64 {
    let centered = u - 0.5;
    -scale * centered.signum() * libm::log(1.0 - 2.0 * centered.abs())
}

/// Gumbel(0, `scale`) from a uniform draw: `-b * ln(-ln(u))`.
pub fn gumbel_from_uniform(u: f64, scale: f64) -> f64 {
    -scale * libm::log(-libm::log(u))
}

fn check_scale(scale: f64) -> Result<()> {
    if scale.is_finite() && scale > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("noise scale must be a positive finite number"))
    }
}

/// One Laplace draw, consuming exactly one 64-bit word from `rng`.
pub fn sample_laplace<R: RngCore + ?Sized>(scale: f64, rng: &mut R) -> Result<f64> {
    check_scale(scale)?;
    Ok(laplace_from_uniform(uniform_open01(rng), scale))
}

/// One Gumbel draw, consuming exactly one 64-bit word from `rng`.
pub fn sample_gumbel<R: RngCore + ?Sized>(scale: f64, rng: &mut R) -> Result<f64> {
    check_scale(scale)?;
    Ok(gumbel_from_uniform(uniform_open01(rng), scale))
}
