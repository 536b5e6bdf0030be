//! Differential-privacy primitives.

mod above_threshold;
mod histogram;
mod limited_domain;
mod noise;

pub use above_threshold::{NoisyThreshold, Verdict};
pub use histogram::{TokenHistogram, TokenId};
pub use limited_domain::{limited_domain_top1, LimitedDomainConfig};
pub use noise::{gumbel_from_uniform, laplace_from_uniform, sample_gumbel, sample_laplace};
