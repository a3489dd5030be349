//! Convex envelopes, contact sets, the ABP check, and section normalization.

mod abp;
mod envelope;
mod john;
mod section;

pub use abp::{abp_check, AbpReport};
pub use envelope::{
    convexity_defect, lower_convex_envelope, lower_hull_1d, EnvelopeResult, Extension,
};
pub use john::{john_normalize, mvee, SectionNormalization};
pub use section::{section, section_with_rays, SectionSource, DEFAULT_RAYS};
