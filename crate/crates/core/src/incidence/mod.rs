//! Shadings of tube families, incidence and heavy-square counts, the
//! two-ends refinement, rescaling of quasi-product families, the sharpness
//! constructions, and the numerical checks of the incidence bounds.

mod heavy;
mod rescale;
mod shading;
mod sharpness;
mod two_ends;
mod verify;

pub use heavy::{annulus_profile, heavy_profile, AnnulusBucket, heavy_squares, heavy_squares_shaded, incidence_counts, square_counts};
pub use rescale::{heredity_bound, rescale_tube, segment_rescale, RescaleOutcome, RescaledGroup};
pub use shading::{dual_shading, full_shading, restrict_shading, sigma_of, DualShading, Shading};
pub use sharpness::{bush_construction, bush_heavy_fit, BushProfileFit, layered_sharpness_family, single_bush};
pub use two_ends::{
    max_ball_fraction, random_kt_shading, segment_kt_constant, two_ends_check, two_ends_refine, Refinement,
};
pub use verify::{verify_main_theorem, verify_tww, BoundParameters, IncidenceReport, TwoEndsParams};

#[cfg(test)]
mod tests;
