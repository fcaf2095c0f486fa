//! Planar curve-average operators, the Radon transform and their `L^{3/2} → L³` bounds.

mod bank;
mod certificate;
mod norms;
mod ops;
mod pairing;
mod radon;

pub use bank::{test_bank, BankMember};
pub use certificate::{
    l32l3_certificate, slice_grid, CertificateReport, SliceCertificate, Verdict, DEGENERATE_GROWTH,
};
pub use norms::{
    improving_ratio, improving_ratio_with, output_l3_norm, row_layout, windowed_l3_norm, NormEstimate,
    NormSettings, RatioEstimate, RowLayout,
};
pub use ops::{op_s, op_t, op_tk, parabola_convolution, PlanarOperator, SCoeffs, SliceOperator};
pub use pairing::{pairing_check, PairingReport};
pub use radon::{radon_transform, radon_transform_with, support_circumradius, RadonSampling, Sinogram};
