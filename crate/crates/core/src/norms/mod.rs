//! Whole-space radial norms of linear solutions and Sobolev norms on the torus.

pub mod quadrature;
pub mod radial;
pub mod torus;

pub use quadrature::{gauss_legendre, integrate_channels, QuadOptions};
pub use radial::{
    at_rest, radial_l1hat_bound, radial_l2_norm, radial_norms, radial_sobolev_seminorm, ChannelSpec, DecayHint,
    NormKind, Polarization, RadialProfile, DEFAULT_KMAX,
};
pub use torus::{omega_measure, torus_l2_direct, torus_sobolev_norm, torus_sobolev_norm_spectral};
