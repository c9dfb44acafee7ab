//! Wavelet-packet spectral estimation.
//!
//! A full binary tree of two-channel paraunitary analysis stages splits the
//! signal into `2^J` subbands. Because the bank is orthogonal the leaf
//! energies add up to the signal energy, so dividing each leaf energy by the
//! sample count gives a band power and dividing that by the band width gives
//! a density. Leaves are stored in filter-path order; [`gray_order`] maps
//! them to ascending frequency.

mod filters;
mod order;
mod psd;
mod transform;

pub use filters::{daubechies_lowpass, parse_coefficients, FilterPair, BUILTIN_FILTERS};
pub use order::{frequency_rank, gray_order};
pub use psd::{wp_psd, WpPsd};
pub use transform::{
    analysis_step, max_periodic_depth, synthesis_step, wp_decompose, wp_reconstruct, BoundaryMode,
    WpTree,
};
