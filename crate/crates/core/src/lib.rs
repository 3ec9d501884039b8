//! Saturating k-Sperner families and saturating flat antichains over the
//! Boolean lattice `2^[n]`: constructions, certificate-emitting verifiers,
//! exact minimization at small sizes, and closed-form bound tables.

pub mod bounds;
pub mod chains;
pub mod constructions;
pub mod covering;
pub mod error;
pub mod family;
pub mod flat;
pub mod format;
pub mod reduction;
pub mod search;

pub use chains::{
    down_up, is_k_sperner, is_strongly_saturating, is_weakly_saturating, longest_chain,
    Certificate, CertificateKind,
};
pub use error::{Error, Result};
pub use family::{product, shade, shadow, LevelSlice, SetFamily, SetMask};
pub use format::{parse_family, parse_family_file, serialize_family, FamilyFile};
