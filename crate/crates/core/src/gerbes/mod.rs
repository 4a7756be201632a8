//! Bands, normal 2-cocycles and Ȟ², gerbes built from cocycles, the
//! obstruction class of a band and the class of a groupoid extension.
//!
//! Cocycles are stored on sorted inhabited triples. The other orders follow
//! from choosing `f_βα = f_αβ⁻¹` when reading a cocycle off a gerbe, which
//! gives `g_αβα = 1` and the formulas in [`Cocycle2::value`].

mod abelian;
mod band;
mod cohomology;
mod construction;
mod extension;

pub use abelian::{
    abelian_reduce, band_obstruction, cech_coboundary, obstruction_cochain, twisted_coboundary,
    Cochain, Obstruction,
};
pub use band::{check_cocycle2, check_ordered, Band, Cocycle2, OrderedCocycle2, Section};
pub use cohomology::{
    central_twist, classify_cocycles2, cocycles2_branches, cocycles2_equivalent,
    cocycles2_in_branch, enumerate_cocycles2, find_class, h2, twist, Class2, H2,
};
pub use construction::{
    associativity_agrees, cocycle_to_groupoid, composition_check, groupoid_to_cocycle,
    recoordinate_cocycle, BandedGerbePresentation, GerbeGroupoid, Recoordinated, Recoordination,
};
pub use extension::{
    choose_extension_data, extension_to_cocycle, ExtensionChoices, GroupoidExtension,
};
