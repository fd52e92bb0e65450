//! Corepresentation theory of finite magnetic groups and the machinery to
//! evaluate magnetic equivariant K-theory over finite G-CW complexes.
//!
//! A magnetic group is a finite group together with a surjective grading
//! homomorphism onto Z/2; elements of grading 1 act antiunitarily. The crate
//! classifies irreducible corepresentations into real, complex and
//! quaternionic types, assembles the coefficient groups of the associated
//! equivariant K-theory from the classical KO/KU/KSp point tables, and runs
//! the Atiyah-Hirzebruch spectral sequence with exact integer arithmetic.

pub mod abelian;
pub mod ahss;
pub mod catalog;
pub mod chartab;
pub mod coeff;
pub mod complex;
pub mod corep;
pub mod cyclotomic;
pub mod group;
pub mod report;

pub use abelian::{smith_normal_form, AbMorphism, FgAbelianGroup, Mat, Presentation};
pub use ahss::{graded_k_report, run_ahss, AhssRun, DifferentialOverride, ExtensionAssertion, SpectralPage};
pub use chartab::{character_table, Character, CharacterTable};
pub use coeff::{orbit_cell, periodicity, point_coefficients, restriction_matrix, CoefficientRow, OrbitCell};
pub use complex::{validate_complex, CheckedComplex, GcwComplex};
pub use corep::{
    classify_magnetic_irreps, conjugate_character, decompose, find_intertwiner, frobenius_check,
    induce_character, induce_matrices, schur_frobenius, twisted_irreps, MagneticIrrep,
    MagneticRepRing, SchurType,
};
pub use cyclotomic::Cyclotomic;
pub use group::{
    build_group, extension_splits, pullback_extension, CentralExtension, Group, KernelCharacter,
    MagneticGroup, Subgroup, Twist,
};

/// Default bound on supported group orders; all algorithms are exhaustive.
pub const DEFAULT_MAX_ORDER: usize = 64;
