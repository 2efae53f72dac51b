//! Adeles and adelic cohomology of the projective line over F_p or Q.

pub mod adele;
pub mod local;
pub mod place;
pub mod rr;

pub use adele::{
    adelic_h0_h1, boundary_d1, is_zero_in_h1, serre_pairing_matrix, CurveAdele, CurveCohomology, H1Model, LocalTail,
};
pub use local::{curve_residue, digits_at, residue_of_form, residue_theorem_check, residues_of_form};
pub use place::{CurveDivisor, CurveField, CurvePlace};
pub use rr::rr_space;
