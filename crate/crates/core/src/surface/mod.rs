//! The arithmetic surface P^1 over Z: curves, flags, local expansions at flags,
//! residue theorems, adeles with their pairing, and the quotient spaces whose
//! duality the pairing realizes.

mod adele;
mod cohomology;
mod expand;
mod geometry;
mod pairing;
mod residue;
pub(crate) mod zq;

pub use adele::{
    complex_d_surface, global_pairing, nondegeneracy_probe, subspace_membership, ComplexLevel, Membership, ProbeWitness,
    SubspaceTag, SurfaceAdele,
};
pub use cohomology::{h0_ar_surface, prop17_pieces, Prop17Pieces, SurfaceH0};
pub use geometry::{FiberPoint, QPoint, SurfaceCurve, SurfaceDivisor, SurfaceFlag};
pub use expand::{
    expand_at_arch, expand_at_flag, expand_form_at_arch, expand_form_at_flag, mz_lift, render_q, res_surface_arch,
    res_surface_flag, QFunction, RationalForm,
};
pub use pairing::{
    orth_identities, orth_identities_f2_exhaustive, quotient_pairing_space, random_subspace, OrthReport, PairingSpace,
};
pub use residue::{morrow_horizontal_check, morrow_point_check, morrow_vertical_check, ResidueSum};
