//! One- and two-body matrix elements over Fock-Darwin orbitals.
//!
//! Two-body index convention:
//! (ij|kl) = ∫∫ φᵢ*(r₁) φⱼ*(r₂) e²/(ε r₁₂) φₖ(r₁) φₗ(r₂).

mod coulomb;
mod counting;
mod one_body;
mod oracle;

pub use coulomb::{canonical_quadruple, coulomb_element, coulomb_tensor, CoulombOptions, CoulombTensor, DenseCoulomb, ScaledTwoBody, TwoBody};
pub use counting::enumerate_unique_elements;
pub use one_body::{one_body_element, one_body_matrix, GridPotential, OneBodyMatrix, PairIntegrable};
pub use oracle::{coulomb_oracle_mc, McEstimate};
