//! Explicit formula and string families.

pub mod order;
pub mod strings;
pub mod tower;

pub use order::{
    chi, chi_at_least, eliminate_sugar, gen_chi, gen_phi_m, translate_fo3_to_fo2,
    translate_fo_to_fo2, ChiMode,
};
pub use strings::{
    gen_equal, gen_inc, gen_max, gen_ok, gen_phi, gen_psi, gen_vh_plus, gen_xi, NUMBERING_SET,
};
pub use tower::{
    bin, bit, bit_length, block_values, build_vh_wh, canonical_letter_witness,
    canonical_numbering, decode_mu, ell, mu, mu_len, mu_letters, tower, v_h, v_len, w_h,
    TowerStrings,
};
