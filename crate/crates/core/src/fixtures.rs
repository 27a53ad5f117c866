//! Shipped example files: generating categories, matrix models and nets.

use crate::atoms::{load_category, Category};

pub const C2_CAT: &str = include_str!("../fixtures/c2.cat");
pub const C2_MOD: &str = include_str!("../fixtures/c2.mod");
pub const PAULI8_CAT: &str = include_str!("../fixtures/pauli8.cat");
pub const PAULI8_MOD: &str = include_str!("../fixtures/pauli8.mod");
pub const SPLIT_CAT: &str = include_str!("../fixtures/split.cat");
pub const SPLIT_MOD: &str = include_str!("../fixtures/split.mod");
pub const SPLIT_REL_MOD: &str = include_str!("../fixtures/split_rel.mod");

pub const BELL_ID_NET: &str = include_str!("../fixtures/bell_id.net");
pub const BELL_X_NET: &str = include_str!("../fixtures/bell_x.net");
pub const BELL_ID_REDUCT_NET: &str = include_str!("../fixtures/bell_id_reduct.net");
pub const SWAP_X_NET: &str = include_str!("../fixtures/swap_x.net");
pub const SWAP_NET: &str = include_str!("../fixtures/swap.net");
pub const FIG1_NET: &str = include_str!("../fixtures/fig1.net");
pub const FIG2_NET: &str = include_str!("../fixtures/fig2.net");
pub const ETA_AXIOM_NET: &str = include_str!("../fixtures/eta_axiom.net");
pub const ETA_TIMES_NET: &str = include_str!("../fixtures/eta_times.net");
pub const PLUS_MISMATCH_NET: &str = include_str!("../fixtures/plus_mismatch.net");
pub const PLUS_MATCH_NET: &str = include_str!("../fixtures/plus_match.net");
pub const BELL_ID_ARROW: &str = include_str!("../fixtures/bell_id.arrow");

/// Every shipped file as `(file name, contents)`.
pub const FILES: &[(&str, &str)] = &[
    ("c2.cat", C2_CAT),
    ("c2.mod", C2_MOD),
    ("pauli8.cat", PAULI8_CAT),
    ("pauli8.mod", PAULI8_MOD),
    ("split.cat", SPLIT_CAT),
    ("split.mod", SPLIT_MOD),
    ("split_rel.mod", SPLIT_REL_MOD),
    ("bell_id.net", BELL_ID_NET),
    ("bell_x.net", BELL_X_NET),
    ("bell_id_reduct.net", BELL_ID_REDUCT_NET),
    ("swap_x.net", SWAP_X_NET),
    ("swap.net", SWAP_NET),
    ("fig1.net", FIG1_NET),
    ("fig2.net", FIG2_NET),
    ("eta_axiom.net", ETA_AXIOM_NET),
    ("eta_times.net", ETA_TIMES_NET),
    ("plus_mismatch.net", PLUS_MISMATCH_NET),
    ("plus_match.net", PLUS_MATCH_NET),
    ("bell_id.arrow", BELL_ID_ARROW),
];

pub fn c2() -> Category {
    load_category(C2_CAT).expect("shipped fixture")
}

pub fn pauli8() -> Category {
    load_category(PAULI8_CAT).expect("shipped fixture")
}

pub fn split() -> Category {
    load_category(SPLIT_CAT).expect("shipped fixture")
}
