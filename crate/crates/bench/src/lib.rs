//! Shared fixtures for the criterion benches.

use born_lab_core::weight::big_ratio;
use born_lab_core::{Symbol, SystemSpec};

pub fn thirds_spec() -> SystemSpec {
    SystemSpec::from_rationals(vec![
        (Symbol::new("↑"), big_ratio(1, 3)),
        (Symbol::new("↓"), big_ratio(2, 3)),
    ])
    .unwrap()
}

pub fn halves_spec() -> SystemSpec {
    SystemSpec::from_rationals(vec![
        (Symbol::new("↑"), big_ratio(1, 2)),
        (Symbol::new("↓"), big_ratio(1, 2)),
    ])
    .unwrap()
}
