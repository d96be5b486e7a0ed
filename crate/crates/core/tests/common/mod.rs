use std::path::PathBuf;

use hyperfocus_core::onefact::OneFactorization;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture file present")
}

/// The first of the two K_12 factorizations that survive both filters;
/// it embeds in no PG(2,2^h).
pub fn fixture1() -> OneFactorization {
    OneFactorization::parse_text(&fixture_text("k12_fixture1.1f")).expect("valid fixture")
}

/// The second survivor: the unique embeddable K_12 factorization.
pub fn fixture2() -> OneFactorization {
    OneFactorization::parse_text(&fixture_text("k12_fixture2.1f")).expect("valid fixture")
}
