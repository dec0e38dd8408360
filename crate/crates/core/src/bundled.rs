//! MATPOWER IEEE test cases shipped with the crate.

pub const CASE9: &str = include_str!("../data/case9.m");
pub const CASE14: &str = include_str!("../data/case14.m");
pub const CASE30: &str = include_str!("../data/case30.m");
pub const CASE57: &str = include_str!("../data/case57.m");
pub const CASE118: &str = include_str!("../data/case118.m");

/// Names in increasing size.
pub const NAMES: [&str; 5] = ["case9", "case14", "case30", "case57", "case118"];

pub fn text(name: &str) -> Option<&'static str> {
    match name {
        "case9" => Some(CASE9),
        "case14" => Some(CASE14),
        "case30" => Some(CASE30),
        "case57" => Some(CASE57),
        "case118" => Some(CASE118),
        _ => None,
    }
}

pub fn load(name: &str) -> Option<crate::Result<crate::caseio::PowerCase>> {
    text(name).map(|t| crate::caseio::parse_case_named(t, name))
}
