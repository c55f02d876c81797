//! Bundled companion knot presentations in the CFK file format.

pub const UNKNOT: &str = include_str!("../data/unknot.cfk");
pub const T23: &str = include_str!("../data/t23.cfk");
pub const T2_3: &str = include_str!("../data/t2-3.cfk");
pub const T34: &str = include_str!("../data/t34.cfk");
pub const FIGURE8: &str = include_str!("../data/figure8.cfk");

pub const ALL: &[(&str, &str)] = &[
    ("unknot", UNKNOT),
    ("t23", T23),
    ("t2-3", T2_3),
    ("t34", T34),
    ("figure8", FIGURE8),
];

/// Look up a bundled companion by name.
pub fn builtin(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
