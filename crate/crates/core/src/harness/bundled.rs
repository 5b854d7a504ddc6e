//! Example scenarios for the four test objects, compiled into the crate.

use super::Scenario;

pub const CUBE_REPOSITION: &str = include_str!("../../scenarios/cube_reposition.toml");
pub const CUBE_LIGHT_GRIP: &str = include_str!("../../scenarios/cube_light_grip.toml");
pub const VASE_REPOSITION: &str = include_str!("../../scenarios/vase_reposition.toml");
pub const CYLINDER_REORIENT: &str = include_str!("../../scenarios/cylinder_reorient.toml");
pub const SPHERE_REORIENT: &str = include_str!("../../scenarios/sphere_reorient.toml");

/// `(name, toml)` for every bundled file.
pub const ALL: [(&str, &str); 5] = [
    ("cube_reposition", CUBE_REPOSITION),
    ("cube_light_grip", CUBE_LIGHT_GRIP),
    ("vase_reposition", VASE_REPOSITION),
    ("cylinder_reorient", CYLINDER_REORIENT),
    ("sphere_reorient", SPHERE_REORIENT),
];

fn parse(text: &str) -> Scenario {
    Scenario::from_toml(text).expect("bundled scenario is valid")
}

pub fn cube_reposition() -> Scenario {
    parse(CUBE_REPOSITION)
}
pub fn cube_light_grip() -> Scenario {
    parse(CUBE_LIGHT_GRIP)
}
pub fn vase_reposition() -> Scenario {
    parse(VASE_REPOSITION)
}
pub fn cylinder_reorient() -> Scenario {
    parse(CYLINDER_REORIENT)
}
pub fn sphere_reorient() -> Scenario {
    parse(SPHERE_REORIENT)
}

pub fn all() -> Vec<(&'static str, Scenario)> {
    ALL.iter().map(|(name, text)| (*name, parse(text))).collect()
}
