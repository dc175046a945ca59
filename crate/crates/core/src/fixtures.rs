//! Bundled demo fixtures: spec, workspace, scenario and adjacency texts.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub spec: &'static str,
    pub workspace: &'static str,
    pub scenario: &'static str,
    pub adjacency: &'static str,
}

macro_rules! fixture {
    ($name:literal) => {
        Fixture {
            name: $name,
            spec: include_str!(concat!("../fixtures/", $name, "/spec.txt")),
            workspace: include_str!(concat!("../fixtures/", $name, "/workspace.txt")),
            scenario: include_str!(concat!("../fixtures/", $name, "/scenario.txt")),
            adjacency: include_str!(concat!("../fixtures/", $name, "/adjacency.txt")),
        }
    };
}

pub const EXAMPLE1: Fixture = fixture!("example1");

pub const EXAMPLE1_BLOCKED: Fixture = fixture!("example1_blocked");
pub const EXAMPLE1_UNRECOVERABLE: Fixture = fixture!("example1_unrecoverable");
pub const EXAMPLE2: Fixture = fixture!("example2");
pub const VIOLATION1: Fixture = fixture!("violation1");
pub const VIOLATION2: Fixture = fixture!("violation2");
pub const VIOLATION3: Fixture = fixture!("violation3");

pub const ALL: &[Fixture] = &[
    EXAMPLE1,
    EXAMPLE1_BLOCKED,
    EXAMPLE1_UNRECOVERABLE,
    EXAMPLE2,
    VIOLATION1,
    VIOLATION2,
    VIOLATION3,
];

pub fn by_name(name: &str) -> Option<Fixture> {
    ALL.iter().copied().find(|f| f.name == name)
}
