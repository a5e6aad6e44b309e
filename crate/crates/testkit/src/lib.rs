//! Random models and brute-force oracles for testing `pathfx`.
//!
//! The oracles here share no code with the library's inference: they work on
//! explicit noise and mechanism tables and follow the definitions directly.

mod fuzz;
mod generate;
mod oracle;

pub use fuzz::{mutate, mutate_bytes};
pub use generate::{cpt_to_scm, random_path, random_scm, seeded, RandomModelConfig};
pub use oracle::{all_paths_oracle, two_world_oracle, witness_oracle, OracleTable};

/// Fixture sources bundled with the core crate, by short name.
pub mod fixtures {
    pub const F1: &str = include_str!("../../core/fixtures/f1.scm.txt");
    pub const F2: &str = include_str!("../../core/fixtures/f2.scm.txt");
    pub const F3: &str = include_str!("../../core/fixtures/f3.scm.txt");
    pub const F4: &str = include_str!("../../core/fixtures/f4.scm.txt");
    pub const F1_SCM: &str = include_str!("../../core/fixtures/f1_scm.scm.txt");
    pub const F1_DEGENERATE: &str = include_str!("../../core/fixtures/f1_degenerate.scm.txt");

    /// The four table fixtures with their names.
    pub const TABLES: [(&str, &str); 4] = [("F1", F1), ("F2", F2), ("F3", F3), ("F4", F4)];

    /// Every fixture source.
    pub const ALL: [(&str, &str); 6] = [
        ("F1", F1),
        ("F2", F2),
        ("F3", F3),
        ("F4", F4),
        ("F1-SCM", F1_SCM),
        ("F1-degenerate", F1_DEGENERATE),
    ];

    /// Path used for each table fixture in the test suites.
    pub fn default_path(name: &str) -> &'static str {
        match name {
            "F1" => "A->M->Y",
            "F2" => "T->Y",
            "F3" => "X->A->Y",
            "F4" => "A->M->Y",
            _ => panic!("no default path for {name}"),
        }
    }
}
