//! File formats, scenarios and the command-line runner built on `nhqc-core`.

pub mod config;
pub mod recipe;
pub mod scenario;

pub use config::{load_lattice, parse_lattice, serialize_lattice, ConfigError};
pub use recipe::{dump_recipes, load_recipes, RecipeError};
pub use scenario::{KappaUnits, Mode, RunOptions, Scenario, ScenarioError, ScenarioOutput};
