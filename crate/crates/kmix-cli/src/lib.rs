//! Harness around the core indexes: brute-force oracles, parameter
//! auto-tuning, and the `.kmix` container format used by the CLI.

pub mod container;
pub mod index;
pub mod oracle;
pub mod params;
