//! Host crate of the acceptance suite in `tests/acceptance.rs`.
//!
//! The suite lives in its own package so that it runs after the unit and
//! property tests of the other crates in a workspace test run.
