//! Acceptance checks for `eqmps` live in `tests/acceptance.rs`.
