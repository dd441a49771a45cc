//! Acceptance checks for the `mazer` crate and binary live in `tests/`.
