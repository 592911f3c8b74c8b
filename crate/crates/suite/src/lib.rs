//! Acceptance suite for the K-KP lab. The criteria live in
//! `tests/acceptance.rs`; run them with `cargo test --test acceptance`.
