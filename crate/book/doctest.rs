// mdbook can't resolve crate dependencies when it tests a chapter, so the
// chapters are compiled here as rustdoc and checked by `cargo test --doc`.
// One module per chapter keeps a failure traceable to its file.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/geometry.md")]
pub mod geometry {}
#[doc = include_str!("src/quadrics.md")]
pub mod quadrics {}
#[doc = include_str!("src/spread.md")]
pub mod spread {}
#[doc = include_str!("src/graphs.md")]
pub mod graphs {}
#[doc = include_str!("src/search.md")]
pub mod search {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
