//! Compiled companion to the book: each chapter is included as a module's
//! documentation so `cargo test` runs every code block in the guide.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/channels.md")]
pub mod channels {}

#[doc = include_str!("../../../book/src/blackwell.md")]
pub mod blackwell {}

#[doc = include_str!("../../../book/src/bridge.md")]
pub mod bridge {}

#[doc = include_str!("../../../book/src/sandwich.md")]
pub mod sandwich {}

#[doc = include_str!("../../../book/src/divergences.md")]
pub mod divergences {}

#[doc = include_str!("../../../book/src/certification.md")]
pub mod certification {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
