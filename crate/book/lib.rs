//! The chapters of the guide, included here so that `cargo test` runs
//! every snippet in them.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("src/formulas.md")]
pub mod formulas {}

#[doc = include_str!("src/closedify.md")]
pub mod closedify {}

#[doc = include_str!("src/cylinder.md")]
pub mod cylinder {}

#[doc = include_str!("src/rasterization.md")]
pub mod rasterization {}

#[doc = include_str!("src/homology.md")]
pub mod homology {}

#[doc = include_str!("src/zigzag.md")]
pub mod zigzag {}

#[doc = include_str!("src/cli.md")]
pub mod cli {}
