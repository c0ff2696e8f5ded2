//! Runs the guide in `book/src` as doctests, so `cargo test` catches samples
//! that drift from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/profiles.md")]
mod profiles {}
#[doc = include_str!("../../../book/src/voting.md")]
mod voting {}
#[doc = include_str!("../../../book/src/maximal_lotteries.md")]
mod maximal_lotteries {}
#[doc = include_str!("../../../book/src/bradley_terry.md")]
mod bradley_terry {}
#[doc = include_str!("../../../book/src/self_play.md")]
mod self_play {}
#[doc = include_str!("../../../book/src/experiments.md")]
mod experiments {}
#[doc = include_str!("../../../book/src/report_schema.md")]
mod report_schema {}
