//! Doc-tests for the guide chapters. Each chapter is its own module so a
//! failure names the file it came from.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/scene.md")]
mod scene {}
#[doc = include_str!("../../../book/src/fisher.md")]
mod fisher {}
#[doc = include_str!("../../../book/src/ascent.md")]
mod ascent {}
#[doc = include_str!("../../../book/src/estimation.md")]
mod estimation {}
#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
