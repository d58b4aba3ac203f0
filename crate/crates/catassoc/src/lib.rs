//! Delimited-file IO, a rayon [`Executor`](catassoc_core::Executor) and the
//! `catassoc` command line, on top of [`catassoc_core`].

pub mod cli;
pub mod error;
pub mod format;
pub mod io;
pub mod parallel;

pub use catassoc_core;
pub use error::{Error, Result};
pub use io::{
    load_delimited, read_delimited, save_delimited, write_delimited, LoadOptions, Loaded,
};
pub use parallel::RayonExecutor;
