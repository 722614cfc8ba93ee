//! File formats, manifests, and the error/exit-code split behind the
//! `diffnet` binary.

pub mod error;
pub mod formats;
pub mod manifest;
