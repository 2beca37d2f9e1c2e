//! Library half of the `argen` binary: manifest schema, result records,
//! the claim registry, and the subcommand implementations. Kept as a lib
//! so integration tests can run claims in-process.

pub mod claims;
pub mod manifest;
pub mod ops;
pub mod records;
