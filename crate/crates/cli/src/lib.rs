//! Library surface of the command-line tool: the file formats live here so
//! integration tests can drive them directly.

pub mod io;
