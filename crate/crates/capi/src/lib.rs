//! C ABI for the toolkit: opaque handles, error codes, and string-based
//! exchange built on the same text formats as the CLI.

pub mod ffi;
