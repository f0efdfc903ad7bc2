//! Random inputs and brute-force reference implementations shared by the
//! property and acceptance suites. Nothing here calls the code it checks.

pub mod gen;
pub mod oracle;
