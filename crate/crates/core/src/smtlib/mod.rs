//! Reading and writing the SMT-LIB 2 subset used by the approximations.

mod parse;
mod print;
pub mod sexp;

pub use parse::{parse_constant, parse_script, parse_sort, Script};
pub use print::{print_model, print_script, print_term, quote_symbol};
