//! The knowledge-base language: syntax tree, parser, canonical printer,
//! validation and merging.

pub mod ast;
pub mod parse;
pub mod print;
pub mod validate;

pub use ast::{
    Atom, Bindings, Head, Literal, Polarity, PreferenceAtom, Program, Query, Rule, SourceSpan,
    StatementKind, Term,
};
pub use parse::{parse_program, parse_query, ParseError};
pub use print::{print_program, print_rule};
pub use validate::{merge_programs, validate_program, Counts, Issue, Severity, ValidationReport};
