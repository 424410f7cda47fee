//! Word equations on matrix groups over finite fields.
//!
//! `verba` evaluates word maps on SL(2,q), PSL(2,q), SL(3,3) and a
//! parametrized Suzuki family, compiles two-letter words to Fricke trace
//! polynomials, searches verbal dynamical systems for nontrivial preperiodic
//! points, and measures images, fibres and equidistribution of word maps —
//! all with exact arithmetic and deterministic, reproducible scans.
//!
//! The crate is organized around the experiment pipeline:
//!
//! * [`ff`] — exact arithmetic and enumeration for `F_p` and `F_{p^n}`,
//!   with a canonical irreducible modulus so every run agrees bit-for-bit;
//! * [`grp`] — matrix groups as finite point sets: element arithmetic,
//!   deterministic enumeration, conjugacy classes;
//! * [`word`] — free-group words: parsing, reduction, substitution,
//!   evaluation, and the named recursive sequences (Engel, u, s, r);
//! * [`trace`] — the symbolic trace-polynomial compiler for two-letter
//!   words, Dickson polynomials, permutation-polynomial tests, and the
//!   numeric seven-coordinate trace relation for triples;
//! * [`dynsys`] — verbal dynamical systems: orbits, goodness searches at
//!   group and trace level, mapping-torus certificates, and the Suzuki
//!   equation search;
//! * [`census`] — images, fibres, equidistribution statistics, class-pair
//!   products, curve criteria, and exact bound calculators;
//! * [`cli`] — batch front end: run configurations, JSON/CSV reports,
//!   and the flat-file fibre-table cache.
//!
//! Every search takes an explicit seed and worker count; worker count
//! affects wall time only, never the result.

pub mod census;
pub mod cli;
pub mod dynsys;
pub mod ff;
pub mod grp;
pub mod par;
pub mod trace;
pub mod word;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field size {q} exceeds cap {cap}")]
    FieldCapExceeded { q: u128, cap: u64 },
    #[error("division by zero in field arithmetic")]
    DivisionByZero,
    #[error("mixed field or group specs in one operation")]
    MixedSpecs,
    #[error("group enumeration of order {order} exceeds cap {cap}")]
    GroupCapExceeded { order: u128, cap: u64 },
    #[error("unsupported group operation: {0}")]
    UnsupportedGroup(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("arity mismatch: word uses {expected} generators, got {got} arguments")]
    ArityMismatch { expected: usize, got: usize },
    #[error("word is not of alternating type")]
    NotAlternating,
    #[error("invalid recursive law: {0}")]
    InvalidLaw(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("character degree data rejected: {0}")]
    DegreeData(String),
    #[error("field size mismatch: expected q={expected}, got q={got}")]
    QMismatch { expected: u64, got: u64 },
    #[error("malformed cache file: {0}")]
    MalformedCache(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
