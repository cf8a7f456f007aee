//! Cyclotomic numbers and Jacobi sums of orders `l²` and `2l²` over finite fields.
//!
//! The crate is organised bottom-up:
//!
//! - [`field`]: prime and extension fields `F_q`, generator search, discrete-log tables
//! - [`order`]: order parameters `(l, e, q, k)` and the parity case
//! - [`partition`]: orbit partition of the index pairs `(a, b)` under the cyclotomic symmetries
//! - [`cyclo`]: cyclotomic-number matrices by enumeration, full and minimal
//! - [`cycint`]: exact arithmetic in `Z[ζ_e]` in the canonical power basis
//! - [`jacobi`]: Jacobi sums by character-sum oracle, full matrix and minimal classes
//! - [`bench`]: naive vs. minimal evaluation counts and timings
//! - [`cli`]: the `cyclosum` command-line front end

pub mod arith;
pub mod bench;
pub mod cli;
pub mod cycint;
pub mod cyclo;
pub mod field;
pub mod jacobi;
pub mod order;
pub mod partition;
pub mod verify;

pub use cycint::{CycInt, CycIntError, CycOrder};
pub use cyclo::{compute_all, compute_minimal, verify_identities, CycNumMatrix, MinimalCycNums};
pub use jacobi::{JacobiResult, Method};
pub use field::{build_index_table, find_generator, make_field, FieldElement, FieldSpec, IndexTable};
pub use order::{enumerate_valid_q, make_order_spec, OrderSpec, ParityCase, Variant};
pub use partition::{partition, ClassPartition, PairClass};
