//! Exact semi-algebraic sets, mapping cylinders, and persistent homology of
//! zigzag diagrams.

pub mod closedify;
pub mod compiled;
pub mod cubical;
pub mod cylinder;
pub mod error;
pub mod fixtures;
pub mod formula;
pub mod homology;
pub mod interval;
pub mod io;
pub mod linalg;
pub mod parse;
pub mod pipeline;
pub mod poly;
pub mod raster;
pub mod simpreplace;
pub mod vars;
pub mod zigzag;

pub use error::{Error, Result};
pub use formula::{Atom, Formula, Relation};
pub use interval::{eval_interval, Interval, IntervalBox, Truth};
pub use parse::{parse_formula, FormulaFile};
pub use poly::{Polynomial, Rational};
pub use vars::VarList;
