//! Cells, grid dimensions, and materialized function matrices.

use core::fmt;

use alloc::vec::Vec;

use crate::label::OutcomeLabel;
use crate::problems::{ProblemError, ProblemSpec};
use crate::DEFAULT_K_CAP;

/// A single entry position of a function matrix: `x1` indexes the row
/// (party one's value), `x2` the column (party two's value).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub x1: u32,
    pub x2: u32,
}

impl Cell {
    pub fn new(x1: u32, x2: u32) -> Cell {
        Cell { x1, x2 }
    }

    /// Coordinate owned by the given party.
    pub fn coord(&self, party: crate::label::Party) -> u32 {
        match party {
            crate::label::Party::One => self.x1,
            crate::label::Party::Two => self.x2,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}

/// Grid dimensions. Problem tables are square with side `2^k`, but regions,
/// tilings, and distributions also work over arbitrary rectangular grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    pub rows: u32,
    pub cols: u32,
}

impl Dims {
    pub fn new(rows: u32, cols: u32) -> Dims {
        Dims { rows, cols }
    }

    /// Square grid with side `2^k`.
    pub fn square_pow2(k: u32) -> Dims {
        let side = 1u32 << k;
        Dims { rows: side, cols: side }
    }

    pub fn cell_count(&self) -> u64 {
        self.rows as u64 * self.cols as u64
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.x1 < self.rows && cell.x2 < self.cols
    }

    /// Row-major linear index.
    pub fn index(&self, cell: Cell) -> usize {
        debug_assert!(self.contains(cell));
        cell.x1 as usize * self.cols as usize + cell.x2 as usize
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let cols = self.cols;
        (0..self.rows).flat_map(move |x1| (0..cols).map(move |x2| Cell::new(x1, x2)))
    }
}

/// The full outcome matrix of a two-party problem, one label per cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTable {
    problem: ProblemSpec,
    dims: Dims,
    labels: Vec<OutcomeLabel>,
}

impl FunctionTable {
    /// Materializes the matrix for `problem`, rejecting `k` above
    /// [`DEFAULT_K_CAP`].
    pub fn build(problem: ProblemSpec) -> Result<FunctionTable, ProblemError> {
        FunctionTable::build_with_cap(problem, DEFAULT_K_CAP)
    }

    /// Same as [`FunctionTable::build`] with an explicit cap on `k`.
    pub fn build_with_cap(problem: ProblemSpec, k_cap: u32) -> Result<FunctionTable, ProblemError> {
        problem.validate(k_cap)?;
        let dims = Dims::square_pow2(problem.k());
        let mut labels = Vec::with_capacity(dims.cell_count() as usize);
        for cell in dims.cells() {
            labels.push(problem.output(cell.x1, cell.x2)?);
        }
        Ok(FunctionTable { problem, dims, labels })
    }

    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    pub fn k(&self) -> u32 {
        self.problem.k()
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn label(&self, cell: Cell) -> &OutcomeLabel {
        &self.labels[self.dims.index(cell)]
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.dims.cells()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::{OutcomeLabel, Party};

    #[test]
    fn millionaires_k1_layout() {
        let table = FunctionTable::build(ProblemSpec::millionaires(1)).unwrap();
        let one = OutcomeLabel::Winner(Party::One);
        let two = OutcomeLabel::Winner(Party::Two);
        // rows x1 = 0, 1 by cols x2 = 0, 1; ties go to party one
        assert_eq!(table.label(Cell::new(0, 0)), &one);
        assert_eq!(table.label(Cell::new(0, 1)), &two);
        assert_eq!(table.label(Cell::new(1, 0)), &one);
        assert_eq!(table.label(Cell::new(1, 1)), &one);
    }

    #[test]
    fn second_price_k1_layout() {
        let table = FunctionTable::build(ProblemSpec::second_price(1)).unwrap();
        let award = |winner, price| OutcomeLabel::Award { winner, price };
        assert_eq!(table.label(Cell::new(0, 0)), &award(Party::One, 0));
        assert_eq!(table.label(Cell::new(0, 1)), &award(Party::Two, 0));
        assert_eq!(table.label(Cell::new(1, 0)), &award(Party::One, 0));
        assert_eq!(table.label(Cell::new(1, 1)), &award(Party::One, 1));
    }

    #[test]
    fn k_cap_enforced() {
        assert!(FunctionTable::build_with_cap(ProblemSpec::millionaires(5), 4).is_err());
        assert!(FunctionTable::build_with_cap(ProblemSpec::millionaires(4), 4).is_ok());
    }
}
