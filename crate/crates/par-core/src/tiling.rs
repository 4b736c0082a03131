//! Regions, rectangles, partitions, tilings, and their refinement structure.
//!
//! A region is any cell set; a rectangle is a row set crossed with a column
//! set (not necessarily contiguous). The ideal monochromatic partition groups
//! all cells sharing an outcome; i-partitions slice blocks along one party's
//! fixed value. Rectangles store their row/column sets and expand to cells
//! lazily, so a tile covering a quarter of the matrix costs two index lists,
//! not a quarter of the matrix.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::label::{OutcomeLabel, Party};
use crate::table::{Cell, Dims, FunctionTable};

/// Errors raised by region/tiling constructors and queries.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TilingError {
    #[error("region must be nonempty")]
    EmptyRegion,
    #[error("rectangle must have nonempty rows and columns")]
    EmptyRect,
    #[error("cell {0} out of bounds")]
    OutOfBounds(Cell),
    #[error("blocks overlap at cell {0}")]
    Overlap(Cell),
    #[error("cell {0} not covered by any block")]
    Uncovered(Cell),
}

/// An arbitrary nonempty set of cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    cells: Vec<Cell>, // sorted, deduplicated
}

impl Region {
    pub fn new(mut cells: Vec<Cell>) -> Result<Region, TilingError> {
        cells.sort_unstable();
        cells.dedup();
        if cells.is_empty() {
            return Err(TilingError::EmptyRegion);
        }
        Ok(Region { cells })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> u64 {
        self.cells.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    /// True iff every cell carries the same label.
    pub fn is_monochromatic(&self, table: &FunctionTable) -> bool {
        is_monochromatic(self.cells.iter().copied(), table)
    }

    /// Slices the region along party `i`'s coordinate: one rectangle per
    /// distinct value of `x_i`, holding that value's co-values.
    pub fn i_partition(&self, party: Party) -> Vec<Rect> {
        i_partition_cells(self.cells.iter().copied(), party)
    }
}

/// A submatrix: every (row, col) combination of two nonempty index sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    rows: Vec<u32>, // sorted, deduplicated
    cols: Vec<u32>,
}

impl Rect {
    pub fn new(mut rows: Vec<u32>, mut cols: Vec<u32>) -> Result<Rect, TilingError> {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        if rows.is_empty() || cols.is_empty() {
            return Err(TilingError::EmptyRect);
        }
        Ok(Rect { rows, cols })
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn cols(&self) -> &[u32] {
        &self.cols
    }

    pub fn len(&self) -> u64 {
        self.rows.len() as u64 * self.cols.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.rows.binary_search(&cell.x1).is_ok() && self.cols.binary_search(&cell.x2).is_ok()
    }

    /// Any one cell; handy as a representative for per-tile lookups.
    pub fn first_cell(&self) -> Cell {
        Cell::new(self.rows[0], self.cols[0])
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.rows
            .iter()
            .flat_map(move |&x1| self.cols.iter().map(move |&x2| Cell::new(x1, x2)))
    }

    pub fn to_region(&self) -> Region {
        Region::new(self.cells().collect()).expect("rect is nonempty")
    }

    pub fn is_monochromatic(&self, table: &FunctionTable) -> bool {
        is_monochromatic(self.cells(), table)
    }

    /// Slicing a rectangle along `x_i` just peels off its rows (columns).
    pub fn i_partition(&self, party: Party) -> Vec<Rect> {
        match party {
            Party::One => self
                .rows
                .iter()
                .map(|&r| Rect { rows: alloc::vec![r], cols: self.cols.clone() })
                .collect(),
            Party::Two => self
                .cols
                .iter()
                .map(|&c| Rect { rows: self.rows.clone(), cols: alloc::vec![c] })
                .collect(),
        }
    }
}

fn is_monochromatic(
    cells: impl IntoIterator<Item = Cell>,
    table: &FunctionTable,
) -> bool {
    let mut iter = cells.into_iter();
    let first = match iter.next() {
        Some(c) => table.label(c),
        None => return true,
    };
    iter.all(|c| table.label(c) == first)
}

fn i_partition_cells(cells: impl IntoIterator<Item = Cell>, party: Party) -> Vec<Rect> {
    let mut slices: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for cell in cells {
        let (key, co) = match party {
            Party::One => (cell.x1, cell.x2),
            Party::Two => (cell.x2, cell.x1),
        };
        slices.entry(key).or_default().push(co);
    }
    slices
        .into_iter()
        .map(|(key, co)| match party {
            Party::One => Rect::new(alloc::vec![key], co),
            Party::Two => Rect::new(co, alloc::vec![key]),
        })
        .map(|r| r.expect("slices are nonempty"))
        .collect()
}

/// Disjoint regions covering a whole grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    dims: Dims,
    regions: Vec<Region>,
}

impl Partition {
    pub fn new(regions: Vec<Region>, dims: Dims) -> Result<Partition, TilingError> {
        check_cover(regions.iter().map(|r| r.cells().iter().copied()), dims)?;
        Ok(Partition { dims, regions })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// Cell-to-block index for repeated lookups.
    pub fn index(&self) -> BlockIndex {
        BlockIndex::from_blocks(self.dims, self.regions.iter().map(|r| r.cells().iter().copied()))
    }

    /// True iff every block of `self` lies inside a single block of `coarse`.
    pub fn refines(&self, coarse: &Partition) -> bool {
        refines_blocks(self.regions.iter().map(|r| r.cells().iter().copied()), coarse)
    }
}

/// Disjoint rectangles covering a whole grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tiling {
    dims: Dims,
    tiles: Vec<Rect>,
}

impl Tiling {
    pub fn new(tiles: Vec<Rect>, dims: Dims) -> Result<Tiling, TilingError> {
        check_cover(tiles.iter().map(|t| t.cells()), dims)?;
        Ok(Tiling { dims, tiles })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn tiles(&self) -> &[Rect] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn index(&self) -> BlockIndex {
        BlockIndex::from_blocks(self.dims, self.tiles.iter().map(|t| t.cells()))
    }

    pub fn refines(&self, coarse: &Partition) -> bool {
        refines_blocks(self.tiles.iter().map(|t| t.cells()), coarse)
    }

    /// Refinement obtained by i-partitioning every tile.
    pub fn i_induced(&self, party: Party) -> Tiling {
        let tiles = self.tiles.iter().flat_map(|t| t.i_partition(party)).collect();
        Tiling { dims: self.dims, tiles }
    }

    /// Forgets the rectangle structure.
    pub fn to_partition(&self) -> Partition {
        Partition {
            dims: self.dims,
            regions: self.tiles.iter().map(|t| t.to_region()).collect(),
        }
    }

    /// Two tilings are the same cover iff they induce the same cell sets,
    /// regardless of tile order.
    pub fn same_cover(&self, other: &Tiling) -> bool {
        if self.dims != other.dims || self.tiles.len() != other.tiles.len() {
            return false;
        }
        let mut a: Vec<&Rect> = self.tiles.iter().collect();
        let mut b: Vec<&Rect> = other.tiles.iter().collect();
        let key = |r: &&Rect| (r.rows.clone(), r.cols.clone());
        a.sort_by_key(key);
        b.sort_by_key(key);
        a == b
    }
}

/// Dense cell-to-block lookup with per-block sizes.
#[derive(Clone, Debug)]
pub struct BlockIndex {
    dims: Dims,
    block_of: Vec<u32>,
    sizes: Vec<u64>,
}

impl BlockIndex {
    fn from_blocks<I, C>(dims: Dims, blocks: I) -> BlockIndex
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = Cell>,
    {
        let mut block_of = alloc::vec![u32::MAX; dims.cell_count() as usize];
        let mut sizes = Vec::new();
        for (id, block) in blocks.into_iter().enumerate() {
            let mut n = 0u64;
            for cell in block {
                block_of[dims.index(cell)] = id as u32;
                n += 1;
            }
            sizes.push(n);
        }
        BlockIndex { dims, block_of, sizes }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn block_of(&self, cell: Cell) -> u32 {
        self.block_of[self.dims.index(cell)]
    }

    /// Number of cells in the block containing `cell`.
    pub fn block_size(&self, cell: Cell) -> u64 {
        self.sizes[self.block_of(cell) as usize]
    }

    /// Number of cells in block `id`.
    pub fn size_of_block(&self, id: u32) -> u64 {
        self.sizes[id as usize]
    }

    pub fn block_count(&self) -> usize {
        self.sizes.len()
    }
}

/// Checks that `candidate` regions are pairwise disjoint and cover `dims`.
pub fn is_partition(candidate: &[Region], dims: Dims) -> bool {
    check_cover(candidate.iter().map(|r| r.cells().iter().copied()), dims).is_ok()
}

/// Checks that `candidate` rectangles are pairwise disjoint and cover `dims`.
pub fn is_tiling(candidate: &[Rect], dims: Dims) -> bool {
    check_cover(candidate.iter().map(|t| t.cells()), dims).is_ok()
}

fn check_cover<I, C>(blocks: I, dims: Dims) -> Result<(), TilingError>
where
    I: IntoIterator<Item = C>,
    C: IntoIterator<Item = Cell>,
{
    let total = dims.cell_count() as usize;
    let mut seen = alloc::vec![false; total];
    let mut covered = 0usize;
    for block in blocks {
        for cell in block {
            if !dims.contains(cell) {
                return Err(TilingError::OutOfBounds(cell));
            }
            let idx = dims.index(cell);
            if seen[idx] {
                return Err(TilingError::Overlap(cell));
            }
            seen[idx] = true;
            covered += 1;
        }
    }
    if covered != total {
        let hole = seen.iter().position(|&s| !s).expect("covered < total");
        let cell = Cell::new(hole as u32 / dims.cols, hole as u32 % dims.cols);
        return Err(TilingError::Uncovered(cell));
    }
    Ok(())
}

fn refines_blocks<I, C>(fine: I, coarse: &Partition) -> bool
where
    I: IntoIterator<Item = C>,
    C: IntoIterator<Item = Cell>,
{
    let index = coarse.index();
    for block in fine {
        let mut id = None;
        for cell in block {
            if !coarse.dims.contains(cell) {
                return false;
            }
            let here = index.block_of(cell);
            match id {
                None => id = Some(here),
                Some(prev) if prev != here => return false,
                _ => {}
            }
        }
    }
    true
}

/// Groups cells by label: one region per distinct outcome. Each region is
/// the unique maximal monochromatic region for its value, so the result is
/// the ideal monochromatic partition.
pub fn ideal_partition(table: &FunctionTable) -> Partition {
    let mut by_label: BTreeMap<&OutcomeLabel, Vec<Cell>> = BTreeMap::new();
    for cell in table.cells() {
        by_label.entry(table.label(cell)).or_default().push(cell);
    }
    let regions = by_label
        .into_values()
        .map(|cells| Region::new(cells).expect("label groups are nonempty"))
        .collect();
    Partition { dims: table.dims(), regions }
}

/// The ideal partition with every region i-partitioned; always a tiling.
pub fn i_ideal_partition(table: &FunctionTable, party: Party) -> Tiling {
    let ideal = ideal_partition(table);
    let tiles = ideal
        .regions
        .iter()
        .flat_map(|r| r.i_partition(party))
        .collect();
    Tiling { dims: table.dims(), tiles }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemSpec;

    fn mp1() -> FunctionTable {
        FunctionTable::build(ProblemSpec::millionaires(1)).unwrap()
    }

    #[test]
    fn ideal_partition_of_millionaires_k1() {
        let ideal = ideal_partition(&mp1());
        let mut sizes: Vec<u64> = ideal.regions().iter().map(|r| r.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, alloc::vec![1, 3]);
    }

    #[test]
    fn two_partition_of_winner_one_region() {
        let ideal = ideal_partition(&mp1());
        let ones = ideal
            .regions()
            .iter()
            .find(|r| r.len() == 3)
            .expect("winner-one region");
        let mut sizes: Vec<u64> = ones.i_partition(Party::Two).iter().map(Rect::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, alloc::vec![1, 2]);
    }

    #[test]
    fn single_row_region_is_its_own_one_partition() {
        let region = Region::new(alloc::vec![
            Cell::new(2, 0),
            Cell::new(2, 3),
            Cell::new(2, 5),
        ])
        .unwrap();
        let parts = region.i_partition(Party::One);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].to_region(), region);
    }

    #[test]
    fn i_ideal_refines_ideal() {
        let table = mp1();
        let ideal = ideal_partition(&table);
        let two_ideal = i_ideal_partition(&table, Party::Two);
        let mut sizes: Vec<u64> = two_ideal.tiles().iter().map(Rect::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, alloc::vec![1, 1, 2]);
        assert!(two_ideal.refines(&ideal));
        // the coarse direction fails here
        assert!(!ideal.refines(&two_ideal.to_partition()));
    }

    #[test]
    fn cover_checks() {
        let dims = Dims::new(2, 2);
        let full = Rect::new(alloc::vec![0, 1], alloc::vec![0, 1]).unwrap();
        assert!(is_tiling(&[full.clone()], dims));

        let a = Rect::new(alloc::vec![0], alloc::vec![0, 1]).unwrap();
        let b = Rect::new(alloc::vec![1], alloc::vec![0]).unwrap();
        // missing (1,1)
        assert!(!is_tiling(&[a.clone(), b.clone()], dims));
        // overlapping pair
        assert!(!is_tiling(&[full, a], dims));
    }

    #[test]
    fn monochromatic_checks() {
        let table = mp1();
        let singleton = Region::new(alloc::vec![Cell::new(0, 1)]).unwrap();
        assert!(singleton.is_monochromatic(&table));
        let all = Rect::new(alloc::vec![0, 1], alloc::vec![0, 1]).unwrap();
        assert!(!all.is_monochromatic(&table));
    }

    #[test]
    fn singleton_tiling_refines_everything() {
        let table = mp1();
        let ideal = ideal_partition(&table);
        let singletons: Vec<Rect> = table
            .cells()
            .map(|c| Rect::new(alloc::vec![c.x1], alloc::vec![c.x2]).unwrap())
            .collect();
        let tiling = Tiling::new(singletons, table.dims()).unwrap();
        assert!(tiling.refines(&ideal));
    }
}
