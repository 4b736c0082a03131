//! Worst-case and average-case privacy-approximation ratios.
//!
//! For a protocol-induced tiling and the ideal monochromatic partition of
//! the same table, the ratio at an input is the size of its ideal region
//! over the size of its protocol tile: how many times fewer inputs it hides
//! among. Worst case maximizes the ratio over inputs, average case takes
//! the expectation under a distribution. The with-respect-to-i variants
//! first slice both sides along party i's fixed coordinate, capturing what
//! the *other* participant (who knows its own value) can distinguish.
//!
//! Ratios are constant on each tile (or slice), so uniform-distribution
//! averages reduce to integer sums over tiles; those paths stay in machine
//! integers and only the final division produces a rational.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::dist::Distribution;
use crate::label::Party;
use crate::measure::{Measure, MeasureError};
use crate::table::{Cell, Dims, FunctionTable};
use crate::tiling::{ideal_partition, BlockIndex, Partition, Rect, Tiling};

/// Errors from ratio computations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParError {
    #[error("tiling does not refine the ideal partition (tile containing {0} crosses regions)")]
    NonRefining(Cell),
    #[error("dimension mismatch between tiling, table, and distribution")]
    DimsMismatch,
    #[error("measure ratio at {0} has zero denominator with nonzero numerator")]
    UndefinedRatio(Cell),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Which privacy notion a check refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrivacyMode {
    Objective,
    WithRespectTo(Party),
    Subjective,
}

/// Worst-case versus average-case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParMode {
    Worst,
    Average,
}

/// All eight cardinality ratios of a tiling plus tile statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParReport {
    pub worst_objective: BigRational,
    pub worst_wrt1: BigRational,
    pub worst_wrt2: BigRational,
    pub worst_subjective: BigRational,
    pub avg_objective: BigRational,
    pub avg_wrt1: BigRational,
    pub avg_wrt2: BigRational,
    pub avg_subjective: BigRational,
    pub tile_count: u64,
    /// A cell attaining the worst objective ratio.
    pub worst_witness: Cell,
}

fn ratio_u64(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ratio_u128(n: u128, d: u128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Greater-than on nonnegative fractions without building rationals.
fn frac_gt(an: u64, ad: u64, bn: u64, bd: u64) -> bool {
    (an as u128) * (bd as u128) > (bn as u128) * (ad as u128)
}

/// Checks that every tile sits inside one ideal region and returns the
/// region id per tile.
fn region_per_tile(tiling: &Tiling, index: &BlockIndex) -> Result<Vec<u32>, ParError> {
    let mut ids = Vec::with_capacity(tiling.len());
    for tile in tiling.tiles() {
        let id = index.block_of(tile.first_cell());
        for cell in tile.cells() {
            if index.block_of(cell) != id {
                return Err(ParError::NonRefining(cell));
            }
        }
        ids.push(id);
    }
    Ok(ids)
}

fn worst_objective_inner(
    tiling: &Tiling,
    index: &BlockIndex,
    ids: &[u32],
) -> (BigRational, Cell) {
    let mut best: (u64, u64, Cell) = (0, 1, Cell::new(0, 0));
    for (tile, &id) in tiling.tiles().iter().zip(ids) {
        let n = index.size_of_block(id);
        let d = tile.len();
        if frac_gt(n, d, best.0, best.1) {
            best = (n, d, tile.first_cell());
        }
    }
    (ratio_u64(best.0, best.1), best.2)
}

fn avg_objective_inner(
    tiling: &Tiling,
    index: &BlockIndex,
    ids: &[u32],
    dist: &Distribution,
) -> BigRational {
    if dist.is_uniform() {
        // per-tile contribution |tile| * (|region| / |tile|) = |region|
        let total: u128 = ids.iter().map(|&id| index.size_of_block(id) as u128).sum();
        ratio_u128(total, tiling.dims().cell_count() as u128)
    } else {
        let mut acc = BigRational::zero();
        for (tile, &id) in tiling.tiles().iter().zip(ids) {
            let mass = dist.mass_of(tile.cells());
            if mass.is_zero() {
                continue;
            }
            acc += mass * ratio_u64(index.size_of_block(id), tile.len());
        }
        acc
    }
}

/// Sizes of the i-ideal blocks, keyed by (ideal region, party-i coordinate).
struct SliceSizes {
    dim: u64,
    dense: Option<Vec<u32>>,
    sparse: Option<BTreeMap<u64, u32>>,
}

impl SliceSizes {
    fn build(dims: Dims, index: &BlockIndex, party: Party) -> SliceSizes {
        let dim = match party {
            Party::One => dims.rows as u64,
            Party::Two => dims.cols as u64,
        };
        let slots = index.block_count() as u64 * dim;
        let mut sizes = SliceSizes {
            dim,
            dense: (slots <= 1 << 24).then(|| alloc::vec![0u32; slots as usize]),
            sparse: None,
        };
        if sizes.dense.is_none() {
            sizes.sparse = Some(BTreeMap::new());
        }
        for cell in dims.cells() {
            let key = sizes.key(index.block_of(cell), cell.coord(party));
            match (&mut sizes.dense, &mut sizes.sparse) {
                (Some(v), _) => v[key as usize] += 1,
                (None, Some(m)) => *m.entry(key).or_insert(0) += 1,
                _ => unreachable!(),
            }
        }
        sizes
    }

    fn key(&self, region: u32, coord: u32) -> u64 {
        region as u64 * self.dim + coord as u64
    }

    fn get(&self, region: u32, coord: u32) -> u64 {
        let key = self.key(region, coord);
        match (&self.dense, &self.sparse) {
            (Some(v), _) => v[key as usize] as u64,
            (None, Some(m)) => *m.get(&key).unwrap_or(&0) as u64,
            _ => unreachable!(),
        }
    }
}

/// Iterates the i-slices of a tile as (coordinate, slice length) without
/// materializing the refined tiling.
fn tile_slices<'a>(tile: &'a Rect, party: Party) -> (impl Iterator<Item = u32> + 'a, u64) {
    match party {
        Party::One => (tile.rows().iter().copied(), tile.cols().len() as u64),
        Party::Two => (tile.cols().iter().copied(), tile.rows().len() as u64),
    }
}

fn worst_wrt_inner(
    party: Party,
    tiling: &Tiling,
    ids: &[u32],
    sizes: &SliceSizes,
) -> (BigRational, Cell) {
    let mut best: (u64, u64, Cell) = (0, 1, Cell::new(0, 0));
    for (tile, &id) in tiling.tiles().iter().zip(ids) {
        let (coords, slice_len) = tile_slices(tile, party);
        for coord in coords {
            let n = sizes.get(id, coord);
            if frac_gt(n, slice_len, best.0, best.1) {
                let witness = match party {
                    Party::One => Cell::new(coord, tile.cols()[0]),
                    Party::Two => Cell::new(tile.rows()[0], coord),
                };
                best = (n, slice_len, witness);
            }
        }
    }
    (ratio_u64(best.0, best.1), best.2)
}

fn avg_wrt_inner(
    party: Party,
    tiling: &Tiling,
    ids: &[u32],
    sizes: &SliceSizes,
    dist: &Distribution,
) -> BigRational {
    if dist.is_uniform() {
        let mut total: u128 = 0;
        for (tile, &id) in tiling.tiles().iter().zip(ids) {
            let (coords, _) = tile_slices(tile, party);
            for coord in coords {
                total += sizes.get(id, coord) as u128;
            }
        }
        ratio_u128(total, tiling.dims().cell_count() as u128)
    } else {
        let mut acc = BigRational::zero();
        for (tile, &id) in tiling.tiles().iter().zip(ids) {
            let (coords, slice_len) = tile_slices(tile, party);
            for coord in coords {
                let slice_cells: Vec<Cell> = match party {
                    Party::One => tile.cols().iter().map(|&c| Cell::new(coord, c)).collect(),
                    Party::Two => tile.rows().iter().map(|&r| Cell::new(r, coord)).collect(),
                };
                let mass = dist.mass_of(slice_cells);
                if mass.is_zero() {
                    continue;
                }
                acc += mass * ratio_u64(sizes.get(id, coord), slice_len);
            }
        }
        acc
    }
}

/// Worst-case objective ratio with a witness cell attaining it.
pub fn worst_objective(tiling: &Tiling, ideal: &Partition) -> Result<(BigRational, Cell), ParError> {
    if tiling.dims() != ideal.dims() {
        return Err(ParError::DimsMismatch);
    }
    let index = ideal.index();
    let ids = region_per_tile(tiling, &index)?;
    Ok(worst_objective_inner(tiling, &index, &ids))
}

/// Average-case objective ratio under `dist`.
pub fn avg_objective(
    tiling: &Tiling,
    ideal: &Partition,
    dist: &Distribution,
) -> Result<BigRational, ParError> {
    if tiling.dims() != ideal.dims() || dist.dims() != tiling.dims() {
        return Err(ParError::DimsMismatch);
    }
    let index = ideal.index();
    let ids = region_per_tile(tiling, &index)?;
    Ok(avg_objective_inner(tiling, &index, &ids, dist))
}

/// Worst-case ratio with respect to party `i`, with witness.
pub fn worst_wrt(
    party: Party,
    tiling: &Tiling,
    table: &FunctionTable,
) -> Result<(BigRational, Cell), ParError> {
    if tiling.dims() != table.dims() {
        return Err(ParError::DimsMismatch);
    }
    let index = ideal_partition(table).index();
    let ids = region_per_tile(tiling, &index)?;
    let sizes = SliceSizes::build(table.dims(), &index, party);
    Ok(worst_wrt_inner(party, tiling, &ids, &sizes))
}

/// Average-case ratio with respect to party `i` under `dist`.
pub fn avg_wrt(
    party: Party,
    tiling: &Tiling,
    table: &FunctionTable,
    dist: &Distribution,
) -> Result<BigRational, ParError> {
    if tiling.dims() != table.dims() || dist.dims() != table.dims() {
        return Err(ParError::DimsMismatch);
    }
    let index = ideal_partition(table).index();
    let ids = region_per_tile(tiling, &index)?;
    let sizes = SliceSizes::build(table.dims(), &index, party);
    Ok(avg_wrt_inner(party, tiling, &ids, &sizes, dist))
}

/// Worst-case subjective ratio: the larger of the two per-party ratios.
pub fn worst_subjective(
    tiling: &Tiling,
    table: &FunctionTable,
) -> Result<(BigRational, Cell), ParError> {
    let one = worst_wrt(Party::One, tiling, table)?;
    let two = worst_wrt(Party::Two, tiling, table)?;
    Ok(if one.0 >= two.0 { one } else { two })
}

/// Average-case subjective ratio: the larger of the two per-party averages.
pub fn avg_subjective(
    tiling: &Tiling,
    table: &FunctionTable,
    dist: &Distribution,
) -> Result<BigRational, ParError> {
    let one = avg_wrt(Party::One, tiling, table, dist)?;
    let two = avg_wrt(Party::Two, tiling, table, dist)?;
    Ok(one.max(two))
}

/// Computes all eight ratios for one tiling, sharing one pass over the
/// ideal partition.
pub fn par_report(
    tiling: &Tiling,
    table: &FunctionTable,
    dist: &Distribution,
) -> Result<ParReport, ParError> {
    if tiling.dims() != table.dims() || dist.dims() != table.dims() {
        return Err(ParError::DimsMismatch);
    }
    let index = ideal_partition(table).index();
    let ids = region_per_tile(tiling, &index)?;
    let sizes1 = SliceSizes::build(table.dims(), &index, Party::One);
    let sizes2 = SliceSizes::build(table.dims(), &index, Party::Two);
    let (worst_objective, worst_witness) = worst_objective_inner(tiling, &index, &ids);
    let (worst_wrt1, _) = worst_wrt_inner(Party::One, tiling, &ids, &sizes1);
    let (worst_wrt2, _) = worst_wrt_inner(Party::Two, tiling, &ids, &sizes2);
    let avg_objective = avg_objective_inner(tiling, &index, &ids, dist);
    let avg_wrt1 = avg_wrt_inner(Party::One, tiling, &ids, &sizes1, dist);
    let avg_wrt2 = avg_wrt_inner(Party::Two, tiling, &ids, &sizes2, dist);
    Ok(ParReport {
        worst_subjective: worst_wrt1.clone().max(worst_wrt2.clone()),
        avg_subjective: avg_wrt1.clone().max(avg_wrt2.clone()),
        worst_objective,
        worst_wrt1,
        worst_wrt2,
        avg_objective,
        avg_wrt1,
        avg_wrt2,
        tile_count: tiling.len() as u64,
        worst_witness,
    })
}

/// Perfect privacy holds exactly when the (i-refined) tiling coincides with
/// the (i-refined) ideal partition.
pub fn is_perfectly_private(tiling: &Tiling, table: &FunctionTable, mode: PrivacyMode) -> bool {
    let ideal = ideal_partition(table);
    if !tiling.refines(&ideal) {
        return false;
    }
    // a refining cover with as many blocks as the coarse one equals it
    let matches_ideal = tiling.len() == ideal.len();
    let slices_match = |party: Party| {
        let fine: usize = tiling
            .tiles()
            .iter()
            .map(|t| match party {
                Party::One => t.rows().len(),
                Party::Two => t.cols().len(),
            })
            .sum();
        let coarse: usize = ideal
            .regions()
            .iter()
            .map(|r| distinct_coords(r.cells(), party))
            .sum();
        fine == coarse
    };
    match mode {
        PrivacyMode::Objective => matches_ideal,
        PrivacyMode::WithRespectTo(party) => slices_match(party),
        PrivacyMode::Subjective => slices_match(Party::One) && slices_match(Party::Two),
    }
}

fn distinct_coords(cells: &[Cell], party: Party) -> usize {
    let mut coords: Vec<u32> = cells.iter().map(|c| c.coord(party)).collect();
    coords.sort_unstable();
    coords.dedup();
    coords.len()
}

/// Outcome of a generalized-measure ratio computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedPar {
    pub value: BigRational,
    /// Cells where both measure values were zero; their ratio is taken as 1.
    pub zero_over_zero_cells: u64,
}

/// Worst-case or average-case ratio of `measure` between ideal regions and
/// protocol tiles. Worst case maximizes over cells of positive mass;
/// average case is the expectation under `dist`.
pub fn generalized_par(
    tiling: &Tiling,
    ideal: &Partition,
    measure: &Measure,
    mode: ParMode,
    dist: &Distribution,
) -> Result<GeneralizedPar, ParError> {
    if tiling.dims() != ideal.dims() || dist.dims() != tiling.dims() {
        return Err(ParError::DimsMismatch);
    }
    let index = ideal.index();
    region_per_tile(tiling, &index)?;
    let mut flagged = 0u64;
    let mut worst: Option<BigRational> = None;
    let mut acc = BigRational::zero();
    for tile in tiling.tiles() {
        let tile_cells: Vec<Cell> = tile.cells().collect();
        for &cell in &tile_cells {
            let mass = dist.mass(cell);
            if mass.is_zero() {
                continue;
            }
            let region = &ideal.regions()[index.block_of(cell) as usize];
            let num = measure.eval(region.cells(), cell)?;
            let den = measure.eval(&tile_cells, cell)?;
            let ratio = if den.is_zero() {
                if num.is_zero() {
                    flagged += 1;
                    BigRational::from(BigInt::from(1))
                } else {
                    return Err(ParError::UndefinedRatio(cell));
                }
            } else {
                num / den
            };
            match mode {
                ParMode::Worst => {
                    if worst.as_ref().is_none_or(|w| ratio > *w) {
                        worst = Some(ratio);
                    }
                }
                ParMode::Average => acc += mass * ratio,
            }
        }
    }
    let value = match mode {
        ParMode::Worst => worst.unwrap_or_else(BigRational::zero),
        ParMode::Average => acc,
    };
    Ok(GeneralizedPar { value, zero_over_zero_cells: flagged })
}
