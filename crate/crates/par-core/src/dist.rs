//! Exact-rational probability distributions over input pairs.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::table::{Cell, Dims};

/// Errors from distribution constructors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DistError {
    #[error("mass at cell {0} is negative")]
    NegativeMass(Cell),
    #[error("cell {0} out of bounds")]
    OutOfBounds(Cell),
    #[error("masses must sum to exactly 1 (got {0})")]
    BadTotal(alloc::string::String),
    #[error("factor masses must be nonnegative with positive sum")]
    BadFactor,
    #[error("grid must be at least 1")]
    BadGrid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Uniform,
    Explicit(Vec<BigRational>), // dense, row-major; sums to exactly 1
}

/// A probability distribution over the cells of a grid, stored exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    dims: Dims,
    kind: Kind,
}

impl Distribution {
    /// Uniform mass `1 / (rows * cols)` per cell.
    pub fn uniform(dims: Dims) -> Distribution {
        Distribution { dims, kind: Kind::Uniform }
    }

    /// Uniform over the `2^k x 2^k` grid.
    pub fn uniform_square(k: u32) -> Distribution {
        Distribution::uniform(Dims::square_pow2(k))
    }

    /// Product distribution; each factor is normalized by its own sum.
    pub fn product(p1: &[BigRational], p2: &[BigRational]) -> Result<Distribution, DistError> {
        let normalize = |p: &[BigRational]| -> Result<Vec<BigRational>, DistError> {
            if p.is_empty() || p.iter().any(|m| m.is_negative()) {
                return Err(DistError::BadFactor);
            }
            let total: BigRational = p.iter().sum();
            if total.is_zero() {
                return Err(DistError::BadFactor);
            }
            Ok(p.iter().map(|m| m / &total).collect())
        };
        let rows = normalize(p1)?;
        let cols = normalize(p2)?;
        let dims = Dims::new(rows.len() as u32, cols.len() as u32);
        let mut mass = Vec::with_capacity(dims.cell_count() as usize);
        for r in &rows {
            for c in &cols {
                mass.push(r * c);
            }
        }
        Ok(Distribution { dims, kind: Kind::Explicit(mass) })
    }

    /// Explicit per-cell masses; unlisted cells get zero. The total must be
    /// exactly 1.
    pub fn from_masses(
        dims: Dims,
        entries: impl IntoIterator<Item = (Cell, BigRational)>,
    ) -> Result<Distribution, DistError> {
        let mut mass = alloc::vec![BigRational::zero(); dims.cell_count() as usize];
        for (cell, m) in entries {
            if !dims.contains(cell) {
                return Err(DistError::OutOfBounds(cell));
            }
            if m.is_negative() {
                return Err(DistError::NegativeMass(cell));
            }
            mass[dims.index(cell)] += m;
        }
        let total: BigRational = mass.iter().sum();
        if !total.is_one() {
            return Err(DistError::BadTotal(alloc::format!("{total}")));
        }
        Ok(Distribution { dims, kind: Kind::Explicit(mass) })
    }

    /// Deterministic pseudo-random distribution: each cell draws an integer
    /// numerator in `0..=grid` from a ChaCha stream seeded with `seed`, and
    /// the draws are normalized by their sum (an all-zero draw falls back to
    /// uniform).
    pub fn seeded_random(dims: Dims, seed: u64, grid: u64) -> Result<Distribution, DistError> {
        if grid == 0 {
            return Err(DistError::BadGrid);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = dims.cell_count() as usize;
        let mut draws: Vec<u64> = Vec::with_capacity(n);
        for _ in 0..n {
            draws.push(rng.random_range(0..=grid));
        }
        if draws.iter().all(|&d| d == 0) {
            return Ok(Distribution::uniform(dims));
        }
        let total: BigInt = draws.iter().map(|&d| BigInt::from(d)).sum();
        let mass = draws
            .into_iter()
            .map(|d| BigRational::new(BigInt::from(d), total.clone()))
            .collect();
        Ok(Distribution { dims, kind: Kind::Explicit(mass) })
    }

    /// Point mass on a single cell.
    pub fn point_mass(dims: Dims, cell: Cell) -> Result<Distribution, DistError> {
        Distribution::from_masses(dims, [(cell, BigRational::one())])
    }

    /// Convex mixture `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Distribution, lambda: &BigRational) -> Result<Distribution, DistError> {
        if self.dims != other.dims
            || lambda.is_negative()
            || *lambda > BigRational::one()
        {
            return Err(DistError::BadFactor);
        }
        let one_minus = BigRational::one() - lambda;
        let mass: Vec<BigRational> = self
            .dims
            .cells()
            .map(|c| self.mass(c) * lambda + other.mass(c) * &one_minus)
            .collect();
        Ok(Distribution { dims: self.dims, kind: Kind::Explicit(mass) })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.kind, Kind::Uniform)
    }

    pub fn mass(&self, cell: Cell) -> BigRational {
        match &self.kind {
            Kind::Uniform => {
                BigRational::new(BigInt::one(), BigInt::from(self.dims.cell_count()))
            }
            Kind::Explicit(mass) => mass[self.dims.index(cell)].clone(),
        }
    }

    /// Total mass of a set of cells.
    pub fn mass_of(&self, cells: impl IntoIterator<Item = Cell>) -> BigRational {
        match &self.kind {
            Kind::Uniform => {
                let n = cells.into_iter().count() as u64;
                BigRational::new(BigInt::from(n), BigInt::from(self.dims.cell_count()))
            }
            Kind::Explicit(mass) => cells
                .into_iter()
                .map(|c| mass[self.dims.index(c)].clone())
                .sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn uniform_mass_per_cell() {
        let d = Distribution::uniform_square(2);
        assert_eq!(d.mass(Cell::new(3, 1)), rat(1, 16));
    }

    #[test]
    fn product_restricts_to_column_zero() {
        let d = Distribution::product(&[rat(1, 2), rat(1, 2)], &[rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(d.mass(Cell::new(0, 0)), rat(1, 2));
        assert_eq!(d.mass(Cell::new(1, 1)), rat(0, 1));
    }

    #[test]
    fn product_normalizes_factors() {
        let d = Distribution::product(&[rat(2, 1), rat(2, 1)], &[rat(3, 1)]).unwrap();
        assert_eq!(d.mass(Cell::new(0, 0)), rat(1, 2));
    }

    #[test]
    fn explicit_total_must_be_one() {
        let dims = Dims::square_pow2(1);
        let short: Vec<(Cell, BigRational)> = dims
            .cells()
            .take(3)
            .map(|c| (c, rat(1, 4)))
            .collect();
        assert!(matches!(
            Distribution::from_masses(dims, short),
            Err(DistError::BadTotal(_))
        ));
    }

    #[test]
    fn seeded_random_is_reproducible() {
        let dims = Dims::square_pow2(2);
        let a = Distribution::seeded_random(dims, 42, 1000).unwrap();
        let b = Distribution::seeded_random(dims, 42, 1000).unwrap();
        assert_eq!(a, b);
        let total: BigRational = dims.cells().map(|c| a.mass(c)).sum();
        assert!(total.is_one());
    }

    #[test]
    fn mixtures_stay_distributions() {
        let dims = Dims::square_pow2(1);
        let u = Distribution::uniform(dims);
        let p = Distribution::point_mass(dims, Cell::new(1, 0)).unwrap();
        let m = u.mix(&p, &rat(1, 3)).unwrap();
        let total: BigRational = dims.cells().map(|c| m.mass(c)).sum();
        assert!(total.is_one());
        assert_eq!(m.mass(Cell::new(1, 0)), rat(1, 12) + rat(2, 3));
    }
}
