//! Pluggable region measures for generalized privacy-approximation ratios.
//!
//! The cardinality measure recovers the standard ratio; the others weigh a
//! region by probability mass, by accumulated or maximal distance from the
//! true input, by how far one can plausibly deny being from it, or by its
//! diameter relative to the input's magnitude.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dist::Distribution;
use crate::table::Cell;

/// Errors from evaluating a measure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("plausible-deniability threshold must lie in (0, 1]")]
    BadThreshold,
    #[error("region containing {0} has zero probability mass")]
    ZeroMassRegion(Cell),
}

/// A distance on cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distance {
    /// `0` on equal cells, `1` otherwise.
    Discrete,
    /// `|dx1| + |dx2|`.
    L1,
    /// `max(|dx1|, |dx2|)`.
    LInf,
}

impl Distance {
    pub fn eval(&self, a: Cell, b: Cell) -> u64 {
        let d1 = a.x1.abs_diff(b.x1) as u64;
        let d2 = a.x2.abs_diff(b.x2) as u64;
        match self {
            Distance::Discrete => u64::from(a != b),
            Distance::L1 => d1 + d2,
            Distance::LInf => d1.max(d2),
        }
    }
}

/// A function `g(R, x)` scoring how well a region `R` hides the input `x`.
#[derive(Clone, Debug)]
pub enum Measure {
    /// `|R|` — the number of indistinguishable inputs.
    Cardinality,
    /// `Pr_D(R)`.
    ProbabilityMass(Distribution),
    /// `1 + sum over other cells of their distance from x`.
    AdditiveDistance(Distance),
    /// `1 + max distance from x to another cell of R`; `1` on singletons.
    MaxDistance(Distance),
    /// `1 + max { d0 : Pr_D(d(y, x) >= d0 | R) >= t }`, the mass condition
    /// normalized by the region's own mass.
    PlausibleDeniability {
        dist: Distribution,
        metric: Distance,
        threshold: BigRational,
    },
    /// `(1 + diam_d(R)) / (1 + max(x1, x2))`; both sides regularized by 1
    /// so singleton regions and the zero input stay finite.
    RelativeDiameter(Distance),
}

impl Measure {
    pub fn cardinality() -> Measure {
        Measure::Cardinality
    }

    pub fn probability_mass(dist: Distribution) -> Measure {
        Measure::ProbabilityMass(dist)
    }

    pub fn additive_distance(metric: Distance) -> Measure {
        Measure::AdditiveDistance(metric)
    }

    pub fn max_distance(metric: Distance) -> Measure {
        Measure::MaxDistance(metric)
    }

    pub fn plausible_deniability(
        dist: Distribution,
        metric: Distance,
        threshold: BigRational,
    ) -> Result<Measure, MeasureError> {
        if threshold <= BigRational::zero() || threshold > BigRational::one() {
            return Err(MeasureError::BadThreshold);
        }
        Ok(Measure::PlausibleDeniability { dist, metric, threshold })
    }

    pub fn relative_diameter(metric: Distance) -> Measure {
        Measure::RelativeDiameter(metric)
    }

    /// Evaluates the measure for the region given by `cells` at input `x`.
    pub fn eval(&self, cells: &[Cell], x: Cell) -> Result<BigRational, MeasureError> {
        let int = |n: u64| BigRational::from(BigInt::from(n));
        match self {
            Measure::Cardinality => Ok(int(cells.len() as u64)),
            Measure::ProbabilityMass(dist) => Ok(dist.mass_of(cells.iter().copied())),
            Measure::AdditiveDistance(metric) => {
                let total: u64 = cells
                    .iter()
                    .filter(|&&y| y != x)
                    .map(|&y| metric.eval(x, y))
                    .sum();
                Ok(int(1 + total))
            }
            Measure::MaxDistance(metric) => {
                let far = cells
                    .iter()
                    .filter(|&&y| y != x)
                    .map(|&y| metric.eval(y, x))
                    .max()
                    .unwrap_or(0);
                Ok(int(1 + far))
            }
            Measure::PlausibleDeniability { dist, metric, threshold } => {
                let region_mass = dist.mass_of(cells.iter().copied());
                if region_mass.is_zero() {
                    return Err(MeasureError::ZeroMassRegion(x));
                }
                // candidate radii are the distances actually achieved in R
                let mut radii: Vec<u64> = cells.iter().map(|&y| metric.eval(y, x)).collect();
                radii.sort_unstable();
                radii.dedup();
                let mut best = 0u64;
                for &d0 in radii.iter().rev() {
                    let far_mass: BigRational = cells
                        .iter()
                        .filter(|&&y| metric.eval(y, x) >= d0)
                        .map(|&y| dist.mass(y))
                        .sum();
                    if &far_mass / &region_mass >= *threshold {
                        best = d0;
                        break;
                    }
                }
                Ok(int(1 + best))
            }
            Measure::RelativeDiameter(metric) => {
                let mut diam = 0u64;
                for (i, &a) in cells.iter().enumerate() {
                    for &b in &cells[i + 1..] {
                        diam = diam.max(metric.eval(a, b));
                    }
                }
                let size = 1 + x.x1.max(x.x2) as u64;
                Ok(BigRational::new(BigInt::from(1 + diam), BigInt::from(size)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Dims;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn discrete_additive_matches_cardinality() {
        let cells: Vec<Cell> = (0..5).map(|i| Cell::new(i, 0)).collect();
        let x = cells[2];
        let add = Measure::additive_distance(Distance::Discrete).eval(&cells, x).unwrap();
        let card = Measure::cardinality().eval(&cells, x).unwrap();
        assert_eq!(add, card);
    }

    #[test]
    fn max_distance_of_singleton_is_one() {
        let cells = alloc::vec![Cell::new(3, 3)];
        let m = Measure::max_distance(Distance::L1).eval(&cells, cells[0]).unwrap();
        assert_eq!(m, rat(1, 1));
    }

    #[test]
    fn probability_mass_of_full_table_is_one() {
        let dims = Dims::square_pow2(2);
        let all: Vec<Cell> = dims.cells().collect();
        let m = Measure::probability_mass(Distribution::uniform(dims))
            .eval(&all, Cell::new(0, 0))
            .unwrap();
        assert!(m.is_one());
    }

    #[test]
    fn plausible_deniability_with_threshold_one() {
        // mass at the input itself is always below a full-region share, so
        // only radius 0 qualifies and the measure collapses to 1
        let dims = Dims::square_pow2(2);
        let cells: Vec<Cell> = (0..4).map(|i| Cell::new(i, 0)).collect();
        let m = Measure::plausible_deniability(
            Distribution::uniform(dims),
            Distance::Discrete,
            rat(1, 1),
        )
        .unwrap()
        .eval(&cells, cells[0])
        .unwrap();
        assert_eq!(m, rat(1, 1));
    }

    #[test]
    fn plausible_deniability_brute_force_check() {
        // uniform over a 4-cell column, threshold 1/2, L1 metric:
        // radius d0 qualifies iff at least 2 of 4 cells sit at distance >= d0
        let dims = Dims::square_pow2(2);
        let cells: Vec<Cell> = (0..4).map(|i| Cell::new(i, 0)).collect();
        let x = Cell::new(0, 0);
        let dist = Distribution::uniform(dims);
        let m = Measure::plausible_deniability(dist.clone(), Distance::L1, rat(1, 2))
            .unwrap()
            .eval(&cells, x)
            .unwrap();
        // distances from x: 0,1,2,3; mass(d >= 2) = 2/4 >= 1/2 but
        // mass(d >= 3) = 1/4 < 1/2, so the best radius is 2
        assert_eq!(m, rat(3, 1));

        let bad = Measure::plausible_deniability(dist, Distance::L1, rat(3, 2));
        assert!(bad.is_err());
    }

    #[test]
    fn relative_diameter_regularizes() {
        let cells = alloc::vec![Cell::new(0, 0)];
        let m = Measure::relative_diameter(Distance::L1).eval(&cells, cells[0]).unwrap();
        assert_eq!(m, rat(1, 1)); // (1 + 0) / (1 + 0)
    }
}
