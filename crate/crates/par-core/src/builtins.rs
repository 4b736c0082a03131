//! The built-in protocols: sealed-bid revelation, millionaires bisection,
//! the ascending English auction, bisection / c-bisection / bounded-bisection
//! auctions, the two pointwise-function revelation protocols, and a
//! reference protocol for the truthful public-good problem.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::label::{OutcomeLabel, Party};
use crate::problems::ProblemError;
use crate::protocol::{Protocol, ProtocolNode};
use crate::table::{Cell, Dims, FunctionTable};

/// Errors from built-in protocol constructors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuiltinError {
    #[error("bisection budget g = {g} out of range 0..={k}")]
    GOutOfRange { g: u32, k: u32 },
    #[error("bisection fraction must lie strictly between 0 and 1")]
    FractionOutOfRange,
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

fn values(lo: u32, hi: u32) -> Vec<u32> {
    (lo..hi).collect()
}

/// Balanced revelation tree: `party` announces which half of `vals` holds
/// its value until a single value remains, then `leaf` issues the output.
/// `lo_size` picks the split point (strictly between 0 and the set size).
fn search_tree<F, S>(party: Party, vals: &[u32], lo_size: &S, leaf: &F) -> ProtocolNode
where
    F: Fn(u32) -> ProtocolNode,
    S: Fn(usize) -> usize,
{
    if vals.len() == 1 {
        return leaf(vals[0]);
    }
    let mid = lo_size(vals.len()).clamp(1, vals.len() - 1);
    let (lo, hi) = vals.split_at(mid);
    ProtocolNode::internal(
        party,
        lo.to_vec(),
        hi.to_vec(),
        search_tree(party, lo, lo_size, leaf),
        search_tree(party, hi, lo_size, leaf),
    )
}

fn halves(n: usize) -> usize {
    n / 2
}

/// Balanced announcement tree over a fixed list of (value block, subtree)
/// pairs: the speaker narrows down which block holds its value, and the
/// block's subtree continues from there. A single block sends no bits.
fn block_tree(party: Party, blocks: &[(Vec<u32>, ProtocolNode)]) -> ProtocolNode {
    match blocks {
        [] => unreachable!("block list is never empty"),
        [(_, node)] => node.clone(),
        _ => {
            let mid = blocks.len() / 2;
            let (lo, hi) = blocks.split_at(mid);
            let flat = |side: &[(Vec<u32>, ProtocolNode)]| -> Vec<u32> {
                side.iter().flat_map(|(vals, _)| vals.iter().copied()).collect()
            };
            ProtocolNode::internal(
                party,
                flat(lo),
                flat(hi),
                block_tree(party, lo),
                block_tree(party, hi),
            )
        }
    }
}

/// Full revelation: party one announces all of its bits, then party two.
/// Works over any table; every induced tile is a single cell.
pub fn sealed_bid(table: &FunctionTable) -> Protocol {
    let dims = table.dims();
    let rows = values(0, dims.rows);
    let cols = values(0, dims.cols);
    let root = search_tree(Party::One, &rows, &halves, &|x1| {
        search_tree(Party::Two, &cols, &halves, &|x2| {
            ProtocolNode::leaf(table.label(Cell::new(x1, x2)).clone())
        })
    });
    Protocol::new(dims, root)
}

/// Millionaires bisection: both parties announce which half of the current
/// interval holds their value (party one first); the first disagreement
/// decides the winner, and full agreement down to a single value is a tie
/// in party one's favor.
pub fn bisection_protocol(k: u32) -> Protocol {
    fn node(vals: &[u32]) -> ProtocolNode {
        if vals.len() == 1 {
            return ProtocolNode::leaf(OutcomeLabel::Winner(Party::One));
        }
        let (lo, hi) = vals.split_at(vals.len() / 2);
        ProtocolNode::internal(
            Party::One,
            lo.to_vec(),
            hi.to_vec(),
            ProtocolNode::internal(
                Party::Two,
                lo.to_vec(),
                hi.to_vec(),
                node(lo),
                ProtocolNode::leaf(OutcomeLabel::Winner(Party::Two)),
            ),
            ProtocolNode::internal(
                Party::Two,
                lo.to_vec(),
                hi.to_vec(),
                ProtocolNode::leaf(OutcomeLabel::Winner(Party::One)),
                node(hi),
            ),
        )
    }
    let all = values(0, 1 << k);
    Protocol::new(Dims::square_pow2(k), node(&all))
}

/// The millionaires bisection protocol transported to the public-good
/// matrix: party two's announcements are reflected through
/// `x2 -> (2^k - 1) - x2` and the winner labels become build decisions.
pub fn pg_bisection_protocol(k: u32) -> Protocol {
    let max = (1u32 << k) - 1;
    let mp = bisection_protocol(k);
    let root = map_tree(mp.root(), &|party, v| match party {
        Party::One => v,
        Party::Two => max - v,
    }, &|label| match label {
        OutcomeLabel::Winner(Party::One) => OutcomeLabel::Build,
        OutcomeLabel::Winner(Party::Two) => OutcomeLabel::DoNotBuild,
        other => other.clone(),
    });
    Protocol::new(Dims::square_pow2(k), root)
}

fn map_tree<FV, FL>(node: &ProtocolNode, fv: &FV, fl: &FL) -> ProtocolNode
where
    FV: Fn(Party, u32) -> u32,
    FL: Fn(&OutcomeLabel) -> OutcomeLabel,
{
    match node {
        ProtocolNode::Leaf { output } => ProtocolNode::leaf(fl(output)),
        ProtocolNode::Internal { speaker, branch0, branch1, child0, child1 } => {
            let map = |vals: &[u32]| vals.iter().map(|&v| fv(*speaker, v)).collect::<Vec<_>>();
            ProtocolNode::internal(
                *speaker,
                map(branch0),
                map(branch1),
                map_tree(child0, fv, fl),
                map_tree(child1, fv, fl),
            )
        }
    }
}

/// Ascending-price English auction. At each price level the column bidder
/// is asked first whether it drops out; a drop awards the item to the other
/// bidder at the previous price, and if the price tops out both values are
/// maximal and the tie goes to bidder one. The induced tiling is exactly
/// the ideal partition of the second-price matrix.
pub fn english_auction(k: u32) -> Protocol {
    let all = values(0, 1 << k);
    Protocol::new(Dims::square_pow2(k), english_over(&all))
}

fn english_over(vals: &[u32]) -> ProtocolNode {
    let v = vals[0];
    if vals.len() == 1 {
        return ProtocolNode::leaf(OutcomeLabel::Award { winner: Party::One, price: v });
    }
    let rest = &vals[1..];
    ProtocolNode::internal(
        Party::Two,
        vec![v],
        rest.to_vec(),
        ProtocolNode::leaf(OutcomeLabel::Award { winner: Party::One, price: v }),
        ProtocolNode::internal(
            Party::One,
            vec![v],
            rest.to_vec(),
            ProtocolNode::leaf(OutcomeLabel::Award { winner: Party::Two, price: v }),
            english_over(rest),
        ),
    )
}

/// Bisection auction: bisection rounds as in the millionaires protocol;
/// once the bidders separate, the loser reveals its exact value by binary
/// search (the winner stays silent) and that value is the price.
pub fn bisection_auction(k: u32) -> Protocol {
    bounded_bisection_auction(k, k).expect("g = k is always in range")
}

/// Bisection auction limited to `g` bisection rounds; if the bidders are
/// still together afterwards, an English auction over the residual interval
/// settles the outcome. Loser-search announcements after a separation do
/// not count against `g`. `g = 0` is the English auction, `g = k` the full
/// bisection auction.
pub fn bounded_bisection_auction(k: u32, g: u32) -> Result<Protocol, BuiltinError> {
    if g > k {
        return Err(BuiltinError::GOutOfRange { g, k });
    }
    fn node(vals: &[u32], budget: u32) -> ProtocolNode {
        if vals.len() == 1 {
            return ProtocolNode::leaf(OutcomeLabel::Award { winner: Party::One, price: vals[0] });
        }
        if budget == 0 {
            return english_over(vals);
        }
        let (lo, hi) = vals.split_at(vals.len() / 2);
        round(lo, hi, &|half| node(half, budget - 1), &halves)
    }
    let all = values(0, 1 << k);
    Ok(Protocol::new(Dims::square_pow2(k), node(&all, g)))
}

/// One auction bisection round over `lo | hi`, with `descend` continuing on
/// agreement and the loser searching its half via `lo_size` splits.
fn round<D, S>(lo: &[u32], hi: &[u32], descend: &D, lo_size: &S) -> ProtocolNode
where
    D: Fn(&[u32]) -> ProtocolNode,
    S: Fn(usize) -> usize,
{
    ProtocolNode::internal(
        Party::One,
        lo.to_vec(),
        hi.to_vec(),
        ProtocolNode::internal(
            Party::Two,
            lo.to_vec(),
            hi.to_vec(),
            descend(lo),
            // x1 low, x2 high: bidder two wins; bidder one reveals the price
            search_tree(Party::One, lo, lo_size, &|x1| {
                ProtocolNode::leaf(OutcomeLabel::Award { winner: Party::Two, price: x1 })
            }),
        ),
        ProtocolNode::internal(
            Party::Two,
            lo.to_vec(),
            hi.to_vec(),
            // x1 high, x2 low: bidder one wins; bidder two reveals the price
            search_tree(Party::Two, lo, lo_size, &|x2| {
                ProtocolNode::leaf(OutcomeLabel::Award { winner: Party::One, price: x2 })
            }),
            descend(hi),
        ),
    )
}

/// Generalized bisection auction: each round splits off a lower subinterval
/// of `c` times the current size (clamped to keep both sides nonempty).
/// `c = 1/2` coincides exactly with [`bisection_auction`].
pub fn c_bisection_auction(k: u32, c: &BigRational) -> Result<Protocol, BuiltinError> {
    if c.is_zero() || c.is_negative() || *c >= BigRational::from(BigInt::from(1)) {
        return Err(BuiltinError::FractionOutOfRange);
    }
    let numer = c.numer().clone();
    let denom = c.denom().clone();
    let lo_size = move |n: usize| {
        let scaled = (&numer * BigInt::from(n)) / &denom;
        scaled.to_usize().unwrap_or(usize::MAX).max(1)
    };
    fn node<S: Fn(usize) -> usize>(vals: &[u32], lo_size: &S) -> ProtocolNode {
        if vals.len() == 1 {
            return ProtocolNode::leaf(OutcomeLabel::Award { winner: Party::One, price: vals[0] });
        }
        let mid = lo_size(vals.len()).clamp(1, vals.len() - 1);
        let (lo, hi) = vals.split_at(mid);
        round(lo, hi, &|half| node(half, lo_size), lo_size)
    }
    let all = values(0, 1 << k);
    Ok(Protocol::new(Dims::square_pow2(k), node(&all, &lo_size)))
}

/// The two revelation protocols for the capped floor-halving function:
/// in the first, the row player announces its exact value when below the
/// midpoint and only "high" otherwise; in the second it announces the
/// output block, except that the top value is announced exactly. Both
/// induce `2^(n-1) + 1` tiles.
pub fn appxa_protocols(n: u32) -> Result<(Protocol, Protocol), BuiltinError> {
    if n < 2 {
        return Err(BuiltinError::Problem(ProblemError::BadAppxaSize { n }));
    }
    let dims = Dims::square_pow2(n);
    let size = 1u32 << n;
    let half = size / 2;
    let cap = OutcomeLabel::Value(1 << (n - 2));

    let low = values(0, half);
    let p_root = ProtocolNode::internal(
        Party::One,
        low.clone(),
        values(half, size),
        search_tree(Party::One, &low, &halves, &|x| {
            ProtocolNode::leaf(OutcomeLabel::Value(x / 2))
        }),
        ProtocolNode::leaf(cap.clone()),
    );

    let mut q_blocks: Vec<(Vec<u32>, ProtocolNode)> = Vec::new();
    let mut x = 0;
    while x + 1 < size - 1 {
        let label = if x < half { OutcomeLabel::Value(x / 2) } else { cap.clone() };
        q_blocks.push((vec![x, x + 1], ProtocolNode::leaf(label)));
        x += 2;
    }
    q_blocks.push((vec![size - 2], ProtocolNode::leaf(cap.clone())));
    q_blocks.push((vec![size - 1], ProtocolNode::leaf(cap)));
    let q_root = block_tree(Party::One, &q_blocks);

    Ok((Protocol::new(dims, p_root), Protocol::new(dims, q_root)))
}

/// Reference protocol for the truthful public-good problem at cost `c`:
/// party two announces its value exactly when below `c` and "at least c"
/// otherwise; party one then announces just enough to realize every ideal
/// build region, leaving one do-not-build tile per low column.
pub fn tpg_reference_protocol(k: u32, c: u32) -> Result<Protocol, BuiltinError> {
    let size = 1u32 << k;
    if c > size - 1 {
        return Err(BuiltinError::Problem(ProblemError::CostOutOfRange { c, k }));
    }
    let build = |t1: u32, t2: u32| ProtocolNode::leaf(OutcomeLabel::BuildTransfers { t1, t2 });

    let mut col_blocks: Vec<(Vec<u32>, ProtocolNode)> = Vec::new();
    for x2 in 0..c {
        // low column: a do-not-build prefix, exact build singletons, and the
        // "x1 >= c" tail where only party one's transfer is zero
        let t1 = c - x2;
        let mut row_blocks: Vec<(Vec<u32>, ProtocolNode)> = Vec::new();
        row_blocks.push((values(0, c - x2), ProtocolNode::leaf(OutcomeLabel::DoNotBuild)));
        for x1 in (c - x2)..c {
            row_blocks.push((vec![x1], build(t1, c - x1)));
        }
        row_blocks.push((values(c, size), build(t1, 0)));
        col_blocks.push((vec![x2], block_tree(Party::One, &row_blocks)));
    }
    // high columns: x2 >= c, so t1 = 0 and the outcome depends only on x1
    let mut row_blocks: Vec<(Vec<u32>, ProtocolNode)> = Vec::new();
    for x1 in 0..c {
        row_blocks.push((vec![x1], build(0, c - x1)));
    }
    row_blocks.push((values(c, size), build(0, 0)));
    col_blocks.push((values(c, size), block_tree(Party::One, &row_blocks)));

    Ok(Protocol::new(Dims::square_pow2(k), block_tree(Party::Two, &col_blocks)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemSpec;

    #[test]
    fn english_sells_to_the_higher_bidder_at_the_lower_bid() {
        let p = english_auction(3);
        let t = p.run(3, 6).unwrap();
        assert_eq!(t.output, OutcomeLabel::Award { winner: Party::Two, price: 3 });
        let t = p.run(7, 7).unwrap();
        assert_eq!(t.output, OutcomeLabel::Award { winner: Party::One, price: 7 });
    }

    #[test]
    fn sealed_bid_transcript_has_2k_bits() {
        let table = FunctionTable::build(ProblemSpec::second_price(3)).unwrap();
        let p = sealed_bid(&table);
        for cell in table.cells() {
            let t = p.run(cell.x1, cell.x2).unwrap();
            assert_eq!(t.bits.len(), 6);
            assert_eq!(&t.output, table.label(cell));
        }
        assert_eq!(p.communication_complexity(), 6);
    }

    #[test]
    fn bisection_auction_k1_trace() {
        let p = bisection_auction(1);
        let t = p.run(0, 1).unwrap();
        assert_eq!(t.output, OutcomeLabel::Award { winner: Party::Two, price: 0 });
        assert_eq!(t.bits.len(), 2);
        let table = FunctionTable::build(ProblemSpec::second_price(1)).unwrap();
        assert_eq!(p.induced_tiling(&table).unwrap().len(), 4);
    }

    #[test]
    fn bisection_protocol_k1_trace() {
        let p = bisection_protocol(1);
        let t = p.run(1, 0).unwrap();
        assert_eq!(t.output, OutcomeLabel::Winner(Party::One));
        assert_eq!(t.bits.len(), 2);
    }

    #[test]
    fn builtins_validate_on_their_home_problems() {
        for k in 1..=4 {
            let mp = FunctionTable::build(ProblemSpec::millionaires(k)).unwrap();
            let spa = FunctionTable::build(ProblemSpec::second_price(k)).unwrap();
            let pg = FunctionTable::build(ProblemSpec::public_good(k)).unwrap();
            bisection_protocol(k).validate(&mp).unwrap();
            pg_bisection_protocol(k).validate(&pg).unwrap();
            sealed_bid(&mp).validate(&mp).unwrap();
            english_auction(k).validate(&spa).unwrap();
            bisection_auction(k).validate(&spa).unwrap();
            for g in 0..=k {
                bounded_bisection_auction(k, g).unwrap().validate(&spa).unwrap();
            }
            for (num, den) in [(1, 4), (1, 2), (3, 4)] {
                let c = BigRational::new(BigInt::from(num), BigInt::from(den));
                c_bisection_auction(k, &c).unwrap().validate(&spa).unwrap();
            }
        }
        for n in 2..=5 {
            let table = FunctionTable::build(ProblemSpec::appxa(n)).unwrap();
            let (p, q) = appxa_protocols(n).unwrap();
            p.validate(&table).unwrap();
            q.validate(&table).unwrap();
        }
        for k in 1..=4u32 {
            for c in 0..(1u32 << k) {
                let table =
                    FunctionTable::build(ProblemSpec::truthful_public_good(k, c)).unwrap();
                tpg_reference_protocol(k, c).unwrap().validate(&table).unwrap();
            }
        }
    }

    #[test]
    fn half_bisection_equals_bisection_auction() {
        let c = BigRational::new(BigInt::from(1), BigInt::from(2));
        for k in 1..=5 {
            let table = FunctionTable::build(ProblemSpec::second_price(k)).unwrap();
            let a = bisection_auction(k).induced_tiling(&table).unwrap();
            let b = c_bisection_auction(k, &c).unwrap().induced_tiling(&table).unwrap();
            assert!(a.same_cover(&b));
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(bounded_bisection_auction(3, 4).is_err());
        assert!(c_bisection_auction(3, &BigRational::from(BigInt::from(1))).is_err());
        assert!(c_bisection_auction(3, &BigRational::from(BigInt::from(0))).is_err());
        assert!(appxa_protocols(1).is_err());
        assert!(tpg_reference_protocol(3, 8).is_err());
    }

    #[test]
    fn tpg_reference_do_not_build_tile_count_is_c() {
        for k in 1..=4u32 {
            for c in 1..(1u32 << k) {
                let table =
                    FunctionTable::build(ProblemSpec::truthful_public_good(k, c)).unwrap();
                let tiling = tpg_reference_protocol(k, c).unwrap().induced_tiling(&table).unwrap();
                let dnb = tiling
                    .tiles()
                    .iter()
                    .filter(|t| table.label(t.first_cell()) == &OutcomeLabel::DoNotBuild)
                    .count();
                assert_eq!(dnb as u32, c, "k={k} c={c}");
            }
        }
    }

    #[test]
    fn appxa_tile_counts() {
        for n in 2..=6u32 {
            let table = FunctionTable::build(ProblemSpec::appxa(n)).unwrap();
            let (p, q) = appxa_protocols(n).unwrap();
            let expected = (1usize << (n - 1)) + 1;
            assert_eq!(p.induced_tiling(&table).unwrap().len(), expected);
            assert_eq!(q.induced_tiling(&table).unwrap().len(), expected);
        }
    }

    #[test]
    fn sealed_bid_covers_arbitrary_tables() {
        let table = FunctionTable::build(ProblemSpec::appxa(3)).unwrap();
        let p = sealed_bid(&table);
        let tiling = p.induced_tiling(&table).unwrap();
        assert_eq!(tiling.len() as u64, table.dims().cell_count());
        assert_eq!(p.run(5, 2).unwrap().output, OutcomeLabel::Value(2));
    }
}
