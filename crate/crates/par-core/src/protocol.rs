//! Deterministic two-party protocols as decision trees.
//!
//! Each internal node names a speaker and splits the speaker's current
//! candidate set into two disjoint nonempty halves; the transmitted bit says
//! which half holds the speaker's value. Leaves carry the announced output.
//! A protocol may keep splitting inside an already-monochromatic rectangle
//! (full revelation does exactly that); validity only requires that every
//! leaf rectangle be monochromatic with the leaf's label.

use alloc::boxed::Box;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::label::{OutcomeLabel, Party};
use crate::table::{Cell, Dims, FunctionTable};
use crate::tiling::{Rect, Tiling, TilingError};

/// Errors from running, validating, or deriving tilings from protocols.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("party {party}'s value {value} not covered by either branch (after bits {path:?})")]
    UncoveredValue { party: Party, value: u32, path: Vec<bool> },
    #[error("empty branch after bits {path:?}")]
    EmptyBranch { path: Vec<bool> },
    #[error("branches overlap on value {value} after bits {path:?}")]
    OverlappingBranches { value: u32, path: Vec<bool> },
    #[error("branches do not partition the speaker's candidate set (value {value} lost) after bits {path:?}")]
    BranchesNotExhaustive { value: u32, path: Vec<bool> },
    #[error("leaf rectangle after bits {path:?} is not monochromatic (cells {a} and {b} differ)")]
    LeafNotMonochromatic { path: Vec<bool>, a: Cell, b: Cell },
    #[error("leaf after bits {path:?} announces {announced} but the table holds {actual} at {cell}")]
    WrongOutput { path: Vec<bool>, cell: Cell, announced: OutcomeLabel, actual: OutcomeLabel },
    #[error("protocol dims {protocol:?} do not match table dims {table:?}")]
    DimsMismatch { protocol: Dims, table: Dims },
    #[error(transparent)]
    Tiling(#[from] TilingError),
}

/// A node of the decision tree. Field names match the JSON wire format:
/// `{"speaker":1|2,"branch0":[..],"branch1":[..],"child0":..,"child1":..}`
/// for internal nodes and `{"output":label}` for leaves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProtocolNode {
    Internal {
        speaker: Party,
        branch0: Vec<u32>,
        branch1: Vec<u32>,
        child0: Box<ProtocolNode>,
        child1: Box<ProtocolNode>,
    },
    Leaf { output: OutcomeLabel },
}

impl ProtocolNode {
    pub fn leaf(output: OutcomeLabel) -> ProtocolNode {
        ProtocolNode::Leaf { output }
    }

    pub fn internal(
        speaker: Party,
        branch0: Vec<u32>,
        branch1: Vec<u32>,
        child0: ProtocolNode,
        child1: ProtocolNode,
    ) -> ProtocolNode {
        let mut branch0 = branch0;
        let mut branch1 = branch1;
        branch0.sort_unstable();
        branch1.sort_unstable();
        ProtocolNode::Internal {
            speaker,
            branch0,
            branch1,
            child0: Box::new(child0),
            child1: Box::new(child1),
        }
    }
}

/// The bits sent during one execution plus the announced output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub bits: Vec<bool>,
    pub output: OutcomeLabel,
}

/// Summary returned by a successful validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProtocolStats {
    pub leaf_count: u64,
    pub internal_count: u64,
    pub max_depth: u32,
}

/// A deterministic two-party protocol over a fixed grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Protocol {
    dims: Dims,
    root: ProtocolNode,
}

impl Protocol {
    pub fn new(dims: Dims, root: ProtocolNode) -> Protocol {
        Protocol { dims, root }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn root(&self) -> &ProtocolNode {
        &self.root
    }

    /// Executes the protocol on inputs `(x1, x2)`.
    pub fn run(&self, x1: u32, x2: u32) -> Result<Transcript, ProtocolError> {
        let mut bits = Vec::new();
        let mut node = &self.root;
        loop {
            match node {
                ProtocolNode::Leaf { output } => {
                    return Ok(Transcript { bits, output: output.clone() });
                }
                ProtocolNode::Internal { speaker, branch0, branch1, child0, child1 } => {
                    let value = match speaker {
                        Party::One => x1,
                        Party::Two => x2,
                    };
                    if branch0.binary_search(&value).is_ok() {
                        bits.push(false);
                        node = child0;
                    } else if branch1.binary_search(&value).is_ok() {
                        bits.push(true);
                        node = child1;
                    } else {
                        return Err(ProtocolError::UncoveredValue {
                            party: *speaker,
                            value,
                            path: bits,
                        });
                    }
                }
            }
        }
    }

    /// Maximum number of decision bits over all inputs. The final output
    /// announcement is fixed by the leaf and excluded.
    pub fn communication_complexity(&self) -> u32 {
        fn depth(node: &ProtocolNode) -> u32 {
            match node {
                ProtocolNode::Leaf { .. } => 0,
                ProtocolNode::Internal { child0, child1, .. } => {
                    1 + depth(child0).max(depth(child1))
                }
            }
        }
        depth(&self.root)
    }

    /// The monochromatic tiling induced by the protocol: one rectangle per
    /// leaf, formed from the rows and columns that survive the path to it.
    /// Fails if some leaf rectangle is not monochromatic or announces a
    /// label other than the table's.
    pub fn induced_tiling(&self, table: &FunctionTable) -> Result<Tiling, ProtocolError> {
        if self.dims != table.dims() {
            return Err(ProtocolError::DimsMismatch { protocol: self.dims, table: table.dims() });
        }
        let rows: Vec<u32> = (0..self.dims.rows).collect();
        let cols: Vec<u32> = (0..self.dims.cols).collect();
        let mut tiles = Vec::new();
        let mut path = Vec::new();
        self.walk_leaves(&self.root, &rows, &cols, &mut path, &mut |rect, output, path| {
            check_leaf(rect, output, table, path)?;
            tiles.push(rect.clone());
            Ok(())
        })?;
        Ok(Tiling::new(tiles, self.dims)?)
    }

    /// Structural and semantic validation: branches must partition the
    /// speaker's candidate set with both halves nonempty (every bit is
    /// meaningful), and every leaf rectangle must be monochromatic with the
    /// announced label equal to the table's. Reports the first violation.
    pub fn validate(&self, table: &FunctionTable) -> Result<ProtocolStats, ProtocolError> {
        if self.dims != table.dims() {
            return Err(ProtocolError::DimsMismatch { protocol: self.dims, table: table.dims() });
        }
        let rows: Vec<u32> = (0..self.dims.rows).collect();
        let cols: Vec<u32> = (0..self.dims.cols).collect();
        let mut stats = ProtocolStats { leaf_count: 0, internal_count: 0, max_depth: 0 };
        let mut path = Vec::new();
        validate_node(&self.root, &rows, &cols, table, &mut path, &mut stats)?;
        Ok(stats)
    }

    fn walk_leaves<F>(
        &self,
        node: &ProtocolNode,
        rows: &[u32],
        cols: &[u32],
        path: &mut Vec<bool>,
        visit: &mut F,
    ) -> Result<(), ProtocolError>
    where
        F: FnMut(&Rect, &OutcomeLabel, &[bool]) -> Result<(), ProtocolError>,
    {
        match node {
            ProtocolNode::Leaf { output } => {
                let rect = Rect::new(rows.to_vec(), cols.to_vec())
                    .map_err(|_| ProtocolError::EmptyBranch { path: path.clone() })?;
                visit(&rect, output, path)
            }
            ProtocolNode::Internal { speaker, branch0, branch1, child0, child1 } => {
                let current = match speaker {
                    Party::One => rows,
                    Party::Two => cols,
                };
                let keep0 = intersect_sorted(current, branch0);
                let keep1 = intersect_sorted(current, branch1);
                for (bit, keep, child) in
                    [(false, &keep0, child0.as_ref()), (true, &keep1, child1.as_ref())]
                {
                    if keep.is_empty() {
                        return Err(ProtocolError::EmptyBranch { path: path.clone() });
                    }
                    path.push(bit);
                    match speaker {
                        Party::One => self.walk_leaves(child, keep, cols, path, visit)?,
                        Party::Two => self.walk_leaves(child, rows, keep, path, visit)?,
                    }
                    path.pop();
                }
                Ok(())
            }
        }
    }
}

fn check_leaf(
    rect: &Rect,
    output: &OutcomeLabel,
    table: &FunctionTable,
    path: &[bool],
) -> Result<(), ProtocolError> {
    let first = rect.first_cell();
    let expected = table.label(first);
    for cell in rect.cells() {
        let actual = table.label(cell);
        if actual != expected {
            return Err(ProtocolError::LeafNotMonochromatic {
                path: path.to_vec(),
                a: first,
                b: cell,
            });
        }
    }
    if output != expected {
        return Err(ProtocolError::WrongOutput {
            path: path.to_vec(),
            cell: first,
            announced: output.clone(),
            actual: expected.clone(),
        });
    }
    Ok(())
}

fn validate_node(
    node: &ProtocolNode,
    rows: &[u32],
    cols: &[u32],
    table: &FunctionTable,
    path: &mut Vec<bool>,
    stats: &mut ProtocolStats,
) -> Result<(), ProtocolError> {
    match node {
        ProtocolNode::Leaf { output } => {
            stats.leaf_count += 1;
            stats.max_depth = stats.max_depth.max(path.len() as u32);
            let rect = Rect::new(rows.to_vec(), cols.to_vec())
                .map_err(|_| ProtocolError::EmptyBranch { path: path.clone() })?;
            check_leaf(&rect, output, table, path)
        }
        ProtocolNode::Internal { speaker, branch0, branch1, child0, child1 } => {
            stats.internal_count += 1;
            let current = match speaker {
                Party::One => rows,
                Party::Two => cols,
            };
            if let Some(&value) = branch0.iter().find(|v| branch1.binary_search(v).is_ok()) {
                return Err(ProtocolError::OverlappingBranches { value, path: path.clone() });
            }
            let keep0 = intersect_sorted(current, branch0);
            let keep1 = intersect_sorted(current, branch1);
            if keep0.is_empty() || keep1.is_empty() {
                return Err(ProtocolError::EmptyBranch { path: path.clone() });
            }
            // branches must cover the inherited candidate set exactly
            if keep0.len() + keep1.len() != current.len() {
                let lost = current
                    .iter()
                    .find(|v| {
                        branch0.binary_search(v).is_err() && branch1.binary_search(v).is_err()
                    })
                    .copied()
                    .unwrap_or(current[0]);
                return Err(ProtocolError::BranchesNotExhaustive { value: lost, path: path.clone() });
            }
            for (bit, keep, child) in
                [(false, keep0, child0.as_ref()), (true, keep1, child1.as_ref())]
            {
                path.push(bit);
                match speaker {
                    Party::One => validate_node(child, &keep, cols, table, path, stats)?,
                    Party::Two => validate_node(child, rows, &keep, table, path, stats)?,
                }
                path.pop();
            }
            Ok(())
        }
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Decides whether a tiling can be induced by some communication protocol.
///
/// A block of more than one tile is splittable only along an axis whose
/// co-occurrence graph (indices joined when they share a tile) is
/// disconnected; each connected component must then recursively be
/// inducible. A tiling that is connected on both axes and has more than one
/// tile admits no meaningful first bit.
pub fn is_protocol_inducible(tiling: &Tiling) -> Result<bool, TilingError> {
    let tiles: Vec<&Rect> = tiling.tiles().iter().collect();
    Ok(splittable(&tiles))
}

fn splittable(tiles: &[&Rect]) -> bool {
    if tiles.len() <= 1 {
        return true;
    }
    for axis in [Party::One, Party::Two] {
        if let Some(groups) = axis_components(tiles, axis) {
            return groups.iter().all(|g| splittable(g));
        }
    }
    false
}

/// Groups tiles by connected component of the axis co-occurrence graph;
/// `None` if the graph is connected.
fn axis_components<'a>(tiles: &[&'a Rect], axis: Party) -> Option<Vec<Vec<&'a Rect>>> {
    use alloc::collections::BTreeMap;

    // union-find over axis indices, keyed sparsely
    let mut parent: BTreeMap<u32, u32> = BTreeMap::new();
    fn find(parent: &mut BTreeMap<u32, u32>, v: u32) -> u32 {
        let mut root = v;
        while let Some(&p) = parent.get(&root) {
            if p == root {
                break;
            }
            root = p;
        }
        let mut cur = v;
        while let Some(&p) = parent.get(&cur) {
            if p == cur {
                break;
            }
            parent.insert(cur, root);
            cur = p;
        }
        parent.entry(v).or_insert(root);
        root
    }

    let axis_indices = |tile: &'a Rect| match axis {
        Party::One => tile.rows(),
        Party::Two => tile.cols(),
    };
    for tile in tiles {
        let idx = axis_indices(tile);
        parent.entry(idx[0]).or_insert(idx[0]);
        let first = find(&mut parent, idx[0]);
        for &v in &idx[1..] {
            parent.entry(v).or_insert(v);
            let root = find(&mut parent, v);
            parent.insert(root, first);
        }
    }
    let mut groups: BTreeMap<u32, Vec<&Rect>> = BTreeMap::new();
    for tile in tiles {
        let root = find(&mut parent, axis_indices(tile)[0]);
        groups.entry(root).or_default().push(tile);
    }
    if groups.len() > 1 {
        Some(groups.into_values().collect())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemSpec;

    #[test]
    fn pinwheel_is_not_inducible() {
        let rect = |rows: &[u32], cols: &[u32]| Rect::new(rows.to_vec(), cols.to_vec()).unwrap();
        let tiles = alloc::vec![
            rect(&[0], &[0, 1]),
            rect(&[0, 1], &[2]),
            rect(&[2], &[1, 2]),
            rect(&[1, 2], &[0]),
            rect(&[1], &[1]),
        ];
        let tiling = Tiling::new(tiles, Dims::new(3, 3)).unwrap();
        assert!(!is_protocol_inducible(&tiling).unwrap());
    }

    #[test]
    fn single_tile_is_inducible() {
        let full = Rect::new(alloc::vec![0, 1], alloc::vec![0, 1]).unwrap();
        let tiling = Tiling::new(alloc::vec![full], Dims::new(2, 2)).unwrap();
        assert!(is_protocol_inducible(&tiling).unwrap());
    }

    #[test]
    fn run_reports_uncovered_values() {
        // hand-built node whose branches miss value 1 for party one
        let node = ProtocolNode::internal(
            Party::One,
            alloc::vec![0],
            alloc::vec![],
            ProtocolNode::leaf(OutcomeLabel::Value(0)),
            ProtocolNode::leaf(OutcomeLabel::Value(0)),
        );
        let p = Protocol::new(Dims::new(2, 2), node);
        assert!(matches!(
            p.run(1, 0),
            Err(ProtocolError::UncoveredValue { value: 1, .. })
        ));
    }

    #[test]
    fn validate_rejects_mislabeled_leaf() {
        let table = FunctionTable::build(ProblemSpec::millionaires(1)).unwrap();
        // party one reveals its bit, then both leaves claim party one wins;
        // the (0,1) cell actually belongs to party two
        let node = ProtocolNode::internal(
            Party::One,
            alloc::vec![0],
            alloc::vec![1],
            ProtocolNode::leaf(OutcomeLabel::Winner(Party::One)),
            ProtocolNode::leaf(OutcomeLabel::Winner(Party::One)),
        );
        let p = Protocol::new(table.dims(), node);
        let err = p.validate(&table).unwrap_err();
        assert!(matches!(
            err,
            ProtocolError::LeafNotMonochromatic { .. } | ProtocolError::WrongOutput { .. }
        ));
    }

    #[test]
    fn validate_rejects_empty_branch() {
        let table = FunctionTable::build(ProblemSpec::millionaires(1)).unwrap();
        let node = ProtocolNode::internal(
            Party::Two,
            alloc::vec![0, 1],
            alloc::vec![],
            ProtocolNode::leaf(OutcomeLabel::Winner(Party::One)),
            ProtocolNode::leaf(OutcomeLabel::Winner(Party::One)),
        );
        let p = Protocol::new(table.dims(), node);
        assert!(matches!(p.validate(&table), Err(ProtocolError::EmptyBranch { .. })));
    }
}
