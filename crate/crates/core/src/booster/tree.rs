//! Regression trees over feature bins and best-first (leaf-wise) growth.

use super::binning::BinnedMatrix;
use super::bundling::BundledMatrix;
use super::config::BoosterConfig;
use super::goss::GossSample;
use super::histogram::{row_stats, BinStats, NodeHistogram};
use super::split::{find_best_split, parent_gain, ties_max, SplitContext, SplitInfo};

/// L2 damping in the Newton leaf step.
pub const LEAF_LAMBDA: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        value: f64,
    },
    /// Rows with `bin(feature) <= bin` go to `left`.
    Split {
        feature: usize,
        bin: u32,
        left: usize,
        right: usize,
    },
}

/// Node 0 is the root. Splitting a node appends its left then right child.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn constant(value: f64) -> Self {
        Tree {
            nodes: vec![Node::Leaf { value }],
        }
    }

    /// Leaf value reached by a row given its per-feature bins.
    pub fn predict_bins(&self, bin_of: impl Fn(usize) -> u32) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    bin,
                    left,
                    right,
                } => i = if bin_of(feature) <= bin { left } else { right },
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Checks the structural invariants: every child index is in range and
    /// later than its parent, each non-root node has exactly one parent, and
    /// leaf values are finite.
    pub fn is_well_formed(&self) -> bool {
        let mut parents = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            match *node {
                Node::Leaf { value } if !value.is_finite() => return false,
                Node::Leaf { .. } => {}
                Node::Split { left, right, .. } => {
                    for c in [left, right] {
                        if c <= i || c >= self.nodes.len() {
                            return false;
                        }
                        parents[c] += 1;
                    }
                }
            }
        }
        !self.nodes.is_empty() && parents[0] == 0 && parents[1..].iter().all(|&p| p == 1)
    }
}

/// Newton step `-G / (H + λ)` on weighted sums.
pub fn leaf_value(stats: &BinStats) -> f64 {
    -stats.sum_g() / (stats.sum_h() + LEAF_LAMBDA)
}

struct Pending {
    node: usize,
    rows: Vec<usize>,
    depth: usize,
    stats: BinStats,
}

struct Candidate {
    node: usize,
    parent_term: f64,
    split: SplitInfo,
}

/// Index of the candidate to split next: the largest gain, with ties (see
/// [`ties_max`]) going to the oldest node.
fn next_candidate(cands: &[Candidate]) -> Option<usize> {
    let best = cands
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.split.gain.total_cmp(&b.split.gain))?
        .1;
    cands
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            ties_max(
                c.split.gain,
                best.split.gain,
                best.parent_term + c.parent_term,
            )
        })
        .min_by_key(|(_, c)| c.node)
        .map(|(i, _)| i)
}

/// Inputs shared by every tree of one training run.
pub struct GrowInput<'a> {
    pub binned: &'a BinnedMatrix,
    pub bundled: &'a BundledMatrix,
    pub config: &'a BoosterConfig,
}

/// Grows one tree best-first on the sampled rows.
///
/// `grad` and `hess` are the per-row derivatives for this tree's output
/// dimension. The leaf with the largest admissible gain is split until the
/// tree has `num_leaves` leaves or no leaf can be split (depth limit,
/// `min_samples_leaf`, or no gain above `min_split_gain`).
pub fn grow_tree_leafwise(
    input: &GrowInput<'_>,
    grad: &[f64],
    hess: &[f64],
    sample: &GossSample,
) -> Tree {
    let n = input.binned.n_rows;
    let mut stats = vec![BinStats::default(); n];
    for &r in &sample.top {
        stats[r] = row_stats(grad[r], hess[r], 1.0, false);
    }
    for &r in &sample.rest {
        stats[r] = row_stats(grad[r], hess[r], sample.weight, true);
    }
    let ctx = SplitContext {
        rest_weight: sample.weight,
        n_total: n as f64,
        min_samples_leaf: input.config.min_samples_leaf,
        min_split_gain: input.config.min_split_gain,
    };
    let depth_limit = input.config.depth_limit();

    let mut nodes = vec![Node::Leaf { value: 0.0 }];
    let mut leaves: Vec<Pending> = Vec::new();
    let mut cands: Vec<Candidate> = Vec::new();

    let can_split = |depth: usize| depth_limit.map_or(true, |d| depth < d);
    let evaluate = |node: usize, hist: &NodeHistogram, stats: &BinStats| {
        find_best_split(&hist.views(input.bundled), stats, &ctx).map(|split| Candidate {
            node,
            parent_term: parent_gain(
                stats.sum_g(),
                stats.weighted_count(ctx.rest_weight),
                ctx.n_total,
            ),
            split,
        })
    };

    let root_rows = sample.rows();
    let mut root_stats = BinStats::default();
    for &r in &root_rows {
        root_stats += stats[r];
    }
    let root = Pending {
        node: 0,
        rows: root_rows,
        depth: 0,
        stats: root_stats,
    };
    if can_split(0) {
        let hist = NodeHistogram::build(input.bundled, &root.rows, &stats);
        cands.extend(evaluate(0, &hist, &root.stats));
    }
    leaves.push(root);

    let mut n_leaves = 1;
    while n_leaves < input.config.num_leaves {
        let Some(i) = next_candidate(&cands) else {
            break;
        };
        let Candidate { node, split, .. } = cands.swap_remove(i);
        let pos = leaves
            .iter()
            .position(|p| p.node == node)
            .expect("pending leaf");
        let parent = leaves.swap_remove(pos);
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = parent
            .rows
            .iter()
            .copied()
            .partition(|&r| input.binned.bin(r, split.feature) <= split.bin);
        let left_id = nodes.len();
        nodes.push(Node::Leaf { value: 0.0 });
        nodes.push(Node::Leaf { value: 0.0 });
        nodes[node] = Node::Split {
            feature: split.feature,
            bin: split.bin,
            left: left_id,
            right: left_id + 1,
        };
        n_leaves += 1;

        let depth = parent.depth + 1;
        let child_hists = if can_split(depth) {
            [&left_rows, &right_rows]
                .map(|rows| Some(NodeHistogram::build(input.bundled, rows, &stats)))
        } else {
            [None, None]
        };
        for ((id, rows), hist) in [(left_id, left_rows), (left_id + 1, right_rows)]
            .into_iter()
            .zip(child_hists)
        {
            // Summed from the rows themselves: with bundle conflicts the
            // histogram totals can differ slightly from the partition.
            let mut child_stats = BinStats::default();
            for &r in &rows {
                child_stats += stats[r];
            }
            let child = Pending {
                node: id,
                rows,
                depth,
                stats: child_stats,
            };
            if let Some(hist) = hist {
                cands.extend(evaluate(id, &hist, &child.stats));
            }
            leaves.push(child);
        }
    }

    for p in &leaves {
        nodes[p.node] = Node::Leaf {
            value: leaf_value(&p.stats),
        };
    }
    Tree { nodes }
}
