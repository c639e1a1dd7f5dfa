//! Shared generators, independent oracles and randomized case runners for
//! the integration and acceptance tests. The oracles never call the code
//! under test; the runners call it and compare against the oracles.

#![allow(dead_code)]

use anova_gbdt::booster::{
    bin_features, compute_gradients, direct_feature_histogram, efb_bundle, goss_sample_magnitudes,
    row_stats, train, train_with_log, BinMapper, BinStats, BoosterConfig, BundleHistogram,
    FeatureBins, Node, Objective, SparseHistogram, Tree,
};
use anova_gbdt::data::Dataset;
use anova_gbdt::metrics::{
    accuracy, binary_counts, f1, fold_average, macro_report, precision, sensitivity, specificity,
    ConfusionMatrix, MetricsReport,
};
use anova_gbdt::rng::CounterRng;
use anova_gbdt::selection::anova_f_scores;

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Labels with every class present at least `min_per_class` times, shuffled.
pub fn random_labels(rng: &mut CounterRng, n: usize, c: usize, min_per_class: usize) -> Vec<usize> {
    assert!(n >= c * min_per_class);
    let mut labels: Vec<usize> = (0..c * min_per_class).map(|i| i % c).collect();
    while labels.len() < n {
        labels.push(rng.below(c as u64) as usize);
    }
    rng.shuffle(&mut labels);
    labels
}

/// A column of one of several shapes: continuous, small integers, sparse,
/// class-shifted, or constant.
fn random_column(rng: &mut CounterRng, labels: &[usize]) -> Vec<f64> {
    let kind = rng.below(5);
    let scale = 0.1 + 10.0 * rng.next_f64();
    let offset = 20.0 * (rng.next_f64() - 0.5);
    labels
        .iter()
        .map(|&y| match kind {
            0 => offset + scale * rng.next_gaussian(),
            1 => rng.below(5) as f64,
            2 => {
                if rng.next_f64() < 0.7 {
                    0.0
                } else {
                    scale * rng.next_gaussian()
                }
            }
            3 => y as f64 * scale + rng.next_gaussian(),
            _ => offset,
        })
        .collect()
}

/// Row-major features of mixed column shapes for the given labels.
pub fn random_features(rng: &mut CounterRng, labels: &[usize], s: usize) -> Vec<f64> {
    let cols: Vec<Vec<f64>> = (0..s).map(|_| random_column(rng, labels)).collect();
    (0..labels.len())
        .flat_map(|i| cols.iter().map(move |c| c[i]))
        .collect()
}

pub fn random_dataset(
    rng: &mut CounterRng,
    n: usize,
    s: usize,
    c: usize,
    min_per_class: usize,
) -> Dataset {
    let labels = random_labels(rng, n, c, min_per_class);
    let features = random_features(rng, &labels, s);
    Dataset::new(features, labels, names("f", s), names("class", c)).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

// ---------------------------------------------------------------------------
// ANOVA

/// Textbook one-way ANOVA, computed column by column with explicit class
/// buckets: means first, then sums of squared deviations.
pub fn anova_oracle(columns: &[Vec<f64>], labels: &[usize], c: usize) -> Vec<f64> {
    let n = labels.len();
    columns
        .iter()
        .map(|col| {
            let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); c];
            for (&v, &y) in col.iter().zip(labels) {
                buckets[y].push(v);
            }
            let avg = |xs: &[f64]| {
                if xs.iter().all(|&x| x == xs[0]) {
                    xs[0]
                } else {
                    xs.iter().sum::<f64>() / xs.len() as f64
                }
            };
            let grand = avg(col);
            let mut ssb = 0.0;
            let mut ssw = 0.0;
            for b in &buckets {
                let m = avg(b);
                ssb += b.len() as f64 * (m - grand).powi(2);
                for &x in b {
                    ssw += (x - m).powi(2);
                }
            }
            let msb = ssb / (c as f64 - 1.0);
            let msw = ssw / (n as f64 - c as f64);
            match (msb > 0.0, msw > 0.0) {
                (_, true) => msb / msw,
                (true, false) => f64::INFINITY,
                (false, false) => 0.0,
            }
        })
        .collect()
}

pub fn columns_of(ds: &Dataset) -> Vec<Vec<f64>> {
    (0..ds.n_features())
        .map(|j| (0..ds.n_rows()).map(|i| ds.row(i)[j]).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// Losses, written out directly for finite differences.

pub fn logistic_loss(raw: f64, y: usize) -> f64 {
    // ln(1 + e^-z) for the signed margin z, without cancellation.
    let z = if y == 1 { raw } else { -raw };
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

pub fn softmax_loss(raw: &[f64], y: usize) -> f64 {
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = raw.iter().map(|r| (r - max).exp()).sum();
    max + z.ln() - raw[y]
}

/// Central first and second differences of `f` at `x`. The steps balance
/// truncation against rounding for losses of size up to about 10.
pub fn central_differences(f: impl Fn(f64) -> f64, x: f64) -> (f64, f64) {
    let e1 = 1e-5;
    let d1 = (f(x + e1) - f(x - e1)) / (2.0 * e1);
    let e2 = 1e-3;
    let d2 = (f(x + e2) - 2.0 * f(x) + f(x - e2)) / (e2 * e2);
    (d1, d2)
}

// ---------------------------------------------------------------------------
// Exact rational arithmetic for the metric identities.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: i128,
    pub den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Ratio {
    pub fn new(num: i128, den: i128) -> Option<Ratio> {
        if den == 0 {
            return None;
        }
        let g = gcd(num, den).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Some(Ratio {
            num: sign * num / g,
            den: sign * den / g,
        })
    }

    pub fn add(self, o: Ratio) -> Ratio {
        Ratio::new(self.num * o.den + o.num * self.den, self.den * o.den).unwrap()
    }

    pub fn div_int(self, k: i128) -> Ratio {
        Ratio::new(self.num, self.den * k).unwrap()
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Correctly rounded when both parts fit in 53 bits.
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Per-class one-vs-rest counts straight from the matrix definition.
pub fn ovr_counts(cm: &[Vec<u64>], p: usize) -> (i128, i128, i128, i128) {
    let c = cm.len();
    let (mut tp, mut tn, mut fp, mut fn_) = (0i128, 0i128, 0i128, 0i128);
    for t in 0..c {
        for q in 0..c {
            let v = cm[t][q] as i128;
            match (t == p, q == p) {
                (true, true) => tp += v,
                (true, false) => fn_ += v,
                (false, true) => fp += v,
                (false, false) => tn += v,
            }
        }
    }
    (tp, tn, fp, fn_)
}

/// Exact sensitivity, specificity, precision and F1 of one class. F1 is
/// undefined whenever precision or sensitivity is, or both are zero.
pub fn exact_class_metrics(cm: &[Vec<u64>], p: usize) -> [Option<Ratio>; 4] {
    let (tp, tn, fp, fn_) = ovr_counts(cm, p);
    let sens = Ratio::new(tp, tp + fn_);
    let spec = Ratio::new(tn, tn + fp);
    let prec = Ratio::new(tp, tp + fp);
    let f1 = match (prec, sens) {
        (Some(pr), Some(se)) if !(pr.is_zero() && se.is_zero()) => {
            // 2PS/(P+S) reduces to 2TP/(2TP+FP+FN).
            Ratio::new(2 * tp, 2 * tp + fp + fn_)
        }
        _ => None,
    };
    [sens, spec, prec, f1]
}

pub fn exact_accuracy(cm: &[Vec<u64>]) -> Option<Ratio> {
    let total: u64 = cm.iter().flatten().sum();
    let trace: u64 = (0..cm.len()).map(|i| cm[i][i]).sum();
    Ratio::new(trace as i128, total as i128)
}

/// Exact mean of the defined values.
pub fn exact_mean(values: &[Option<Ratio>]) -> Option<Ratio> {
    let defined: Vec<Ratio> = values.iter().flatten().copied().collect();
    let k = defined.len() as i128;
    let sum = defined.into_iter().reduce(|a, b| a.add(b))?;
    Some(sum.div_int(k))
}

pub fn random_confusion(rng: &mut CounterRng, c: usize, max_cell: u64) -> Vec<Vec<u64>> {
    (0..c)
        .map(|_| {
            (0..c)
                .map(|_| {
                    // Zero cells often enough to hit undefined metrics.
                    if rng.below(4) == 0 {
                        0
                    } else {
                        rng.below(max_cell + 1)
                    }
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Reference tree builder: exhaustive exact-gain search on raw feature values.

#[derive(Debug, Clone, PartialEq)]
pub enum RefNode {
    Leaf(f64),
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct RefParams {
    pub num_leaves: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub min_split_gain: f64,
}

const REF_LAMBDA: f64 = 1e-3;
/// Relative width inside which two gains count as tied.
const REF_TIE: f64 = 1e-12;
/// Relative slack applied to the admissibility test.
const REF_SLACK: f64 = 1e-10;

#[derive(Debug, Clone)]
struct RefCandidate {
    gain: f64,
    parent_term: f64,
    feature: usize,
    threshold: f64,
}

fn sum(xs: &[usize], v: &[f64]) -> f64 {
    xs.iter().map(|&i| v[i]).sum()
}

/// Best admissible split of `rows`, scanning every feature and every
/// distinct value as a threshold. Near-ties go to the lowest
/// (feature, threshold).
fn ref_best_split(x: &Dataset, g: &[f64], rows: &[usize], p: &RefParams) -> Option<RefCandidate> {
    let n = x.n_rows() as f64;
    let g_all = sum(rows, g);
    let parent_term = g_all * g_all / rows.len() as f64 / n;
    let mut all = Vec::new();
    for f in 0..x.n_features() {
        let mut values: Vec<f64> = rows.iter().map(|&r| x.row(r)[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for &t in &values[..values.len().saturating_sub(1)] {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x.row(i)[f] <= t);
            if l.len() < p.min_samples_leaf || r.len() < p.min_samples_leaf {
                continue;
            }
            let gl = sum(&l, g);
            let gr = sum(&r, g);
            let v = (gl * gl / l.len() as f64 + gr * gr / r.len() as f64) / n;
            all.push(RefCandidate {
                gain: v - parent_term,
                parent_term,
                feature: f,
                threshold: t,
            });
        }
    }
    let max = all.iter().map(|c| c.gain).fold(f64::NEG_INFINITY, f64::max);
    let tol = REF_TIE * (max.abs() + parent_term);
    let best = all.into_iter().find(|c| c.gain >= max - tol)?;
    (best.gain > p.min_split_gain + REF_SLACK * parent_term).then_some(best)
}

/// Best-first tree over all rows with unit weights. Node 0 is the root; a
/// split appends the left child then the right child. The leaf with the
/// largest gain is split next, near-ties going to the lowest node id.
pub fn reference_tree(x: &Dataset, g: &[f64], h: &[f64], p: &RefParams) -> Vec<RefNode> {
    struct Open {
        node: usize,
        rows: Vec<usize>,
        depth: usize,
        split: Option<RefCandidate>,
    }
    let evaluate = |rows: &[usize], depth: usize| {
        if p.max_depth.is_some_and(|d| depth >= d) {
            None
        } else {
            ref_best_split(x, g, rows, p)
        }
    };
    let all_rows: Vec<usize> = (0..x.n_rows()).collect();
    let mut nodes = vec![RefNode::Leaf(0.0)];
    let mut open = vec![Open {
        node: 0,
        split: evaluate(&all_rows, 0),
        rows: all_rows,
        depth: 0,
    }];
    let mut leaves = 1;
    while leaves < p.num_leaves {
        // The open leaf with the largest gain, then the oldest leaf whose
        // gain ties it.
        let Some(top) = open
            .iter()
            .filter_map(|o| o.split.as_ref())
            .max_by(|a, b| a.gain.total_cmp(&b.gain))
            .cloned()
        else {
            break;
        };
        let pick = open
            .iter()
            .enumerate()
            .filter(|(_, o)| {
                o.split.as_ref().is_some_and(|s| {
                    s.gain
                        >= top.gain - REF_TIE * (top.gain.abs() + top.parent_term + s.parent_term)
                })
            })
            .min_by_key(|(_, o)| o.node)
            .map(|(i, _)| i)
            .unwrap();
        let o = open.remove(pick);
        let s = o.split.unwrap();
        let (l, r): (Vec<usize>, Vec<usize>) = o
            .rows
            .iter()
            .partition(|&&i| x.row(i)[s.feature] <= s.threshold);
        let left = nodes.len();
        nodes.push(RefNode::Leaf(0.0));
        nodes.push(RefNode::Leaf(0.0));
        nodes[o.node] = RefNode::Split {
            feature: s.feature,
            threshold: s.threshold,
            left,
            right: left + 1,
        };
        leaves += 1;
        for (id, rows) in [(left, l), (left + 1, r)] {
            open.push(Open {
                node: id,
                split: evaluate(&rows, o.depth + 1),
                rows,
                depth: o.depth + 1,
            });
        }
    }
    for o in &open {
        nodes[o.node] = RefNode::Leaf(-sum(&o.rows, g) / (sum(&o.rows, h) + REF_LAMBDA));
    }
    nodes
}

pub fn ref_predict(tree: &[RefNode], row: &[f64]) -> f64 {
    let mut i = 0;
    loop {
        match tree[i] {
            RefNode::Leaf(v) => return v,
            RefNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                i = if row[feature] <= threshold {
                    left
                } else {
                    right
                }
            }
        }
    }
}

/// Per-row gradients and hessians of the logistic or softmax loss, one
/// column per output dimension.
pub fn ref_gradients(
    raw: &[Vec<f64>],
    labels: &[usize],
    multiclass: bool,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let dims = raw[0].len();
    let mut out = vec![(Vec::new(), Vec::new()); dims];
    for (r, &y) in raw.iter().zip(labels) {
        let probs: Vec<f64> = if multiclass {
            let z: f64 = r.iter().map(|v| v.exp()).sum();
            r.iter().map(|v| v.exp() / z).collect()
        } else {
            vec![1.0 / (1.0 + (-r[0]).exp())]
        };
        for (k, p) in probs.into_iter().enumerate() {
            let target = if multiclass { y == k } else { y == 1 };
            out[k].0.push(p - if target { 1.0 } else { 0.0 });
            out[k].1.push((p * (1.0 - p)).max(1e-16));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Randomized case runners. Each returns `Err` with a description on the
// first mismatch.

/// Node-for-node comparison of a trained tree with a reference tree. The
/// trained tree thresholds on bins; the reference threshold must fall in
/// the same bin.
pub fn compare_trees(t: &Tree, r: &[RefNode], mappers: &[BinMapper]) -> Result<(), String> {
    if t.nodes.len() != r.len() {
        return Err(format!("{} nodes vs reference {}", t.nodes.len(), r.len()));
    }
    for (i, (a, b)) in t.nodes.iter().zip(r).enumerate() {
        match (a, b) {
            (Node::Leaf { value }, RefNode::Leaf(v)) => {
                if (value - v).abs() > 1e-10 {
                    return Err(format!("node {i}: leaf {value} vs reference {v}"));
                }
            }
            (
                Node::Split {
                    feature,
                    bin,
                    left,
                    right,
                },
                RefNode::Split {
                    feature: rf,
                    threshold,
                    left: rl,
                    right: rr,
                },
            ) => {
                let rbin = mappers[*rf].bin(*threshold);
                if (feature, bin, left, right) != (rf, &rbin, rl, rr) {
                    return Err(format!(
                        "node {i}: split ({feature}, bin {bin}) vs reference ({rf}, <= {threshold} in bin {rbin})"
                    ));
                }
            }
            _ => return Err(format!("node {i}: {a:?} vs reference {b:?}")),
        }
    }
    Ok(())
}

/// Trains with a = 1 on a random dataset (n <= 200, s <= 10) and replays
/// the boosting loop with the reference builder, comparing every tree.
pub fn degeneracy_case(seed: u64) -> Result<(), String> {
    let mut rng = CounterRng::new(seed);
    let multiclass = rng.below(3) == 0;
    let c = if multiclass { 3 } else { 2 };
    let n = 20 + rng.below(181) as usize;
    let s = 1 + rng.below(10) as usize;
    let ds = random_dataset(&mut rng, n, s, c, 2);
    let max_depth = [0, 2, 3, 4, 5][rng.below(5) as usize];
    let mut num_leaves = 2 + rng.below(15) as usize;
    if max_depth > 0 {
        num_leaves = num_leaves.min(1 << max_depth);
    }
    let params = RefParams {
        num_leaves,
        max_depth: (max_depth > 0).then_some(max_depth as usize),
        min_samples_leaf: [1, 2, 5][rng.below(3) as usize],
        min_split_gain: if rng.below(2) == 0 {
            0.0
        } else {
            1e-4 * rng.next_f64()
        },
    };
    let eta = 0.1 + 0.9 * rng.next_f64();
    let num_trees = 4;
    let cfg = BoosterConfig {
        num_trees,
        learning_rate: eta,
        max_depth,
        num_leaves,
        min_samples_leaf: params.min_samples_leaf,
        min_split_gain: params.min_split_gain,
        goss_top_rate: 1.0,
        goss_other_rate: 0.0,
        objective: if multiclass {
            Objective::MulticlassSoftmax
        } else {
            Objective::BinaryLogistic
        },
        num_classes: c,
        seed,
        ..BoosterConfig::default()
    };
    let e = train(&ds, &cfg).map_err(|err| err.to_string())?;

    let counts: Vec<f64> = (0..c)
        .map(|k| ds.labels().iter().filter(|&&y| y == k).count() as f64)
        .collect();
    let base: Vec<f64> = if multiclass {
        counts.iter().map(|&ck| (ck / n as f64).ln()).collect()
    } else {
        vec![(counts[1] / counts[0]).ln()]
    };
    let dims = base.len();
    let mut raw = vec![base; n];
    for m in 0..num_trees {
        let grads = ref_gradients(&raw, ds.labels(), multiclass);
        let mut outputs = Vec::with_capacity(dims);
        for (k, (g, h)) in grads.iter().enumerate() {
            let reference = reference_tree(&ds, g, h, &params);
            compare_trees(&e.trees[m * dims + k], &reference, &e.mappers)
                .map_err(|msg| format!("seed {seed}, iteration {m}, output {k}: {msg}"))?;
            outputs.push(reference);
        }
        for (i, r) in raw.iter_mut().enumerate() {
            for (k, tree) in outputs.iter().enumerate() {
                r[k] += eta * ref_predict(tree, ds.row(i));
            }
        }
    }
    Ok(())
}

/// Outcome of the GOSS Monte-Carlo check.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarlo {
    pub mean: f64,
    pub exact: f64,
    pub std_error: f64,
}

impl MonteCarlo {
    pub fn within(&self, k: f64) -> bool {
        (self.mean - self.exact).abs() <= k * self.std_error
    }
}

/// Resamples GOSS `resamples` times at (a, b) over `n` random gradients and
/// averages the weighted gradient sum over a fixed random left partition.
pub fn goss_monte_carlo(seed: u64, n: usize, a: f64, b: f64, resamples: u64) -> MonteCarlo {
    let mut rng = CounterRng::new(seed);
    let g: Vec<f64> = (0..n)
        .map(|_| rng.next_gaussian() * (0.1 + rng.next_f64()) + 0.3)
        .collect();
    let left: Vec<bool> = (0..n).map(|_| rng.next_f64() < 0.5).collect();
    let magnitudes: Vec<f64> = g.iter().map(|v| v.abs()).collect();
    let exact: f64 = (0..n).filter(|&i| left[i]).map(|i| g[i]).sum();
    let root = rng.fork(7);
    let mut estimates = Vec::with_capacity(resamples as usize);
    for r in 0..resamples {
        let s = goss_sample_magnitudes(&magnitudes, a, b, &mut root.fork(r)).unwrap();
        let top: f64 = s.top.iter().filter(|&&i| left[i]).map(|&i| g[i]).sum();
        let rest: f64 = s.rest.iter().filter(|&&i| left[i]).map(|&i| g[i]).sum();
        estimates.push(top + s.weight * rest);
    }
    let k = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / k;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0);
    MonteCarlo {
        mean,
        exact,
        std_error: (var / k).sqrt(),
    }
}

/// Random sparse matrix (every column density <= 0.2). Even seeds build
/// mutually exclusive column groups so bundles actually form.
pub fn sparse_dataset(seed: u64) -> Dataset {
    let mut rng = CounterRng::new(seed);
    let n = 50 + rng.below(151) as usize;
    let s = 2 + rng.below(19) as usize;
    let labels = random_labels(&mut rng, n, 2, 2);
    let mut x = vec![0.0; n * s];
    let value = |rng: &mut CounterRng| {
        if rng.below(2) == 0 {
            1.0 + rng.below(4) as f64
        } else {
            rng.next_gaussian() * 3.0
        }
    };
    if seed % 2 == 0 {
        let mut start = 0;
        while start < s {
            let size = (1 + rng.below(4) as usize).min(s - start);
            let active = 0.2 * size as f64;
            for i in 0..n {
                if rng.next_f64() < active {
                    let f = start + rng.below(size as u64) as usize;
                    x[i * s + f] = value(&mut rng);
                }
            }
            start += size;
        }
    } else {
        for j in 0..s {
            let density = 0.02 + 0.18 * rng.next_f64();
            for i in 0..n {
                if rng.next_f64() < density {
                    x[i * s + j] = value(&mut rng);
                }
            }
        }
    }
    Dataset::new(x, labels, names("f", s), names("class", 2)).unwrap()
}

fn nonempty(bins: &impl FeatureBins) -> Vec<(u32, BinStats)> {
    let mut out = Vec::new();
    bins.visit(&mut |b, s| {
        out.push((b, s));
        true
    });
    out
}

/// EFB losslessness on one sparse matrix at conflict rate 0: bundled cells
/// decode to the original bins, bundled histograms equal direct per-feature
/// histograms for several row subsets, and training with and without
/// bundling gives identical trees and predictions. Returns the number of
/// bundles and features.
pub fn efb_case(seed: u64) -> Result<(usize, usize), String> {
    let ds = sparse_dataset(seed);
    let mut rng = CounterRng::new(seed).fork(1);
    let max_bin = [4, 16, 255][rng.below(3) as usize];
    let binned = bin_features(&ds, max_bin).map_err(|e| e.to_string())?;
    let bundled = efb_bundle(&binned, 0.0);
    let (n, s) = (ds.n_rows(), ds.n_features());
    for r in 0..n {
        for f in 0..s {
            if bundled.feature_bin(r, f) != binned.bin(r, f) {
                return Err(format!("seed {seed}: row {r} feature {f} decodes wrongly"));
            }
        }
    }
    let stats: Vec<BinStats> = (0..n)
        .map(|_| {
            let rest = rng.below(3) == 0;
            row_stats(
                rng.next_gaussian(),
                rng.next_f64(),
                if rest { 4.0 } else { 1.0 },
                rest,
            )
        })
        .collect();
    let all: Vec<usize> = (0..n).collect();
    let half: Vec<usize> = all.iter().copied().filter(|_| rng.below(2) == 0).collect();
    let few: Vec<usize> = all.iter().copied().filter(|_| rng.below(10) == 0).collect();
    for rows in [&all, &half, &few] {
        let dense = BundleHistogram::build(&bundled, rows, &stats);
        let sparse = SparseHistogram::build(&bundled, rows, &stats);
        let (dv, sv) = (dense.views(&bundled), sparse.views(&bundled));
        for f in 0..s {
            let direct = direct_feature_histogram(
                |r| binned.bin(r, f),
                binned.mappers[f].n_bins(),
                rows,
                &stats,
            );
            if dense.feature(&bundled.slots[f]) != direct {
                return Err(format!(
                    "seed {seed}: feature {f} bundled histogram differs"
                ));
            }
            let expected = nonempty(&direct);
            if nonempty(&dv[f]) != expected || nonempty(&sv[f]) != expected {
                return Err(format!("seed {seed}: feature {f} histogram view differs"));
            }
        }
    }

    let cfg = BoosterConfig {
        num_trees: 5,
        learning_rate: 0.3,
        num_leaves: 8,
        max_bin,
        seed,
        ..BoosterConfig::default()
    };
    let with = train(&ds, &cfg).map_err(|e| e.to_string())?;
    let without = train(
        &ds,
        &BoosterConfig {
            bundling: false,
            ..cfg.clone()
        },
    )
    .map_err(|e| e.to_string())?;
    if with.trees != without.trees {
        return Err(format!("seed {seed}: trees differ with bundling"));
    }
    let mut probe = ds.features().to_vec();
    probe.extend((0..20 * s).map(|_| {
        if rng.below(3) == 0 {
            rng.next_gaussian() * 3.0
        } else {
            0.0
        }
    }));
    let pa = with.predict(&probe).map_err(|e| e.to_string())?;
    let pb = without.predict(&probe).map_err(|e| e.to_string())?;
    if pa != pb {
        return Err(format!("seed {seed}: predictions differ with bundling"));
    }
    Ok((bundled.n_bundles(), s))
}

/// Trains with a = 1, γ = 0 on a random dataset and checks the logged
/// training loss never increases.
pub fn monotonicity_case(seed: u64) -> Result<(), String> {
    let mut rng = CounterRng::new(seed);
    let multiclass = rng.below(3) == 0;
    let c = if multiclass { 3 } else { 2 };
    let n = 30 + rng.below(171) as usize;
    let s = 1 + rng.below(10) as usize;
    let ds = random_dataset(&mut rng, n, s, c, 2);
    let cfg = BoosterConfig {
        num_trees: 20 + rng.below(21) as usize,
        learning_rate: 0.05 + 0.45 * rng.next_f64(),
        num_leaves: 2 + rng.below(30) as usize,
        min_split_gain: 0.0,
        goss_top_rate: 1.0,
        goss_other_rate: 0.0,
        objective: if multiclass {
            Objective::MulticlassSoftmax
        } else {
            Objective::BinaryLogistic
        },
        num_classes: c,
        seed,
        ..BoosterConfig::default()
    };
    let (_, log) = train_with_log(&ds, &cfg).map_err(|e| e.to_string())?;
    for (m, w) in log.loss.windows(2).enumerate() {
        if w[1] > w[0] {
            return Err(format!(
                "seed {seed}: loss rose from {} to {} at iteration {}",
                w[0],
                w[1],
                m + 1
            ));
        }
    }
    Ok(())
}

fn check_exact(what: &str, got: Option<f64>, want: Option<Ratio>) -> Result<(), String> {
    match (got, want) {
        (None, None) => Ok(()),
        (Some(g), Some(w)) if g == w.to_f64() => Ok(()),
        _ => Err(format!("{what}: {got:?} vs exact {want:?}")),
    }
}

fn check_close(what: &str, got: Option<f64>, want: Option<Ratio>, tol: f64) -> Result<(), String> {
    match (got, want) {
        (None, None) => Ok(()),
        (Some(g), Some(w)) if rel_close(g, w.to_f64(), tol) => Ok(()),
        _ => Err(format!("{what}: {got:?} vs exact {want:?}")),
    }
}

/// One random confusion matrix against the rational oracles: rates and
/// accuracy exactly (a single correctly rounded division), F1 and macro
/// means within 1e-15 relative, the F1 harmonic identity within 1e-12, the
/// C = 2 accuracy identity and sensitivity + miss rate = 1.
pub fn metrics_case(seed: u64) -> Result<(), String> {
    let mut rng = CounterRng::new(seed);
    let c = 2 + rng.below(4) as usize;
    let max_cell = [3, 50, 100_000][rng.below(3) as usize];
    let cm = random_confusion(&mut rng, c, max_cell);
    let m = ConfusionMatrix { counts: cm.clone() };
    let report = macro_report(&m, &names("c", c));
    check_exact("accuracy", accuracy(&m), exact_accuracy(&cm))?;
    check_exact("report accuracy", report.accuracy, exact_accuracy(&cm))?;
    let mut exact_rows = Vec::new();
    for p in 0..c {
        let b = binary_counts(&m, p).map_err(|e| e.to_string())?;
        let (tp, tn, fp, fn_) = ovr_counts(&cm, p);
        if (b.tp as i128, b.tn as i128, b.fp as i128, b.fn_ as i128) != (tp, tn, fp, fn_) {
            return Err(format!("seed {seed} class {p}: counts {b:?}"));
        }
        if b.total() != m.total() {
            return Err(format!("seed {seed} class {p}: total {}", b.total()));
        }
        let exact = exact_class_metrics(&cm, p);
        let got = [sensitivity(&b), specificity(&b), precision(&b), f1(&b)];
        check_exact("sensitivity", got[0], exact[0])?;
        check_exact("specificity", got[1], exact[1])?;
        check_exact("precision", got[2], exact[2])?;
        check_close("f1", got[3], exact[3], 1e-15)?;
        let row = &report.per_class[p];
        if [row.sensitivity, row.specificity, row.precision, row.f1] != got {
            return Err(format!("seed {seed} class {p}: report row {row:?}"));
        }
        if let (Some(pr), Some(se), Some(f)) = (got[2], got[0], got[3]) {
            if pr > 0.0 && se > 0.0 {
                let harmonic = (1.0 / pr + 1.0 / se) / 2.0;
                if (1.0 / f - harmonic).abs() > 1e-12 * harmonic {
                    return Err(format!(
                        "seed {seed} class {p}: 1/F1 {} vs {harmonic}",
                        1.0 / f
                    ));
                }
            }
        }
        if let Some(se) = got[0] {
            let miss = Ratio::new(fn_, tp + fn_).unwrap().to_f64();
            if (se + miss - 1.0).abs() > 2.0 * f64::EPSILON {
                return Err(format!("seed {seed} class {p}: {se} + {miss} != 1"));
            }
        }
        if c == 2 {
            let binary_acc = Ratio::new(tp + tn, tp + tn + fp + fn_);
            check_exact("two-class accuracy", accuracy(&m), binary_acc)?;
        }
        exact_rows.push(exact);
    }
    let macro_got = [
        report.macro_avg.sensitivity,
        report.macro_avg.specificity,
        report.macro_avg.precision,
        report.macro_avg.f1,
    ];
    for (k, got) in macro_got.into_iter().enumerate() {
        let column: Vec<Option<Ratio>> = exact_rows.iter().map(|r| r[k]).collect();
        check_close("macro", got, exact_mean(&column), 1e-15)?;
    }
    let undefined = exact_rows.iter().flatten().filter(|v| v.is_none()).count();
    if report.excluded.len() != undefined {
        return Err(format!(
            "seed {seed}: {} exclusions vs {undefined} undefined",
            report.excluded.len()
        ));
    }
    Ok(())
}

fn headline(r: &MetricsReport) -> Vec<Option<f64>> {
    let mut v = vec![
        r.accuracy,
        r.macro_avg.sensitivity,
        r.macro_avg.specificity,
        r.macro_avg.precision,
        r.macro_avg.f1,
    ];
    for c in &r.per_class {
        v.extend([c.sensitivity, c.specificity, c.precision, c.f1]);
    }
    v
}

/// Fold averaging on constructed inputs: k copies of one report average
/// to that report exactly, and matrices with dyadic rates average to the
/// exact dyadic mean.
pub fn fold_average_case(seed: u64) -> Result<(), String> {
    let mut rng = CounterRng::new(seed);
    let c = 2 + rng.below(3) as usize;
    let class_names = names("c", c);
    let one = macro_report(
        &ConfusionMatrix {
            counts: random_confusion(&mut rng, c, 40),
        },
        &class_names,
    );
    let k = 2 + rng.below(6) as usize;
    let avg = fold_average(&vec![one.clone(); k]).map_err(|e| e.to_string())?;
    let (a, b) = (headline(&avg), headline(&one));
    if a.len() != b.len()
        || a.iter()
            .zip(&b)
            .any(|(x, y)| x.map(f64::to_bits) != y.map(f64::to_bits))
    {
        return Err(format!("seed {seed}: average of {k} copies differs"));
    }
    // Accuracies 1 and 1/2 (2x2 matrices of 4 samples) average to 3/4.
    let perfect = macro_report(
        &ConfusionMatrix {
            counts: vec![vec![2, 0], vec![0, 2]],
        },
        &names("c", 2),
    );
    let half = macro_report(
        &ConfusionMatrix {
            counts: vec![vec![1, 1], vec![1, 1]],
        },
        &names("c", 2),
    );
    let avg = fold_average(&[perfect, half]).map_err(|e| e.to_string())?;
    if avg.accuracy != Some(0.75) || avg.macro_avg.sensitivity != Some(0.75) {
        return Err(format!("seed {seed}: dyadic average {:?}", avg.accuracy));
    }
    Ok(())
}

/// Analytic gradients and diagonal hessians of both objectives against
/// central differences of the directly written losses, at 10 random points
/// with |raw| <= 5 each, to absolute `tol`.
pub fn gradient_case(seed: u64, tol: f64) -> Result<(), String> {
    let mut rng = CounterRng::new(seed);
    for point in 0..10 {
        let raw = rng.next_f64() * 10.0 - 5.0;
        let y = rng.below(2) as usize;
        let gv = compute_gradients(Objective::BinaryLogistic, &[y], &[raw], 2)
            .map_err(|e| e.to_string())?;
        let (d1, d2) = central_differences(|x| logistic_loss(x, y), raw);
        if (gv.grad[0] - d1).abs() > tol || (gv.hess[0] - d2).abs() > tol {
            return Err(format!(
                "logistic point {point} raw {raw} y {y}: ({}, {}) vs ({d1}, {d2})",
                gv.grad[0], gv.hess[0]
            ));
        }

        let c = 3 + rng.below(3) as usize;
        let raws: Vec<f64> = (0..c).map(|_| rng.next_f64() * 10.0 - 5.0).collect();
        let y = rng.below(c as u64) as usize;
        let gv = compute_gradients(Objective::MulticlassSoftmax, &[y], &raws, c)
            .map_err(|e| e.to_string())?;
        for k in 0..c {
            let f = |x: f64| {
                let mut r = raws.clone();
                r[k] = x;
                softmax_loss(&r, y)
            };
            let (d1, d2) = central_differences(f, raws[k]);
            if (gv.grad[k] - d1).abs() > tol || (gv.hess[k] - d2).abs() > tol {
                return Err(format!(
                    "softmax point {point} class {k}: ({}, {}) vs ({d1}, {d2})",
                    gv.grad[k], gv.hess[k]
                ));
            }
        }
    }
    Ok(())
}

/// 2 to 4 classes of at least 2 rows each, up to 50 rows and 8 features.
pub fn small_dataset(seed: u64) -> Dataset {
    let mut rng = CounterRng::new(seed);
    let c = 2 + rng.below(3) as usize;
    let n = (2 * c + rng.below(51 - 2 * c as u64) as usize).min(50);
    let s = 1 + rng.below(8) as usize;
    random_dataset(&mut rng, n, s, c, 2)
}

/// Relative closeness, with two infinities counting as equal.
pub fn same_score(a: f64, b: f64, tol: f64) -> bool {
    (a.is_infinite() && b.is_infinite()) || rel_close(a, b, tol)
}

/// F statistics of one small dataset against the two-pass oracle (1e-9
/// relative), under a random affine map of every column (1e-9) and under a
/// row permutation (1e-12).
pub fn anova_case(seed: u64) -> Result<(), String> {
    let ds = small_dataset(seed);
    let got = anova_f_scores(&ds).map_err(|e| e.to_string())?;
    let want = anova_oracle(&columns_of(&ds), ds.labels(), ds.n_classes());
    let compare = |what: &str, a: &[f64], b: &[f64], tol: f64| -> Result<(), String> {
        for (j, (x, y)) in a.iter().zip(b).enumerate() {
            if !same_score(*x, *y, tol) {
                return Err(format!("seed {seed} feature {j} {what}: {x} vs {y}"));
            }
        }
        Ok(())
    };
    compare("oracle", &got.scores, &want, 1e-9)?;

    let mut rng = CounterRng::new(seed).fork(1);
    let a = loop {
        let a = (rng.next_f64() - 0.5) * 200.0;
        if a.abs() > 1e-3 {
            break a;
        }
    };
    let b = (rng.next_f64() - 0.5) * 1e4;
    let mapped = Dataset::new(
        ds.features().iter().map(|x| a * x + b).collect(),
        ds.labels().to_vec(),
        ds.feature_names().to_vec(),
        ds.class_names().to_vec(),
    )
    .map_err(|e| e.to_string())?;
    let affine = anova_f_scores(&mapped).map_err(|e| e.to_string())?;
    compare("affine", &got.scores, &affine.scores, 1e-9)?;

    let mut perm: Vec<usize> = (0..ds.n_rows()).collect();
    rng.shuffle(&mut perm);
    let shuffled = ds.subset_rows(&perm).map_err(|e| e.to_string())?;
    let permuted = anova_f_scores(&shuffled).map_err(|e| e.to_string())?;
    compare("permuted", &got.scores, &permuted.scores, 1e-12)
}
