//! Line-oriented text model format.
//!
//! ```text
//! anova-gbdt-model
//! version=1
//! objective=<binary_logistic|multiclass_softmax>
//! num_classes=<int>
//! num_trees=<int>
//! learning_rate=<real>
//! max_depth=<int>
//! num_leaves=<int>
//! min_samples_leaf=<int>
//! min_split_gain=<real>
//! goss_top_rate=<real>
//! goss_other_rate=<real>
//! max_bin=<int>
//! bundling=<true|false>
//! efb_max_conflict_rate=<real>
//! seed=<u64>
//! base_score=<real> [<real> ...]            one per output dimension
//! class <index> <name>                      one line per class
//! feature <index> <name>                    one line per feature
//! bounds <index> <real> [<real> ...]        bin upper bounds, last is inf
//! bundle <index> <feature> [<feature> ...]  one line per bundle
//! tree <index> <node count>                 then one line per node:
//! leaf <real>
//! split <feature> <bin> <left> <right>
//! end
//! checksum=<crc32 of every preceding byte, 8 lowercase hex digits>
//! ```
//!
//! Every line ends with `\n`. Reals use Rust's shortest round-trip notation
//! (`{:?}`), so loading restores bit-identical values. Names run to the end
//! of the line and must not contain line breaks.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::binning::BinMapper;
use super::config::{BoosterConfig, Objective};
use super::ensemble::Ensemble;
use super::tree::{Node, Tree};

pub const MAGIC: &str = "anova-gbdt-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelFormatError {
    #[error("not a model file (missing `{MAGIC}` header)")]
    NotAModel,
    #[error("unsupported model version {found}, expected {FORMAT_VERSION}")]
    Version { found: String },
    #[error("model file is truncated")]
    Truncated,
    #[error("checksum mismatch: file says {stored}, content hashes to {computed}")]
    Checksum { stored: String, computed: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn checksum(bytes: &[u8]) -> String {
    format!("{:08x}", crc32fast::hash(bytes))
}

/// Serialises an ensemble to the text format.
pub fn to_text(e: &Ensemble) -> String {
    let c = &e.config;
    let mut s = String::new();
    let reals = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:?}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(s, "{MAGIC}").unwrap();
    writeln!(s, "version={FORMAT_VERSION}").unwrap();
    writeln!(s, "objective={}", c.objective).unwrap();
    writeln!(s, "num_classes={}", c.num_classes).unwrap();
    writeln!(s, "num_trees={}", c.num_trees).unwrap();
    writeln!(s, "learning_rate={:?}", c.learning_rate).unwrap();
    writeln!(s, "max_depth={}", c.max_depth).unwrap();
    writeln!(s, "num_leaves={}", c.num_leaves).unwrap();
    writeln!(s, "min_samples_leaf={}", c.min_samples_leaf).unwrap();
    writeln!(s, "min_split_gain={:?}", c.min_split_gain).unwrap();
    writeln!(s, "goss_top_rate={:?}", c.goss_top_rate).unwrap();
    writeln!(s, "goss_other_rate={:?}", c.goss_other_rate).unwrap();
    writeln!(s, "max_bin={}", c.max_bin).unwrap();
    writeln!(s, "bundling={}", c.bundling).unwrap();
    writeln!(s, "efb_max_conflict_rate={:?}", c.efb_max_conflict_rate).unwrap();
    writeln!(s, "seed={}", c.seed).unwrap();
    writeln!(s, "base_score={}", reals(&e.base_score)).unwrap();
    for (i, name) in e.class_names.iter().enumerate() {
        writeln!(s, "class {i} {name}").unwrap();
    }
    for (i, name) in e.feature_names.iter().enumerate() {
        writeln!(s, "feature {i} {name}").unwrap();
    }
    for (i, m) in e.mappers.iter().enumerate() {
        writeln!(s, "bounds {i} {}", reals(m.upper_bounds())).unwrap();
    }
    for (i, b) in e.bundles.iter().enumerate() {
        let members: Vec<String> = b.iter().map(usize::to_string).collect();
        writeln!(s, "bundle {i} {}", members.join(" ")).unwrap();
    }
    for (i, t) in e.trees.iter().enumerate() {
        writeln!(s, "tree {i} {}", t.nodes.len()).unwrap();
        for node in &t.nodes {
            match node {
                Node::Leaf { value } => writeln!(s, "leaf {value:?}"),
                Node::Split {
                    feature,
                    bin,
                    left,
                    right,
                } => writeln!(s, "split {feature} {bin} {left} {right}"),
            }
            .unwrap();
        }
    }
    writeln!(s, "end").unwrap();
    let sum = checksum(s.as_bytes());
    writeln!(s, "checksum={sum}").unwrap();
    s
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str), ModelFormatError> {
        let line = self
            .lines
            .get(self.pos)
            .ok_or(ModelFormatError::Truncated)?;
        self.pos += 1;
        Ok((self.pos, line))
    }

    fn err(&self, message: impl Into<String>) -> ModelFormatError {
        ModelFormatError::Parse {
            line: self.pos,
            message: message.into(),
        }
    }

    fn key(&mut self, key: &str) -> Result<&'a str, ModelFormatError> {
        let (_, line) = self.next()?;
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| self.err(format!("expected `{key}=`")))
    }

    fn parse<T: std::str::FromStr>(&self, text: &str, what: &str) -> Result<T, ModelFormatError> {
        text.parse()
            .map_err(|_| self.err(format!("invalid {what} `{text}`")))
    }

    fn key_parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ModelFormatError> {
        let v = self.key(key)?;
        self.parse(v, key)
    }

    /// `<tag> <index> <rest>`, checking the index.
    fn tagged(&mut self, tag: &str, index: usize) -> Result<&'a str, ModelFormatError> {
        let (_, line) = self.next()?;
        let rest = line
            .strip_prefix(tag)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected `{tag}` line")))?;
        let (idx, rest) = rest.split_once(' ').unwrap_or((rest, ""));
        if self.parse::<usize>(idx, "index")? != index {
            return Err(self.err(format!("expected {tag} {index}")));
        }
        Ok(rest)
    }

    fn reals(&self, text: &str) -> Result<Vec<f64>, ModelFormatError> {
        text.split(' ')
            .map(|t| self.parse::<f64>(t, "real"))
            .collect()
    }

    fn peek_starts_with(&self, prefix: &str) -> bool {
        self.lines
            .get(self.pos)
            .is_some_and(|l| l.starts_with(prefix))
    }
}

/// Parses the text format, verifying the checksum first.
pub fn from_text(text: &str) -> Result<Ensemble, ModelFormatError> {
    if !text.starts_with(MAGIC) {
        return Err(ModelFormatError::NotAModel);
    }
    let body_end = text
        .rfind("checksum=")
        .filter(|&i| i == 0 || text.as_bytes()[i - 1] == b'\n')
        .ok_or(ModelFormatError::Truncated)?;
    let body = &text[..body_end];
    let stored = text[body_end + "checksum=".len()..].trim_end_matches('\n');
    if !body.ends_with("end\n") || !text.ends_with('\n') {
        return Err(ModelFormatError::Truncated);
    }
    let computed = checksum(body.as_bytes());
    if stored != computed {
        return Err(ModelFormatError::Checksum {
            stored: stored.to_string(),
            computed,
        });
    }

    let mut lines = Lines {
        lines: body.lines().collect(),
        pos: 0,
    };
    lines.next()?;
    let version = lines.key("version")?;
    if version != FORMAT_VERSION.to_string() {
        return Err(ModelFormatError::Version {
            found: version.to_string(),
        });
    }
    let objective: Objective = {
        let v = lines.key("objective")?;
        v.parse()
            .map_err(|_| lines.err(format!("unknown objective `{v}`")))?
    };
    let config = BoosterConfig {
        objective,
        num_classes: lines.key_parse("num_classes")?,
        num_trees: lines.key_parse("num_trees")?,
        learning_rate: lines.key_parse("learning_rate")?,
        max_depth: lines.key_parse("max_depth")?,
        num_leaves: lines.key_parse("num_leaves")?,
        min_samples_leaf: lines.key_parse("min_samples_leaf")?,
        min_split_gain: lines.key_parse("min_split_gain")?,
        goss_top_rate: lines.key_parse("goss_top_rate")?,
        goss_other_rate: lines.key_parse("goss_other_rate")?,
        max_bin: lines.key_parse("max_bin")?,
        bundling: lines.key_parse("bundling")?,
        efb_max_conflict_rate: lines.key_parse("efb_max_conflict_rate")?,
        seed: lines.key_parse("seed")?,
    };
    config.validate().map_err(|e| lines.err(e.to_string()))?;
    let base_score = {
        let v = lines.key("base_score")?;
        lines.reals(v)?
    };
    if base_score.len() != config.trees_per_iteration() {
        return Err(lines.err("base_score length does not match objective"));
    }

    let mut class_names = Vec::new();
    while lines.peek_starts_with("class ") {
        class_names.push(lines.tagged("class", class_names.len())?.to_string());
    }
    if class_names.len() != config.num_classes {
        return Err(lines.err("class count does not match num_classes"));
    }
    let mut feature_names = Vec::new();
    while lines.peek_starts_with("feature ") {
        feature_names.push(lines.tagged("feature", feature_names.len())?.to_string());
    }
    let mut mappers = Vec::new();
    for j in 0..feature_names.len() {
        let rest = lines.tagged("bounds", j)?;
        let bounds = lines.reals(rest)?;
        mappers.push(BinMapper::from_upper_bounds(bounds).map_err(|e| lines.err(e.to_string()))?);
    }
    let mut bundles = Vec::new();
    while lines.peek_starts_with("bundle ") {
        let rest = lines.tagged("bundle", bundles.len())?;
        let members = rest
            .split(' ')
            .map(|t| lines.parse::<usize>(t, "feature index"))
            .collect::<Result<Vec<_>, _>>()?;
        bundles.push(members);
    }

    let n_trees = config.num_trees * config.trees_per_iteration();
    let mut trees = Vec::with_capacity(n_trees);
    for t in 0..n_trees {
        let count: usize = {
            let rest = lines.tagged("tree", t)?;
            lines.parse(rest, "node count")?
        };
        let mut nodes = Vec::with_capacity(count);
        for _ in 0..count {
            let (_, line) = lines.next()?;
            let parts: Vec<&str> = line.split(' ').collect();
            let node = match parts.as_slice() {
                ["leaf", v] => Node::Leaf {
                    value: lines.parse(v, "leaf value")?,
                },
                ["split", f, b, l, r] => Node::Split {
                    feature: lines.parse(f, "feature")?,
                    bin: lines.parse(b, "bin")?,
                    left: lines.parse(l, "child")?,
                    right: lines.parse(r, "child")?,
                },
                _ => return Err(lines.err("expected `leaf` or `split` node")),
            };
            if let Node::Split { feature, .. } = node {
                if feature >= mappers.len() {
                    return Err(lines.err("split feature out of range"));
                }
            }
            nodes.push(node);
        }
        let tree = Tree { nodes };
        if !tree.is_well_formed() {
            return Err(lines.err(format!("tree {t} is malformed")));
        }
        trees.push(tree);
    }
    let (_, last) = lines.next()?;
    if last != "end" {
        return Err(lines.err("expected `end`"));
    }
    Ok(Ensemble {
        config,
        base_score,
        trees,
        mappers,
        bundles,
        feature_names,
        class_names,
    })
}

pub fn save_model(ensemble: &Ensemble, path: impl AsRef<Path>) -> Result<(), ModelFormatError> {
    let path = path.as_ref();
    std::fs::write(path, to_text(ensemble)).map_err(|source| ModelFormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Ensemble, ModelFormatError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelFormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_text(&text)
}
