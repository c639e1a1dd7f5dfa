use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::confusion::{
    accuracy, binary_counts, f1, precision, sensitivity, specificity, ConfusionMatrix,
};
use super::MetricsError;

/// A rate in `[0, 1]`, or `None` when its denominator is zero.
pub type Metric = Option<f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub sensitivity: Metric,
    pub specificity: Metric,
    pub precision: Metric,
    pub f1: Metric,
}

/// A metric value left out of an average because it was undefined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub metric: String,
    pub class: String,
    /// Fold the value came from, for fold averages.
    pub fold: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroMetrics {
    pub sensitivity: Metric,
    pub specificity: Metric,
    pub precision: Metric,
    pub f1: Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub classes: Vec<String>,
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: Metric,
    #[serde(rename = "macro")]
    pub macro_avg: MacroMetrics,
    pub excluded: Vec<Exclusion>,
    /// Pooled confusion matrix (summed over folds for an average).
    pub confusion: ConfusionMatrix,
    /// Per-fold reports when this report is a fold average.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub folds: Vec<MetricsReport>,
}

const METRIC_NAMES: [&str; 4] = ["sensitivity", "specificity", "precision", "f1"];

impl ClassMetrics {
    fn values(&self) -> [Metric; 4] {
        [self.sensitivity, self.specificity, self.precision, self.f1]
    }

    fn from_values(class: String, v: [Metric; 4]) -> Self {
        ClassMetrics {
            class,
            sensitivity: v[0],
            specificity: v[1],
            precision: v[2],
            f1: v[3],
        }
    }
}

impl MacroMetrics {
    fn values(&self) -> [Metric; 4] {
        [self.sensitivity, self.specificity, self.precision, self.f1]
    }

    fn from_values(v: [Metric; 4]) -> Self {
        MacroMetrics {
            sensitivity: v[0],
            specificity: v[1],
            precision: v[2],
            f1: v[3],
        }
    }
}

/// Arithmetic mean of the defined values; exact when they are all equal.
fn mean_defined(values: impl IntoIterator<Item = Metric>) -> Metric {
    let defined: Vec<f64> = values.into_iter().flatten().collect();
    let first = *defined.first()?;
    if defined.iter().all(|&v| v == first) {
        return Some(first);
    }
    Some(defined.iter().sum::<f64>() / defined.len() as f64)
}

/// Per-class one-vs-rest metrics with unweighted macro averages.
///
/// `class_names` must have one entry per row of `cm`.
pub fn macro_report(cm: &ConfusionMatrix, class_names: &[String]) -> MetricsReport {
    let per_class: Vec<ClassMetrics> = (0..cm.n_classes())
        .map(|c| {
            let counts = binary_counts(cm, c).expect("class index in range");
            ClassMetrics::from_values(
                class_names[c].clone(),
                [
                    sensitivity(&counts),
                    specificity(&counts),
                    precision(&counts),
                    f1(&counts),
                ],
            )
        })
        .collect();
    let mut excluded = Vec::new();
    for m in &per_class {
        for (name, v) in METRIC_NAMES.iter().zip(m.values()) {
            if v.is_none() {
                excluded.push(Exclusion {
                    metric: name.to_string(),
                    class: m.class.clone(),
                    fold: None,
                });
            }
        }
    }
    let macro_avg = MacroMetrics::from_values(std::array::from_fn(|k| {
        mean_defined(per_class.iter().map(|m| m.values()[k]))
    }));
    MetricsReport {
        classes: class_names.to_vec(),
        per_class,
        accuracy: accuracy(cm),
        macro_avg,
        excluded,
        confusion: cm.clone(),
        folds: Vec::new(),
    }
}

/// Mean of each defined metric across folds. The returned report carries the
/// fold reports in `folds` and the summed confusion matrix.
pub fn fold_average(reports: &[MetricsReport]) -> Result<MetricsReport, MetricsError> {
    let first = reports.first().ok_or(MetricsError::NoReports)?;
    for (index, r) in reports.iter().enumerate() {
        if r.classes != first.classes || r.confusion.n_classes() != first.confusion.n_classes() {
            return Err(MetricsError::StructureMismatch {
                index,
                expected: first.classes.clone(),
                found: r.classes.clone(),
            });
        }
    }
    let per_class = (0..first.classes.len())
        .map(|c| {
            ClassMetrics::from_values(
                first.classes[c].clone(),
                std::array::from_fn(|k| {
                    mean_defined(reports.iter().map(|r| r.per_class[c].values()[k]))
                }),
            )
        })
        .collect();
    let macro_avg = MacroMetrics::from_values(std::array::from_fn(|k| {
        mean_defined(reports.iter().map(|r| r.macro_avg.values()[k]))
    }));
    let excluded = reports
        .iter()
        .enumerate()
        .flat_map(|(fold, r)| {
            r.excluded.iter().map(move |e| Exclusion {
                fold: Some(fold),
                ..e.clone()
            })
        })
        .collect();
    let confusion = reports
        .iter()
        .skip(1)
        .fold(first.confusion.clone(), |acc, r| acc.add(&r.confusion));
    Ok(MetricsReport {
        classes: first.classes.clone(),
        per_class,
        accuracy: mean_defined(reports.iter().map(|r| r.accuracy)),
        macro_avg,
        excluded,
        confusion,
        folds: reports.to_vec(),
    })
}

fn pct(v: Metric) -> String {
    match v {
        Some(x) => format!("{:.2}", 100.0 * x),
        None => "n/a".to_string(),
    }
}

/// Plain-text rendering: a fold grid (one column per fold plus the average)
/// when the report has folds, a single metric column otherwise; then the
/// per-class rows and the confusion matrix. Values are percentages.
pub fn render_text(report: &MetricsReport) -> String {
    let mut out = String::new();
    let rows: [(&str, fn(&MetricsReport) -> Metric); 5] = [
        ("Accuracy", |r| r.accuracy),
        ("Sensitivity", |r| r.macro_avg.sensitivity),
        ("Specificity", |r| r.macro_avg.specificity),
        ("Precision", |r| r.macro_avg.precision),
        ("F1-score", |r| r.macro_avg.f1),
    ];
    let mut header = format!("{:<14}", "Metric");
    if report.folds.is_empty() {
        header.push_str(&format!("{:>10}", "Value"));
    } else {
        for i in 0..report.folds.len() {
            header.push_str(&format!("{:>10}", format!("Fold {}", i + 1)));
        }
        header.push_str(&format!("{:>10}", "Average"));
    }
    writeln!(out, "{}", header.trim_end()).unwrap();
    for (name, get) in rows {
        let mut line = format!("{name:<14}");
        for fold in &report.folds {
            line.push_str(&format!("{:>10}", pct(get(fold))));
        }
        line.push_str(&format!("{:>10}", pct(get(report))));
        writeln!(out, "{line}").unwrap();
    }

    writeln!(out).unwrap();
    let width = report
        .classes
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(5)
        .max(5)
        + 2;
    writeln!(
        out,
        "{:<width$}{:>13}{:>13}{:>11}{:>10}",
        "Class", "Sensitivity", "Specificity", "Precision", "F1-score"
    )
    .unwrap();
    for m in &report.per_class {
        writeln!(
            out,
            "{:<width$}{:>13}{:>13}{:>11}{:>10}",
            m.class,
            pct(m.sensitivity),
            pct(m.specificity),
            pct(m.precision),
            pct(m.f1)
        )
        .unwrap();
    }

    writeln!(out).unwrap();
    writeln!(out, "Confusion matrix (rows = true, columns = predicted)").unwrap();
    let mut line = format!("{:<width$}", "");
    for c in &report.classes {
        line.push_str(&format!("{c:>width$}"));
    }
    writeln!(out, "{}", line.trim_end()).unwrap();
    for (c, row) in report.classes.iter().zip(&report.confusion.counts) {
        let mut line = format!("{c:<width$}");
        for v in row {
            line.push_str(&format!("{v:>width$}"));
        }
        writeln!(out, "{line}").unwrap();
    }
    if !report.excluded.is_empty() {
        writeln!(out).unwrap();
        writeln!(out, "Undefined values excluded from averages:").unwrap();
        for e in &report.excluded {
            match e.fold {
                Some(f) => writeln!(out, "  fold {}: {} of {}", f + 1, e.metric, e.class),
                None => writeln!(out, "  {} of {}", e.metric, e.class),
            }
            .unwrap();
        }
    }
    out
}
