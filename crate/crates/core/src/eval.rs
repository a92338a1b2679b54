//! Confusion counts, per-class precision/recall/F1 and the ablation table.
//!
//! SARCASM is the positive class. Any ratio with a zero denominator is 0 and
//! leaves a note in [`EvalReport::warnings`].

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// The same counts with NOT_SARCASM treated as positive.
    pub fn swapped(&self) -> ConfusionMatrix {
        ConfusionMatrix {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }
}

pub fn confusion(predictions: &[Label], truths: &[Label]) -> Result<ConfusionMatrix> {
    if predictions.len() != truths.len() {
        return Err(Error::validation(format!(
            "{} predictions for {} gold labels",
            predictions.len(),
            truths.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::validation("nothing to evaluate"));
    }
    let mut m = ConfusionMatrix::default();
    for (p, t) in predictions.iter().zip(truths) {
        match (p, t) {
            (Label::Sarcasm, Label::Sarcasm) => m.tp += 1,
            (Label::Sarcasm, Label::NotSarcasm) => m.fp += 1,
            (Label::NotSarcasm, Label::Sarcasm) => m.fn_ += 1,
            (Label::NotSarcasm, Label::NotSarcasm) => m.tn += 1,
        }
    }
    Ok(m)
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    let sum = precision + recall;
    if sum == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ClassMetrics {
    fn positive(m: &ConfusionMatrix, name: &str, warnings: &mut Vec<String>) -> ClassMetrics {
        let mut ratio = |num: usize, den: usize, what: &str| {
            if den == 0 {
                warnings.push(format!("{name} {what} undefined (no {})", if what == "precision" {
                    "predicted positives"
                } else {
                    "gold positives"
                }));
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(m.tp, m.tp + m.fp, "precision");
        let recall = ratio(m.tp, m.tp + m.fn_, "recall");
        ClassMetrics {
            precision,
            recall,
            f1: f_measure(precision, recall),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerClass {
    #[serde(rename = "SARCASM")]
    pub sarcasm: ClassMetrics,
    #[serde(rename = "NOT_SARCASM")]
    pub not_sarcasm: ClassMetrics,
}

impl PerClass {
    pub fn get(&self, label: Label) -> &ClassMetrics {
        match label {
            Label::Sarcasm => &self.sarcasm,
            Label::NotSarcasm => &self.not_sarcasm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_class: PerClass,
    pub macro_f1: f64,
    pub accuracy: f64,
    pub counts: ConfusionMatrix,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn from_confusion(counts: ConfusionMatrix) -> EvalReport {
        let mut warnings = Vec::new();
        let sarcasm = ClassMetrics::positive(&counts, "SARCASM", &mut warnings);
        let not_sarcasm = ClassMetrics::positive(&counts.swapped(), "NOT_SARCASM", &mut warnings);
        let n = counts.total();
        EvalReport {
            per_class: PerClass { sarcasm, not_sarcasm },
            macro_f1: (sarcasm.f1 + not_sarcasm.f1) / 2.0,
            accuracy: if n == 0 { 0.0 } else { (counts.tp + counts.tn) as f64 / n as f64 },
            counts,
            warnings,
        }
    }

    /// SARCASM-class F1, the number quoted as "F-measure".
    pub fn headline_f1(&self) -> f64 {
        self.per_class.sarcasm.f1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn report(predictions: &[Label], truths: &[Label]) -> Result<EvalReport> {
    Ok(EvalReport::from_confusion(confusion(predictions, truths)?))
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<12} {:>9} {:>9} {:>9}", "class", "precision", "recall", "f1")?;
        for label in [Label::Sarcasm, Label::NotSarcasm] {
            let m = self.per_class.get(label);
            writeln!(f, "{:<12} {:>9.4} {:>9.4} {:>9.4}", label.as_str(), m.precision, m.recall, m.f1)?;
        }
        writeln!(f, "macro f1     {:.4}", self.macro_f1)?;
        writeln!(f, "accuracy     {:.4}", self.accuracy)?;
        let c = &self.counts;
        write!(f, "counts       tp={} fp={} fn={} tn={}", c.tp, c.fp, c.fn_, c.tn)?;
        for w in &self.warnings {
            write!(f, "\nwarning: {w}")?;
        }
        Ok(())
    }
}

/// Mean and population standard deviation, e.g. of per-fold F1 values.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// One cell of the classifier × layout grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub source: String,
    pub layout: String,
    pub classifier: String,
    pub report: EvalReport,
}

/// Renders a grid as one table per (source, layout) pair in first-seen order:
/// classifier name, SARCASM F-measure, macro F1.
pub fn render_grid(cells: &[GridCell]) -> String {
    let mut groups: Vec<(&str, &str)> = Vec::new();
    for c in cells {
        let key = (c.source.as_str(), c.layout.as_str());
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    let width = cells
        .iter()
        .map(|c| c.classifier.len())
        .chain(["Classifier".len()])
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for (i, (source, layout)) in groups.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "{source} / {layout}");
        let _ = writeln!(out, "{:<width$}  {:>9}  {:>8}", "Classifier", "F-measure", "macro-F1");
        for c in cells.iter().filter(|c| c.source == *source && c.layout == *layout) {
            let _ = writeln!(
                out,
                "{:<width$}  {:>9.4}  {:>8.4}",
                c.classifier,
                c.report.headline_f1(),
                c.report.macro_f1
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{NotSarcasm as N, Sarcasm as S};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn confusion_examples() {
        let m = confusion(&[S, S, N], &[S, N, N]).unwrap();
        assert_eq!(m, ConfusionMatrix { tp: 1, fp: 1, fn_: 0, tn: 1 });
        let m = confusion(&[S; 4], &[S; 4]).unwrap();
        assert_eq!(m, ConfusionMatrix { tp: 4, ..Default::default() });
        let m = confusion(&[N; 3], &[S; 3]).unwrap();
        assert_eq!(m, ConfusionMatrix { fn_: 3, ..Default::default() });
        assert!(matches!(confusion(&[S], &[S, N]), Err(Error::Validation(_))));
        assert!(confusion(&[], &[]).is_err());
    }

    #[test]
    fn f_measure_examples() {
        assert_eq!(f_measure(1.0, 1.0), 1.0);
        assert_eq!(f_measure(0.0, 0.0), 0.0);
        assert!((f_measure(0.6, 0.75) - 0.9 / 1.35).abs() < 1e-12);
    }

    #[test]
    fn worked_three_example_report() {
        let r = report(&[S, S, N], &[S, N, N]).unwrap();
        assert!(close(r.per_class.sarcasm.precision, 0.5));
        assert!(close(r.per_class.sarcasm.recall, 1.0));
        assert!(close(r.per_class.sarcasm.f1, 2.0 / 3.0));
        assert!(close(r.per_class.not_sarcasm.precision, 1.0));
        assert!(close(r.per_class.not_sarcasm.recall, 0.5));
        assert!(close(r.per_class.not_sarcasm.f1, 2.0 / 3.0));
        assert!(close(r.accuracy, 2.0 / 3.0));
        assert!(close(r.macro_f1, 2.0 / 3.0));
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn perfect_and_single_class() {
        let r = report(&[S, N, S], &[S, N, S]).unwrap();
        for m in [r.per_class.sarcasm, r.per_class.not_sarcasm] {
            assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        }
        assert_eq!(r.accuracy, 1.0);

        let r = report(&[S, S], &[S, S]).unwrap();
        assert_eq!(r.per_class.sarcasm.f1, 1.0);
        let n = r.per_class.not_sarcasm;
        assert_eq!((n.precision, n.recall, n.f1), (0.0, 0.0, 0.0));
        assert_eq!(r.warnings.len(), 2);
        assert_eq!(r.macro_f1, 0.5);
    }

    #[test]
    fn json_uses_label_names() {
        let r = report(&[S, N], &[S, S]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["counts"]["fn"], 1);
        assert!(v["per_class"]["NOT_SARCASM"]["f1"].is_number());
        let back: EvalReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn grid_groups_by_layout() {
        let r = report(&[S, N], &[S, N]).unwrap();
        let cell = |layout: &str, clf: &str| GridCell {
            source: "GloVe".into(),
            layout: layout.into(),
            classifier: clf.into(),
            report: r.clone(),
        };
        let text = render_grid(&[cell("response", "LR"), cell("both", "LR"), cell("response", "RF")]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "GloVe / response");
        assert!(lines[2].starts_with("LR") && lines[3].starts_with("RF"));
        assert_eq!(lines[5], "GloVe / both");
        assert!(text.contains("1.0000"));
    }

    #[test]
    fn mean_std_of_folds() {
        let (m, s) = mean_std(&[0.5, 0.7]);
        assert!(close(m, 0.6) && close(s, 0.1));
        assert_eq!(mean_std(&[]), (0.0, 0.0));
    }
}
