//! Class-count bookkeeping and the three split criteria: Gini impurity,
//! two-class deviance (cross-entropy), and the twoing rule.

use super::ForestError;

/// Per-class sample counts at a tree node. Class 0 is female, class 1 is
/// male in the sex-classification pipeline, but any class count works.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCounts {
    counts: Vec<u64>,
}

impl ClassCounts {
    /// Zero counts for `k` classes.
    pub fn new(k: usize) -> Self {
        Self { counts: vec![0; k] }
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        Self { counts }
    }

    /// Tallies the labels selected by `indices`.
    pub fn tally(labels: &[usize], indices: &[usize], k: usize) -> Self {
        let mut c = Self::new(k);
        for &i in indices {
            c.counts[labels[i]] += 1;
        }
        c
    }

    pub fn classes(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, class: usize) -> u64 {
        self.counts[class]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn increment(&mut self, class: usize) {
        self.counts[class] += 1;
    }

    pub fn decrement(&mut self, class: usize) {
        debug_assert!(self.counts[class] > 0);
        self.counts[class] -= 1;
    }

    /// True when at most one class has samples.
    pub fn is_pure(&self) -> bool {
        self.counts.iter().filter(|&&c| c > 0).count() <= 1
    }

    /// The class with the most samples; ties go to the lower class index.
    pub fn majority_class(&self) -> usize {
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        best
    }
}

/// Which split criterion a tree optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ImpurityKind {
    /// Gini diversity index.
    Gdi,
    /// Two deviance criterion (cross-entropy with natural log).
    Tdc,
    /// Twoing rule (a split gain, not a node impurity).
    Tr,
}

impl ImpurityKind {
    pub const ALL: [ImpurityKind; 3] = [ImpurityKind::Gdi, ImpurityKind::Tr, ImpurityKind::Tdc];

    /// Lower-case tag used in CSV output and CLI flags.
    pub fn tag(&self) -> &'static str {
        match self {
            ImpurityKind::Gdi => "gdi",
            ImpurityKind::Tdc => "tdc",
            ImpurityKind::Tr => "tr",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag.to_ascii_lowercase().as_str() {
            "gdi" => Some(ImpurityKind::Gdi),
            "tdc" => Some(ImpurityKind::Tdc),
            "tr" => Some(ImpurityKind::Tr),
            _ => None,
        }
    }
}

/// Gini impurity `1 - sum_i p(i)^2`; 0 for a pure node, at most `1 - 1/k`.
pub fn gini_impurity(c: &ClassCounts) -> Result<f64, ForestError> {
    let total = c.total();
    if total == 0 {
        return Err(ForestError::EmptyNode);
    }
    let t = total as f64;
    let sum_sq: f64 = c.counts().iter().map(|&n| {
        let p = n as f64 / t;
        p * p
    }).sum();
    Ok(1.0 - sum_sq)
}

/// Deviance `-sum_i p(i) ln p(i)` with `0 ln 0 = 0`; natural logarithm.
pub fn deviance_impurity(c: &ClassCounts) -> Result<f64, ForestError> {
    let total = c.total();
    if total == 0 {
        return Err(ForestError::EmptyNode);
    }
    let t = total as f64;
    let mut acc = 0.0;
    for &n in c.counts() {
        if n > 0 {
            let p = n as f64 / t;
            acc -= p * p.ln();
        }
    }
    Ok(acc)
}

/// Twoing rule `P(L) P(R) (sum_i |L(i) - R(i)|)^2`, where `P(L)`/`P(R)` are
/// the fractions of parent samples routed to each side and `L(i)`/`R(i)`
/// are class fractions within each child. An empty side scores 0.
pub fn twoing_score(left: &ClassCounts, right: &ClassCounts) -> Result<f64, ForestError> {
    let (nl, nr) = (left.total(), right.total());
    if nl + nr == 0 {
        return Err(ForestError::BothSidesEmpty);
    }
    if nl == 0 || nr == 0 {
        return Ok(0.0);
    }
    let total = (nl + nr) as f64;
    let pl = nl as f64 / total;
    let pr = nr as f64 / total;
    let k = left.classes().max(right.classes());
    let mut abs_diff = 0.0;
    for i in 0..k {
        let l = if i < left.classes() { left.count(i) as f64 / nl as f64 } else { 0.0 };
        let r = if i < right.classes() { right.count(i) as f64 / nr as f64 } else { 0.0 };
        abs_diff += (l - r).abs();
    }
    Ok(pl * pr * abs_diff * abs_diff)
}

/// Scores a candidate split; higher is better.
///
/// For GDI and TDC this is the impurity decrease
/// `impurity(parent) - [P(L) impurity(left) + P(R) impurity(right)]`
/// (an empty child contributes 0). For TR it is the twoing score itself.
pub fn split_score(
    kind: ImpurityKind,
    parent: &ClassCounts,
    left: &ClassCounts,
    right: &ClassCounts,
) -> Result<f64, ForestError> {
    if parent.classes() != left.classes() || parent.classes() != right.classes() {
        return Err(ForestError::CountMismatch(format!(
            "class-count widths differ: parent {}, left {}, right {}",
            parent.classes(),
            left.classes(),
            right.classes()
        )));
    }
    for i in 0..parent.classes() {
        if left.count(i) + right.count(i) != parent.count(i) {
            return Err(ForestError::CountMismatch(format!(
                "class {i}: {} + {} != {}",
                left.count(i),
                right.count(i),
                parent.count(i)
            )));
        }
    }
    if parent.total() == 0 {
        return Err(ForestError::CountMismatch("parent node is empty".into()));
    }
    match kind {
        ImpurityKind::Tr => twoing_score(left, right),
        ImpurityKind::Gdi | ImpurityKind::Tdc => {
            let imp = |c: &ClassCounts| -> Result<f64, ForestError> {
                match kind {
                    ImpurityKind::Gdi => gini_impurity(c),
                    _ => deviance_impurity(c),
                }
            };
            let total = parent.total() as f64;
            let mut weighted = 0.0;
            if left.total() > 0 {
                weighted += (left.total() as f64 / total) * imp(left)?;
            }
            if right.total() > 0 {
                weighted += (right.total() as f64 / total) * imp(right)?;
            }
            Ok(imp(parent)? - weighted)
        }
    }
}
