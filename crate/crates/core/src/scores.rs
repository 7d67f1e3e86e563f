//! Score matrices and the trial/classifier side tables that go with them.

use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Detection scores of `M` classifiers on a common set of `N` trials.
///
/// Stored column-major: each classifier's scores are contiguous, which is
/// the access pattern of every rank computation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    classifier_ids: Vec<String>,
    trial_ids: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    /// Builds a matrix from per-classifier columns, each ordered like `trial_ids`.
    pub fn new(
        trial_ids: Vec<String>,
        classifier_ids: Vec<String>,
        columns: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if columns.len() != classifier_ids.len() {
            return Err(Error::LengthMismatch {
                expected: classifier_ids.len(),
                found: columns.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for id in &classifier_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateClassifierId {
                    classifier: id.clone(),
                });
            }
        }
        let mut seen = BTreeSet::new();
        for t in &trial_ids {
            if !seen.insert(t.as_str()) {
                return Err(Error::DuplicateKey { key: t.clone() });
            }
        }
        for (id, col) in classifier_ids.iter().zip(&columns) {
            if col.len() != trial_ids.len() {
                return Err(Error::LengthMismatch {
                    expected: trial_ids.len(),
                    found: col.len(),
                });
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteScore {
                    classifier: id.clone(),
                    trial: trial_ids[i].clone(),
                });
            }
        }
        Ok(Self {
            classifier_ids,
            trial_ids,
            columns,
        })
    }

    pub fn n_trials(&self) -> usize {
        self.trial_ids.len()
    }

    pub fn n_classifiers(&self) -> usize {
        self.classifier_ids.len()
    }

    pub fn trial_ids(&self) -> &[String] {
        &self.trial_ids
    }

    pub fn classifier_ids(&self) -> &[String] {
        &self.classifier_ids
    }

    /// Scores of classifier `j`, in trial order.
    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.columns.iter().map(Vec::as_slice)
    }

    pub fn get(&self, trial: usize, classifier: usize) -> f64 {
        self.columns[classifier][trial]
    }
}

/// Ground-truth class of each trial (`true` = positive/target).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelMap {
    labels: BTreeMap<String, bool>,
}

impl LabelMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, trial: impl Into<String>, positive: bool) -> Result<()> {
        match self.labels.entry(trial.into()) {
            Entry::Occupied(e) => Err(Error::DuplicateKey {
                key: e.key().clone(),
            }),
            Entry::Vacant(e) => {
                e.insert(positive);
                Ok(())
            }
        }
    }

    /// Builds a map from raw label tokens; a trial is positive iff its token
    /// equals `positive_token`, every other token is negative.
    pub fn from_tokens<'a, I>(pairs: I, positive_token: &str) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut map = Self::new();
        for (trial, token) in pairs {
            map.insert(trial, token == positive_token)?;
        }
        Ok(map)
    }

    pub fn get(&self, trial: &str) -> Option<bool> {
        self.labels.get(trial).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labels for `trial_ids` in order. Fails on the first unlabelled trial.
    pub fn binarize<S: AsRef<str>>(&self, trial_ids: &[S]) -> Result<Vec<bool>> {
        trial_ids
            .iter()
            .map(|t| {
                self.get(t.as_ref()).ok_or_else(|| Error::MissingLabel {
                    trial: t.as_ref().to_string(),
                })
            })
            .collect()
    }
}

/// Assignment of trials to mutually exclusive groups (conditions).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupMap {
    groups: BTreeMap<String, String>,
}

impl GroupMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, trial: impl Into<String>, group: impl Into<String>) -> Result<()> {
        match self.groups.entry(trial.into()) {
            Entry::Occupied(e) => Err(Error::DuplicateKey {
                key: e.key().clone(),
            }),
            Entry::Vacant(e) => {
                e.insert(group.into());
                Ok(())
            }
        }
    }

    pub fn group_of(&self, trial: &str) -> Option<&str> {
        self.groups.get(trial).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// `(trial, group)` pairs ordered by trial id.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.groups.iter().map(|(t, g)| (t.as_str(), g.as_str()))
    }

    /// Distinct group ids in lexicographic order.
    pub fn group_ids(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.groups.values().map(String::as_str).collect();
        set.into_iter().collect()
    }
}

/// Human-readable attributes of one classifier.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassifierInfo {
    pub attributes: BTreeMap<String, String>,
    pub annotation: Option<f64>,
    pub highlight: bool,
}

/// Per-classifier attributes used for colouring and annotating plots.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassifierMetadata {
    keys: Vec<String>,
    entries: BTreeMap<String, ClassifierInfo>,
}

impl ClassifierMetadata {
    /// `keys` lists attribute names in table column order.
    pub fn new(keys: Vec<String>) -> Self {
        Self {
            keys,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, info: ClassifierInfo) -> Result<()> {
        match self.entries.entry(id.into()) {
            Entry::Occupied(e) => Err(Error::DuplicateKey {
                key: e.key().clone(),
            }),
            Entry::Vacant(e) => {
                e.insert(info);
                Ok(())
            }
        }
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn get(&self, id: &str) -> Option<&ClassifierInfo> {
        self.entries.get(id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Attribute value, `None` when the classifier or the attribute is absent
    /// or the cell is empty.
    pub fn attribute(&self, id: &str, key: &str) -> Option<&str> {
        self.entries
            .get(id)
            .and_then(|info| info.attributes.get(key))
            .map(String::as_str)
            .filter(|v| !v.is_empty())
    }
}

/// Replaces every group of trials by the mean score of its members.
///
/// Rows of the result are the groups in lexicographic order of group id;
/// the group ids take the place of trial ids.
pub fn group_reduce(scores: &ScoreMatrix, groups: &GroupMap) -> Result<ScoreMatrix> {
    let mut members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, trial) in scores.trial_ids().iter().enumerate() {
        let group = groups.group_of(trial).ok_or_else(|| Error::UnmappedTrial {
            trial: trial.clone(),
        })?;
        members.entry(group).or_default().push(i);
    }

    let group_ids: Vec<String> = members.keys().map(|g| g.to_string()).collect();
    let columns = scores
        .columns()
        .map(|col| members.values().map(|rows| mean_of(col, rows)).collect())
        .collect();
    ScoreMatrix::new(group_ids, scores.classifier_ids().to_vec(), columns)
}

// The clamp keeps the rounded mean inside the members' range.
fn mean_of(col: &[f64], rows: &[usize]) -> f64 {
    let n = rows.len() as f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut sum = 0.0;
    for &r in rows {
        let v = col[r];
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
    }
    let mut mean = sum / n;
    if !mean.is_finite() {
        mean = rows.iter().map(|&r| col[r] / n).sum();
    }
    mean.clamp(lo, hi)
}
