use std::cmp::Ordering;

/// Per-component values of one importance measure plus the induced ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceReport {
    pub measure: String,
    /// `values[k]` belongs to component `k + 1`.
    pub values: Vec<f64>,
    /// Component ids, most important first.
    pub ranking: Vec<usize>,
    /// Time at which each component's supremum is attained, for measures
    /// defined as a supremum over time.
    pub maximizers: Option<Vec<f64>>,
}

impl ImportanceReport {
    pub fn new(measure: impl Into<String>, values: Vec<f64>, tie_tolerance: f64) -> Self {
        let ranking = rank(&values, tie_tolerance);
        Self {
            measure: measure.into(),
            values,
            ranking,
            maximizers: None,
        }
    }

    pub fn with_maximizers(mut self, t: Vec<f64>) -> Self {
        self.maximizers = Some(t);
        self
    }

    pub fn value(&self, id: usize) -> f64 {
        self.values[id - 1]
    }

    /// Rank (1 = most important) of each component, in component order.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.values.len()];
        for (pos, &id) in self.ranking.iter().enumerate() {
            ranks[id - 1] = pos + 1;
        }
        ranks
    }
}

/// Orders component ids by descending value. Values within `tie_tolerance`
/// of the first member of a run are ties and are listed by ascending id.
pub fn rank(values: &[f64], tie_tolerance: f64) -> Vec<usize> {
    let mut ids: Vec<usize> = (1..=values.len()).collect();
    ids.sort_by(|&a, &b| {
        values[b - 1]
            .partial_cmp(&values[a - 1])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut start = 0;
    while start < ids.len() {
        let head = values[ids[start] - 1];
        let mut end = start + 1;
        while end < ids.len() && (head - values[ids[end] - 1]).abs() <= tie_tolerance {
            end += 1;
        }
        ids[start..end].sort_unstable();
        start = end;
    }
    ids
}
