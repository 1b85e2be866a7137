use std::collections::HashMap;

/// Query counters: the total `M`, per-index reads `M_j`, and per-pair
/// comparisons `M_{i,j}` with unordered pair keys.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryLedger {
    total: u64,
    per_index: Vec<u64>,
    per_pair: HashMap<(usize, usize), u64>,
}

impl QueryLedger {
    pub fn new(n: usize) -> Self {
        Self {
            total: 0,
            per_index: vec![0; n],
            per_pair: HashMap::new(),
        }
    }

    pub(crate) fn record_read(&mut self, i: usize) {
        self.total += 1;
        self.per_index[i] += 1;
    }

    pub(crate) fn record_pair(&mut self, i: usize, j: usize) {
        self.total += 1;
        *self.per_pair.entry(pair_key(i, j)).or_insert(0) += 1;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn index_count(&self, i: usize) -> u64 {
        self.per_index.get(i).copied().unwrap_or(0)
    }

    /// Comparisons made between `i` and `j`, in either argument order.
    pub fn pair_count(&self, i: usize, j: usize) -> u64 {
        self.per_pair.get(&pair_key(i, j)).copied().unwrap_or(0)
    }

    pub fn per_index(&self) -> &[u64] {
        &self.per_index
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.per_pair.iter().map(|(&k, &v)| (k, v))
    }

    /// `total` equals the sum of the per-index and per-pair components.
    pub fn is_conserved(&self) -> bool {
        let reads: u64 = self.per_index.iter().sum();
        let pairs: u64 = self.per_pair.values().sum();
        reads + pairs == self.total
    }
}

fn pair_key(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}
