//! Symmetric pair storage: the upper triangle is stored once and mirrored on
//! read, so symmetry holds by construction.

/// Symmetric matrix over `n` items with no diagonal (pairwise quantities only).
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> SymMatrix<T> {
    pub fn new(n: usize) -> Self {
        let len = n * (n - 1) / 2;
        SymMatrix {
            n,
            data: vec![T::default(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn index(&self, i: usize, j: usize) -> usize {
        assert!(i != j, "pairwise matrix has no diagonal");
        assert!(i < self.n && j < self.n);
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        // Row-major upper triangle: offset of row `lo` plus column within row.
        lo * self.n - lo * (lo + 1) / 2 + (hi - lo - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[self.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        let idx = self.index(i, j);
        self.data[idx] = value;
    }

    /// Upper-triangle pairs (i < j) in deterministic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j)))
    }
}
