use serde::{Deserialize, Serialize};

/// Binary tree of non-negative weights supporting prefix-sum lookup.
///
/// Leaves live at `size..size + capacity` of a power-of-two layout; node `k`
/// has children `2k` and `2k + 1`. Parents are recomputed from their children
/// on every update, so each internal node is exactly the floating-point sum
/// of its two children.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumTree {
    capacity: usize,
    size: usize,
    nodes: Vec<f64>,
}

impl SumTree {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "sum tree capacity must be positive");
        let size = capacity.next_power_of_two();
        Self { capacity, size, nodes: vec![0.0; 2 * size] }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.nodes[self.size + idx]
    }

    pub fn set(&mut self, idx: usize, weight: f64) {
        assert!(idx < self.capacity, "leaf {idx} out of range");
        assert!(weight >= 0.0 && weight.is_finite(), "weight must be finite and non-negative");
        let mut k = self.size + idx;
        self.nodes[k] = weight;
        while k > 1 {
            k /= 2;
            self.nodes[k] = self.nodes[2 * k] + self.nodes[2 * k + 1];
        }
    }

    /// Leaf whose cumulative weight interval contains `u ∈ [0, total)`.
    /// Zero-weight leaves are never returned while the total is positive.
    pub fn find(&self, mut u: f64) -> usize {
        let mut k = 1;
        while k < self.size {
            let left = self.nodes[2 * k];
            let right = self.nodes[2 * k + 1];
            if u < left || right == 0.0 {
                k *= 2;
            } else {
                u -= left;
                k = 2 * k + 1;
            }
        }
        (k - self.size).min(self.capacity - 1)
    }

    /// True when every internal node equals the sum of its children.
    pub fn is_consistent(&self) -> bool {
        (1..self.size).all(|k| self.nodes[k] == self.nodes[2 * k] + self.nodes[2 * k + 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn finds_by_prefix() {
        let mut t = SumTree::new(3);
        t.set(0, 1.0);
        t.set(1, 0.0);
        t.set(2, 3.0);
        assert_eq!(t.total(), 4.0);
        assert_eq!(t.find(0.5), 0);
        assert_eq!(t.find(1.0), 2);
        assert_eq!(t.find(3.999), 2);
    }

    #[test]
    fn single_leaf() {
        let mut t = SumTree::new(1);
        t.set(0, 2.5);
        assert_eq!(t.total(), 2.5);
        assert_eq!(t.find(1.0), 0);
    }

    proptest! {
        #[test]
        fn internal_nodes_are_child_sums(ops in prop::collection::vec((0usize..13, 0.0f64..10.0), 1..60)) {
            let mut t = SumTree::new(13);
            for (i, w) in ops {
                t.set(i, w);
                prop_assert!(t.is_consistent());
            }
        }
    }
}
