/// Binary sum tree over a power-of-two number of leaves.
///
/// `nodes[1]` is the root and the children of node `n` are `2n` and `2n + 1`;
/// leaf `i` lives at `nodes[base + i]`. Every update recomputes its ancestors
/// from their children, so each internal node is exactly the floating-point
/// sum of its two children.
#[derive(Debug, Clone)]
pub struct SumTree {
    capacity: usize,
    base: usize,
    nodes: Vec<f64>,
    max_priority: f64,
}

impl SumTree {
    pub fn new(capacity: usize) -> Self {
        let base = capacity.max(1).next_power_of_two();
        Self { capacity, base, nodes: vec![0.0; 2 * base], max_priority: 1.0 }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    pub fn get(&self, leaf: usize) -> f64 {
        self.nodes[self.base + leaf]
    }

    /// Largest priority ever written (starts at 1.0).
    pub fn max_priority(&self) -> f64 {
        self.max_priority
    }

    pub fn set(&mut self, leaf: usize, priority: f64) {
        assert!(leaf < self.capacity, "leaf {leaf} out of range");
        assert!(priority >= 0.0 && priority.is_finite(), "bad priority {priority}");
        let mut n = self.base + leaf;
        self.nodes[n] = priority;
        while n > 1 {
            n /= 2;
            self.nodes[n] = self.nodes[2 * n] + self.nodes[2 * n + 1];
        }
        self.max_priority = self.max_priority.max(priority);
    }

    /// Leaf whose cumulative-mass interval contains `mass`. Values at or past
    /// the total land on the last leaf with positive priority.
    pub fn find(&self, mass: f64) -> usize {
        let mut u = mass.max(0.0);
        let mut n = 1;
        while n < self.base {
            let left = self.nodes[2 * n];
            let right = self.nodes[2 * n + 1];
            if u < left || right <= 0.0 {
                n *= 2;
            } else {
                u -= left;
                n = 2 * n + 1;
            }
        }
        n - self.base
    }

    pub fn leaves(&self) -> &[f64] {
        &self.nodes[self.base..self.base + self.capacity]
    }

    /// Largest gap between any internal node and the sum of its children.
    pub fn consistency_error(&self) -> f64 {
        (1..self.base)
            .map(|n| (self.nodes[n] - (self.nodes[2 * n] + self.nodes[2 * n + 1])).abs())
            .fold(0.0, f64::max)
    }
}
