//! Mixed-radix indexing over products of finite domains.
//!
//! Tables are stored densely. The first axis is the most significant digit, so
//! iterating indices in order visits tuples in lexicographic domain order.

/// Shape of a product space `d_0 × d_1 × … × d_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Radix {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Radix {
    /// Returns `None` when the product overflows `usize`.
    pub fn new(sizes: Vec<usize>) -> Option<Self> {
        let mut strides = vec![0; sizes.len()];
        let mut total: usize = 1;
        for (axis, &size) in sizes.iter().enumerate().rev() {
            strides[axis] = total;
            total = total.checked_mul(size)?;
        }
        Some(Self {
            sizes,
            strides,
            total,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Number of points in the space (1 for the empty product).
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.sizes.len());
        digits
            .iter()
            .zip(&self.strides)
            .map(|(d, s)| d * s)
            .sum()
    }

    /// Index computed from digits picked out of `source` at `positions`.
    pub fn index_of(&self, positions: &[usize], source: &[usize]) -> usize {
        positions
            .iter()
            .zip(&self.strides)
            .map(|(&p, s)| source[p] * s)
            .sum()
    }

    pub fn digits(&self, mut index: usize, out: &mut [usize]) {
        for (axis, &stride) in self.strides.iter().enumerate() {
            out[axis] = index / stride;
            index %= stride;
        }
    }

    pub fn digits_vec(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        self.digits(index, &mut out);
        out
    }
}

/// Advances `digits` to the next tuple in odometer order. Returns `false` after
/// the last tuple, leaving `digits` reset to all zeros.
pub fn advance(digits: &mut [usize], sizes: &[usize]) -> bool {
    for axis in (0..digits.len()).rev() {
        digits[axis] += 1;
        if digits[axis] < sizes[axis] {
            return true;
        }
        digits[axis] = 0;
    }
    false
}
