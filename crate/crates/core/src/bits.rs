/// Fixed-width bit rows used for associate-class membership counting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn new(len: usize) -> Self {
        BitRow { words: vec![0; len.div_ceil(64)] }
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersection_count(&self, other: &BitRow) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}

/// Per-element class rows of a symmetric 3-class relation on `size` items:
/// `rows[c][x]` holds every `y` with `class(x, y) == c`.
pub(crate) struct ClassRows {
    rows: [Vec<BitRow>; 3],
}

impl ClassRows {
    pub fn from_fn(size: usize, class: impl Fn(usize, usize) -> u8) -> Self {
        let mut rows: [Vec<BitRow>; 3] = std::array::from_fn(|_| vec![BitRow::new(size); size]);
        for x in 0..size {
            for y in 0..size {
                rows[class(x, y) as usize][x].set(y);
            }
        }
        ClassRows { rows }
    }

    pub fn row(&self, class: usize, x: usize) -> &BitRow {
        &self.rows[class][x]
    }

    /// Number of items that are `u`-th associates of `x` and `w`-th
    /// associates of `y`.
    pub fn common(&self, x: usize, y: usize, u: usize, w: usize) -> usize {
        self.rows[u][x].intersection_count(&self.rows[w][y])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_and_count_across_words() {
        let mut r = BitRow::new(130);
        for i in [0, 63, 64, 129] {
            r.set(i);
        }
        assert_eq!(r.count(), 4);
        let mut s = BitRow::new(130);
        s.set(63);
        s.set(65);
        assert_eq!(s.intersection_count(&r), 1);
    }
}
