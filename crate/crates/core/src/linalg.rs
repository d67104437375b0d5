//! Sparse exact Gaussian elimination over the rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::expr::Rational;

pub(crate) type SparseRow = BTreeMap<usize, Rational>;

/// Incrementally row-reduced linear system `A c = b`.
#[derive(Default)]
pub(crate) struct Eliminator {
    pivots: Vec<(usize, SparseRow, Rational)>,
    pivot_of: BTreeMap<usize, usize>,
    inconsistent: bool,
}

impl Eliminator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, mut row: SparseRow, mut rhs: Rational) {
        if self.inconsistent {
            return;
        }
        loop {
            let hit = row.keys().find(|c| self.pivot_of.contains_key(c)).copied();
            let Some(col) = hit else { break };
            let k = row[&col].clone();
            let (_, prow, prhs) = &self.pivots[self.pivot_of[&col]];
            for (c, v) in prow {
                let entry = row.entry(*c).or_insert_with(Rational::zero);
                *entry -= &k * v;
                if entry.is_zero() {
                    row.remove(c);
                }
            }
            rhs -= &k * prhs;
        }
        let Some((&col, lead)) = row.iter().next() else {
            if !rhs.is_zero() {
                self.inconsistent = true;
            }
            return;
        };
        let inv = lead.recip();
        let row: SparseRow = row.into_iter().map(|(c, v)| (c, v * &inv)).collect();
        let rhs = rhs * inv;
        self.pivot_of.insert(col, self.pivots.len());
        self.pivots.push((col, row, rhs));
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// A particular solution with all free unknowns set to zero.
    pub fn solve(&self, n: usize) -> Option<Vec<Rational>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![Rational::zero(); n];
        for (col, row, rhs) in self.pivots.iter().rev() {
            let mut val = rhs.clone();
            for (c, v) in row {
                if c != col {
                    val -= v * &x[*c];
                }
            }
            debug_assert!(row[col].is_one());
            x[*col] = val;
        }
        Some(x)
    }
}
