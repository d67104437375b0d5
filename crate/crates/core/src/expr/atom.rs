use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

/// Per-variable derivative counts `J = (j_1, ..., j_p)` addressing `u_J`.
///
/// Ordering is graded-lexicographic: total order `|J|` first, then the
/// entries left to right.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(SmallVec<[u32; 4]>);

impl MultiIndex {
    pub fn zero(p: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, p))
    }

    /// `1_i`: a single derivative along variable `i`.
    pub fn unit(p: usize, i: usize) -> Self {
        let mut m = Self::zero(p);
        m.0[i] = 1;
        m
    }

    pub fn from_slice(entries: &[u32]) -> Self {
        MultiIndex(SmallVec::from_slice(entries))
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Number of independent variables `p`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// `|J|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&j| j == 0)
    }

    /// `J + 1_i`.
    pub fn incremented(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.0[i] += 1;
        m
    }

    /// `J - 1_i`, if entry `i` is positive.
    pub fn decremented(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut m = self.clone();
        m.0[i] -= 1;
        Some(m)
    }

    pub fn plus(&self, other: &MultiIndex) -> Self {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `J - K`, if `K <= J` componentwise.
    pub fn minus(&self, other: &MultiIndex) -> Option<Self> {
        debug_assert_eq!(self.len(), other.len());
        let mut out = SmallVec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    /// True when `other <= self` componentwise.
    pub fn dominates(&self, other: &MultiIndex) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// All `I` with `I <= self` componentwise.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(self.len())];
        for (i, &bound) in self.0.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * (bound as usize + 1));
            for m in &out {
                for k in 0..=bound {
                    let mut c = m.clone();
                    c.0[i] = k;
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }

    /// All multi-indices of length `p` with `|J| <= max_order`, in ascending order.
    pub fn up_to_order(p: usize, max_order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = vec![MultiIndex::zero(p)];
        out.extend(current.iter().cloned());
        for _ in 0..max_order {
            let mut next = std::collections::BTreeSet::new();
            for m in &current {
                for i in 0..p {
                    next.insert(m.incremented(i));
                }
            }
            current = next.into_iter().collect();
            out.extend(current.iter().cloned());
        }
        out
    }

    /// Multinomial coefficient `|J|! / (j_1! ... j_p!)`.
    pub fn multinomial(&self) -> num_bigint::BigInt {
        use num_traits::One;
        let mut num = num_bigint::BigInt::one();
        let mut den = num_bigint::BigInt::one();
        let mut k = 0u32;
        for &j in &self.0 {
            for m in 1..=j {
                k += 1;
                num *= k;
                den *= m;
            }
        }
        num / den
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldKind {
    Original,
    Dummy,
}

/// A dependent variable: an original `u^α` or its paired dummy `v^α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Field {
    pub kind: FieldKind,
    pub index: usize,
}

impl Field {
    pub fn original(index: usize) -> Self {
        Field {
            kind: FieldKind::Original,
            index,
        }
    }

    pub fn dummy(index: usize) -> Self {
        Field {
            kind: FieldKind::Dummy,
            index,
        }
    }

    pub fn is_dummy(self) -> bool {
        self.kind == FieldKind::Dummy
    }

    /// The field with the same index and the other kind.
    pub fn partner(self) -> Self {
        match self.kind {
            FieldKind::Original => Field::dummy(self.index),
            FieldKind::Dummy => Field::original(self.index),
        }
    }
}

/// An arbitrary function of some independent variables, e.g. `g(t)` or `f''(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FuncAtom {
    pub name: Arc<str>,
    /// Indices of the independent variables the function depends on.
    pub args: SmallVec<[usize; 2]>,
    /// Derivative orders, one entry per argument.
    pub order: MultiIndex,
}

impl FuncAtom {
    pub fn new(name: impl Into<Arc<str>>, args: &[usize]) -> Self {
        FuncAtom {
            name: name.into(),
            args: SmallVec::from_slice(args),
            order: MultiIndex::zero(args.len()),
        }
    }

    /// Derivative with respect to independent variable `i`, or `None` when
    /// the function does not depend on it.
    pub fn derivative(&self, i: usize) -> Option<FuncAtom> {
        let slot = self.args.iter().position(|&a| a == i)?;
        Some(FuncAtom {
            name: self.name.clone(),
            args: self.args.clone(),
            order: self.order.incremented(slot),
        })
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.args.contains(&i)
    }
}

impl Ord for FuncAtom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name
            .cmp(&other.name)
            .then_with(|| self.order.cmp(&other.order))
            .then_with(|| self.args.cmp(&other.args))
    }
}

impl PartialOrd for FuncAtom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Indeterminates of the expression kernel. The derived ordering (variant
/// order first) is the monomial ordering.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Indep(usize),
    Jet(Field, MultiIndex),
    Param(Arc<str>),
    Func(FuncAtom),
}

impl Atom {
    pub fn jet(field: Field, index: MultiIndex) -> Self {
        Atom::Jet(field, index)
    }

    /// Undifferentiated `u^α`.
    pub fn base(field: Field, p: usize) -> Self {
        Atom::Jet(field, MultiIndex::zero(p))
    }

    pub fn param(name: impl Into<Arc<str>>) -> Self {
        Atom::Param(name.into())
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Atom::Jet(..))
    }

    pub fn as_jet(&self) -> Option<(Field, &MultiIndex)> {
        match self {
            Atom::Jet(f, j) => Some((*f, j)),
            _ => None,
        }
    }

    pub fn is_param(&self) -> bool {
        matches!(self, Atom::Param(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let a = MultiIndex::from_slice(&[0, 3]);
        let b = MultiIndex::from_slice(&[1, 0]);
        let c = MultiIndex::from_slice(&[2, 0]);
        assert!(b < c);
        assert!(c < a);
    }

    #[test]
    fn sub_indices_cover_box() {
        let j = MultiIndex::from_slice(&[1, 2]);
        let subs = j.sub_indices();
        assert_eq!(subs.len(), 6);
        assert!(subs.iter().all(|s| j.dominates(s)));
    }

    #[test]
    fn up_to_order_counts() {
        assert_eq!(MultiIndex::up_to_order(2, 2).len(), 6);
        assert_eq!(MultiIndex::up_to_order(3, 0).len(), 1);
    }

    #[test]
    fn multinomial_values() {
        assert_eq!(MultiIndex::from_slice(&[1, 1]).multinomial(), 2.into());
        assert_eq!(MultiIndex::from_slice(&[2, 1, 1]).multinomial(), 12.into());
        assert_eq!(MultiIndex::zero(3).multinomial(), 1.into());
    }

    #[test]
    fn atom_kind_order() {
        let x = Atom::Indep(1);
        let u = Atom::base(Field::original(0), 2);
        let v = Atom::base(Field::dummy(0), 2);
        let a = Atom::param("a");
        let g = Atom::Func(FuncAtom::new("g", &[0]));
        assert!(x < u && u < v && v < a && a < g);
    }
}
