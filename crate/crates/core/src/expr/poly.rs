use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::atom::{Atom, Field};
use super::ExprError;

pub type Rational = num_rational::BigRational;

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Power product of atoms, sorted by atom with nonzero exponents. Negative
/// exponents only ever appear on `Atom::Param`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Atom, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Monomial(vec![(a, 1)])
    }

    pub fn power(a: Atom, e: i32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(a, e)])
        }
    }

    /// Build from unsorted factors; repeated atoms are merged.
    pub fn from_factors(factors: impl IntoIterator<Item = (Atom, i32)>) -> Self {
        let mut map: BTreeMap<Atom, i32> = BTreeMap::new();
        for (a, e) in factors {
            *map.entry(a).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|(_, e)| *e != 0).collect())
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, a: &Atom) -> i32 {
        match self.0.binary_search_by(|(b, _)| b.cmp(a)) {
            Ok(pos) => self.0[pos].1,
            Err(_) => 0,
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = self.0[i].1 + other.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Multiply by `a^delta`.
    pub fn times_power(&self, a: &Atom, delta: i32) -> Monomial {
        let mut out = self.0.clone();
        match out.binary_search_by(|(b, _)| b.cmp(a)) {
            Ok(pos) => {
                out[pos].1 += delta;
                if out[pos].1 == 0 {
                    out.remove(pos);
                }
            }
            Err(pos) => {
                if delta != 0 {
                    out.insert(pos, (a.clone(), delta));
                }
            }
        }
        Monomial(out)
    }

    /// Total degree in jet atoms (dependent variables and their derivatives).
    pub fn jet_degree(&self) -> u32 {
        self.0
            .iter()
            .filter(|(a, _)| a.is_jet())
            .map(|(_, e)| *e as u32)
            .sum()
    }

    pub fn has_jets(&self) -> bool {
        self.0.iter().any(|(a, _)| a.is_jet())
    }

    /// True when every factor is a parameter.
    pub fn is_param_only(&self) -> bool {
        self.0.iter().all(|(a, _)| a.is_param())
    }

    /// Positive-degree total over non-parameter atoms.
    pub fn degree(&self) -> u32 {
        self.0
            .iter()
            .filter(|(a, _)| !a.is_param())
            .map(|(_, e)| *e as u32)
            .sum()
    }
}

/// An exact polynomial over rationals in jet coordinates, independent
/// variables, parameter-functions and (Laurent) parameters. The
/// representation is canonical: structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Expr {
    terms: Arc<BTreeMap<Monomial, Rational>>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(rat(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Expr::constant(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn constant(c: Rational) -> Self {
        Expr::term(Monomial::one(), c)
    }

    pub fn atom(a: Atom) -> Self {
        Expr::term(Monomial::atom(a), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut map = BTreeMap::new();
        if !c.is_zero() {
            map.insert(m, c);
        }
        Expr::from_map(map)
    }

    pub(crate) fn from_map(map: BTreeMap<Monomial, Rational>) -> Self {
        Expr {
            terms: Arc::new(map),
        }
    }

    /// Collect terms, combining like monomials.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            accumulate(&mut map, m, c);
        }
        Expr::from_map(map)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this is a rational constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// A single term whose monomial is built only from parameters.
    pub fn as_param_monomial(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        m.is_param_only().then_some((m, c))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(a, _)| a.clone()))
            .collect()
    }

    pub fn jet_atoms(&self) -> BTreeSet<Atom> {
        self.atoms().into_iter().filter(Atom::is_jet).collect()
    }

    pub fn fields(&self) -> BTreeSet<Field> {
        self.atoms()
            .iter()
            .filter_map(|a| a.as_jet().map(|(f, _)| f))
            .collect()
    }

    pub fn has_dummies(&self) -> bool {
        self.fields().iter().any(|f| f.is_dummy())
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.terms.keys().any(|m| m.exponent(a) != 0)
    }

    /// Highest total jet degree over terms (0 for the zero expression).
    pub fn jet_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::jet_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Homogeneous components keyed by jet degree.
    pub fn split_by_jet_degree(&self) -> BTreeMap<u32, Expr> {
        let mut parts: BTreeMap<u32, BTreeMap<Monomial, Rational>> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            parts
                .entry(m.jet_degree())
                .or_default()
                .insert(m.clone(), c.clone());
        }
        parts
            .into_iter()
            .map(|(d, map)| (d, Expr::from_map(map)))
            .collect()
    }

    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Expr {
        Expr::from_map(
            self.terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        )
    }

    pub fn scale(&self, k: &Rational) -> Expr {
        if k.is_zero() {
            return Expr::zero();
        }
        Expr::from_map(self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    pub fn mul_monomial(&self, mono: &Monomial, k: &Rational) -> Expr {
        if k.is_zero() {
            return Expr::zero();
        }
        Expr::from_terms(self.terms.iter().map(|(m, c)| (m.mul(mono), c * k)))
    }

    pub fn pow(&self, n: u32) -> Expr {
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Division restricted to rational constants times parameter monomials.
    pub fn checked_div(&self, other: &Expr) -> Result<Expr, ExprError> {
        if other.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        let (m, c) = other
            .as_param_monomial()
            .ok_or_else(|| ExprError::UnsupportedDenominator(format!("{other:?}")))?;
        let inv = Monomial::from_factors(m.factors().iter().map(|(a, e)| (a.clone(), -e)));
        Ok(self.mul_monomial(&inv, &c.recip()))
    }

    /// Formal partial derivative treating every atom as an independent coordinate.
    pub fn partial(&self, a: &Atom) -> Expr {
        let mut map = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let e = m.exponent(a);
            if e != 0 {
                accumulate(&mut map, m.times_power(a, -1), c * rat(e as i64));
            }
        }
        Expr::from_map(map)
    }

    /// Replace atoms simultaneously (no prolongation). Atoms with negative
    /// exponents may only be replaced by parameter monomials.
    pub fn replace_atoms(&self, rules: &BTreeMap<Atom, Expr>) -> Result<Expr, ExprError> {
        if rules.is_empty() {
            return Ok(self.clone());
        }
        let mut out = BTreeMap::new();
        let mut powers: BTreeMap<(Atom, i32), Expr> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let mut kept = Vec::new();
            let mut product = Expr::one();
            for (a, e) in m.factors() {
                match rules.get(a) {
                    None => kept.push((a.clone(), *e)),
                    Some(rep) => {
                        let key = (a.clone(), *e);
                        let factor = match powers.get(&key) {
                            Some(f) => f.clone(),
                            None => {
                                let f = if *e >= 0 {
                                    rep.pow(*e as u32)
                                } else {
                                    Expr::one().checked_div(&rep.pow(e.unsigned_abs()))?
                                };
                                powers.insert(key, f.clone());
                                f
                            }
                        };
                        product = &product * &factor;
                    }
                }
            }
            let rest = Monomial(kept);
            for (pm, pc) in product.terms.iter() {
                accumulate(&mut out, pm.mul(&rest), pc * c);
            }
        }
        Ok(Expr::from_map(out))
    }

    /// Apply `f` to every monomial, summing the images with their coefficients.
    pub fn map_monomials(&self, mut f: impl FnMut(&Monomial) -> Expr) -> Expr {
        let mut out = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            for (pm, pc) in f(m).terms.iter() {
                accumulate(&mut out, pm.clone(), pc * c);
            }
        }
        Expr::from_map(out)
    }

    /// Coefficient of `a^k` viewing the expression as a polynomial in `a`.
    pub fn coefficient_of_power(&self, a: &Atom, k: i32) -> Expr {
        Expr::from_map(
            self.terms
                .iter()
                .filter(|(m, _)| m.exponent(a) == k)
                .map(|(m, c)| (m.times_power(a, -k), c.clone()))
                .collect(),
        )
    }

    /// Leading rational coefficient sign is negative (first term in canonical order).
    pub fn leading_is_negative(&self) -> bool {
        self.terms
            .values()
            .next()
            .map(|c| c.is_negative())
            .unwrap_or(false)
    }
}

pub(crate) fn accumulate(map: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn add_maps(a: &Expr, b: &Expr, sign: bool) -> Expr {
    let (big, small, swap) = if a.terms.len() >= b.terms.len() {
        (a, b, false)
    } else {
        (b, a, true)
    };
    let mut map = (*big.terms).clone();
    if sign {
        for (m, c) in small.terms.iter() {
            accumulate(&mut map, m.clone(), c.clone());
        }
        return Expr::from_map(map);
    }
    // subtraction: result = a - b
    if swap {
        // big = b, small = a: compute a - b = -(b) + a
        for c in map.values_mut() {
            *c = -c.clone();
        }
        for (m, c) in small.terms.iter() {
            accumulate(&mut map, m.clone(), c.clone());
        }
    } else {
        for (m, c) in small.terms.iter() {
            accumulate(&mut map, m.clone(), -c.clone());
        }
    }
    Expr::from_map(map)
}

impl Add<&Expr> for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        add_maps(self, rhs, true)
    }
}

impl Sub<&Expr> for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        if rhs.is_zero() {
            return self.clone();
        }
        add_maps(self, rhs, false)
    }
}

impl Mul<&Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        let mut map = BTreeMap::new();
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in rhs.terms.iter() {
                accumulate(&mut map, m1.mul(m2), c1 * c2);
            }
        }
        Expr::from_map(map)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::from_map(
            self.terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        )
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $f(self, rhs: Expr) -> Expr {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $f(self, rhs: &Expr) -> Expr {
                (&self).$f(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $f(self, rhs: Expr) -> Expr {
                self.$f(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Expr> for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        *self = &*self - rhs;
    }
}

impl SubAssign<Expr> for Expr {
    fn sub_assign(&mut self, rhs: Expr) {
        *self = &*self - &rhs;
    }
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Self {
        Expr::atom(a)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Self {
        let mut map = BTreeMap::new();
        for e in iter {
            for (m, c) in e.terms.iter() {
                accumulate(&mut map, m.clone(), c.clone());
            }
        }
        Expr::from_map(map)
    }
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", super::display::render_generic(self))
    }
}
