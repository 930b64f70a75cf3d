//! Sparse Laurent-polynomial and rational-function arithmetic over the
//! character lattice of an algebraic torus, with exact rational coefficients.
//!
//! Exponent vectors live in a fixed-rank lattice; coefficients are
//! arbitrary-precision rationals. Every operation is exact: there is no
//! floating point anywhere in this crate.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;

/// Exact rational coefficient.
pub type Coeff = BigRational;

/// A lattice vector, used both for monomial exponents and for linear
/// functionals on the exponent lattice.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpVec(Vec<i64>);

impl ExpVec {
    pub fn new(entries: Vec<i64>) -> Self {
        ExpVec(entries)
    }

    pub fn zero(n: usize) -> Self {
        ExpVec(vec![0; n])
    }

    /// Standard basis vector e_i (0-based axis).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        ExpVec(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn add(&self, other: &ExpVec) -> ExpVec {
        assert_eq!(self.len(), other.len(), "exponent length mismatch");
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &ExpVec) -> ExpVec {
        assert_eq!(self.len(), other.len(), "exponent length mismatch");
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> ExpVec {
        ExpVec(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> ExpVec {
        ExpVec(self.0.iter().map(|a| a * k).collect())
    }

    /// Pairing of a linear functional with a lattice vector.
    pub fn dot(&self, other: &ExpVec) -> i64 {
        assert_eq!(self.len(), other.len(), "exponent length mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// gcd of the absolute values of the entries; 0 for the zero vector.
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &e| num_integer::gcd(g, e.abs()))
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl fmt::Debug for ExpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

fn coeff_text(c: &Coeff) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn parse_coeff(s: &str) -> Result<Coeff, Error> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let numer: BigInt = num
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad coefficient numerator `{num}`")))?;
    let denom: BigInt = den
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad coefficient denominator `{den}`")))?;
    if denom.is_zero() {
        return Err(Error::Parse("zero coefficient denominator".into()));
    }
    Ok(BigRational::new(numer, denom))
}

/// Internal monomial order used by the exact-division routine. The result
/// of a successful division is order-independent; both orders are exercised
/// by the tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    GrLex,
    Lex,
}

impl MonomialOrder {
    fn cmp(&self, a: &ExpVec, b: &ExpVec) -> std::cmp::Ordering {
        match self {
            MonomialOrder::GrLex => a
                .total_degree()
                .cmp(&b.total_degree())
                .then_with(|| a.cmp(b)),
            MonomialOrder::Lex => a.cmp(b),
        }
    }
}

/// A sparse Laurent polynomial: a finite map from exponent vectors to
/// nonzero rational coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    n_vars: usize,
    terms: BTreeMap<ExpVec, Coeff>,
}

impl LaurentPoly {
    pub fn zero(n_vars: usize) -> Self {
        LaurentPoly {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n_vars: usize) -> Self {
        Self::monomial(ExpVec::zero(n_vars), Coeff::one())
    }

    pub fn constant(n_vars: usize, c: Coeff) -> Self {
        Self::monomial(ExpVec::zero(n_vars), c)
    }

    pub fn monomial(exp: ExpVec, coeff: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        let n_vars = exp.len();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { n_vars, terms }
    }

    /// Single variable z_i (0-based axis).
    pub fn var(n_vars: usize, i: usize) -> Self {
        Self::monomial(ExpVec::unit(n_vars, i), Coeff::one())
    }

    pub fn from_terms<I>(n_vars: usize, iter: I) -> Self
    where
        I: IntoIterator<Item = (ExpVec, Coeff)>,
    {
        let mut p = LaurentPoly::zero(n_vars);
        for (e, c) in iter {
            p.add_term(e, c);
        }
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &ExpVec) -> Coeff {
        self.terms.get(exp).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn as_monomial(&self) -> Option<(&ExpVec, &Coeff)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, exp: ExpVec, coeff: Coeff) {
        assert_eq!(exp.len(), self.n_vars, "exponent length mismatch");
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.n_vars, other.n_vars, "dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.n_vars, other.n_vars, "dimension mismatch");
        let mut out = LaurentPoly::zero(self.n_vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero(self.n_vars);
        }
        LaurentPoly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    /// Multiply by the monomial z^shift.
    pub fn shift(&self, shift: &ExpVec) -> LaurentPoly {
        LaurentPoly {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.add(shift), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        let mut out = LaurentPoly::one(self.n_vars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Componentwise minimum of the exponents in the support; None for zero.
    pub fn min_exponent(&self) -> Option<ExpVec> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut min = first.entries().to_vec();
        for e in it {
            for (m, &x) in min.iter_mut().zip(e.entries()) {
                if x < *m {
                    *m = x;
                }
            }
        }
        Some(ExpVec::new(min))
    }

    /// Transport exponents through a lattice map. The image dimension is
    /// taken from the mapped exponents.
    pub fn map_exponents<F>(&self, f: F) -> LaurentPoly
    where
        F: Fn(&ExpVec) -> ExpVec,
    {
        let mut out: Option<LaurentPoly> = None;
        for (e, c) in &self.terms {
            let img = f(e);
            let out = out.get_or_insert_with(|| LaurentPoly::zero(img.len()));
            out.add_term(img, c.clone());
        }
        out.unwrap_or_else(|| LaurentPoly::zero(self.n_vars))
    }

    /// Sub-sum of the terms whose exponent pairs to `value` with `w`.
    pub fn select_by_pairing(&self, w: &ExpVec, value: i64) -> LaurentPoly {
        LaurentPoly {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| w.dot(e) == value)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Partition the terms by their pairing with `w`.
    pub fn split_by_pairing(&self, w: &ExpVec) -> BTreeMap<i64, LaurentPoly> {
        let mut out: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            out.entry(w.dot(e))
                .or_insert_with(|| LaurentPoly::zero(self.n_vars))
                .add_term(e.clone(), c.clone());
        }
        out
    }

    /// Exact evaluation at a point of the torus (all coordinates nonzero).
    pub fn eval(&self, point: &[Coeff]) -> Result<Coeff, Error> {
        if point.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: point.len(),
            });
        }
        if point.iter().any(|p| p.is_zero()) {
            return Err(Error::OffTorus);
        }
        let mut acc = Coeff::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (p, &k) in point.iter().zip(e.entries()) {
                term *= rational_pow(p, k);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Logarithmic partial derivative along axis `i` (0-based): sends z^v to
    /// v_i z^v, so the result stays Laurent.
    pub fn log_partial(&self, i: usize) -> Result<LaurentPoly, Error> {
        if i >= self.n_vars {
            return Err(Error::AxisOutOfRange {
                axis: i,
                n_vars: self.n_vars,
            });
        }
        let mut out = LaurentPoly::zero(self.n_vars);
        for (e, c) in &self.terms {
            let k = e.entries()[i];
            if k != 0 {
                out.add_term(e.clone(), c * BigRational::from_integer(BigInt::from(k)));
            }
        }
        Ok(out)
    }

    /// Exact division in the Laurent ring: returns q with self = q * divisor,
    /// or None when no such Laurent polynomial exists.
    ///
    /// Both operands are shifted by their componentwise minimum exponent so
    /// the computation happens in the ordinary polynomial ring; for a single
    /// divisor the division algorithm leaves zero remainder exactly when the
    /// divisor divides the dividend.
    pub fn exact_div(&self, divisor: &LaurentPoly) -> Option<LaurentPoly> {
        self.exact_div_with_order(divisor, MonomialOrder::GrLex)
    }

    pub fn exact_div_with_order(
        &self,
        divisor: &LaurentPoly,
        order: MonomialOrder,
    ) -> Option<LaurentPoly> {
        assert_eq!(self.n_vars, divisor.n_vars, "dimension mismatch");
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(LaurentPoly::zero(self.n_vars));
        }
        let shift_f = self.min_exponent().unwrap();
        let shift_g = divisor.min_exponent().unwrap();
        let f = self.shift(&shift_f.neg());
        let g = divisor.shift(&shift_g.neg());

        let (lead_exp, lead_coeff) = g.leading_term(order);
        let mut rem = f;
        let mut quot = LaurentPoly::zero(self.n_vars);
        while !rem.is_zero() {
            let (re, rc) = rem.leading_term(order);
            let diff: Vec<i64> = re
                .entries()
                .iter()
                .zip(lead_exp.entries())
                .map(|(a, b)| a - b)
                .collect();
            if diff.iter().any(|&d| d < 0) {
                // leading term not divisible, so the remainder is nonzero
                return None;
            }
            let qe = ExpVec::new(diff);
            let qc = rc / &lead_coeff;
            rem = rem.sub(&g.shift(&qe).scale(&qc));
            quot.add_term(qe, qc);
        }
        Some(quot.shift(&shift_f.sub(&shift_g)))
    }

    fn leading_term(&self, order: MonomialOrder) -> (ExpVec, Coeff) {
        let (e, c) = self
            .terms
            .iter()
            .max_by(|(a, _), (b, _)| order.cmp(a, b))
            .expect("leading term of zero polynomial");
        (e.clone(), c.clone())
    }

    /// Canonical text form: terms sorted by lexicographic exponent order,
    /// coefficients as `p` or `p/q`, exponents as integer tuples.
    pub fn canonical_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(e, c)| {
                let exps = e
                    .entries()
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                format!("{}*({})", coeff_text(c), exps)
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn parse_canonical(n_vars: usize, text: &str) -> Result<LaurentPoly, Error> {
        let text = text.trim();
        if text == "0" {
            return Ok(LaurentPoly::zero(n_vars));
        }
        let mut poly = LaurentPoly::zero(n_vars);
        for term in text.split(" + ") {
            let (coeff, exps) = term
                .split_once('*')
                .ok_or_else(|| Error::Parse(format!("malformed term `{term}`")))?;
            let exps = exps.trim();
            let inner = exps
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("malformed exponent tuple `{exps}`")))?;
            let entries: Vec<i64> = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::Parse(format!("bad exponent `{x}`")))
                    })
                    .collect::<Result<_, _>>()?
            };
            if entries.len() != n_vars {
                return Err(Error::DimensionMismatch {
                    expected: n_vars,
                    got: entries.len(),
                });
            }
            poly.add_term(ExpVec::new(entries), parse_coeff(coeff)?);
        }
        Ok(poly)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_text())
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_text())
    }
}

/// Exact integer power of a rational; negative powers require a nonzero base.
pub fn rational_pow(base: &Coeff, k: i64) -> Coeff {
    if k == 0 {
        return Coeff::one();
    }
    let b = if k > 0 { base.clone() } else { base.recip() };
    let mut acc = Coeff::one();
    for _ in 0..k.unsigned_abs() {
        acc *= &b;
    }
    acc
}

/// A quotient of Laurent polynomials. Not kept in lowest terms; equality is
/// cross-multiplication. A value with monomial denominator is convertible
/// back to a Laurent polynomial.
#[derive(Clone)]
pub struct RationalFn {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFn {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        assert_eq!(num.n_vars(), den.n_vars(), "dimension mismatch");
        Ok(RationalFn { num, den })
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        let n = p.n_vars();
        RationalFn {
            num: p,
            den: LaurentPoly::one(n),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.num.n_vars()
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Equality by cross multiplication: a/b = c/d iff ad = cb.
    pub fn eq_rational(&self, other: &RationalFn) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    pub fn mul(&self, other: &RationalFn) -> RationalFn {
        RationalFn {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
        .monomial_reduced()
    }

    pub fn add(&self, other: &RationalFn) -> RationalFn {
        RationalFn {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
        .monomial_reduced()
    }

    pub fn sub(&self, other: &RationalFn) -> RationalFn {
        self.add(&RationalFn {
            num: other.num.neg(),
            den: other.den.clone(),
        })
    }

    /// Integer power; negative powers swap numerator and denominator.
    pub fn pow(&self, k: i64) -> Result<RationalFn, Error> {
        if k < 0 && self.num.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (num, den) = if k >= 0 {
            (self.num.pow(k as u32), self.den.pow(k as u32))
        } else {
            (self.den.pow((-k) as u32), self.num.pow((-k) as u32))
        };
        Ok(RationalFn { num, den })
    }

    pub fn eval(&self, point: &[Coeff]) -> Result<Coeff, Error> {
        let den = self.den.eval(point)?;
        if den.is_zero() {
            return Err(Error::PoleAtSample);
        }
        Ok(self.num.eval(point)? / den)
    }

    /// Divide numerator and denominator by the denominator's monomial, so
    /// monomial denominators collapse to 1.
    fn monomial_reduced(mut self) -> RationalFn {
        if let Some((e, c)) = self.den.as_monomial() {
            let e = e.clone();
            let c = c.clone();
            self.num = self.num.shift(&e.neg()).scale(&c.recip());
            self.den = LaurentPoly::one(self.num.n_vars());
        }
        self
    }

    /// Convert to a Laurent polynomial when the denominator divides the
    /// numerator exactly in the Laurent ring.
    pub fn to_laurent(&self) -> Option<LaurentPoly> {
        if let Some((e, c)) = self.den.as_monomial() {
            return Some(self.num.shift(&e.neg()).scale(&c.recip()));
        }
        self.num.exact_div(&self.den)
    }

    /// Collapse the denominator whenever the quotient is Laurent.
    pub fn normalized(self) -> RationalFn {
        match self.to_laurent() {
            Some(p) => RationalFn::from_poly(p),
            None => self,
        }
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(n: i64) -> Coeff {
        BigRational::from_integer(BigInt::from(n))
    }

    fn p(n_vars: usize, terms: &[(&[i64], i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(
            n_vars,
            terms.iter().map(|(e, k)| (ExpVec::new(e.to_vec()), c(*k))),
        )
    }

    #[test]
    fn mul_difference_of_squares() {
        let one_plus_x = p(1, &[(&[0], 1), (&[1], 1)]);
        let one_minus_x = p(1, &[(&[0], 1), (&[1], -1)]);
        assert_eq!(one_plus_x.mul(&one_minus_x), p(1, &[(&[0], 1), (&[2], -1)]));
    }

    #[test]
    fn mul_inverse_monomials() {
        let x = p(1, &[(&[1], 1)]);
        let x_inv = p(1, &[(&[-1], 1)]);
        assert_eq!(x.mul(&x_inv), LaurentPoly::one(1));
    }

    #[test]
    fn mul_mixed_inverse_sum() {
        // (x+y)(x^-1+y^-1) = 2 + x y^-1 + x^-1 y, frozen from expanding the
        // four products and collecting.
        let f = p(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let g = p(2, &[(&[-1, 0], 1), (&[0, -1], 1)]);
        let expected = p(2, &[(&[0, 0], 2), (&[1, -1], 1), (&[-1, 1], 1)]);
        assert_eq!(f.mul(&g), expected);
    }

    #[test]
    fn exact_div_basic() {
        let f = p(1, &[(&[0], 1), (&[2], -1)]);
        let g = p(1, &[(&[0], 1), (&[1], 1)]);
        assert_eq!(f.exact_div(&g), Some(p(1, &[(&[0], 1), (&[1], -1)])));
    }

    #[test]
    fn exact_div_by_monomial() {
        // (x+y)/x = 1 + x^-1 y
        let f = p(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let g = p(2, &[(&[1, 0], 1)]);
        assert_eq!(f.exact_div(&g), Some(p(2, &[(&[0, 0], 1), (&[-1, 1], 1)])));
    }

    #[test]
    fn exact_div_not_divisible() {
        // (1+x+y)/(1+x): remainder y
        let f = p(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)]);
        let g = p(2, &[(&[0, 0], 1), (&[1, 0], 1)]);
        assert_eq!(f.exact_div(&g), None);
    }

    #[test]
    fn eval_simple() {
        let f = p(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        assert_eq!(f.eval(&[c(1), c(1)]).unwrap(), c(2));
    }

    #[test]
    fn eval_with_inverse_monomial() {
        // x+y+z+(xyz)^-1 at (1,1,1) = 4
        let f = p(
            3,
            &[
                (&[1, 0, 0], 1),
                (&[0, 1, 0], 1),
                (&[0, 0, 1], 1),
                (&[-1, -1, -1], 1),
            ],
        );
        assert_eq!(f.eval(&[c(1), c(1), c(1)]).unwrap(), c(4));
    }

    #[test]
    fn eval_off_torus_is_error() {
        let f = p(2, &[(&[1, 0], 1)]);
        assert!(matches!(f.eval(&[c(0), c(1)]), Err(Error::OffTorus)));
    }

    #[test]
    fn log_partial_examples() {
        let x = p(2, &[(&[1, 0], 1)]);
        assert_eq!(x.log_partial(0).unwrap(), x);
        // theta_x(x^-1 y) = -x^-1 y
        let m = p(2, &[(&[-1, 1], 1)]);
        assert_eq!(m.log_partial(0).unwrap(), m.neg());
        // constants vanish
        let five = p(2, &[(&[0, 0], 5)]);
        assert!(five.log_partial(0).unwrap().is_zero());
        assert!(matches!(
            five.log_partial(2),
            Err(Error::AxisOutOfRange { .. })
        ));
    }

    #[test]
    fn rational_eq_examples() {
        // (x^2-1)/(x-1) = (x+1)/1
        let a = RationalFn::new(
            p(1, &[(&[2], 1), (&[0], -1)]),
            p(1, &[(&[1], 1), (&[0], -1)]),
        )
        .unwrap();
        let b = RationalFn::from_poly(p(1, &[(&[1], 1), (&[0], 1)]));
        assert!(a.eq_rational(&b));
        // x^-1/1 = 1/x
        let l = RationalFn::from_poly(p(1, &[(&[-1], 1)]));
        let r = RationalFn::new(LaurentPoly::one(1), p(1, &[(&[1], 1)])).unwrap();
        assert!(l.eq_rational(&r));
    }

    #[test]
    fn canonical_text_round_trip() {
        let f = p(
            3,
            &[
                (&[1, 0, 0], 1),
                (&[-1, -1, -1], 1),
                (&[0, 1, 0], 1),
                (&[0, 0, 1], 1),
            ],
        );
        let text = f.canonical_text();
        assert_eq!(text, "1*(-1,-1,-1) + 1*(0,0,1) + 1*(0,1,0) + 1*(1,0,0)");
        assert_eq!(LaurentPoly::parse_canonical(3, &text).unwrap(), f);
        assert_eq!(
            LaurentPoly::parse_canonical(2, "0").unwrap(),
            LaurentPoly::zero(2)
        );
        let half = LaurentPoly::constant(1, BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert_eq!(half.canonical_text(), "-1/2*(0)");
        assert_eq!(LaurentPoly::parse_canonical(1, "-1/2*(0)").unwrap(), half);
    }

    #[test]
    fn values_are_thread_transferable() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<ExpVec>();
        assert_send_sync::<LaurentPoly>();
        assert_send_sync::<RationalFn>();
    }

    fn arb_coeff() -> impl Strategy<Value = Coeff> {
        (-6i64..=6, 1i64..=4).prop_filter_map("nonzero", |(n, d)| {
            if n == 0 {
                None
            } else {
                Some(BigRational::new(BigInt::from(n), BigInt::from(d)))
            }
        })
    }

    fn arb_poly(n_vars: usize) -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec(
            (proptest::collection::vec(-3i64..=3, n_vars), arb_coeff()),
            0..4,
        )
        .prop_map(move |terms| {
            LaurentPoly::from_terms(n_vars, terms.into_iter().map(|(e, c)| (ExpVec::new(e), c)))
        })
    }

    fn arb_nonzero_poly(n_vars: usize) -> impl Strategy<Value = LaurentPoly> {
        arb_poly(n_vars).prop_filter("nonzero", |f| !f.is_zero())
    }

    fn arb_point(n_vars: usize) -> impl Strategy<Value = Vec<Coeff>> {
        proptest::collection::vec(arb_coeff(), n_vars)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn distributivity((f, g, h) in (arb_poly(2), arb_poly(2), arb_poly(2))) {
            prop_assert_eq!(f.add(&g).mul(&h), f.mul(&h).add(&g.mul(&h)));
        }

        #[test]
        fn eval_is_ring_hom((f, g, pt) in (arb_poly(2), arb_poly(2), arb_point(2))) {
            let fg = f.mul(&g).eval(&pt).unwrap();
            prop_assert_eq!(fg, f.eval(&pt).unwrap() * g.eval(&pt).unwrap());
            let sum = f.add(&g).eval(&pt).unwrap();
            prop_assert_eq!(sum, f.eval(&pt).unwrap() + g.eval(&pt).unwrap());
        }

        #[test]
        fn exact_div_recovers_factor((f, g) in (arb_poly(2), arb_nonzero_poly(2))) {
            let prod = f.mul(&g);
            prop_assert_eq!(prod.exact_div(&g), Some(f.clone()));
            // the order choice must not affect the result
            prop_assert_eq!(prod.exact_div_with_order(&g, MonomialOrder::Lex), Some(f));
        }

        #[test]
        fn leibniz_rule((f, g) in (arb_poly(2), arb_poly(2))) {
            for i in 0..2 {
                let lhs = f.mul(&g).log_partial(i).unwrap();
                let rhs = f.mul(&g.log_partial(i).unwrap())
                    .add(&g.mul(&f.log_partial(i).unwrap()));
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn rational_eq_is_equivalence(
            (a, b, h1, h2) in (arb_nonzero_poly(2), arb_nonzero_poly(2),
                               arb_nonzero_poly(2), arb_nonzero_poly(2))
        ) {
            let x = RationalFn::new(a.clone(), b.clone()).unwrap();
            let y = RationalFn::new(a.mul(&h1), b.mul(&h1)).unwrap();
            let z = RationalFn::new(a.mul(&h2), b.mul(&h2)).unwrap();
            prop_assert!(x.eq_rational(&x));
            prop_assert!(x.eq_rational(&y) && y.eq_rational(&x));
            prop_assert!(y.eq_rational(&z));
            prop_assert!(x.eq_rational(&z));
        }
    }
}
