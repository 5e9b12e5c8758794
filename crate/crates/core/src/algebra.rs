//! The free *-algebra over a set of noncommuting variables.
//!
//! Words are finite products of letters `x_i` and `x_i*`. The involution
//! reverses a word and stars every letter; for Hermitian variables the
//! starred letter is the unstarred one, so the alphabet halves.

use std::borrow::Borrow;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::rewrite::{RewriteError, RuleSet};

/// A declared variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableSpec {
    pub id: u32,
    pub name: String,
    pub hermitian: bool,
}

impl VariableSpec {
    pub fn new(id: u32, name: impl Into<String>, hermitian: bool) -> Self {
        Self {
            id,
            name: name.into(),
            hermitian,
        }
    }

    /// The unstarred letter of this variable.
    pub fn letter(&self) -> Letter {
        Letter::new(self.id, false, self.hermitian)
    }

    /// The starred letter; equal to [`letter`](Self::letter) for Hermitian variables.
    pub fn starred(&self) -> Letter {
        Letter::new(self.id, true, self.hermitian)
    }

    /// The one-letter word `x`.
    pub fn word(&self) -> Word {
        Word::from(vec![self.letter()])
    }
}

/// `n` variables named `x1..xn` with ids `0..n`.
pub fn generate_variables(n: usize, hermitian: bool) -> Vec<VariableSpec> {
    (0..n)
        .map(|i| VariableSpec::new(i as u32, format!("x{}", i + 1), hermitian))
        .collect()
}

/// A single letter `x_i` or `x_i*`.
///
/// Ordering is by variable id, then unstarred before starred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    var: u32,
    starred: bool,
    hermitian: bool,
}

impl Letter {
    pub fn new(var: u32, starred: bool, hermitian: bool) -> Self {
        Self {
            var,
            starred: starred && !hermitian,
            hermitian,
        }
    }

    pub fn var(&self) -> u32 {
        self.var
    }

    pub fn is_starred(&self) -> bool {
        self.starred
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn involve(self) -> Self {
        Self::new(self.var, !self.starred, self.hermitian)
    }
}

/// A product of letters. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Reversed word with every letter starred.
    pub fn involve(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.involve()).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Self(letters)
    }

    /// `v* · w`, the label of a moment-matrix entry.
    pub fn adjoint_concat(&self, other: &Word) -> Self {
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len());
        letters.extend(self.0.iter().rev().map(|l| l.involve()));
        letters.extend_from_slice(&other.0);
        Self(letters)
    }

    /// Renders the word with declared variable names, e.g. `x1*x2'^2`.
    pub fn display<'a>(&'a self, vars: &'a [VariableSpec]) -> impl fmt::Display + 'a {
        NamedWord { word: self, vars }
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Self(letters)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Borrow<[Letter]> for Word {
    fn borrow(&self) -> &[Letter] {
        &self.0
    }
}

struct NamedWord<'a> {
    word: &'a Word,
    vars: &'a [VariableSpec],
}

impl fmt::Display for NamedWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_one() {
            return f.write_str("1");
        }
        let letters = self.word.letters();
        let mut first = true;
        let mut pos = 0;
        while pos < letters.len() {
            let letter = letters[pos];
            let run = letters[pos..].iter().take_while(|&&l| l == letter).count();
            if !first {
                f.write_str("*")?;
            }
            first = false;
            match self.vars.iter().find(|v| v.id == letter.var) {
                Some(v) => f.write_str(&v.name)?,
                None => write!(f, "v{}", letter.var)?,
            }
            if letter.starred {
                f.write_str("'")?;
            }
            if run > 1 {
                write!(f, "^{run}")?;
            }
            pos += run;
        }
        Ok(())
    }
}

/// A scaled word. A zero coefficient always carries the empty word.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub word: Word,
}

impl Monomial {
    pub fn new(coeff: f64, word: Word) -> Self {
        if coeff == 0.0 {
            Self::zero()
        } else {
            Self { coeff, word }
        }
    }

    pub fn zero() -> Self {
        Self {
            coeff: 0.0,
            word: Word::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == 0.0
    }
}

impl From<Word> for Monomial {
    fn from(word: Word) -> Self {
        Self::new(1.0, word)
    }
}

/// Finite real combination of words. No stored coefficient is zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<Word, f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, Word::one())
    }

    pub fn monomial(coeff: f64, word: Word) -> Self {
        let mut p = Self::zero();
        p.add_term(word, coeff);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, f64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    pub fn add_term(&mut self, word: Word, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        match self.terms.entry(word) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                let sum = *e.get() + coeff;
                if sum == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, f64)> + '_ {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn coeff(&self, word: &Word) -> f64 {
        self.terms.get(word).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Length of the longest word; 0 for constants and the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, &k)| (w.clone(), k * c)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, &k)| (w.involve(), k)))
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    /// `(p + p*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(0.5)
    }

    pub fn display<'a>(&'a self, vars: &'a [VariableSpec]) -> impl fmt::Display + 'a {
        NamedPolynomial { poly: self, vars }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (w, &c) in &rhs.terms {
            out.add_term(w.clone(), c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (w, &c) in &rhs.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                out.add_term(a.concat(b), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;

            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl From<Word> for Polynomial {
    fn from(word: Word) -> Self {
        Self::monomial(1.0, word)
    }
}

struct NamedPolynomial<'a> {
    poly: &'a Polynomial,
    vars: &'a [VariableSpec],
}

impl fmt::Display for NamedPolynomial<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (k, (word, coeff)) in self.poly.terms().enumerate() {
            let magnitude = coeff.abs();
            if k == 0 {
                if coeff < 0.0 {
                    f.write_str("-")?;
                }
            } else if coeff < 0.0 {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if word.is_one() {
                write!(f, "{}", crate::format_real(magnitude))?;
            } else if magnitude == 1.0 {
                write!(f, "{}", word.display(self.vars))?;
            } else {
                write!(
                    f,
                    "{}*{}",
                    crate::format_real(magnitude),
                    word.display(self.vars)
                )?;
            }
        }
        Ok(())
    }
}

/// The effective alphabet: unstarred letters by id, each followed by its
/// starred letter unless the variable is Hermitian.
pub fn alphabet(vars: &[VariableSpec]) -> Vec<Letter> {
    let mut sorted: Vec<&VariableSpec> = vars.iter().collect();
    sorted.sort_by_key(|v| v.id);
    let mut out = Vec::with_capacity(2 * vars.len());
    for v in sorted {
        out.push(v.letter());
        if !v.hermitian {
            out.push(v.starred());
        }
    }
    out
}

/// Words of degree at most `order`, degree-major and lexicographic within a
/// degree. Every word is normalized by `rules`; duplicates after
/// normalization are dropped. The empty word always comes first.
pub fn generate_basis(
    vars: &[VariableSpec],
    order: usize,
    rules: &RuleSet,
) -> Result<Vec<Word>, RewriteError> {
    let letters = alphabet(vars);
    let mut seen: HashSet<Word> = HashSet::new();
    let mut basis = Vec::new();
    seen.insert(Word::one());
    basis.push(Word::one());
    if letters.is_empty() {
        return Ok(basis);
    }
    for degree in 1..=order {
        let mut digits = vec![0usize; degree];
        loop {
            let word: Word = digits.iter().map(|&d| letters[d]).collect();
            let normal = rules.normalize(&Monomial::from(word))?;
            if !normal.is_zero() && seen.insert(normal.word.clone()) {
                basis.push(normal.word);
            }
            if !advance(&mut digits, letters.len()) {
                break;
            }
        }
    }
    Ok(basis)
}

// Odometer increment, last position fastest. False once it wraps around.
fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rules(list: Vec<crate::rewrite::RewriteRule>) -> RuleSet {
        RuleSet::new(list).unwrap()
    }

    #[test]
    fn involution_of_nonhermitian_product() {
        let v = generate_variables(2, false);
        let w = v[0].word().concat(&v[1].word());
        let expected = Word::from(vec![v[1].starred(), v[0].starred()]);
        assert_eq!(w.involve(), expected);
        assert_eq!(w.involve().involve(), w);
    }

    #[test]
    fn involution_of_hermitian_product_reverses() {
        let v = generate_variables(2, true);
        let w = v[0].word().concat(&v[1].word());
        assert_eq!(w.involve(), v[1].word().concat(&v[0].word()));
        assert_eq!(Word::one().involve(), Word::one());
    }

    #[test]
    fn hermitian_letters_are_never_starred() {
        let v = VariableSpec::new(0, "a", true);
        assert!(!v.starred().is_starred());
        assert_eq!(v.starred(), v.letter());
    }

    #[test]
    fn concat_identity_and_degree() {
        let v = generate_variables(2, false);
        let w = v[0].word().concat(&v[1].word());
        assert_eq!(w.degree(), 2);
        assert_eq!(Word::one().concat(&w), w);
        assert_eq!(w.concat(&Word::one()), w);
    }

    #[test]
    fn difference_of_squares_does_not_cancel() {
        let v = generate_variables(2, true);
        let x1 = Polynomial::from(v[0].word());
        let x2 = Polynomial::from(v[1].word());
        let p = &(&x1 + &x2) * &(&x1 - &x2);
        assert_eq!(p.len(), 4);
        let w = |a: usize, b: usize| v[a].word().concat(&v[b].word());
        assert_eq!(p.coeff(&w(0, 0)), 1.0);
        assert_eq!(p.coeff(&w(0, 1)), -1.0);
        assert_eq!(p.coeff(&w(1, 0)), 1.0);
        assert_eq!(p.coeff(&w(1, 1)), -1.0);
    }

    #[test]
    fn hermitian_sum_is_its_own_adjoint() {
        let v = generate_variables(2, true);
        let p = Polynomial::from(v[0].word().concat(&v[1].word()))
            + Polynomial::from(v[1].word().concat(&v[0].word()));
        assert!(p.is_hermitian());
        assert_eq!(p.adjoint(), p);
    }

    #[test]
    fn times_zero_is_zero() {
        let v = generate_variables(1, false);
        let p = Polynomial::from(v[0].word()) + Polynomial::constant(2.0);
        assert!((&p * &Polynomial::zero()).is_zero());
        assert!(p.scale(0.0).is_zero());
    }

    #[test]
    fn zero_monomial_is_canonical() {
        let v = generate_variables(1, false);
        let m = Monomial::new(0.0, v[0].word());
        assert_eq!(m, Monomial::zero());
    }

    #[test]
    fn basis_single_nonhermitian_variable() {
        let v = generate_variables(1, false);
        let b = generate_basis(&v, 1, &RuleSet::empty()).unwrap();
        assert_eq!(
            b,
            vec![Word::one(), v[0].word(), Word::from(vec![v[0].starred()])]
        );
    }

    #[test]
    fn basis_with_projector_rule_matches_toy() {
        let v = generate_variables(2, true);
        let x1 = v[0].word();
        let x2 = v[1].word();
        let rs = rules(vec![crate::rewrite::RewriteRule::new(
            x1.concat(&x1),
            1,
            x1.clone(),
        )
        .unwrap()]);
        let b = generate_basis(&v, 2, &rs).unwrap();
        assert_eq!(
            b,
            vec![
                Word::one(),
                x1.clone(),
                x2.clone(),
                x1.concat(&x2),
                x2.concat(&x1),
                x2.concat(&x2)
            ]
        );
    }

    #[test]
    fn basis_without_rules_has_seven_words() {
        let v = generate_variables(2, true);
        let b = generate_basis(&v, 2, &RuleSet::empty()).unwrap();
        assert_eq!(b.len(), 7);
    }

    #[test]
    fn hermitian_basis_count_halves_alphabet() {
        for n in 1..=3usize {
            let v = generate_variables(n, true);
            for d in 0..=3usize {
                let b = generate_basis(&v, d, &RuleSet::empty()).unwrap();
                let expected = if n == 1 {
                    d + 1
                } else {
                    (n.pow(d as u32 + 1) - 1) / (n - 1)
                };
                assert_eq!(b.len(), expected, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn display_uses_powers_and_primes() {
        let v = generate_variables(2, false);
        let w = Word::from(vec![v[0].letter(), v[0].letter(), v[1].starred()]);
        assert_eq!(w.display(&v).to_string(), "x1^2*x2'");
        let p = Polynomial::from(w).scale(-0.5) + Polynomial::constant(1.0);
        assert_eq!(p.display(&v).to_string(), "1 - 0.5*x1^2*x2'");
    }
}
