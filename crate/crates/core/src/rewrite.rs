//! Binomial substitutions `lhs -> ±rhs` applied to monomials.
//!
//! Matching is leftmost-position, longest-lhs-at-that-position. A monomial
//! with no match is handed back by reference; a new value is only built
//! when a rule fires.

use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use crate::algebra::{Monomial, Word};

pub const DEFAULT_MAX_PASSES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RewriteError {
    #[error("substitution rule has an empty left-hand side")]
    EmptyLhs,
    #[error("two substitution rules share the left-hand side {0:?}")]
    DuplicateLhs(Word),
    #[error("substitution sign must be +1 or -1, got {0}")]
    BadSign(i32),
    #[error("max_passes must be positive")]
    ZeroPasses,
    #[error("no fixpoint after {passes} rewrite passes; the rule set is probably cyclic")]
    CycleSuspected { passes: usize, word: Word },
}

/// `lhs -> sign * rhs` with `sign` in {+1, -1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RewriteRule {
    lhs: Word,
    sign: i8,
    rhs: Word,
}

impl RewriteRule {
    pub fn new(lhs: Word, sign: i32, rhs: Word) -> Result<Self, RewriteError> {
        if lhs.is_one() {
            return Err(RewriteError::EmptyLhs);
        }
        let sign = match sign {
            1 => 1,
            -1 => -1,
            other => return Err(RewriteError::BadSign(other)),
        };
        Ok(Self { lhs, sign, rhs })
    }

    pub fn lhs(&self) -> &Word {
        &self.lhs
    }

    pub fn rhs(&self) -> &Word {
        &self.rhs
    }

    pub fn sign(&self) -> i32 {
        self.sign as i32
    }
}

/// Validated rules indexed by left-hand side.
#[derive(Debug)]
pub struct RuleSet {
    by_lhs: HashMap<Word, (f64, Word)>,
    // descending, so the first hit at a position is the longest
    lhs_lengths: Vec<usize>,
    max_passes: usize,
    rebuilt: AtomicUsize,
}

impl Clone for RuleSet {
    fn clone(&self) -> Self {
        Self {
            by_lhs: self.by_lhs.clone(),
            lhs_lengths: self.lhs_lengths.clone(),
            max_passes: self.max_passes,
            rebuilt: AtomicUsize::new(0),
        }
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        Self::empty()
    }
}

/// Indexes `rules`; rejects duplicate left-hand sides.
pub fn validate_rules(rules: Vec<RewriteRule>) -> Result<RuleSet, RewriteError> {
    RuleSet::new(rules)
}

impl RuleSet {
    pub fn empty() -> Self {
        Self {
            by_lhs: HashMap::new(),
            lhs_lengths: Vec::new(),
            max_passes: DEFAULT_MAX_PASSES,
            rebuilt: AtomicUsize::new(0),
        }
    }

    pub fn new(rules: Vec<RewriteRule>) -> Result<Self, RewriteError> {
        let mut by_lhs = HashMap::with_capacity(rules.len());
        let mut lengths = BTreeSet::new();
        for rule in rules {
            if rule.lhs.is_one() {
                return Err(RewriteError::EmptyLhs);
            }
            if by_lhs.contains_key(&rule.lhs) {
                return Err(RewriteError::DuplicateLhs(rule.lhs));
            }
            lengths.insert(rule.lhs.degree());
            by_lhs.insert(rule.lhs, (f64::from(rule.sign), rule.rhs));
        }
        Ok(Self {
            by_lhs,
            lhs_lengths: lengths.into_iter().rev().collect(),
            max_passes: DEFAULT_MAX_PASSES,
            rebuilt: AtomicUsize::new(0),
        })
    }

    pub fn with_max_passes(mut self, max_passes: usize) -> Result<Self, RewriteError> {
        if max_passes == 0 {
            return Err(RewriteError::ZeroPasses);
        }
        self.max_passes = max_passes;
        Ok(self)
    }

    pub fn max_passes(&self) -> usize {
        self.max_passes
    }

    pub fn len(&self) -> usize {
        self.by_lhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_lhs.is_empty()
    }

    pub fn max_lhs_degree(&self) -> usize {
        self.lhs_lengths.first().copied().unwrap_or(0)
    }

    pub fn rules(&self) -> impl Iterator<Item = RewriteRule> + '_ {
        self.by_lhs.iter().map(|(lhs, (sign, rhs))| RewriteRule {
            lhs: lhs.clone(),
            sign: *sign as i8,
            rhs: rhs.clone(),
        })
    }

    /// Number of monomials built by [`apply_once`](Self::apply_once) so far.
    pub fn rebuilt_count(&self) -> usize {
        self.rebuilt.load(Ordering::Relaxed)
    }

    /// One substitution at the leftmost matching position, using the longest
    /// lhs that matches there. `Cow::Borrowed` means nothing matched.
    pub fn apply_once<'a>(&self, m: &'a Monomial) -> Cow<'a, Monomial> {
        if m.is_zero() || self.by_lhs.is_empty() {
            return Cow::Borrowed(m);
        }
        let letters = m.word.letters();
        for start in 0..letters.len() {
            let remaining = letters.len() - start;
            for &len in &self.lhs_lengths {
                if len > remaining {
                    continue;
                }
                if let Some((sign, rhs)) = self.by_lhs.get(&letters[start..start + len]) {
                    self.rebuilt.fetch_add(1, Ordering::Relaxed);
                    let mut out = Vec::with_capacity(letters.len() - len + rhs.degree());
                    out.extend_from_slice(&letters[..start]);
                    out.extend_from_slice(rhs.letters());
                    out.extend_from_slice(&letters[start + len..]);
                    return Cow::Owned(Monomial::new(m.coeff * sign, Word::from(out)));
                }
            }
        }
        Cow::Borrowed(m)
    }

    /// Applies substitutions until none matches.
    pub fn normalize(&self, m: &Monomial) -> Result<Monomial, RewriteError> {
        let mut current = match self.apply_once(m) {
            Cow::Borrowed(_) => return Ok(m.clone()),
            Cow::Owned(next) => next,
        };
        for _ in 1..self.max_passes {
            match self.apply_once(&current) {
                Cow::Borrowed(_) => return Ok(current),
                Cow::Owned(next) => current = next,
            }
        }
        if matches!(self.apply_once(&current), Cow::Borrowed(_)) {
            return Ok(current);
        }
        Err(RewriteError::CycleSuspected {
            passes: self.max_passes,
            word: m.word.clone(),
        })
    }

    pub fn normalize_word(&self, w: &Word) -> Result<Monomial, RewriteError> {
        self.normalize(&Monomial::new(1.0, w.clone()))
    }
}
