//! Moment and localizing matrices of the order-`d` relaxation.
//!
//! Every entry label is normalized by the rule set and then identified with
//! its adjoint: `y_w` and `y_{w*}` share one SDP variable (real field).
//! Variable indices are 1-based in first-occurrence order; index 0 stands
//! for the constant `y_1 = 1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::algebra::{generate_basis, Polynomial, VariableSpec, Word};
use crate::rewrite::{RewriteError, RuleSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RelaxationError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(
        "relaxation order {order} is too low; degree {degree} needs order at least {required}"
    )]
    OrderTooLow {
        order: usize,
        degree: usize,
        required: usize,
    },
    #[error("moment {0:?} does not appear in the moment matrix")]
    UnknownMoment(Word),
}

/// Canonical value of a word under the rules and the involution.
#[derive(Debug, Clone, PartialEq)]
pub enum Moment {
    /// The word is forced to zero (`y_w = -y_w`).
    Zero,
    /// `sign * y_1`.
    Constant(f64),
    /// `sign * y_word`.
    Variable(f64, Word),
}

/// `c(w)`: normalize `w` and `w*`, keep the lexicographically smaller one.
pub fn canonicalize(w: &Word, rules: &RuleSet) -> Result<Moment, RewriteError> {
    let direct = rules.normalize_word(w)?;
    let adjoint = rules.normalize_word(&w.involve())?;
    let chosen = if direct.word == adjoint.word {
        if direct.coeff != adjoint.coeff {
            return Ok(Moment::Zero);
        }
        direct
    } else if direct.word < adjoint.word {
        direct
    } else {
        adjoint
    };
    if chosen.is_zero() {
        Ok(Moment::Zero)
    } else if chosen.word.is_one() {
        Ok(Moment::Constant(chosen.coeff))
    } else {
        Ok(Moment::Variable(chosen.coeff, chosen.word))
    }
}

/// Canonical words and their SDP variable indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MonomialDictionary {
    index_of: HashMap<Word, usize>,
    words: Vec<Word>,
}

impl MonomialDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &Word) -> Option<usize> {
        self.index_of.get(word).copied()
    }

    /// Word of the 1-based variable `index`.
    pub fn word(&self, index: usize) -> Option<&Word> {
        index.checked_sub(1).and_then(|i| self.words.get(i))
    }

    /// `(index, word)` pairs in index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Word)> + '_ {
        self.words.iter().enumerate().map(|(i, w)| (i + 1, w))
    }

    fn get_or_insert(&mut self, word: Word) -> usize {
        if let Some(&idx) = self.index_of.get(&word) {
            return idx;
        }
        self.words.push(word.clone());
        let idx = self.words.len();
        self.index_of.insert(word, idx);
        idx
    }
}

/// `constant + sum coeffs[l] * y_l`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AffineExpr {
    pub constant: f64,
    coeffs: BTreeMap<usize, f64>,
}

impl AffineExpr {
    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn variable(index: usize, coeff: f64) -> Self {
        let mut e = Self::default();
        e.add_term(index, coeff);
        e
    }

    pub fn add_term(&mut self, index: usize, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let slot = self.coeffs.entry(index).or_insert(0.0);
        *slot += coeff;
        if *slot == 0.0 {
            self.coeffs.remove(&index);
        }
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().map(|(&i, &c)| (i, c))
    }

    pub fn coeff(&self, index: usize) -> f64 {
        self.coeffs.get(&index).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.coeffs.is_empty()
    }

    /// Value at `y`, where `y[l - 1]` is variable `l`.
    pub fn evaluate(&self, y: &[f64]) -> f64 {
        self.constant + self.coeffs.iter().map(|(&l, &c)| c * y[l - 1]).sum::<f64>()
    }

    fn add_moment(
        &mut self,
        scale: f64,
        moment: Moment,
        dict: &MonomialDictionary,
    ) -> Result<(), RelaxationError> {
        match moment {
            Moment::Zero => {}
            Moment::Constant(s) => self.constant += scale * s,
            Moment::Variable(s, word) => {
                let idx = dict
                    .get(&word)
                    .ok_or(RelaxationError::UnknownMoment(word))?;
                self.add_term(idx, scale * s);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Moment,
    /// Localizing block of constraint number `constraint` (0-based, after
    /// equalities are split into `+g`, `-g`).
    Localizing {
        constraint: usize,
    },
}

/// Symmetric matrix of affine expressions, upper triangle stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    size: usize,
    entries: Vec<AffineExpr>,
    pub kind: BlockKind,
}

impl Block {
    fn new(size: usize, kind: BlockKind) -> Self {
        Self {
            size,
            entries: vec![AffineExpr::default(); size * (size + 1) / 2],
            kind,
        }
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        assert!(j < self.size, "block index ({i}, {j}) out of range");
        i * self.size - i * (i + 1) / 2 + j
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry `(i, j)`, 0-based; symmetric access.
    pub fn get(&self, i: usize, j: usize) -> &AffineExpr {
        &self.entries[self.offset(i, j)]
    }

    fn set(&mut self, i: usize, j: usize, value: AffineExpr) {
        let k = self.offset(i, j);
        self.entries[k] = value;
    }

    /// Upper-triangular entries `(i, j, expr)` with `i <= j`, row-major.
    pub fn upper(&self) -> impl Iterator<Item = (usize, usize, &AffineExpr)> + '_ {
        (0..self.size)
            .flat_map(move |i| (i..self.size).map(move |j| (i, j)))
            .zip(self.entries.iter())
            .map(|((i, j), e)| (i, j, e))
    }

    /// Dense row-major matrix at `y`.
    pub fn evaluate(&self, y: &[f64]) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.size]; self.size];
        for (i, j, e) in self.upper() {
            let v = e.evaluate(y);
            m[i][j] = v;
            m[j][i] = v;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relaxation {
    pub order: usize,
    pub nvars: usize,
    /// Objective over the y variables; its constant is the shift added back
    /// to reported optima.
    pub objective: AffineExpr,
    pub blocks: Vec<Block>,
    pub dictionary: MonomialDictionary,
    pub basis: Vec<Word>,
    /// Diagnostics such as symmetrized constraints.
    pub warnings: Vec<String>,
}

impl Relaxation {
    pub fn objective_shift(&self) -> f64 {
        self.objective.constant
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Block::size).collect()
    }

    pub fn localizing_blocks(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| matches!(b.kind, BlockKind::Localizing { .. }))
            .count()
    }
}

impl fmt::Display for Relaxation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.block_sizes().iter().map(|s| s.to_string()).collect();
        write!(
            f,
            "order {}: {} variables, blocks [{}]",
            self.order,
            self.nvars,
            sizes.join(" ")
        )
    }
}

/// Moment matrix over `basis`, creating dictionary entries as new moments
/// are met in row-major order of the upper triangle.
pub fn moment_matrix(
    basis: &[Word],
    rules: &RuleSet,
) -> Result<(Block, MonomialDictionary), RelaxationError> {
    let mut dict = MonomialDictionary::new();
    let mut block = Block::new(basis.len(), BlockKind::Moment);
    for (i, v) in basis.iter().enumerate() {
        for (j, w) in basis.iter().enumerate().skip(i) {
            let entry = match canonicalize(&v.adjoint_concat(w), rules)? {
                Moment::Zero => AffineExpr::default(),
                Moment::Constant(s) => AffineExpr::constant(s),
                Moment::Variable(s, word) => AffineExpr::variable(dict.get_or_insert(word), s),
            };
            block.set(i, j, entry);
        }
    }
    Ok((block, dict))
}

/// Localizing matrix of `g` over `basis`: entry `(v, w)` is `L_y(v* g w)`.
/// Every moment must already be in `dict`.
pub fn localizing_matrix(
    g: &Polynomial,
    basis: &[Word],
    dict: &MonomialDictionary,
    rules: &RuleSet,
    constraint: usize,
) -> Result<Block, RelaxationError> {
    let mut block = Block::new(basis.len(), BlockKind::Localizing { constraint });
    for (i, v) in basis.iter().enumerate() {
        for (j, w) in basis.iter().enumerate().skip(i) {
            let mut entry = AffineExpr::default();
            for (u, coeff) in g.terms() {
                let label = v.adjoint_concat(&u.concat(w));
                entry.add_moment(coeff, canonicalize(&label, rules)?, dict)?;
            }
            block.set(i, j, entry);
        }
    }
    Ok(block)
}

/// Objective as an affine expression; the constant term is the shift.
pub fn translate_objective(
    p: &Polynomial,
    dict: &MonomialDictionary,
    rules: &RuleSet,
) -> Result<AffineExpr, RelaxationError> {
    let mut out = AffineExpr::default();
    for (w, coeff) in p.terms() {
        out.add_moment(coeff, canonicalize(w, rules)?, dict)?;
    }
    Ok(out)
}

fn half_degree(p: &Polynomial) -> usize {
    p.degree().div_ceil(2)
}

/// Builds the full relaxation: moment block, one localizing block per
/// inequality `g >= 0` and two (`g`, `-g`) per equality `g = 0`, then the
/// objective.
pub fn get_relaxation(
    vars: &[VariableSpec],
    objective: &Polynomial,
    inequalities: &[Polynomial],
    equalities: &[Polynomial],
    rules: &RuleSet,
    order: usize,
) -> Result<Relaxation, RelaxationError> {
    let max_degree = std::iter::once(objective)
        .chain(inequalities)
        .chain(equalities)
        .map(Polynomial::degree)
        .max()
        .unwrap_or(0);
    if 2 * order < max_degree {
        return Err(RelaxationError::OrderTooLow {
            order,
            degree: max_degree,
            required: max_degree.div_ceil(2),
        });
    }

    let mut warnings = Vec::new();
    let basis = generate_basis(vars, order, rules)?;
    let (moment, dictionary) = moment_matrix(&basis, rules)?;

    let mut constraints: Vec<Polynomial> = Vec::new();
    let mut symmetrize = |kind: &str, k: usize, g: &Polynomial| {
        if g.is_hermitian() {
            g.clone()
        } else {
            warnings.push(format!(
                "{kind} {} is not Hermitian; using its Hermitian part",
                k + 1
            ));
            g.hermitian_part()
        }
    };
    for (k, g) in inequalities.iter().enumerate() {
        constraints.push(symmetrize("inequality", k, g));
    }
    for (k, g) in equalities.iter().enumerate() {
        let g = symmetrize("equality", k, g);
        let negated = -&g;
        constraints.push(g);
        constraints.push(negated);
    }

    let mut blocks = vec![moment];
    let mut sub_bases: HashMap<usize, Vec<Word>> = HashMap::new();
    for (k, g) in constraints.iter().enumerate() {
        let sub_order = order - half_degree(g);
        let sub_basis = match sub_bases.get(&sub_order) {
            Some(b) => b,
            None => {
                let b = generate_basis(vars, sub_order, rules)?;
                sub_bases.entry(sub_order).or_insert(b)
            }
        };
        blocks.push(localizing_matrix(g, sub_basis, &dictionary, rules, k)?);
    }

    let objective = translate_objective(objective, &dictionary, rules)?;
    Ok(Relaxation {
        order,
        nvars: dictionary.len(),
        objective,
        blocks,
        dictionary,
        basis,
        warnings,
    })
}
