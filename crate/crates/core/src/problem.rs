//! Line-oriented problem files.
//!
//! ```text
//! # comment
//! vars x1 x2 hermitian
//! objective x1*x2 + x2*x1
//! ineq -x2^2 + x2 + 0.5        # g >= 0, repeatable
//! eq x1*x2 - x2*x1             # g = 0, repeatable
//! sub x1^2 -> x1               # binomial rule, rhs is [-]monomial or [-]1
//! order 2
//! ```
//!
//! Polynomials are sums of products; `x'` is the adjoint letter of `x` and
//! `x^k` repeats a factor.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{Letter, Polynomial, VariableSpec, Word};
use crate::relaxation::{get_relaxation, Relaxation, RelaxationError};
use crate::rewrite::{RewriteError, RewriteRule, RuleSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: undeclared variable `{name}`")]
    UndeclaredVariable {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("line {line}: `{section}` given more than once")]
    DuplicateSection { line: usize, section: String },
    #[error("line {line}: substitution coefficient must be +1 or -1, got {coeff}")]
    BadSubstitutionCoefficient { line: usize, coeff: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemDef {
    pub variables: Vec<VariableSpec>,
    pub objective: Polynomial,
    pub inequalities: Vec<Polynomial>,
    pub equalities: Vec<Polynomial>,
    pub substitutions: Vec<RewriteRule>,
    pub order: usize,
}

impl ProblemDef {
    pub fn rules(&self, max_passes: Option<usize>) -> Result<RuleSet, RewriteError> {
        let rules = RuleSet::new(self.substitutions.clone())?;
        match max_passes {
            Some(p) => rules.with_max_passes(p),
            None => Ok(rules),
        }
    }

    pub fn relax(&self) -> Result<Relaxation, RelaxationError> {
        self.relax_with(None)
    }

    pub fn relax_with(&self, max_passes: Option<usize>) -> Result<Relaxation, RelaxationError> {
        let rules = self.rules(max_passes)?;
        get_relaxation(
            &self.variables,
            &self.objective,
            &self.inequalities,
            &self.equalities,
            &rules,
            self.order,
        )
    }
}

impl fmt::Display for ProblemDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = &self.variables;
        let mut start = 0;
        while start < vars.len() {
            let hermitian = vars[start].hermitian;
            let end = vars[start..]
                .iter()
                .position(|v| v.hermitian != hermitian)
                .map_or(vars.len(), |k| start + k);
            let names: Vec<&str> = vars[start..end].iter().map(|v| v.name.as_str()).collect();
            write!(f, "vars {}", names.join(" "))?;
            if hermitian {
                f.write_str(" hermitian")?;
            }
            writeln!(f)?;
            start = end;
        }
        writeln!(f, "objective {}", self.objective.display(vars))?;
        for g in &self.inequalities {
            writeln!(f, "ineq {}", g.display(vars))?;
        }
        for g in &self.equalities {
            writeln!(f, "eq {}", g.display(vars))?;
        }
        for rule in &self.substitutions {
            let sign = if rule.sign() < 0 { "-" } else { "" };
            writeln!(
                f,
                "sub {} -> {sign}{}",
                rule.lhs().display(vars),
                rule.rhs().display(vars)
            )?;
        }
        writeln!(f, "order {}", self.order)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String, bool),
    Plus,
    Minus,
    Star,
    Caret,
}

struct Lexed {
    token: Token,
    column: usize,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Lexed>, ProblemError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        let column = col0 + pos;
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '^' => Some(Token::Caret),
            _ => None,
        };
        if let Some(token) = simple {
            out.push(Lexed { token, column });
            pos += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = pos;
            while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.') {
                pos += 1;
            }
            if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
                let mut p = pos + 1;
                if p < bytes.len() && (bytes[p] == b'+' || bytes[p] == b'-') {
                    p += 1;
                }
                if p < bytes.len() && bytes[p].is_ascii_digit() {
                    while p < bytes.len() && bytes[p].is_ascii_digit() {
                        p += 1;
                    }
                    pos = p;
                }
            }
            let lit = &text[start..pos];
            let value = lit.parse::<f64>().map_err(|_| ProblemError::Parse {
                line,
                column,
                message: format!("bad number `{lit}`"),
            })?;
            out.push(Lexed {
                token: Token::Num(value),
                column,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = pos;
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            let name = text[start..pos].to_owned();
            let starred = pos < bytes.len() && bytes[pos] == b'\'';
            if starred {
                pos += 1;
            }
            out.push(Lexed {
                token: Token::Ident(name, starred),
                column,
            });
        } else {
            return Err(ProblemError::Parse {
                line,
                column,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct PolyParser<'a> {
    tokens: Vec<Lexed>,
    pos: usize,
    line: usize,
    end_column: usize,
    vars: &'a HashMap<String, VariableSpec>,
}

impl PolyParser<'_> {
    fn err(&self, message: impl Into<String>) -> ProblemError {
        ProblemError::Parse {
            line: self.line,
            column: self
                .tokens
                .get(self.pos)
                .map_or(self.end_column, |t| t.column),
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.token)
    }

    fn polynomial(&mut self) -> Result<Polynomial, ProblemError> {
        let mut poly = Polynomial::zero();
        let mut sign = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                -1.0
            }
            Some(Token::Plus) => {
                self.pos += 1;
                1.0
            }
            _ => 1.0,
        };
        loop {
            let (coeff, word) = self.term()?;
            poly.add_term(word, sign * coeff);
            sign = match self.peek() {
                None => return Ok(poly),
                Some(Token::Plus) => 1.0,
                Some(Token::Minus) => -1.0,
                Some(_) => return Err(self.err("expected `+`, `-` or `*`")),
            };
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(f64, Word), ProblemError> {
        let mut coeff = 1.0;
        let mut letters: Vec<Letter> = Vec::new();
        loop {
            let column = self
                .tokens
                .get(self.pos)
                .map_or(self.end_column, |t| t.column);
            let factor = match self.peek() {
                Some(Token::Num(v)) => Factor::Number(*v),
                Some(Token::Ident(name, starred)) => {
                    let spec =
                        self.vars
                            .get(name)
                            .ok_or_else(|| ProblemError::UndeclaredVariable {
                                line: self.line,
                                column,
                                name: name.clone(),
                            })?;
                    Factor::Letter(if *starred {
                        spec.starred()
                    } else {
                        spec.letter()
                    })
                }
                _ => return Err(self.err("expected a number or a variable")),
            };
            self.pos += 1;
            let mut power = 1;
            if self.peek() == Some(&Token::Caret) {
                self.pos += 1;
                power = match self.peek() {
                    Some(Token::Num(v)) if v.fract() == 0.0 && *v >= 0.0 && *v <= 1e6 => {
                        *v as usize
                    }
                    _ => return Err(self.err("exponent must be a non-negative integer")),
                };
                self.pos += 1;
            }
            match factor {
                Factor::Number(v) => coeff *= v.powi(power as i32),
                Factor::Letter(l) => letters.extend(std::iter::repeat_n(l, power)),
            }
            if self.peek() == Some(&Token::Star) {
                self.pos += 1;
            } else {
                return Ok((coeff, Word::from(letters)));
            }
        }
    }
}

enum Factor {
    Number(f64),
    Letter(Letter),
}

fn parse_poly(
    text: &str,
    line: usize,
    col0: usize,
    vars: &HashMap<String, VariableSpec>,
) -> Result<Polynomial, ProblemError> {
    let tokens = lex(text, line, col0)?;
    let mut parser = PolyParser {
        tokens,
        pos: 0,
        line,
        end_column: col0 + text.len(),
        vars,
    };
    if parser.tokens.is_empty() {
        return Err(parser.err("expected a polynomial"));
    }
    parser.polynomial()
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn single_term(p: &Polynomial) -> Option<(Word, f64)> {
    let mut terms = p.terms();
    let (w, c) = terms.next()?;
    terms.next().is_none().then(|| (w.clone(), c))
}

pub fn parse_problem(text: &str) -> Result<ProblemDef, ProblemError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("")))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();

    // declarations first, so sections may come in any order
    let mut variables: Vec<VariableSpec> = Vec::new();
    let mut by_name: HashMap<String, VariableSpec> = HashMap::new();
    for &(line, content) in &lines {
        let mut words = content.split_whitespace();
        if words.next() != Some("vars") {
            continue;
        }
        let mut names: Vec<&str> = words.collect();
        let hermitian = names.last() == Some(&"hermitian");
        if hermitian {
            names.pop();
        }
        if names.is_empty() {
            return Err(parse_err(line, 1, "`vars` needs at least one name"));
        }
        for name in names {
            let column = content.find(name).map_or(1, |c| c + 1);
            if !is_identifier(name) || name == "hermitian" {
                return Err(parse_err(
                    line,
                    column,
                    format!("`{name}` is not a valid variable name"),
                ));
            }
            if by_name.contains_key(name) {
                return Err(parse_err(
                    line,
                    column,
                    format!("variable `{name}` declared twice"),
                ));
            }
            let spec = VariableSpec::new(variables.len() as u32, name, hermitian);
            by_name.insert(name.to_owned(), spec.clone());
            variables.push(spec);
        }
    }

    let mut objective = None;
    let mut order = None;
    let mut inequalities = Vec::new();
    let mut equalities = Vec::new();
    let mut substitutions: Vec<RewriteRule> = Vec::new();
    for &(line, content) in &lines {
        let trimmed = content.trim_start();
        let indent = content.len() - trimmed.len();
        let (keyword, rest) = trimmed
            .split_once(char::is_whitespace)
            .unwrap_or((trimmed, ""));
        let col0 = indent + keyword.len() + 2;
        match keyword {
            "vars" => {}
            "objective" => {
                if objective.is_some() {
                    return Err(duplicate(line, keyword));
                }
                objective = Some(parse_poly(rest, line, col0, &by_name)?);
            }
            "ineq" => inequalities.push(parse_poly(rest, line, col0, &by_name)?),
            "eq" => equalities.push(parse_poly(rest, line, col0, &by_name)?),
            "order" => {
                if order.is_some() {
                    return Err(duplicate(line, keyword));
                }
                let d: usize = rest
                    .trim()
                    .parse()
                    .ok()
                    .filter(|&d| d >= 1)
                    .ok_or_else(|| parse_err(line, col0, "order must be an integer >= 1"))?;
                order = Some(d);
            }
            "sub" => {
                let rule = parse_substitution(rest, line, col0, &by_name)?;
                if substitutions.iter().any(|r| r.lhs() == rule.lhs()) {
                    return Err(parse_err(
                        line,
                        col0,
                        "substitution left-hand side already has a rule",
                    ));
                }
                substitutions.push(rule);
            }
            other => {
                return Err(parse_err(
                    line,
                    indent + 1,
                    format!("unknown keyword `{other}`"),
                ));
            }
        }
    }

    let end = text.lines().count().max(1);
    if variables.is_empty() {
        return Err(parse_err(end, 1, "missing `vars` declaration"));
    }
    let objective = objective.ok_or_else(|| parse_err(end, 1, "missing `objective`"))?;
    let order = order.ok_or_else(|| parse_err(end, 1, "missing `order`"))?;
    Ok(ProblemDef {
        variables,
        objective,
        inequalities,
        equalities,
        substitutions,
        order,
    })
}

fn parse_substitution(
    rest: &str,
    line: usize,
    col0: usize,
    vars: &HashMap<String, VariableSpec>,
) -> Result<RewriteRule, ProblemError> {
    let (lhs_text, rhs_text) = rest
        .split_once("->")
        .ok_or_else(|| parse_err(line, col0, "expected `lhs -> rhs`"))?;
    let lhs = parse_poly(lhs_text, line, col0, vars)?;
    let (lhs_word, lhs_coeff) = single_term(&lhs)
        .ok_or_else(|| parse_err(line, col0, "left-hand side must be a single monomial"))?;
    if lhs_coeff != 1.0 {
        return Err(ProblemError::BadSubstitutionCoefficient {
            line,
            coeff: lhs_coeff,
        });
    }
    if lhs_word.is_one() {
        return Err(parse_err(
            line,
            col0,
            "left-hand side must contain a variable",
        ));
    }
    let rhs_col = col0 + lhs_text.len() + 2;
    let rhs = parse_poly(rhs_text, line, rhs_col, vars)?;
    let (rhs_word, rhs_coeff) = single_term(&rhs).ok_or_else(|| {
        parse_err(
            line,
            rhs_col,
            "right-hand side must be a single signed monomial",
        )
    })?;
    if rhs_coeff.abs() != 1.0 {
        return Err(ProblemError::BadSubstitutionCoefficient {
            line,
            coeff: rhs_coeff,
        });
    }
    RewriteRule::new(lhs_word, rhs_coeff as i32, rhs_word)
        .map_err(|e| parse_err(line, col0, e.to_string()))
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> ProblemError {
    ProblemError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn duplicate(line: usize, section: &str) -> ProblemError {
    ProblemError::DuplicateSection {
        line,
        section: section.to_owned(),
    }
}
