//! Read-once De Morgan formulas.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! formula := var | '~' formula | '(' formula (op formula)+ ')'
//! var     := 'x' digits
//! op      := '&' | '|'
//! ```
//!
//! All operators inside one parenthesized group must agree.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::approx::{self, Convention};
use crate::error::{check_arity, Result};
use crate::poly;
use crate::truth_table::{TruthTable, MAX_ARITY};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty formula")]
    Empty,
    #[error("unexpected `{found}` at position {position}, expected {expected}")]
    Unexpected {
        position: usize,
        found: char,
        expected: &'static str,
    },
    #[error("unexpected end of input, expected {expected}")]
    UnexpectedEnd { expected: &'static str },
    #[error("operators `&` and `|` mixed in one group at position {position}")]
    MixedOperators { position: usize },
    #[error("variable x{0} appears more than once")]
    RepeatedVariable(usize),
    #[error("bad variable index at position {position}")]
    BadVariable { position: usize },
}

/// Formula tree. Variables are 0-based (`x1` is `Var(0)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Var(usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn leaf_count(&self) -> usize {
        match self {
            Formula::Var(_) => 1,
            Formula::Not(c) => c.leaf_count(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().map(Formula::leaf_count).sum(),
        }
    }

    /// Variables in left-to-right leaf order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Formula::Var(i) => out.push(*i),
            Formula::Not(c) => c.collect_leaves(out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn is_read_once(&self) -> bool {
        let leaves = self.leaves();
        leaves.iter().collect::<BTreeSet<_>>().len() == leaves.len()
    }

    /// Renumbers variables to `0..n` in leaf order.
    pub fn normalized(&self) -> Formula {
        let mut next = 0;
        self.renumber(&mut next)
    }

    fn renumber(&self, next: &mut usize) -> Formula {
        match self {
            Formula::Var(_) => {
                *next += 1;
                Formula::Var(*next - 1)
            }
            Formula::Not(c) => Formula::Not(Box::new(c.renumber(next))),
            Formula::And(cs) => Formula::And(cs.iter().map(|c| c.renumber(next)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| c.renumber(next)).collect()),
        }
    }

    pub fn evaluate(&self, x: usize) -> bool {
        match self {
            Formula::Var(i) => x >> i & 1 == 1,
            Formula::Not(c) => !c.evaluate(x),
            Formula::And(cs) => cs.iter().all(|c| c.evaluate(x)),
            Formula::Or(cs) => cs.iter().any(|c| c.evaluate(x)),
        }
    }

    /// Truth table of the normalized formula, on `leaf_count()` variables.
    pub fn to_table(&self) -> Result<TruthTable> {
        let n = self.leaf_count();
        check_arity("truth tables", n, MAX_ARITY)?;
        let norm = self.normalized();
        TruthTable::from_fn(n, |x| norm.evaluate(x))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let group = |f: &mut fmt::Formatter<'_>, cs: &[Formula], op: &str| {
            write!(f, "(")?;
            for (k, c) in cs.iter().enumerate() {
                if k > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::Var(i) => write!(f, "x{}", i + 1),
            Formula::Not(c) => write!(f, "~{c}"),
            Formula::And(cs) => group(f, cs, "&"),
            Formula::Or(cs) => group(f, cs, "|"),
        }
    }
}

/// Parses and validates a read-once formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        chars: text.char_indices().collect(),
        pos: 0,
    };
    p.skip_ws();
    if p.peek().is_none() {
        return Err(ParseError::Empty);
    }
    let ast = p.formula()?;
    p.skip_ws();
    if let Some((position, found)) = p.peek() {
        return Err(ParseError::Unexpected {
            position,
            found,
            expected: "end of input",
        });
    }
    let mut seen = BTreeSet::new();
    for v in ast.leaves() {
        if !seen.insert(v) {
            return Err(ParseError::RepeatedVariable(v + 1));
        }
    }
    Ok(ast)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, char)> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn next_token(&mut self, expected: &'static str) -> Result<(usize, char), ParseError> {
        self.skip_ws();
        let t = self.peek().ok_or(ParseError::UnexpectedEnd { expected })?;
        self.pos += 1;
        Ok(t)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        const EXPECTED: &str = "a variable, `~` or `(`";
        let (position, c) = self.next_token(EXPECTED)?;
        match c {
            'x' => self.variable(position),
            '~' => Ok(Formula::Not(Box::new(self.formula()?))),
            '(' => self.group(),
            found => Err(ParseError::Unexpected {
                position,
                found,
                expected: EXPECTED,
            }),
        }
    }

    fn variable(&mut self, start: usize) -> Result<Formula, ParseError> {
        let mut digits = String::new();
        while let Some((_, c)) = self.peek().filter(|(_, c)| c.is_ascii_digit()) {
            digits.push(c);
            self.pos += 1;
        }
        match digits.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(Formula::Var(i - 1)),
            _ => Err(ParseError::BadVariable { position: start }),
        }
    }

    fn group(&mut self) -> Result<Formula, ParseError> {
        let mut children = vec![self.formula()?];
        let mut op: Option<char> = None;
        loop {
            let (position, c) = self.next_token("`&`, `|` or `)`")?;
            match c {
                ')' if op.is_some() => break,
                '&' | '|' => {
                    if op.is_some_and(|o| o != c) {
                        return Err(ParseError::MixedOperators { position });
                    }
                    op = Some(c);
                    children.push(self.formula()?);
                }
                found => {
                    return Err(ParseError::Unexpected {
                        position,
                        found,
                        expected: if op.is_some() {
                            "`&`, `|` or `)`"
                        } else {
                            "`&` or `|`"
                        },
                    })
                }
            }
        }
        Ok(if op == Some('&') {
            Formula::And(children)
        } else {
            Formula::Or(children)
        })
    }
}

/// `deg(f) = n` for the table of a read-once formula on `n` leaves.
pub fn readonce_degree_check(ast: &Formula) -> Result<bool> {
    check_arity("the read-once degree check", ast.leaf_count(), 12)?;
    Ok(poly::degree(&ast.to_table()?) == ast.leaf_count())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReadOnceWindow {
    pub n: usize,
    pub epsilon: f64,
    pub adeg: usize,
    pub sqrt_n: f64,
    /// `√n/3`, from `deg ≤ (3·adeg)²` and `deg = n`; asserted for `ε ≤ 1/3`.
    pub lower: f64,
    pub holds: bool,
}

/// Places `adeg_ε` of a read-once formula between `√n/3` and `n`.
pub fn readonce_adeg_window(ast: &Formula, epsilon: f64) -> Result<ReadOnceWindow> {
    let n = ast.leaf_count();
    let adeg = approx::approx_degree(&ast.to_table()?, epsilon, Convention::UnitInterval)?.degree;
    let sqrt_n = (n as f64).sqrt();
    let lower = sqrt_n / 3.0;
    let checked = epsilon <= 1.0 / 3.0 + 1e-12;
    Ok(ReadOnceWindow {
        n,
        epsilon,
        adeg,
        sqrt_n,
        lower,
        holds: adeg <= n && (!checked || adeg as f64 >= lower - 1e-12),
    })
}

/// A random read-once formula on exactly `n ≥ 1` variables (normalized).
pub fn random_read_once(n: usize, rng: &mut impl Rng) -> Formula {
    assert!(n >= 1);
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(rng);
    build_random(&vars, rng).normalized()
}

fn build_random(vars: &[usize], rng: &mut impl Rng) -> Formula {
    let node = if vars.len() == 1 {
        Formula::Var(vars[0])
    } else {
        let parts = rng.random_range(2..=vars.len().min(4));
        // choose parts−1 distinct cut points
        let mut cuts: Vec<usize> = (1..vars.len()).collect();
        cuts.shuffle(rng);
        let mut cuts = cuts[..parts - 1].to_vec();
        cuts.sort_unstable();
        let mut children = Vec::with_capacity(parts);
        let mut lo = 0;
        for c in cuts.into_iter().chain(std::iter::once(vars.len())) {
            children.push(build_random(&vars[lo..c], rng));
            lo = c;
        }
        if rng.random::<bool>() {
            Formula::And(children)
        } else {
            Formula::Or(children)
        }
    };
    if rng.random_ratio(1, 3) {
        Formula::Not(Box::new(node))
    } else {
        node
    }
}
