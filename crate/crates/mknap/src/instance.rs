//! Problem data model, weing/orlib parsers, and the selection arithmetic
//! everything else is built on.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::util::fmt_num;

/// A 0/1 multidimensional knapsack instance: `n` objects with values,
/// `m` capacity constraints, and an `m x n` weight matrix (row `j` holds
/// constraint `j`'s coefficient for every object).
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    values: Vec<f64>,
    weights: Vec<Vec<f64>>,
    capacities: Vec<f64>,
    known_optimum: Option<f64>,
}

/// Construction errors for [`Instance`].
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceError {
    NoObjects,
    NoConstraints,
    WeightRows { rows: usize, expected: usize },
    WeightRowLen { row: usize, len: usize, expected: usize },
    BadEntry { what: &'static str, index: usize, value: f64 },
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::NoObjects => write!(f, "instance has no objects"),
            InstanceError::NoConstraints => write!(f, "instance has no constraints"),
            InstanceError::WeightRows { rows, expected } => {
                write!(f, "weight matrix has {rows} rows, expected {expected}")
            }
            InstanceError::WeightRowLen { row, len, expected } => {
                write!(f, "weight row {row} has {len} entries, expected {expected}")
            }
            InstanceError::BadEntry { what, index, value } => {
                write!(f, "{what} {index} is {value}, must be finite and non-negative")
            }
        }
    }
}

impl std::error::Error for InstanceError {}

fn check_entries(what: &'static str, xs: &[f64]) -> Result<(), InstanceError> {
    for (i, &x) in xs.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(InstanceError::BadEntry { what, index: i, value: x });
        }
    }
    Ok(())
}

impl Instance {
    /// Builds a validated instance. All entries must be finite and
    /// non-negative, the weight matrix must be `capacities.len()` rows of
    /// `values.len()` entries, and both dimensions must be at least one.
    pub fn new(
        name: impl Into<String>,
        values: Vec<f64>,
        weights: Vec<Vec<f64>>,
        capacities: Vec<f64>,
        known_optimum: Option<f64>,
    ) -> Result<Self, InstanceError> {
        if values.is_empty() {
            return Err(InstanceError::NoObjects);
        }
        if capacities.is_empty() {
            return Err(InstanceError::NoConstraints);
        }
        if weights.len() != capacities.len() {
            return Err(InstanceError::WeightRows { rows: weights.len(), expected: capacities.len() });
        }
        for (j, row) in weights.iter().enumerate() {
            if row.len() != values.len() {
                return Err(InstanceError::WeightRowLen { row: j, len: row.len(), expected: values.len() });
            }
            check_entries("weight", row)?;
        }
        check_entries("value", &values)?;
        check_entries("capacity", &capacities)?;
        if let Some(opt) = known_optimum {
            if !opt.is_finite() || opt < 0.0 {
                return Err(InstanceError::BadEntry { what: "optimum", index: 0, value: opt });
            }
        }
        Ok(Instance { name: name.into(), values, weights, capacities, known_optimum })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of objects.
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Number of constraints.
    pub fn m(&self) -> usize {
        self.capacities.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Constraint `j`'s coefficient for object `i`.
    pub fn weight(&self, j: usize, i: usize) -> f64 {
        self.weights[j][i]
    }

    /// Constraint `j`'s coefficients over all objects.
    pub fn weight_row(&self, j: usize) -> &[f64] {
        &self.weights[j]
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn capacity(&self, j: usize) -> f64 {
        self.capacities[j]
    }

    pub fn known_optimum(&self) -> Option<f64> {
        self.known_optimum
    }

    /// Weight consumed under constraint `j` by the selected objects.
    ///
    /// Panics if `j >= m` or the selection length differs from `n`.
    pub fn usage(&self, sel: &Selection, j: usize) -> f64 {
        assert_eq!(sel.len(), self.n(), "selection length {} != object count {}", sel.len(), self.n());
        let row = &self.weights[j];
        sel.bits()
            .iter()
            .zip(row)
            .map(|(&b, &w)| if b { w } else { 0.0 })
            .sum()
    }

    /// Total value of the selected objects.
    ///
    /// Panics if the selection length differs from `n`.
    pub fn objective(&self, sel: &Selection) -> f64 {
        assert_eq!(sel.len(), self.n(), "selection length {} != object count {}", sel.len(), self.n());
        sel.bits()
            .iter()
            .zip(&self.values)
            .map(|(&b, &v)| if b { v } else { 0.0 })
            .sum()
    }

    /// True iff every constraint's usage stays within its capacity.
    pub fn is_feasible(&self, sel: &Selection) -> bool {
        (0..self.m()).all(|j| self.usage(sel, j) <= self.capacities[j])
    }

    /// Serializes to the weing token grammar accepted by [`parse_weing`].
    pub fn to_weing_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {}\n", self.n(), self.m()));
        out.push_str(&join_nums(&self.values));
        out.push('\n');
        for row in &self.weights {
            out.push_str(&join_nums(row));
            out.push('\n');
        }
        out.push_str(&join_nums(&self.capacities));
        out.push('\n');
        if let Some(opt) = self.known_optimum {
            out.push_str(&fmt_num(opt));
            out.push('\n');
        }
        out
    }
}

fn join_nums(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(" ")
}

/// A 0/1 choice per object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    bits: Vec<bool>,
}

impl Selection {
    pub fn zeros(n: usize) -> Self {
        Selection { bits: vec![false; n] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Selection { bits }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Self {
        let mut bits = vec![false; n];
        for &i in indices {
            bits[i] = true;
        }
        Selection { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, chosen: bool) {
        self.bits[i] = chosen;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Indices of the selected objects, ascending.
    pub fn indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| if b { Some(i) } else { None })
            .collect()
    }

    pub fn count_selected(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Parse errors carrying the 1-based position of the offending token.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    /// Token is not a finite number.
    BadToken { pos: usize, token: String },
    /// A count field (n, m, problem count) is not a positive integer.
    BadCount { what: &'static str, pos: usize, token: String },
    /// Weing stream length matches neither the bare nor the with-optimum form.
    TokenCount { expected: usize, with_optimum: usize, found: usize },
    /// A data entry is negative.
    Negative { what: &'static str, pos: usize, value: f64 },
    /// Orlib stream ended mid-problem.
    UnexpectedEnd { pos: usize, expected: &'static str },
    /// Orlib stream has tokens left over after the declared problems.
    TrailingTokens { pos: usize, extra: usize },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::BadToken { pos, token } => {
                write!(f, "token {pos} `{token}` is not a number")
            }
            ParseError::BadCount { what, pos, token } => {
                write!(f, "token {pos}: {what} `{token}` must be a positive integer")
            }
            ParseError::TokenCount { expected, with_optimum, found } => {
                write!(
                    f,
                    "expected {expected} tokens ({with_optimum} with a trailing optimum), found {found}"
                )
            }
            ParseError::Negative { what, pos, value } => {
                write!(f, "token {pos}: negative {what} {value}")
            }
            ParseError::UnexpectedEnd { pos, expected } => {
                write!(f, "stream ended at token {pos}, expected {expected}")
            }
            ParseError::TrailingTokens { pos, extra } => {
                write!(f, "{extra} extra token(s) starting at token {pos}")
            }
        }
    }
}

impl std::error::Error for ParseError {}

struct Tokens<'a> {
    toks: Vec<&'a str>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens { toks: text.split_whitespace().collect(), pos: 0 }
    }

    fn len(&self) -> usize {
        self.toks.len()
    }

    fn remaining(&self) -> usize {
        self.toks.len() - self.pos
    }

    fn next_num(&mut self, expected: &'static str) -> Result<f64, ParseError> {
        if self.pos >= self.toks.len() {
            return Err(ParseError::UnexpectedEnd { pos: self.pos + 1, expected });
        }
        let tok = self.toks[self.pos];
        self.pos += 1;
        match tok.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(ParseError::BadToken { pos: self.pos, token: tok.to_string() }),
        }
    }

    fn next_count(&mut self, what: &'static str) -> Result<usize, ParseError> {
        if self.pos >= self.toks.len() {
            return Err(ParseError::UnexpectedEnd { pos: self.pos + 1, expected: what });
        }
        let tok = self.toks[self.pos];
        let x = self.next_num(what)?;
        if x < 1.0 || x.fract() != 0.0 || x > u32::MAX as f64 {
            return Err(ParseError::BadCount { what, pos: self.pos, token: tok.to_string() });
        }
        Ok(x as usize)
    }

    fn next_entry(&mut self, what: &'static str) -> Result<f64, ParseError> {
        let x = self.next_num(what)?;
        if x < 0.0 {
            return Err(ParseError::Negative { what, pos: self.pos, value: x });
        }
        Ok(x)
    }
}

fn read_problem_body(
    toks: &mut Tokens<'_>,
    name: &str,
    n: usize,
    m: usize,
    known_optimum: Option<f64>,
) -> Result<Instance, ParseError> {
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(toks.next_entry("value")?);
    }
    let mut weights = Vec::with_capacity(m);
    for _ in 0..m {
        let mut row = Vec::with_capacity(n);
        for _ in 0..n {
            row.push(toks.next_entry("weight")?);
        }
        weights.push(row);
    }
    let mut capacities = Vec::with_capacity(m);
    for _ in 0..m {
        capacities.push(toks.next_entry("capacity")?);
    }
    Ok(Instance::new(name, values, weights, capacities, known_optimum)
        .expect("token-level checks cover instance validation"))
}

/// Parses the weing format: `n m`, `n` values, `m` rows of `n` weights,
/// `m` capacities, then optionally one trailing known optimum. Any
/// whitespace separates tokens; comments are rejected, not skipped.
pub fn parse_weing(text: &str, name: &str) -> Result<Instance, ParseError> {
    let mut toks = Tokens::new(text);
    let n = toks.next_count("object count")?;
    let m = toks.next_count("constraint count")?;
    let expected = 2 + n + m * n + m;
    if toks.len() != expected && toks.len() != expected + 1 {
        return Err(ParseError::TokenCount {
            expected,
            with_optimum: expected + 1,
            found: toks.len(),
        });
    }
    let has_optimum = toks.len() == expected + 1;
    let mut instance = read_problem_body(&mut toks, name, n, m, None)?;
    if has_optimum {
        let opt = toks.next_entry("optimum")?;
        instance.known_optimum = Some(opt);
    }
    Ok(instance)
}

/// Parses the orlib format: a problem count `K`, then per problem
/// `n m reference` followed by the weing-ordered body. A reference value
/// of zero means the optimum is unknown. Instances are named
/// `<stem>-1` through `<stem>-K`.
pub fn parse_orlib(text: &str, stem: &str) -> Result<Vec<Instance>, ParseError> {
    let mut toks = Tokens::new(text);
    let problems = toks.next_count("problem count")?;
    let mut out = Vec::with_capacity(problems);
    for p in 1..=problems {
        let n = toks.next_count("object count")?;
        let m = toks.next_count("constraint count")?;
        let reference = toks.next_entry("reference value")?;
        let known_optimum = if reference == 0.0 { None } else { Some(reference) };
        let name = format!("{stem}-{p}");
        out.push(read_problem_body(&mut toks, &name, n, m, known_optimum)?);
    }
    if toks.remaining() > 0 {
        return Err(ParseError::TrailingTokens { pos: toks.pos + 1, extra: toks.remaining() });
    }
    Ok(out)
}

/// Generates a random integral instance: values uniform in `[1, 100]`,
/// weights uniform in `[1, 50]`, and capacity `floor(tightness * sum of
/// the constraint's weights)`. No known optimum is attached.
pub fn random_instance(name: impl Into<String>, n: usize, m: usize, tightness: f64, seed: u64) -> Instance {
    assert!(n >= 1 && m >= 1, "instance needs at least one object and one constraint");
    assert!(tightness > 0.0, "tightness must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=100) as f64).collect();
    let weights: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(1..=50) as f64).collect())
        .collect();
    let capacities: Vec<f64> = weights
        .iter()
        .map(|row| (tightness * row.iter().sum::<f64>()).floor())
        .collect();
    Instance::new(name, values, weights, capacities, None).expect("generated entries are valid")
}
