//! Sparse QUBO objectives, their Ising counterpart, and the text export.
//!
//! A model is the polynomial `c + sum_i a_i x_i + sum_{i<j} b_ij x_i x_j`
//! over binary `x`. Coefficients accumulate additively while a Hamiltonian is
//! assembled; [`QuboModel::finalize`] drops entries that cancelled to zero.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuboError {
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("assignment has {got} bits, model has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A point in `{0,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn zeros(len: usize) -> Self {
        Assignment(vec![false; len])
    }

    /// Bit `i` of `mask` becomes variable `i`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        Assignment((0..len).map(|i| (mask >> i) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.0[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// The bits as `0`/`1` characters, variable 0 first.
    pub fn to_bit_string(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl From<Vec<bool>> for Assignment {
    fn from(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }
}

/// `constant + sum_i coeff_i x_i`, the argument of a squared penalty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearExpr {
    pub constant: f64,
    pub terms: BTreeMap<usize, f64>,
}

impl LinearExpr {
    pub fn new(constant: f64) -> Self {
        LinearExpr {
            constant,
            terms: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, index: usize, coeff: f64) -> &mut Self {
        *self.terms.entry(index).or_insert(0.0) += coeff;
        self
    }

    pub fn with(mut self, index: usize, coeff: f64) -> Self {
        self.add(index, coeff);
        self
    }

    pub fn value(&self, a: &Assignment) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .filter(|(&i, _)| a.get(i))
                .map(|(_, c)| c)
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    num_vars: usize,
    offset: f64,
    linear: BTreeMap<usize, f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
}

impl QuboModel {
    pub fn new(num_vars: usize) -> Self {
        QuboModel {
            num_vars,
            offset: 0.0,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self) -> &BTreeMap<usize, f64> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn num_linear(&self) -> usize {
        self.linear.len()
    }

    pub fn num_quadratic(&self) -> usize {
        self.quadratic.len()
    }

    pub fn linear_coeff(&self, i: usize) -> f64 {
        self.linear.get(&i).copied().unwrap_or(0.0)
    }

    pub fn quadratic_coeff(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    pub fn add_offset(&mut self, c: f64) {
        self.offset += c;
    }

    /// Accumulates `coeff * x_i * x_j`, or `coeff * x_i` when `j` is `None`
    /// or equal to `i`.
    pub fn add_term(&mut self, i: usize, j: Option<usize>, coeff: f64) -> Result<(), QuboError> {
        for idx in std::iter::once(i).chain(j) {
            if idx >= self.num_vars {
                return Err(QuboError::IndexOutOfRange {
                    index: idx,
                    num_vars: self.num_vars,
                });
            }
        }
        match j {
            Some(j) if j != i => self.add_quadratic(i, j, coeff),
            _ => self.add_linear(i, coeff),
        }
        Ok(())
    }

    pub(crate) fn add_linear(&mut self, i: usize, coeff: f64) {
        assert!(i < self.num_vars, "index {i} out of range");
        *self.linear.entry(i).or_insert(0.0) += coeff;
    }

    /// `x_i * x_i` folds into the linear slot.
    pub(crate) fn add_quadratic(&mut self, i: usize, j: usize, coeff: f64) {
        if i == j {
            return self.add_linear(i, coeff);
        }
        assert!(i < self.num_vars && j < self.num_vars, "index out of range");
        *self.quadratic.entry((i.min(j), i.max(j))).or_insert(0.0) += coeff;
    }

    /// Adds `weight * expr^2`, expanded with `x^2 = x`.
    pub fn add_penalty_square(&mut self, expr: &LinearExpr, weight: f64) {
        assert!(weight > 0.0, "penalty weight must be positive");
        let c = expr.constant;
        self.offset += weight * c * c;
        let terms: Vec<(usize, f64)> = expr.terms.iter().map(|(&i, &a)| (i, a)).collect();
        for (k, &(i, alpha)) in terms.iter().enumerate() {
            self.add_linear(i, weight * (alpha * alpha + 2.0 * c * alpha));
            for &(j, beta) in &terms[k + 1..] {
                self.add_quadratic(i, j, weight * 2.0 * alpha * beta);
            }
        }
    }

    /// Adds every coefficient of `other` (same variable count) into `self`.
    pub fn merge(&mut self, other: &QuboModel) {
        assert_eq!(self.num_vars, other.num_vars, "merging models of different size");
        self.offset += other.offset;
        for (&i, &a) in &other.linear {
            self.add_linear(i, a);
        }
        for (&(i, j), &b) in &other.quadratic {
            self.add_quadratic(i, j, b);
        }
    }

    /// Drops coefficients that are exactly zero.
    pub fn finalize(&mut self) {
        self.linear.retain(|_, a| *a != 0.0);
        self.quadratic.retain(|_, b| *b != 0.0);
    }

    pub fn energy(&self, a: &Assignment) -> Result<f64, QuboError> {
        if a.len() != self.num_vars {
            return Err(QuboError::LengthMismatch {
                expected: self.num_vars,
                got: a.len(),
            });
        }
        Ok(self.energy_unchecked(a))
    }

    pub(crate) fn energy_unchecked(&self, a: &Assignment) -> f64 {
        let lin: f64 = self.linear.iter().filter(|(&i, _)| a.get(i)).map(|(_, v)| v).sum();
        let quad: f64 = self
            .quadratic
            .iter()
            .filter(|(&(i, j), _)| a.get(i) && a.get(j))
            .map(|(_, v)| v)
            .sum();
        self.offset + lin + quad
    }

    /// Sum of absolute values of all coefficients including the offset.
    pub fn coefficient_scale(&self) -> f64 {
        self.offset.abs()
            + self.linear.values().map(|v| v.abs()).sum::<f64>()
            + self.quadratic.values().map(|v| v.abs()).sum::<f64>()
    }

    /// Converts via `sigma = 2x - 1` to `offset - sum J s_i s_j - sum h s_i`.
    pub fn to_ising(&self) -> IsingModel {
        let mut ising = IsingModel {
            num_vars: self.num_vars,
            offset: self.offset,
            h: BTreeMap::new(),
            j: BTreeMap::new(),
            mu: 1.0,
        };
        // a x = a/2 + (a/2) s
        for (&i, &a) in &self.linear {
            ising.offset += a / 2.0;
            *ising.h.entry(i).or_insert(0.0) -= a / 2.0;
        }
        // b x_i x_j = (b/4)(1 + s_i + s_j + s_i s_j)
        for (&(i, j), &b) in &self.quadratic {
            ising.offset += b / 4.0;
            *ising.h.entry(i).or_insert(0.0) -= b / 4.0;
            *ising.h.entry(j).or_insert(0.0) -= b / 4.0;
            *ising.j.entry((i, j)).or_insert(0.0) -= b / 4.0;
        }
        ising.h.retain(|_, v| *v != 0.0);
        ising.j.retain(|_, v| *v != 0.0);
        ising
    }
}

/// `offset - sum_{i<j} J_ij s_i s_j - mu * sum_i h_i s_i` over `s in {-1,+1}^n`.
///
/// `mu` is always 1; `h` carries the scale.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub num_vars: usize,
    pub offset: f64,
    pub h: BTreeMap<usize, f64>,
    pub j: BTreeMap<(usize, usize), f64>,
    pub mu: f64,
}

impl IsingModel {
    pub fn energy(&self, spins: &[i8]) -> Result<f64, QuboError> {
        if spins.len() != self.num_vars {
            return Err(QuboError::LengthMismatch {
                expected: self.num_vars,
                got: spins.len(),
            });
        }
        let field: f64 = self.h.iter().map(|(&i, &h)| h * spins[i] as f64).sum();
        let coupling: f64 = self
            .j
            .iter()
            .map(|(&(i, j), &c)| c * (spins[i] * spins[j]) as f64)
            .sum();
        Ok(self.offset - coupling - self.mu * field)
    }

    pub fn to_qubo(&self) -> QuboModel {
        let mut m = QuboModel::new(self.num_vars);
        m.offset = self.offset;
        // -mu h s = -mu h (2x - 1)
        for (&i, &h) in &self.h {
            m.offset += self.mu * h;
            m.add_linear(i, -2.0 * self.mu * h);
        }
        // -J s_i s_j = -J (4 x_i x_j - 2 x_i - 2 x_j + 1)
        for (&(i, j), &c) in &self.j {
            m.offset -= c;
            m.add_linear(i, 2.0 * c);
            m.add_linear(j, 2.0 * c);
            m.add_quadratic(i, j, -4.0 * c);
        }
        m.finalize();
        m
    }
}

/// Upper-triangular sparse text form, ascending indices, offset as a comment.
pub fn export_qubo(m: &QuboModel) -> String {
    let mut out = String::new();
    if m.offset != 0.0 {
        writeln!(out, "c offset {}", m.offset).unwrap();
    }
    writeln!(out, "p qubo 0 {} {} {}", m.num_vars, m.linear.len(), m.quadratic.len()).unwrap();
    for (&i, &a) in &m.linear {
        writeln!(out, "{i} {i} {a}").unwrap();
    }
    for (&(i, j), &b) in &m.quadratic {
        writeln!(out, "{i} {j} {b}").unwrap();
    }
    out
}

/// Reads the format written by [`export_qubo`]. Other comment lines are
/// ignored.
pub fn import_qubo(text: &str) -> Result<QuboModel, QuboError> {
    let err = |line: usize, message: String| QuboError::Parse { line, message };
    let mut model: Option<QuboModel> = None;
    let mut offset = 0.0;
    let mut declared = (0usize, 0usize);
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        match fields.as_slice() {
            [] => {}
            ["c", "offset", v] => {
                offset = v.parse().map_err(|_| err(line, format!("bad offset {v:?}")))?;
            }
            ["c", ..] => {}
            ["p", "qubo", _topology, nv, nl, nq] => {
                let parse = |s: &str| s.parse::<usize>().map_err(|_| err(line, format!("bad count {s:?}")));
                model = Some(QuboModel::new(parse(nv)?));
                declared = (parse(nl)?, parse(nq)?);
            }
            [i, j, v] => {
                let m = model
                    .as_mut()
                    .ok_or_else(|| err(line, "coefficient before header".into()))?;
                let i: usize = i.parse().map_err(|_| err(line, format!("bad index {i:?}")))?;
                let j: usize = j.parse().map_err(|_| err(line, format!("bad index {j:?}")))?;
                let v: f64 = v.parse().map_err(|_| err(line, format!("bad value {v:?}")))?;
                if i > j {
                    return Err(err(line, format!("entry ({i}, {j}) below the diagonal")));
                }
                m.add_term(i, Some(j), v).map_err(|e| err(line, e.to_string()))?;
            }
            _ => return Err(err(line, format!("unrecognised line {raw:?}"))),
        }
    }
    let mut m = model.ok_or_else(|| err(0, "missing \"p qubo\" header".into()))?;
    m.offset = offset;
    if (m.linear.len(), m.quadratic.len()) != declared {
        return Err(err(
            0,
            format!(
                "header declares {} linear / {} quadratic, found {} / {}",
                declared.0,
                declared.1,
                m.linear.len(),
                m.quadratic.len()
            ),
        ));
    }
    Ok(m)
}
