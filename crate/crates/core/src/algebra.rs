//! Ordered Banach *-algebra instances.
//!
//! Four concrete instances are provided, each owning its own positive cone
//! and norm:
//!
//! | kind           | elements           | cone                      | norm                |
//! |----------------|--------------------|---------------------------|---------------------|
//! | `MatEntrywise` | `n x n` matrices   | entrywise non-negative    | max absolute entry  |
//! | `MatLoewner`   | `n x n` matrices   | positive semidefinite     | spectral norm       |
//! | `Tuple`        | `R^n`              | componentwise             | max absolute value  |
//! | `StepFn`       | `k`-piece functions| pointwise                 | sup of `|values|`   |
//!
//! The max-entry norm of `MatEntrywise` does not satisfy the C*-identity
//! `||x* x|| = ||x||^2`; the descriptor flags this via
//! [`AlgebraDescriptor::cstar_identity_expected`].

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraKind {
    MatEntrywise,
    MatLoewner,
    Tuple,
    StepFn,
}

impl AlgebraKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgebraKind::MatEntrywise => "mat-entrywise",
            AlgebraKind::MatLoewner => "mat-loewner",
            AlgebraKind::Tuple => "tuple",
            AlgebraKind::StepFn => "stepfn",
        }
    }

    pub fn is_matrix(self) -> bool {
        matches!(self, AlgebraKind::MatEntrywise | AlgebraKind::MatLoewner)
    }
}

impl std::str::FromStr for AlgebraKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mat-entrywise" => Ok(AlgebraKind::MatEntrywise),
            "mat-loewner" => Ok(AlgebraKind::MatLoewner),
            "tuple" => Ok(AlgebraKind::Tuple),
            "stepfn" => Ok(AlgebraKind::StepFn),
            other => Err(format!("unknown algebra kind `{other}`")),
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraDescriptor {
    kind: AlgebraKind,
    dimension: usize,
    tolerance: f64,
}

impl AlgebraDescriptor {
    pub fn new(kind: AlgebraKind, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Contract("algebra dimension must be at least 1".into()));
        }
        Ok(AlgebraDescriptor {
            kind,
            dimension,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::Contract(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    /// Matrix side, tuple length or piece count.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn cstar_identity_expected(&self) -> bool {
        self.kind != AlgebraKind::MatEntrywise
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        if self.kind.is_matrix() {
            self.dimension * self.dimension
        } else {
            self.dimension
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same kind and dimension; tolerances may differ.
    pub fn compatible(&self, other: &AlgebraDescriptor) -> bool {
        self.kind == other.kind && self.dimension == other.dimension
    }

    pub fn element(&self, coefficients: Vec<f64>) -> Result<Element> {
        if coefficients.len() != self.len() {
            return Err(Error::Shape(format!(
                "{} of dimension {} needs {} coefficients, got {}",
                self.kind,
                self.dimension,
                self.len(),
                coefficients.len()
            )));
        }
        if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::Shape(format!("non-finite coefficient {bad}")));
        }
        Ok(Element {
            desc: *self,
            coeffs: coefficients,
        })
    }

    /// Zero element, written theta in the literature.
    pub fn zero(&self) -> Element {
        Element {
            desc: *self,
            coeffs: vec![0.0; self.len()],
        }
    }

    pub fn unit(&self) -> Element {
        let mut e = self.zero();
        if self.kind.is_matrix() {
            let n = self.dimension;
            for i in 0..n {
                e.coeffs[i * n + i] = 1.0;
            }
        } else {
            e.coeffs.iter_mut().for_each(|c| *c = 1.0);
        }
        e
    }

    /// Diagonal matrix for matrix kinds; the plain value list otherwise.
    pub fn diag(&self, values: &[f64]) -> Result<Element> {
        if values.len() != self.dimension {
            return Err(Error::Shape(format!(
                "expected {} diagonal values, got {}",
                self.dimension,
                values.len()
            )));
        }
        if !self.kind.is_matrix() {
            return self.element(values.to_vec());
        }
        let n = self.dimension;
        let mut coeffs = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            coeffs[i * n + i] = *v;
        }
        self.element(coeffs)
    }
}

/// An element of one of the concrete algebras.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    desc: AlgebraDescriptor,
    coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    LessOrEqual,
    GreaterOrEqual,
    Equal,
    Incomparable,
}

impl Relation {
    /// `a <= b` holds (strictly or with equality).
    pub fn is_le(self) -> bool {
        matches!(self, Relation::LessOrEqual | Relation::Equal)
    }

    pub fn is_ge(self) -> bool {
        matches!(self, Relation::GreaterOrEqual | Relation::Equal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub relation: Relation,
    /// How far `b - a` is from the cone when `a <= b` does not hold; zero otherwise.
    pub slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Scalar,
}

/// Right-hand operand of [`arithmetic`].
#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Element(&'a Element),
    Real(f64),
}

/// Dispatching form of the element arithmetic.
pub fn arithmetic(op: ArithOp, a: &Element, b: Operand<'_>) -> Result<Element> {
    match (op, b) {
        (ArithOp::Add, Operand::Element(b)) => a.add(b),
        (ArithOp::Sub, Operand::Element(b)) => a.sub(b),
        (ArithOp::Mul, Operand::Element(b)) => a.mul(b),
        (ArithOp::Scalar, Operand::Real(s)) => Ok(a.scale(s)),
        (ArithOp::Scalar, Operand::Element(_)) => {
            Err(Error::Shape("scalar multiplication needs a real operand".into()))
        }
        (_, Operand::Real(_)) => Err(Error::Shape(format!(
            "{op:?} needs an element operand"
        ))),
    }
}

impl Element {
    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.desc
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn tolerance(&self) -> f64 {
        self.desc.tolerance
    }

    fn check_compatible(&self, other: &Element) -> Result<()> {
        if self.desc.compatible(&other.desc) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{}({}) vs {}({})",
                self.desc.kind, self.desc.dimension, other.desc.kind, other.desc.dimension
            )))
        }
    }

    fn zip_with(&self, other: &Element, f: impl Fn(f64, f64) -> f64) -> Result<Element> {
        self.check_compatible(other)?;
        Ok(Element {
            desc: self.desc,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Matrix product for matrix kinds, pointwise product otherwise.
    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.check_compatible(other)?;
        if !self.desc.kind.is_matrix() {
            return self.zip_with(other, |a, b| a * b);
        }
        let n = self.desc.dimension;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n)
                    .map(|k| self.coeffs[i * n + k] * other.coeffs[k * n + j])
                    .sum();
            }
        }
        Ok(Element {
            desc: self.desc,
            coeffs: out,
        })
    }

    pub fn scale(&self, s: f64) -> Element {
        Element {
            desc: self.desc,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Transpose for matrices (real entries, so no conjugation); identity otherwise.
    pub fn involution(&self) -> Element {
        if !self.desc.kind.is_matrix() {
            return self.clone();
        }
        let n = self.desc.dimension;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.coeffs[i * n + j];
            }
        }
        Element {
            desc: self.desc,
            coeffs: out,
        }
    }

    /// `a* x a`, the conjugation used throughout the contraction conditions.
    pub fn conjugate_by(&self, a: &Element) -> Result<Element> {
        a.involution().mul(self)?.mul(a)
    }

    pub fn norm(&self) -> f64 {
        let max_abs = || self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        match self.desc.kind {
            AlgebraKind::MatEntrywise | AlgebraKind::Tuple | AlgebraKind::StepFn => max_abs(),
            AlgebraKind::MatLoewner => match spectral::spectral_norm(&self.coeffs) {
                Ok(v) => v,
                // Frobenius bound; only reachable on pathological input.
                Err(_) => self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt(),
            },
        }
    }

    /// Distance of `self` from the positive cone (zero when inside).
    pub fn cone_violation(&self) -> f64 {
        match self.desc.kind {
            AlgebraKind::MatLoewner => {
                spectral::loewner_violation(&self.coeffs, self.desc.tolerance)
            }
            _ => self
                .coeffs
                .iter()
                .fold(0.0f64, |m, c| m.max(-c))
                .max(0.0),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.cone_violation() <= self.desc.tolerance
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.abs() <= self.desc.tolerance)
    }

    /// Compares under the instance's partial order.
    pub fn leq(&self, other: &Element) -> Result<OrderVerdict> {
        let up = other.sub(self)?;
        let down = self.sub(other)?;
        let up_v = up.cone_violation();
        let le = up_v <= self.desc.tolerance;
        let ge = down.is_positive();
        let relation = match (le, ge) {
            (true, true) => Relation::Equal,
            (true, false) => Relation::LessOrEqual,
            (false, true) => Relation::GreaterOrEqual,
            (false, false) => Relation::Incomparable,
        };
        Ok(OrderVerdict {
            relation,
            slack: if le { 0.0 } else { up_v },
        })
    }

    /// Equality within tolerance under the instance's order.
    pub fn approx_eq(&self, other: &Element) -> bool {
        matches!(self.leq(other), Ok(v) if v.relation == Relation::Equal)
    }

    /// Whether `self * other == other * self` within tolerance.
    pub fn commutes_with(&self, other: &Element) -> Result<bool> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        Ok(ab
            .coeffs
            .iter()
            .zip(&ba.coeffs)
            .all(|(x, y)| (x - y).abs() <= self.desc.tolerance))
    }

    pub fn invert(&self) -> Result<Element> {
        let tol = self.desc.tolerance;
        if !self.desc.kind.is_matrix() {
            if let Some((i, v)) = self
                .coeffs
                .iter()
                .enumerate()
                .find(|(_, v)| v.abs() <= tol)
            {
                return Err(Error::Singular(format!("component {i} is {v}")));
            }
            return Ok(Element {
                desc: self.desc,
                coeffs: self.coeffs.iter().map(|v| 1.0 / v).collect(),
            });
        }
        // Gauss-Jordan with partial pivoting.
        let n = self.desc.dimension;
        let mut a = self.coeffs.clone();
        let mut inv = self.desc.unit().coeffs;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
                .unwrap();
            if a[pivot * n + col].abs() <= tol {
                return Err(Error::Singular(format!(
                    "leading minor of order {} vanishes",
                    col + 1
                )));
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                    inv.swap(pivot * n + k, col * n + k);
                }
            }
            let p = a[col * n + col];
            for k in 0..n {
                a[col * n + k] /= p;
                inv[col * n + k] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..n {
                    a[r * n + k] -= f * a[col * n + k];
                    inv[r * n + k] -= f * inv[col * n + k];
                }
            }
        }
        Ok(Element {
            desc: self.desc,
            coeffs: inv,
        })
    }

    /// Whether off-diagonal entries vanish (always true for non-matrix kinds).
    pub fn is_diagonal(&self) -> bool {
        if !self.desc.kind.is_matrix() {
            return true;
        }
        let n = self.desc.dimension;
        (0..n).all(|i| {
            (0..n).all(|j| i == j || self.coeffs[i * n + j].abs() <= self.desc.tolerance)
        })
    }

    /// Diagonal entries (all coefficients for non-matrix kinds).
    pub fn diagonal(&self) -> Vec<f64> {
        if !self.desc.kind.is_matrix() {
            return self.coeffs.clone();
        }
        let n = self.desc.dimension;
        (0..n).map(|i| self.coeffs[i * n + i]).collect()
    }
}

/// Free-function form of [`Element::involution`].
pub fn involution(a: &Element) -> Element {
    a.involution()
}

/// Free-function form of [`Element::leq`].
pub fn leq(a: &Element, b: &Element) -> Result<OrderVerdict> {
    a.leq(b)
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.desc.kind.is_matrix() {
            let n = self.desc.dimension;
            f.write_str("[")?;
            for i in 0..n {
                if i > 0 {
                    f.write_str(", ")?;
                }
                f.write_str("[")?;
                for j in 0..n {
                    if j > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", self.coeffs[i * n + j])?;
                }
                f.write_str("]")?;
            }
            f.write_str("]")
        } else {
            f.write_str("[")?;
            for (i, c) in self.coeffs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("]")
        }
    }
}
