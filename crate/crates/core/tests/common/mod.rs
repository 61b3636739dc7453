//! Helpers shared by the integration suites and the acceptance runner.
//!
//! The property checks return `Err(description)` instead of panicking so the
//! acceptance runner can count failures.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use ccvms::algebra::{AlgebraDescriptor, AlgebraKind, Element, Relation};
use ccvms::circle::{Circle, Membership};
use ccvms::scenario::{parse_scenario, Scenario};
use ccvms::space::{distance, Point, SpaceInstance, SpaceKind};
use rand::Rng;

pub type Check = Result<(), String>;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

/// Every shipped scenario, sorted by file name.
pub fn corpus() -> Vec<(String, Scenario)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("scenario directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "scn"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).expect("readable scenario");
            let sc = parse_scenario(&text)
                .unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            (p.file_stem().unwrap().to_string_lossy().into_owned(), sc)
        })
        .collect()
}

pub fn load(name: &str) -> Scenario {
    let p = corpus_dir().join(format!("{name}.scn"));
    parse_scenario(&std::fs::read_to_string(&p).expect("readable scenario")).expect("valid scenario")
}

// ---------------------------------------------------------------------------
// Random elements

pub fn loewner(n: usize, tol: f64) -> AlgebraDescriptor {
    AlgebraDescriptor::new(AlgebraKind::MatLoewner, n)
        .unwrap()
        .with_tolerance(tol)
        .unwrap()
}

pub fn random_element<R: Rng>(desc: &AlgebraDescriptor, rng: &mut R, scale: f64) -> Element {
    let v = (0..desc.len()).map(|_| rng.gen_range(-scale..scale)).collect();
    desc.element(v).unwrap()
}

pub fn random_symmetric<R: Rng>(desc: &AlgebraDescriptor, rng: &mut R, scale: f64) -> Element {
    let x = random_element(desc, rng, scale);
    x.add(&x.involution()).unwrap().scale(0.5)
}

/// `x* x` for random `x`: positive in every instance's cone.
pub fn random_positive<R: Rng>(desc: &AlgebraDescriptor, rng: &mut R, scale: f64) -> Element {
    let x = random_element(desc, rng, scale);
    x.involution().mul(&x).unwrap()
}

/// A random invertible element: `x* x + I` is positive definite.
pub fn random_invertible<R: Rng>(desc: &AlgebraDescriptor, rng: &mut R, scale: f64) -> Element {
    let p = random_positive(desc, rng, scale);
    let z = random_element(desc, rng, 0.5);
    p.add(&desc.unit()).unwrap().add(&z.sub(&z.involution()).unwrap()).unwrap()
}

fn max_abs_diff(a: &Element, b: &Element) -> f64 {
    a.coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn close(a: &Element, b: &Element, tol: f64, what: &str) -> Check {
    let d = max_abs_diff(a, b);
    if d <= tol {
        Ok(())
    } else {
        Err(format!("{what}: {a} vs {b} differ by {d:e}"))
    }
}

// ---------------------------------------------------------------------------
// Order and involution properties (i)-(vii) plus involution axioms

/// (i) `||x*|| = ||x||`.
pub fn prop_norm_of_adjoint(x: &Element, tol: f64) -> Check {
    let (a, b) = (x.involution().norm(), x.norm());
    if (a - b).abs() <= tol * b.max(1.0) {
        Ok(())
    } else {
        Err(format!("||x*|| = {a}, ||x|| = {b} for x = {x}"))
    }
}

/// (ii) `(x*)^-1 = (x^-1)*` for invertible `x`.
pub fn prop_inverse_of_adjoint(x: &Element, tol: f64) -> Check {
    let lhs = x.involution().invert().map_err(|e| e.to_string())?;
    let rhs = x.invert().map_err(|e| e.to_string())?.involution();
    let scale = lhs.norm().max(1.0);
    close(&lhs, &rhs, tol * scale, "(x*)^-1 vs (x^-1)*")
}

/// (iii) `x <= y` implies `x + z <= y + z`.
pub fn prop_translation(x: &Element, y: &Element, z: &Element) -> Check {
    if !x.leq(y).unwrap().relation.is_le() {
        return Err(format!("premise {x} <= {y} does not hold"));
    }
    let v = x.add(z).unwrap().leq(&y.add(z).unwrap()).unwrap();
    if v.relation.is_le() {
        Ok(())
    } else {
        Err(format!("translation by {z} breaks {x} <= {y}: {:?}", v.relation))
    }
}

/// (iv) `a, b >= 0` and `alpha, beta >= 0` give `alpha a + beta b >= 0`.
pub fn prop_cone_closure(a: &Element, b: &Element, alpha: f64, beta: f64) -> Check {
    let c = a.scale(alpha).add(&b.scale(beta)).unwrap();
    if c.is_positive() {
        Ok(())
    } else {
        Err(format!("{alpha} {a} + {beta} {b} = {c} is not positive"))
    }
}

/// Cholesky factor `L` (row-major) with `p = L L^T`; `None` if `p` is not
/// positive definite.
pub fn cholesky(p: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            if i == j {
                let d = p[i * n + i] - s;
                if d <= 0.0 {
                    return None;
                }
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = (p[i * n + j] - s) / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// (v) `x* x` is positive, and a positive definite `p` factors as `x* x`
/// with `x = L^T` from its Cholesky factor.
pub fn prop_positive_is_square(x: &Element, p: &Element, tol: f64) -> Check {
    let xx = x.involution().mul(x).unwrap();
    if !xx.is_positive() {
        return Err(format!("x* x = {xx} is not positive"));
    }
    let n = p.descriptor().dimension();
    let l = cholesky(p.coefficients(), n).ok_or_else(|| format!("{p} has no Cholesky factor"))?;
    let lt = p.descriptor().element(l).unwrap().involution();
    let back = lt.involution().mul(&lt).unwrap();
    close(&back, p, tol * p.norm().max(1.0), "Cholesky square root")
}

/// (vi) `x <= y` implies `z* x z <= z* y z`.
pub fn prop_conjugation(x: &Element, y: &Element, z: &Element) -> Check {
    let v = x
        .conjugate_by(z)
        .unwrap()
        .leq(&y.conjugate_by(z).unwrap())
        .unwrap();
    if v.relation.is_le() {
        Ok(())
    } else {
        Err(format!("conjugation by {z} breaks {x} <= {y}: {:?}", v.relation))
    }
}

/// (vii) `0 <= x <= y` implies `||x|| <= ||y||`.
pub fn prop_norm_monotone(x: &Element, y: &Element, tol: f64) -> Check {
    if x.norm() <= y.norm() + tol {
        Ok(())
    } else {
        Err(format!("||{x}|| = {} > ||{y}|| = {}", x.norm(), y.norm()))
    }
}

/// `(x*)* = x`, `(xy)* = y* x*`, `(l x + y)* = l x* + y*`.
pub fn prop_involution_axioms(x: &Element, y: &Element, l: f64) -> Check {
    if x.involution().involution() != *x {
        return Err(format!("(x*)* != x for {x}"));
    }
    let lhs = x.mul(y).unwrap().involution();
    let rhs = y.involution().mul(&x.involution()).unwrap();
    close(&lhs, &rhs, 1e-12 * lhs.norm().max(1.0), "(xy)* vs y* x*")?;
    let lhs = x.scale(l).add(y).unwrap().involution();
    let rhs = x.involution().scale(l).add(&y.involution()).unwrap();
    close(&lhs, &rhs, 0.0, "(l x + y)* vs l x* + y*")
}

/// `| ||x* x|| - ||x||^2 | <= tol`.
pub fn prop_cstar_identity(x: &Element, tol: f64) -> Check {
    let lhs = x.involution().mul(x).unwrap().norm();
    let rhs = x.norm().powi(2);
    if (lhs - rhs).abs() <= tol * rhs.max(1.0) {
        Ok(())
    } else {
        Err(format!("||x* x|| = {lhs}, ||x||^2 = {rhs} for x = {x}"))
    }
}

/// Reflexive, antisymmetric and transitive on the given elements.
pub fn prop_order_laws(a: &Element, b: &Element, c: &Element) -> Check {
    if a.leq(a).unwrap().relation != Relation::Equal {
        return Err(format!("{a} is not equal to itself"));
    }
    let ab = a.leq(b).unwrap().relation;
    if ab.is_le() && ab.is_ge() && !a.approx_eq(b) {
        return Err(format!("{a} and {b} compare Equal but differ"));
    }
    if ab.is_le() && b.leq(c).unwrap().relation.is_le() && !a.leq(c).unwrap().relation.is_le() {
        return Err(format!("transitivity fails for {a} <= {b} <= {c}"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Space instances

/// One instance of every space kind (and both matrix orders on the line).
pub fn space_instances() -> Vec<(&'static str, SpaceInstance)> {
    let loewner2 = AlgebraDescriptor::new(AlgebraKind::MatLoewner, 2).unwrap();
    vec![
        ("real-line-diag(3)", SpaceInstance::new(SpaceKind::RealLineDiag { alpha: 3.0 }).unwrap()),
        (
            "real-line-diag(3)/loewner",
            SpaceInstance::new(SpaceKind::RealLineDiag { alpha: 3.0 })
                .unwrap()
                .with_algebra(loewner2)
                .unwrap(),
        ),
        ("real-line-exp-diag(2)", SpaceInstance::new(SpaceKind::RealLineExpDiag { alpha: 2.0 }).unwrap()),
        ("real-line-discrete", SpaceInstance::new(SpaceKind::RealLineDiscrete).unwrap()),
        (
            "real-line-discrete/loewner",
            SpaceInstance::new(SpaceKind::RealLineDiscrete)
                .unwrap()
                .with_algebra(loewner2)
                .unwrap(),
        ),
        ("square-tuple", SpaceInstance::new(SpaceKind::SquareTuple).unwrap()),
        ("square-tuple/ambient", SpaceInstance::new(SpaceKind::SquareTuple).unwrap().with_ambient(true)),
        ("stepfn(4)", SpaceInstance::new(SpaceKind::StepFn { pieces: 4 }).unwrap()),
    ]
}

/// Uniform random point inside the instance's sampling bounds. Discrete
/// spaces draw from a small integer grid so repeated points occur.
pub fn random_point<R: Rng>(s: &SpaceInstance, rng: &mut R) -> Point {
    let (lo, hi) = s.bounds();
    match s.kind() {
        SpaceKind::RealLineDiscrete => Point::Scalar(rng.gen_range(-3..=3) as f64),
        k if k.is_real_line() => Point::Scalar(rng.gen_range(lo..hi)),
        SpaceKind::SquareTuple => Point::Pair([rng.gen_range(lo..hi), rng.gen_range(lo..hi)]),
        SpaceKind::StepFn { pieces } => {
            Point::Pieces((0..pieces).map(|_| rng.gen_range(lo..hi)).collect())
        }
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// Brute-force circle oracle for real-line spaces

pub const ORACLE_GRID: usize = 100_000;

fn residual(s: &SpaceInstance, center: &Point, radius: &Element, x: f64) -> f64 {
    let d = distance(s, &Point::Scalar(x), center).unwrap();
    max_abs_diff(&d, radius)
}

/// Roots of `x -> ||d(x, x0) - r||` on `[lo, hi]`: grid local minima,
/// refined by ternary search, kept when the refined residual is tiny.
pub fn oracle_roots(s: &SpaceInstance, center: &Point, radius: &Element, lo: f64, hi: f64) -> Vec<f64> {
    let n = ORACLE_GRID;
    let h = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
    let f: Vec<f64> = xs.iter().map(|&x| residual(s, center, radius, x)).collect();
    let mut roots: Vec<f64> = Vec::new();
    for i in 1..n - 1 {
        if !(f[i] < f[i - 1] && f[i] <= f[i + 1]) {
            continue;
        }
        let (mut a, mut b) = (xs[i - 1], xs[i + 1]);
        for _ in 0..200 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if residual(s, center, radius, m1) <= residual(s, center, radius, m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        let x = 0.5 * (a + b);
        if residual(s, center, radius, x) <= 1e-8 && !roots.iter().any(|r| (r - x).abs() <= 1e-6) {
            roots.push(x);
        }
    }
    roots
}

/// Compares an analytic real-line circle against the brute-force oracle.
/// Finite circles are compared member by member at 1e-6; complement circles
/// are compared pointwise on the grid.
pub fn oracle_agrees(s: &SpaceInstance, c: &Circle) -> Check {
    let (lo, hi) = (-8.0, 8.0);
    match &c.membership {
        Membership::ExplicitFinite(members) => {
            let roots = oracle_roots(s, &c.center, &c.radius, lo, hi);
            let analytic: Vec<f64> = members.iter().map(|p| p.coords()[0]).collect();
            for r in &roots {
                if !analytic.iter().any(|a| (a - r).abs() <= 1e-6) {
                    return Err(format!("oracle root {r} missing from analytic {analytic:?}"));
                }
            }
            for a in analytic.iter().filter(|a| (lo..=hi).contains(*a)) {
                if !roots.iter().any(|r| (a - r).abs() <= 1e-6) {
                    return Err(format!("analytic member {a} not found by the oracle {roots:?}"));
                }
            }
            Ok(())
        }
        Membership::ComplementOfFinite(_) => {
            let n = ORACLE_GRID;
            let h = (hi - lo) / (n - 1) as f64;
            let mut xs: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
            xs.push(c.center.coords()[0]);
            for x in xs {
                let by_oracle = residual(s, &c.center, &c.radius, x) <= 1e-9;
                if by_oracle != c.contains(s, &Point::Scalar(x)) {
                    return Err(format!("membership of {x} disagrees (oracle says {by_oracle})"));
                }
            }
            Ok(())
        }
        Membership::Sampled(_) => Err("sampled circles have no closed form to compare".into()),
    }
}
