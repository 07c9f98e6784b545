//! Minkowski-type lattice point inequalities.
//!
//! The classical statement is checked on lattices by exact enumeration; the
//! generalised inequality `Σ_{u∈S} ρ(u) ≥ D·Vol(S/2)` and its integer form
//! `Σ_{u∈S} ρ(u) ≥ D·#(S/2 ∩ Z^n)` are checked on frequency tables.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::convex::ConvexBody;
use crate::enumerate;
use crate::error::{Error, Result};
use crate::exact;
use crate::frequency::{frequency_table, FrequencyTable};
use crate::modelset;
use crate::pointset::PointSample;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalReport {
    /// `#(S ∩ Λ \ {0})`.
    pub count_nonzero: usize,
    /// Largest `k` with `Vol(S/2) > k·Covol(Λ)`, i.e. `⌈D·Vol(S/2)⌉ − 1`.
    pub k: u64,
    /// `2⌈D·Vol(S/2)⌉ − 1`, a lower bound for `#(S ∩ Λ)` counting 0.
    pub bound: u64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Continuous,
    Integer,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Continuous => "continuous",
            Mode::Integer => "integer",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactMargin {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub margin: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiReport {
    pub mode: Mode,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// `margin ≥ −sampling_uncertainty`.
    pub pass: bool,
    /// Density-trace oscillation times the rhs volume factor; a heuristic,
    /// not a confidence interval.
    pub sampling_uncertainty: f64,
    /// Present when both sides are exact rationals.
    pub exact: Option<ExactMargin>,
    /// Number of table entries inside `S`.
    pub support_size: usize,
}

impl MinkowskiReport {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

fn density_times_volume(density: f64, exact_density: Option<&BigRational>, body: &ConvexBody) -> (f64, Option<BigRational>) {
    let half = body.half();
    let float = density * half.volume();
    let exact = match (exact_density, half.volume_exact()) {
        (Some(d), Some(v)) => Some(d * v),
        _ => None,
    };
    (exact.as_ref().map_or(float, exact::to_f64), exact)
}

/// Checks `#(S ∩ Λ \ {0}) ≥ 2k` for the largest `k` with `Vol(S/2) > k·Covol`,
/// equivalently `#(S ∩ Λ) ≥ 2⌈D·Vol(S/2)⌉ − 1`.
pub fn classical_bound_check(basis: &DMatrix<f64>, body: &ConvexBody) -> Result<ClassicalReport> {
    let points = enumerate::lattice_points_in_body(basis, body)?;
    let count_nonzero = points.iter().filter(|(z, _)| z.iter().any(|&c| c != 0)).count();
    let det = basis.determinant().abs();
    let exact_det = exact_covolume(basis);
    let ceiling = match body.half().volume_exact() {
        Some(v) if !exact_det.is_zero() => (v / exact_det).ceil().to_integer(),
        _ => BigInt::from((body.half().volume() / det).ceil() as i64),
    };
    let ceiling = ceiling.to_u64().unwrap_or(0).max(1);
    let k = ceiling - 1;
    Ok(ClassicalReport {
        count_nonzero,
        k,
        bound: 2 * ceiling - 1,
        pass: count_nonzero as u64 >= 2 * k,
    })
}

fn check_fits(table: &FrequencyTable, body: &ConvexBody) -> Result<()> {
    if body.dim() != table.dim {
        return Err(Error::DimensionMismatch {
            expected: table.dim,
            got: body.dim(),
        });
    }
    let radius = body.circumradius();
    if radius > table.cutoff * (1.0 + 1e-12) {
        return Err(Error::BodyExceedsCutoff {
            radius,
            cutoff: table.cutoff,
        });
    }
    Ok(())
}

fn lhs_of(table: &FrequencyTable, body: &ConvexBody) -> (f64, Option<BigRational>, usize) {
    let mut sum = 0.0;
    let mut exact_sum = Some(BigRational::zero());
    let mut count = 0;
    for e in table.entries_in(body) {
        sum += e.rho;
        count += 1;
        exact_sum = match (exact_sum, &e.exact) {
            (Some(acc), Some(q)) => Some(acc + q),
            _ => None,
        };
    }
    (exact_sum.as_ref().map_or(sum, exact::to_f64), exact_sum, count)
}

fn report(mode: Mode, lhs: (f64, Option<BigRational>, usize), rhs: (f64, Option<BigRational>), uncertainty: f64) -> MinkowskiReport {
    let margin = lhs.0 - rhs.0;
    let exact = match (lhs.1, rhs.1) {
        (Some(l), Some(r)) => Some(ExactMargin {
            margin: &l - &r,
            lhs: l,
            rhs: r,
        }),
        _ => None,
    };
    let pass = match &exact {
        Some(e) => !e.margin.is_negative(),
        None => margin >= -uncertainty,
    };
    MinkowskiReport {
        mode,
        lhs: lhs.0,
        rhs: rhs.0,
        margin: exact.as_ref().map_or(margin, |e| exact::to_f64(&e.margin)),
        pass,
        sampling_uncertainty: uncertainty,
        exact,
        support_size: lhs.2,
    }
}

/// `Σ_{u∈S} ρ(u)` against `D·Vol(S/2)`.
pub fn verify_inequality(table: &FrequencyTable, body: &ConvexBody) -> Result<MinkowskiReport> {
    check_fits(table, body)?;
    let lhs = lhs_of(table, body);
    let rhs = density_times_volume(table.density.value, table.exact_density.as_ref(), body);
    let uncertainty = table.sampling_uncertainty() * body.half().volume();
    Ok(report(Mode::Continuous, lhs, rhs, uncertainty))
}

/// `Σ_{u∈S} ρ(u)` against `D·#(S/2 ∩ Z^n)`; the source set must be integral.
pub fn verify_integer_inequality(table: &FrequencyTable, body: &ConvexBody) -> Result<MinkowskiReport> {
    check_fits(table, body)?;
    if !table.source_integral {
        return Err(Error::invalid("integer mode needs a point set with integer coordinates"));
    }
    let lhs = lhs_of(table, body);
    let count = enumerate::count_integer_points(&body.half())?;
    let rhs_f = table.density.value * count as f64;
    let rhs_q = table
        .exact_density
        .as_ref()
        .map(|d| d * BigRational::from_integer(BigInt::from(count)));
    let rhs = (rhs_q.as_ref().map_or(rhs_f, exact::to_f64), rhs_q);
    let uncertainty = table.sampling_uncertainty() * count as f64;
    Ok(report(Mode::Integer, lhs, rhs, uncertainty))
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The hexagon for which `kZ × Z` attains equality in the integer form:
/// vertices `(−a, h), (−a, −c), (−1, −c), (a, −h), (a, c), (1, c)` with
/// `a = k − 4/5`, `h = 1/10`, `c = 1 + 2/(5(k−1))`.
pub fn equality_hexagon(k: u32) -> Result<ConvexBody> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::invalid(format!("k must be odd and at least 3, got {k}")));
    }
    let k = k as i64;
    let a = q(5 * k - 4, 5);
    let h = q(1, 10);
    let c = q(5 * (k - 1) + 2, 5 * (k - 1));
    let one = q(1, 1);
    ConvexBody::polygon_exact(vec![
        [-a.clone(), h.clone()],
        [-a.clone(), -c.clone()],
        [-one.clone(), -c.clone()],
        [a.clone(), -h],
        [a, c.clone()],
        [one, c],
    ])
}

/// `(kZ × Z) ∩ B(0,R)` with the equality hexagon. The construction is
/// checked by enumeration: `S ∩ Z²` is `{(i,0) : |i| < k} ∪ {±(i,1) : 0 < i < k}`,
/// `S ∩ Γ = {0}` and `#(S/2 ∩ Z²) = k`.
pub fn equality_instance(k: u32, radius: f64) -> Result<(PointSample, ConvexBody)> {
    let body = equality_hexagon(k)?;
    let ki = k as i64;
    let id = DMatrix::<f64>::identity(2, 2);
    let mut found: Vec<Vec<i64>> = enumerate::lattice_points_in_body(&id, &body)?
        .into_iter()
        .map(|(z, _)| z)
        .collect();
    found.sort();
    let mut expected: Vec<Vec<i64>> = (1 - ki..ki).map(|i| vec![i, 0]).collect();
    for i in 1..ki {
        expected.push(vec![i, 1]);
        expected.push(vec![-i, -1]);
    }
    expected.sort();
    if found != expected {
        return Err(Error::InequalityViolation(format!(
            "hexagon for k={k} captures {} integer points instead of {}",
            found.len(),
            expected.len()
        )));
    }
    if found.iter().any(|z| (z[0] != 0 || z[1] != 0) && z[0] % ki == 0) {
        return Err(Error::InequalityViolation(format!(
            "hexagon for k={k} meets kZ x Z outside the origin"
        )));
    }
    let half = enumerate::count_integer_points(&body.half())?;
    if half != k as usize {
        return Err(Error::InequalityViolation(format!(
            "half hexagon for k={k} holds {half} integer points"
        )));
    }
    let needed = body.circumradius() * 2.0;
    if radius < needed {
        return Err(Error::invalid(format!("radius must be at least {needed} for k={k}")));
    }
    let gamma = modelset::stretched_grid(k, radius)?;
    Ok((gamma, body))
}

/// Integer-mode verification of the equality instance on the periodic path.
pub fn equality_report(k: u32) -> Result<MinkowskiReport> {
    let probe = equality_hexagon(k)?;
    let cutoff = probe.circumradius().ceil();
    let (gamma, body) = equality_instance(k, 2.0 * cutoff + 2.0)?;
    let table = frequency_table(&gamma, cutoff, cutoff + 1.0)?;
    verify_integer_inequality(&table, &body)
}

/// `|det basis|` computed exactly from the stored floats.
pub fn exact_covolume(basis: &DMatrix<f64>) -> BigRational {
    let rows: Vec<Vec<BigRational>> = (0..basis.nrows())
        .map(|i| (0..basis.ncols()).map(|j| exact::from_f64(basis[(i, j)])).collect())
        .collect();
    exact::determinant(&rows).abs()
}
