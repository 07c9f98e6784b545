//! Simultaneous slope approximation by differences of a point set.
//!
//! For slopes `α ∈ R^n`, a quality `Q > 1` and a set `Γ ⊂ Z^{n+1}` of density
//! `D`, the slab `S = {|x_i − α_i y| ≤ Q^{−1/n}, |y| ≤ 2Q/D}` has
//! `D·Vol(S/2) = 2`, so some nonzero difference `u = (x, y)` of `Γ` lies in
//! it and `|α_i − x_i/y| ≤ 2^{1/n} D^{−1/n} |y|^{−1−1/n}`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::convex::ConvexBody;
use crate::error::{Error, Result};
use crate::exact;
use crate::frequency::FrequencyTable;
use crate::pointset::PointSample;

/// Digits kept when an irrational slope is stored as a decimal.
pub const SLOPE_DIGITS: u32 = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationQuery {
    alpha: Vec<BigRational>,
    q: BigRational,
    density: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeWitness {
    pub v: Vec<i64>,
    pub w: Vec<i64>,
    /// `v − w = (x_1, …, x_n, Δy)` with `Δy > 0`.
    pub u: Vec<i64>,
    /// `|α_i − x_i/Δy|`.
    pub errors: Vec<f64>,
    /// `2^{1/n} D^{−1/n} Δy^{−1−1/n}`.
    pub bound: f64,
    /// `D·2^{1/n} / (4Q)^{1+1/n}`, reported for comparison only.
    pub q_form: f64,
    /// Slab membership of `u` differed between float and exact evaluation.
    pub borderline: bool,
    /// `gcd(x_1, …, x_n, Δy) = 1`.
    pub primitive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassReport {
    /// `Σ_{u ∈ S, u ≠ 0} ρ(u)`.
    pub empirical: f64,
    /// `D·Vol(S/2) − 1`.
    pub floor: f64,
    pub support_size: usize,
}

impl ApproximationQuery {
    pub fn new(alpha: Vec<BigRational>, q: BigRational, density: f64) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::Empty("slope vector"));
        }
        if q <= BigRational::one() {
            return Err(Error::invalid(format!("Q must exceed 1, got {}", exact::to_f64(&q))));
        }
        if !(density.is_finite() && density > 0.0) {
            return Err(Error::invalid(format!("density must be positive, got {density}")));
        }
        Ok(ApproximationQuery { alpha, q, density })
    }

    /// Slopes and `Q` given as floats (each converted exactly).
    pub fn from_f64(alpha: &[f64], q: f64, density: f64) -> Result<Self> {
        if alpha.iter().chain([&q]).any(|x| !x.is_finite()) {
            return Err(Error::invalid("slopes and Q must be finite"));
        }
        Self::new(alpha.iter().map(|&a| exact::from_f64(a)).collect(), exact::from_f64(q), density)
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[BigRational] {
        &self.alpha
    }

    pub fn alpha_f64(&self) -> Vec<f64> {
        self.alpha.iter().map(exact::to_f64).collect()
    }

    pub fn q(&self) -> f64 {
        exact::to_f64(&self.q)
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    /// `A_i = Q^{−1/n}`; exact for `n = 1`.
    pub fn slope_bound(&self) -> BigRational {
        if self.n() == 1 {
            self.q.recip()
        } else {
            exact::from_f64(self.q().powf(-1.0 / self.n() as f64))
        }
    }

    /// `A_{n+1} = 2Q/D`.
    pub fn height_bound(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(2)) * &self.q / exact::decimal_of(self.density)
    }

    /// `{|x_i − α_i y| ≤ A_i, |y| ≤ A_{n+1}}` in `R^{n+1}`, with exact data.
    pub fn slab_body(&self) -> Result<ConvexBody> {
        let n = self.n();
        let mut forms = Vec::with_capacity(n + 1);
        for i in 0..n {
            let mut row = vec![BigRational::zero(); n + 1];
            row[i] = BigRational::one();
            row[n] = -self.alpha[i].clone();
            forms.push(row);
        }
        let mut last = vec![BigRational::zero(); n + 1];
        last[n] = BigRational::one();
        forms.push(last);
        let mut bounds = vec![self.slope_bound(); n];
        bounds.push(self.height_bound());
        ConvexBody::slab_exact(forms, bounds)
    }
}

/// `√m − 1` truncated to [`SLOPE_DIGITS`] decimals.
pub fn sqrt_minus_one(m: u32) -> BigRational {
    exact::sqrt_truncated(m, SLOPE_DIGITS) - BigRational::one()
}

/// `(√5 − 1)/2` truncated to [`SLOPE_DIGITS`] decimals.
pub fn golden_conjugate() -> BigRational {
    (exact::sqrt_truncated(5, SLOPE_DIGITS + 1) - BigRational::one()) / BigRational::from_integer(BigInt::from(2))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// The first nonzero difference `u = v − w` of `Γ` lying in the slab, in the
/// order `Δy` ascending then `x` lexicographic; `w` is the lexicographically
/// smallest point with `w + u ∈ Γ`. `Γ` must have integer coordinates.
pub fn find_witness(query: &ApproximationQuery, gamma: &PointSample) -> Result<SlopeWitness> {
    let n = query.n();
    if gamma.dim() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            got: gamma.dim(),
        });
    }
    if !gamma.is_integral() {
        return Err(Error::invalid("witness search needs a point set with integer coordinates"));
    }
    let points: Vec<Vec<i64>> = gamma
        .points()
        .map(|p| p.iter().map(|&x| x as i64).collect())
        .collect();
    let set: HashSet<&[i64]> = points.iter().map(|p| p.as_slice()).collect();
    let a = query.slope_bound();
    let a_f = exact::to_f64(&a);
    let height = query.height_bound();
    let max_dy = height.floor().to_integer().to_i64().unwrap_or(i64::MAX);
    let reach = (2.0 * gamma.region_radius()).floor() as i64;
    let alpha = query.alpha();
    let alpha_f = query.alpha_f64();
    for dy in 1..=max_dy.min(reach) {
        let dyq = BigRational::from_integer(BigInt::from(dy));
        let ranges: Vec<(i64, i64)> = alpha_f
            .iter()
            .map(|&al| {
                let c = al * dy as f64;
                ((c - a_f).floor() as i64 - 1, (c + a_f).ceil() as i64 + 1)
            })
            .collect();
        let mut x: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'scan: loop {
            let exact_in = (0..n).all(|i| {
                (BigRational::from_integer(BigInt::from(x[i])) - &alpha[i] * &dyq).abs() <= a
            });
            let float_in = (0..n).all(|i| (x[i] as f64 - alpha_f[i] * dy as f64).abs() <= a_f);
            if exact_in {
                let mut u = x.clone();
                u.push(dy);
                let w = points.iter().find(|w| {
                    let v: Vec<i64> = w.iter().zip(&u).map(|(a, b)| a + b).collect();
                    set.contains(v.as_slice())
                });
                if let Some(w) = w {
                    return certify(query, w.clone(), u, exact_in != float_in);
                }
            }
            let mut k = n;
            loop {
                if k == 0 {
                    break 'scan;
                }
                k -= 1;
                if x[k] < ranges[k].1 {
                    x[k] += 1;
                    continue 'scan;
                }
                x[k] = ranges[k].0;
            }
        }
    }
    Err(Error::WitnessNotFound {
        max_dy: exact::to_f64(&height),
        region: gamma.region_radius(),
    })
}

fn certify(query: &ApproximationQuery, w: Vec<i64>, u: Vec<i64>, borderline: bool) -> Result<SlopeWitness> {
    let n = query.n();
    let dy = u[n];
    let d = query.density();
    let nf = n as f64;
    let bound = 2f64.powf(1.0 / nf) * d.powf(-1.0 / nf) * (dy as f64).powf(-1.0 - 1.0 / nf);
    let dyq = BigRational::from_integer(BigInt::from(dy));
    let mut errors = Vec::with_capacity(n);
    for i in 0..n {
        let e = (&query.alpha()[i] - BigRational::from_integer(BigInt::from(u[i])) / &dyq).abs();
        let ok = if n == 1 {
            // 2 / (D·Δy²), exactly
            let b = BigRational::from_integer(BigInt::from(2)) / (exact::decimal_of(d) * &dyq * &dyq);
            e <= b
        } else {
            exact::to_f64(&e) <= bound * (1.0 + 1e-12)
        };
        if !ok {
            return Err(Error::InequalityViolation(format!(
                "witness {u:?} has slope error {} above the bound {bound}",
                exact::to_f64(&e)
            )));
        }
        errors.push(exact::to_f64(&e));
    }
    let g = u.iter().fold(0, |acc, &c| gcd(acc, c));
    let v: Vec<i64> = w.iter().zip(&u).map(|(a, b)| a + b).collect();
    Ok(SlopeWitness {
        v,
        w,
        errors,
        bound,
        q_form: d * 2f64.powf(1.0 / nf) / (4.0 * query.q()).powf(1.0 + 1.0 / nf),
        borderline,
        primitive: g == 1,
        u,
    })
}

/// `Σ_{u∈S, u≠0} ρ(u)` over the slab next to the floor `D·Vol(S/2) − 1`.
pub fn guaranteed_mass(query: &ApproximationQuery, table: &FrequencyTable) -> Result<MassReport> {
    let body = query.slab_body()?;
    if table.dim != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: table.dim,
        });
    }
    let radius = body.circumradius();
    if radius > table.cutoff * (1.0 + 1e-12) {
        return Err(Error::BodyExceedsCutoff {
            radius,
            cutoff: table.cutoff,
        });
    }
    let mut empirical = 0.0;
    let mut support_size = 0;
    for e in table.entries_in(&body) {
        if e.v.iter().any(|&c| c != 0.0) {
            empirical += e.rho;
            support_size += 1;
        }
    }
    Ok(MassReport {
        empirical,
        floor: query.density() * body.half().volume() - 1.0,
        support_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelset;
    use nalgebra::DMatrix;

    fn z2(r: f64) -> PointSample {
        modelset::lattice_sample(&DMatrix::identity(2, 2), r).unwrap()
    }

    #[test]
    fn slab_for_q10() {
        let q = ApproximationQuery::new(vec![sqrt_minus_one(2)], BigRational::from_integer(10.into()), 0.2).unwrap();
        let s = q.slab_body().unwrap();
        assert!((s.volume() - 40.0).abs() < 1e-12);
        assert_eq!(q.height_bound(), BigRational::from_integer(100.into()));
        assert!(ApproximationQuery::from_f64(&[0.3], 1.0, 1.0).is_err());
    }

    #[test]
    fn rational_slope_is_hit_exactly() {
        let q = ApproximationQuery::new(vec![BigRational::new(1.into(), 3.into())], BigRational::from_integer(10.into()), 1.0).unwrap();
        let w = find_witness(&q, &z2(30.0)).unwrap();
        assert_eq!(w.u, vec![1, 3]);
        assert_eq!(w.errors, vec![0.0]);
    }

    #[test]
    fn sqrt_two_witnesses() {
        let gamma = z2(260.0);
        let q10 = ApproximationQuery::new(vec![sqrt_minus_one(2)], BigRational::from_integer(10.into()), 1.0).unwrap();
        assert_eq!(find_witness(&q10, &gamma).unwrap().u, vec![2, 5]);
        let q100 = ApproximationQuery::new(vec![sqrt_minus_one(2)], BigRational::from_integer(100.into()), 1.0).unwrap();
        assert_eq!(find_witness(&q100, &gamma).unwrap().u, vec![29, 70]);
    }

    #[test]
    fn undersized_sample_is_reported() {
        let q = ApproximationQuery::new(vec![sqrt_minus_one(2)], BigRational::from_integer(100.into()), 1.0).unwrap();
        assert!(matches!(find_witness(&q, &z2(10.0)), Err(Error::WitnessNotFound { .. })));
    }
}
