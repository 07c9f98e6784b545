//! Frequencies of differences and their mean.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::convex::{ball_volume, ConvexBody};
use crate::enumerate;
use crate::error::{Error, Result};
use crate::exact;
use crate::index;
use crate::linalg;
use crate::pointset::{DensityEstimate, PointSample, MERGE_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyEntry {
    pub v: Vec<f64>,
    pub rho: f64,
    /// Exact value, available on the periodic path.
    pub exact: Option<BigRational>,
}

/// `v ↦ ρ_Γ(v)` over the differences of a sample within a cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyTable {
    pub dim: usize,
    /// Sorted lexicographically.
    pub entries: Vec<FrequencyEntry>,
    pub density: DensityEstimate,
    /// Exact density on the periodic path.
    pub exact_density: Option<BigRational>,
    pub cutoff: f64,
    /// Radius of the ball whose points serve as sources.
    pub radius: f64,
    pub source_label: String,
    /// Every point of the source sample had integer coordinates.
    pub source_integral: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanFrequency {
    pub mean: f64,
    /// `max_c |value_c − mean| / mean`.
    pub max_deviation: f64,
    pub per_center: Vec<f64>,
}

impl FrequencyTable {
    /// `ρ(v)`, or 0 when `v` is not a tabulated difference.
    pub fn get(&self, v: &[f64]) -> f64 {
        self.entry(v).map_or(0.0, |e| e.rho)
    }

    pub fn entry(&self, v: &[f64]) -> Option<&FrequencyEntry> {
        self.entries
            .iter()
            .find(|e| linalg::dist_sq(&e.v, v) <= MERGE_TOL * MERGE_TOL)
    }

    /// Heuristic uncertainty on the density: the oscillation of its trace.
    pub fn sampling_uncertainty(&self) -> f64 {
        self.density.oscillation()
    }

    /// True when densities and frequencies are exact rationals.
    pub fn is_exact(&self) -> bool {
        self.exact_density.is_some() && self.entries.iter().all(|e| e.exact.is_some())
    }

    /// Entries whose difference vector lies in `body`.
    pub fn entries_in<'a>(&'a self, body: &'a ConvexBody) -> impl Iterator<Item = &'a FrequencyEntry> {
        self.entries.iter().filter(move |e| body.contains_point(&e.v))
    }
}

fn check_radius(r: f64, what: &str) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid(format!("{what} must be positive, got {r}")));
    }
    Ok(())
}

fn shifted_counts(gamma: &PointSample, v: &[f64], radius: f64) -> Result<(usize, usize, usize)> {
    if v.len() != gamma.dim() {
        return Err(Error::DimensionMismatch {
            expected: gamma.dim(),
            got: v.len(),
        });
    }
    check_radius(radius, "radius")?;
    let reach = radius + linalg::norm(v);
    if reach > gamma.region_radius() * (1.0 + 1e-12) {
        return Err(Error::BallEscapesRegion {
            center: vec![0.0; gamma.dim()],
            radius: reach,
            region: gamma.region_radius(),
        });
    }
    let idx = gamma.index(gamma.mean_spacing().max(1e-6));
    let origin = vec![0.0; gamma.dim()];
    let mut sources = Vec::new();
    idx.for_each_within(&origin, radius, |i| sources.push(i));
    if sources.is_empty() {
        return Err(Error::Empty("ball around the origin"));
    }
    let mut plus = 0;
    let mut minus = 0;
    let mut t = vec![0.0; gamma.dim()];
    for &i in &sources {
        let x = gamma.point(i);
        for k in 0..t.len() {
            t[k] = x[k] + v[k];
        }
        plus += idx.find(&t, MERGE_TOL).is_some() as usize;
        for k in 0..t.len() {
            t[k] = x[k] - v[k];
        }
        minus += idx.find(&t, MERGE_TOL).is_some() as usize;
    }
    Ok((plus, minus, sources.len()))
}

/// Symmetric ratio estimator `(N(v) + N(−v)) / (2·#(Γ∩B_R))` with
/// `N(v) = #{x ∈ Γ∩B_R : x+v ∈ Γ}`; needs `R + ‖v‖ ≤ R_s`.
pub fn frequency(gamma: &PointSample, v: &[f64], radius: f64) -> Result<f64> {
    let (plus, minus, total) = shifted_counts(gamma, v, radius)?;
    Ok((plus + minus) as f64 / (2 * total) as f64)
}

/// One-sided estimator `N(v) / #(Γ∩B_R)`.
pub fn frequency_one_sided(gamma: &PointSample, v: &[f64], radius: f64) -> Result<f64> {
    let (plus, _, total) = shifted_counts(gamma, v, radius)?;
    Ok(plus as f64 / total as f64)
}

fn density_trace(gamma: &PointSample, radius: f64) -> Result<DensityEstimate> {
    let origin = vec![0.0; gamma.dim()];
    let idx = gamma.index(radius.max(gamma.mean_spacing()));
    let trace: Vec<(f64, f64)> = [0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|f| {
            let r = radius * f;
            (r, idx.count_within(&origin, r) as f64 / ball_volume(gamma.dim(), r))
        })
        .collect();
    if trace.last().unwrap().1 == 0.0 {
        return Err(Error::Empty("ball around the origin"));
    }
    Ok(DensityEstimate {
        value: trace.last().unwrap().1,
        radius_used: radius,
        erosion_margin: 0.0,
        center_count: 1,
        sup_over_centers: false,
        grid_spacing: None,
        trace,
    })
}

/// Tabulates `ρ` over every difference realised within `cutoff`, using the
/// points of `Γ ∩ B(0,R)` as sources; needs `R + cutoff ≤ R_s`. Periodic
/// samples are handled exactly on one period.
pub fn frequency_table(gamma: &PointSample, cutoff: f64, radius: f64) -> Result<FrequencyTable> {
    if !(cutoff.is_finite() && cutoff >= 0.0) {
        return Err(Error::invalid(format!("cutoff must be nonnegative, got {cutoff}")));
    }
    check_radius(radius, "radius")?;
    if radius + cutoff > gamma.region_radius() * (1.0 + 1e-12) {
        return Err(Error::BallEscapesRegion {
            center: vec![0.0; gamma.dim()],
            radius: radius + cutoff,
            region: gamma.region_radius(),
        });
    }
    if gamma.structure().is_some() {
        return periodic_table(gamma, cutoff, radius);
    }
    let density = density_trace(gamma, radius)?;
    let in_ball = |x: &[f64]| {
        if x.len() == 1 {
            x[0].abs() <= radius
        } else {
            linalg::dot(x, x) <= radius * radius
        }
    };
    let sources = gamma.points().filter(|x| in_ball(x)).count();
    let classes = gamma.difference_classes(cutoff, in_ball);
    let entries = classes
        .reps
        .iter()
        .enumerate()
        .map(|(c, v)| FrequencyEntry {
            v: v.clone(),
            rho: (classes.counts[c] + classes.counts[classes.negation[c]]) as f64 / (2 * sources) as f64,
            exact: None,
        })
        .collect();
    Ok(FrequencyTable {
        dim: gamma.dim(),
        entries,
        density,
        exact_density: None,
        cutoff,
        radius,
        source_label: gamma.label().to_string(),
        source_integral: gamma.is_integral(),
    })
}

fn periodic_table(gamma: &PointSample, cutoff: f64, radius: f64) -> Result<FrequencyTable> {
    let s = gamma.structure().expect("periodic metadata");
    let n = gamma.dim();
    let basis = &s.basis;
    let inverse = linalg::checked_inverse(basis)?;
    let m = s.offsets.len();
    let mut diffs: Vec<Vec<f64>> = Vec::new();
    for oi in &s.offsets {
        for oj in &s.offsets {
            let base: Vec<f64> = oj.iter().zip(oi).map(|(a, b)| a - b).collect();
            let target: Vec<f64> = base.iter().map(|x| -x).collect();
            enumerate::ellipsoid_points(basis, &target, cutoff, |z| {
                let v: Vec<f64> = linalg::apply_int(basis, z)
                    .iter()
                    .zip(&base)
                    .map(|(a, b)| a + b + 0.0)
                    .collect();
                if linalg::norm(&v) <= cutoff {
                    diffs.push(v);
                }
            })?;
        }
    }
    diffs.sort_by(|a, b| linalg::lex_cmp(a, b));
    let flat: Vec<f64> = diffs.iter().flatten().copied().collect();
    let (ids, _) = index::cluster(&flat, n, MERGE_TOL);
    let mut reps: Vec<Vec<f64>> = Vec::new();
    for (i, &c) in ids.iter().enumerate() {
        if c == reps.len() {
            reps.push(diffs[i].clone());
        }
    }
    let in_lattice = |w: &[f64]| {
        linalg::apply(&inverse, w)
            .iter()
            .all(|c| (c - c.round()).abs() <= 1e-9)
    };
    let entries = reps
        .into_iter()
        .map(|v| {
            let hits = s
                .offsets
                .iter()
                .filter(|oi| {
                    s.offsets.iter().any(|oj| {
                        let w: Vec<f64> = (0..n).map(|k| oi[k] + v[k] - oj[k]).collect();
                        in_lattice(&w)
                    })
                })
                .count();
            let q = BigRational::new(BigInt::from(hits), BigInt::from(m));
            FrequencyEntry {
                v,
                rho: exact::to_f64(&q),
                exact: Some(q),
            }
        })
        .collect();
    let rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| exact::from_f64(basis[(i, j)])).collect())
        .collect();
    let exact_density = BigRational::from_integer(BigInt::from(m)) / exact::determinant(&rows).abs();
    let value = exact::to_f64(&exact_density);
    Ok(FrequencyTable {
        dim: n,
        entries,
        density: DensityEstimate {
            value,
            radius_used: radius,
            erosion_margin: 0.0,
            center_count: 1,
            sup_over_centers: false,
            grid_spacing: None,
            trace: Vec::new(),
        },
        exact_density: Some(exact_density),
        cutoff,
        radius,
        source_label: gamma.label().to_string(),
        source_integral: gamma.is_integral(),
    })
}

/// Averages of `ρ` over balls `B(c, r)`, one per centre; each ball must fit
/// inside the table's cutoff.
pub fn mean_frequency(table: &FrequencyTable, ball_radius: f64, centers: &[Vec<f64>]) -> Result<MeanFrequency> {
    check_radius(ball_radius, "ball radius")?;
    if centers.is_empty() {
        return Err(Error::Empty("centre list"));
    }
    let vol = ball_volume(table.dim, ball_radius);
    let mut per_center = Vec::with_capacity(centers.len());
    for c in centers {
        if c.len() != table.dim {
            return Err(Error::DimensionMismatch {
                expected: table.dim,
                got: c.len(),
            });
        }
        let reach = linalg::norm(c) + ball_radius;
        if reach > table.cutoff * (1.0 + 1e-12) {
            return Err(Error::BodyExceedsCutoff {
                radius: reach,
                cutoff: table.cutoff,
            });
        }
        let r2 = ball_radius * ball_radius;
        let sum: f64 = table
            .entries
            .iter()
            .filter(|e| linalg::dist_sq(&e.v, c) <= r2)
            .map(|e| e.rho)
            .sum();
        per_center.push(sum / vol);
    }
    let mean = per_center.iter().sum::<f64>() / per_center.len() as f64;
    let max_deviation = per_center
        .iter()
        .map(|v| (v - mean).abs() / mean)
        .fold(0.0, f64::max);
    Ok(MeanFrequency {
        mean,
        max_deviation,
        per_center,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelset;
    use nalgebra::DMatrix;

    #[test]
    fn lattice_table_is_indicator() {
        let g = modelset::stretched_grid(3, 30.0).unwrap();
        let t = frequency_table(&g, 5.0, 20.0).unwrap();
        assert!(t.is_exact());
        assert_eq!(t.exact_density.as_ref().unwrap(), &BigRational::new(1.into(), 3.into()));
        for e in &t.entries {
            assert_eq!(e.rho, 1.0);
            assert_eq!(e.v[0] % 3.0, 0.0);
        }
        assert_eq!(t.get(&[1.0, 0.0]), 0.0);
        assert_eq!(t.get(&[3.0, 1.0]), 1.0);
    }

    #[test]
    fn sampled_lattice_without_metadata_matches() {
        let id = DMatrix::<f64>::identity(2, 2);
        let z2 = modelset::lattice_sample(&id, 30.0).unwrap();
        let plain = PointSample::new(2, z2.coords().to_vec(), 30.0, "plain").unwrap();
        let t = frequency_table(&plain, 3.0, 20.0).unwrap();
        assert_eq!(t.entries.len(), 29);
        assert!(t.entries.iter().all(|e| e.rho == 1.0));
        assert_eq!(frequency(&plain, &[1.0, 2.0], 20.0).unwrap(), 1.0);
        assert_eq!(frequency(&plain, &[0.5, 0.0], 20.0).unwrap(), 0.0);
        assert!(frequency(&plain, &[15.0, 0.0], 20.0).is_err());
    }

    #[test]
    fn zero_cutoff_table() {
        let e = modelset::e_alpha_epsilon(&[2f64.sqrt() - 1.0], 0.1, 2000).unwrap();
        let t = frequency_table(&e, 0.0, 1000.0).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.entries[0].rho, 1.0);
    }

    #[test]
    fn table_agrees_with_pointwise_estimator() {
        let e = modelset::e_alpha_epsilon(&[2f64.sqrt() - 1.0], 0.1, 5000).unwrap();
        let t = frequency_table(&e, 30.0, 4000.0).unwrap();
        for entry in &t.entries {
            let direct = frequency(&e, &entry.v, 4000.0).unwrap();
            assert_eq!(entry.rho, direct);
            assert_eq!(t.get(&[-entry.v[0]]), entry.rho);
        }
    }
}
