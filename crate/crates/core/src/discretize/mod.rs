//! Rounded linear maps acting on the integer grid.
//!
//! A real map `A` acts on `Z^n` through `Â = π∘A`, where `π` rounds each
//! coordinate to the nearest integer (halves go up). Composing such maps loses
//! points; the fraction that survives is the rate of injectivity.

mod raster;

pub use raster::{degrade_image, degrade_trace, read_pgm, write_pgm, Raster, WHITE};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex::ball_volume;
use crate::error::{Error, Result};
use crate::frequency::FrequencyTable;
use crate::linalg;
use crate::pointset::PointSample;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapKind {
    General,
    Rotation(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
    det: f64,
    kind: MapKind,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let det = linalg::checked_inverse(&matrix).map(|_| matrix.determinant())?;
        Ok(LinearMap {
            matrix,
            det,
            kind: MapKind::General,
        })
    }

    pub fn rotation(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::invalid("rotation angle must be finite"));
        }
        let (s, c) = angle.sin_cos();
        let matrix = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let gram = matrix.transpose() * &matrix;
        if (gram - DMatrix::identity(2, 2)).amax() > 1e-12 {
            return Err(Error::invalid("rotation matrix is not orthogonal"));
        }
        Ok(LinearMap {
            det: matrix.determinant(),
            matrix,
            kind: MapKind::Rotation(angle),
        })
    }

    pub fn identity(n: usize) -> Self {
        LinearMap {
            matrix: DMatrix::identity(n, n),
            det: 1.0,
            kind: MapKind::General,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    /// `π(A z)` for an integer point `z`, written into `out`.
    pub fn apply_rounded(&self, z: &[i64], out: &mut [i64]) {
        let n = self.dim();
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let mut s = 0.0;
            for (j, &zj) in z.iter().enumerate() {
                s += self.matrix[(i, j)] * zj as f64;
            }
            *o = round_half_up(s);
        }
    }
}

fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

/// Nearest integer point, ties rounded toward `+∞` in each coordinate.
pub fn project(x: &[f64]) -> Vec<i64> {
    x.iter().map(|&c| round_half_up(c)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedSequence {
    maps: Vec<LinearMap>,
    seed: Option<u64>,
}

impl DiscretizedSequence {
    pub fn new(maps: Vec<LinearMap>) -> Result<Self> {
        let Some(first) = maps.first() else {
            return Err(Error::Empty("map sequence"));
        };
        let n = first.dim();
        if let Some(m) = maps.iter().find(|m| m.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.dim(),
            });
        }
        Ok(DiscretizedSequence { maps, seed: None })
    }

    pub fn identity(n: usize, k: usize) -> Result<Self> {
        Self::new(vec![LinearMap::identity(n); k])
    }

    pub fn rotations(angles: &[f64]) -> Result<Self> {
        Self::new(angles.iter().map(|&a| LinearMap::rotation(a)).collect::<Result<_>>()?)
    }

    pub fn maps(&self) -> &[LinearMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Rotation angles, for sequences made only of rotations.
    pub fn angles(&self) -> Option<Vec<f64>> {
        self.maps
            .iter()
            .map(|m| match m.kind {
                MapKind::Rotation(a) => Some(a),
                MapKind::General => None,
            })
            .collect()
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.len() {
            return Err(Error::invalid(format!("k must lie in [1, {}], got {k}", self.len())));
        }
        Ok(())
    }
}

/// `k` planar rotations with angles uniform on `[0, 2π)`: ChaCha8 seeded with
/// `seed`, angle `= (next_u64 >> 11)·2^{−53}·2π`.
pub fn random_rotation_sequence(seed: u64, k: usize) -> Result<DiscretizedSequence> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles: Vec<f64> = (0..k)
        .map(|_| (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) * 2.0 * PI)
        .collect();
    let mut seq = DiscretizedSequence::rotations(&angles)?;
    seq.seed = Some(seed);
    Ok(seq)
}

/// `Z^n ∩ B(0,R)` as a flat coordinate list.
pub fn grid_ball(n: usize, radius: f64) -> Result<Vec<i64>> {
    if n == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::invalid(format!("radius must be nonnegative, got {radius}")));
    }
    let m = radius.floor() as i64;
    let r2 = radius * radius;
    let mut out = Vec::new();
    let mut z = vec![-m; n];
    loop {
        let s: f64 = z.iter().map(|&c| (c * c) as f64).sum();
        if s <= r2 {
            out.extend_from_slice(&z);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if z[k] < m {
                z[k] += 1;
                break;
            }
            z[k] = -m;
        }
    }
}

/// Image of a flat point list under `Â`, duplicates removed, first occurrences
/// kept in order.
pub fn rounded_image(map: &LinearMap, points: &[i64]) -> Vec<i64> {
    let n = map.dim();
    let count = points.len() / n;
    let mut image = vec![0i64; points.len()];
    for (src, dst) in points.chunks_exact(n).zip(image.chunks_exact_mut(n)) {
        map.apply_rounded(src, dst);
    }
    dedup_in_order(&image, n, count)
}

fn dedup_in_order(image: &[i64], n: usize, count: usize) -> Vec<i64> {
    if count == 0 {
        return Vec::new();
    }
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for p in image.chunks_exact(n) {
        for k in 0..n {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let extent: Option<u64> = lo
        .iter()
        .zip(&hi)
        .try_fold(1u64, |acc, (a, b)| acc.checked_mul((b - a + 1) as u64));
    let mut out = Vec::with_capacity(image.len());
    match extent {
        Some(cells) if cells <= 16 * count as u64 + 4096 => {
            let mut seen = vec![false; cells as usize];
            for p in image.chunks_exact(n) {
                let mut idx = 0u64;
                for k in 0..n {
                    idx = idx * (hi[k] - lo[k] + 1) as u64 + (p[k] - lo[k]) as u64;
                }
                if !seen[idx as usize] {
                    seen[idx as usize] = true;
                    out.extend_from_slice(p);
                }
            }
        }
        _ => {
            let mut seen = std::collections::HashSet::with_capacity(count);
            for p in image.chunks_exact(n) {
                if seen.insert(p.to_vec()) {
                    out.extend_from_slice(p);
                }
            }
        }
    }
    out
}

/// Successive images `Â_j ∘ ⋯ ∘ Â_1 (B_R ∩ Z^n)` for `j = 1..=k`.
pub fn image_chain(seq: &DiscretizedSequence, k: usize, radius: f64) -> Result<Vec<Vec<i64>>> {
    seq.check_k(k)?;
    let mut current = grid_ball(seq.dim(), radius)?;
    let mut chain = Vec::with_capacity(k);
    for map in &seq.maps[..k] {
        current = rounded_image(map, &current);
        chain.push(current.clone());
    }
    Ok(chain)
}

/// Radius bound for the `k`-th image of `B_R`: `r_j = ‖A_j‖·r_{j−1} + √n/2`.
fn image_reach(seq: &DiscretizedSequence, k: usize, radius: f64) -> f64 {
    let half_diag = (seq.dim() as f64).sqrt() / 2.0;
    seq.maps[..k]
        .iter()
        .fold(radius, |r, m| linalg::singular_range(m.matrix()).0 * r + half_diag)
}

/// The image set after `k` steps as a point sample; the region radius is
/// inflated by the operator norms and the rounding error.
pub fn discretized_image(seq: &DiscretizedSequence, k: usize, radius: f64) -> Result<PointSample> {
    let chain = image_chain(seq, k, radius)?;
    let last = chain.last().expect("k >= 1");
    let coords: Vec<f64> = last.iter().map(|&c| c as f64).collect();
    let reach = image_reach(seq, k, radius).max(1.0);
    PointSample::new(seq.dim(), coords, reach, format!("image of B_{radius} after {k} rounded maps"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct InjectivityTrace {
    pub radii: Vec<f64>,
    /// `#(B_R ∩ Z^n)` per radius.
    pub input_counts: Vec<usize>,
    /// `tau[r][j]`: `#image_{j+1} / #input` at radius `radii[r]`.
    pub tau: Vec<Vec<f64>>,
    /// `|det(A_1⋯A_j)|·#(image_j ∩ B(0, ρ_j)) / Vol(B(0, ρ_j))` with `ρ_j`
    /// the radius of a ball surely covered by the image of `B_R`; `None` when
    /// that ball is empty.
    pub density_tau: Vec<Vec<Option<f64>>>,
    pub note: String,
}

impl InjectivityTrace {
    /// Count-based values at step `j` (1-based) across the radii.
    pub fn at_step(&self, j: usize) -> Vec<f64> {
        self.tau.iter().map(|row| row[j - 1]).collect()
    }
}

/// `τ̂^j(R) = #image_j / #(B_R ∩ Z^n)` for `j = 1..=k` at each radius, with a
/// density-based estimate alongside.
pub fn rate_of_injectivity(seq: &DiscretizedSequence, k: usize, radii: &[f64]) -> Result<InjectivityTrace> {
    seq.check_k(k)?;
    if radii.is_empty() {
        return Err(Error::Empty("radius list"));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("radii must be positive and increasing"));
    }
    let n = seq.dim();
    let half_diag = (n as f64).sqrt() / 2.0;
    let mut input_counts = Vec::new();
    let mut tau = Vec::new();
    let mut density_tau = Vec::new();
    for &r in radii {
        let input = grid_ball(n, r)?.len() / n;
        let chain = image_chain(seq, k, r)?;
        let mut det = 1.0;
        let mut inner = r;
        let mut row = Vec::with_capacity(k);
        let mut drow = Vec::with_capacity(k);
        for (j, image) in chain.iter().enumerate() {
            let m = &seq.maps[j];
            det *= m.det();
            inner = linalg::singular_range(m.matrix()).1 * inner - half_diag;
            row.push((image.len() / n) as f64 / input as f64);
            drow.push(if inner > 0.0 {
                let r2 = inner * inner;
                let hits = image
                    .chunks_exact(n)
                    .filter(|p| p.iter().map(|&c| (c * c) as f64).sum::<f64>() <= r2)
                    .count();
                Some(det.abs() * hits as f64 / ball_volume(n, inner))
            } else {
                None
            });
        }
        input_counts.push(input);
        tau.push(row);
        density_tau.push(drow);
    }
    Ok(InjectivityTrace {
        radii: radii.to_vec(),
        input_counts,
        tau,
        density_tau,
        note: "finite-radius estimates; compare radii for stability, no extrapolation".to_string(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedDifference {
    pub u0: Vec<i64>,
    pub rho0: f64,
    /// `max(3, √(8/(πD)))`.
    pub r: f64,
    /// `Σ_{u ∈ B(0,r) \ {0}} ρ(u)`.
    pub mass: f64,
    /// `1/(π(r+1)²)`.
    pub floor: f64,
    pub sampling_uncertainty: f64,
}

/// The most frequent nonzero difference within `r = max(3, √(8/(πD)))`, the
/// shortest one among ties, checked against `Σ_{0<‖u‖≤r} ρ(u) ≥ 1` and `ρ(u0) ≥ 1/(π(r+1)²)`, both
/// up to the table's sampling uncertainty.
pub fn seed_difference(table: &FrequencyTable, density: f64) -> Result<SeedDifference> {
    if !(density.is_finite() && density > 0.0) {
        return Err(Error::invalid(format!("density must be positive, got {density}")));
    }
    if !table.source_integral {
        return Err(Error::invalid("seeded differences need a point set with integer coordinates"));
    }
    let r = (8.0 / (PI * density)).sqrt().max(3.0);
    if table.cutoff < r {
        return Err(Error::BodyExceedsCutoff {
            radius: r,
            cutoff: table.cutoff,
        });
    }
    let r2 = r * r;
    let mut best: Option<(&[f64], f64)> = None;
    let mut mass = 0.0;
    for e in &table.entries {
        let norm2 = linalg::dot(&e.v, &e.v);
        if norm2 == 0.0 || norm2 > r2 {
            continue;
        }
        mass += e.rho;
        if best.is_none_or(|(v, b)| e.rho > b || (e.rho == b && norm2 < linalg::dot(v, v))) {
            best = Some((&e.v, e.rho));
        }
    }
    let (u0, rho0) = best.ok_or(Error::Empty("nonzero differences within r"))?;
    let uncertainty = table.sampling_uncertainty();
    let floor = 1.0 / (PI * (r + 1.0) * (r + 1.0));
    if mass < 1.0 - uncertainty {
        return Err(Error::InequalityViolation(format!(
            "frequency mass {mass} in B(0,{r}) minus the origin is below 1"
        )));
    }
    if rho0 < floor - uncertainty {
        return Err(Error::InequalityViolation(format!(
            "largest frequency {rho0} is below 1/(pi (r+1)^2) = {floor}"
        )));
    }
    Ok(SeedDifference {
        u0: u0.iter().map(|&c| c as i64).collect(),
        rho0,
        r,
        mass,
        floor,
        sampling_uncertainty: uncertainty,
    })
}
