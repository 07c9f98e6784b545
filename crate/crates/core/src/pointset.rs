//! Finite samples of Delone sets and the statistics measured on them.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::convex::{ball_volume, unit_ball_volume_unchecked};
use crate::enumerate;
use crate::error::{Error, Result};
use crate::index::{self, SpatialIndex};
use crate::linalg;

/// Differences closer than this are treated as the same vector.
pub const MERGE_TOL: f64 = 1e-9;

/// A difference set whose minimum gap exceeds this is reported uniformly discrete.
pub const MEYER_GAP: f64 = 1e-6;

/// Upper limit on the number of covering-radius probes.
pub const MAX_PROBES: f64 = 4e6;

/// Construction metadata for periodic sets: `Γ = offsets + basis · Z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Periodic {
    /// Period lattice generators as columns.
    pub basis: DMatrix<f64>,
    /// One representative per coset of the period lattice.
    pub offsets: Vec<Vec<f64>>,
}

/// A finite truncation `Γ ∩ B(0, R_s)` of a point set.
///
/// Points are stored sorted lexicographically; duplicates are rejected.
#[derive(Clone, Debug)]
pub struct PointSample {
    dim: usize,
    coords: Vec<f64>,
    region_radius: f64,
    label: String,
    structure: Option<Periodic>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeloneParams {
    pub r_packing: f64,
    pub r_covering: f64,
    pub probe_spacing: f64,
    pub probe_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    pub value: f64,
    pub radius_used: f64,
    /// Largest centre norm used; `radius_used + erosion_margin <= R_s`.
    pub erosion_margin: f64,
    pub center_count: usize,
    pub sup_over_centers: bool,
    pub grid_spacing: Option<f64>,
    /// `(radius, value)` pairs, increasing in radius.
    pub trace: Vec<(f64, f64)>,
}

impl DensityEstimate {
    /// Oscillation of the trace over its last two radii (0 for a short trace).
    pub fn oscillation(&self) -> f64 {
        match self.trace.as_slice() {
            [.., (_, a), (_, b)] => (b - a).abs(),
            _ => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeyerReport {
    pub is_uniformly_discrete: bool,
    pub min_gap: f64,
    pub difference_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatchDefect {
    pub v_best: Vec<f64>,
    /// `#(X Δ (Y − v)) / Vol(B_R)`; lies in `[0, 2·D]`. An upper bound on the
    /// minimum over all translations, since only candidates are tried.
    pub defect: f64,
    pub matches: usize,
    pub patch_sizes: (usize, usize),
    pub candidates: usize,
    pub near: f64,
}

/// Difference vectors grouped into classes within [`MERGE_TOL`].
#[derive(Clone, Debug)]
pub(crate) struct DifferenceClasses {
    /// Class representatives, sorted lexicographically; `rep(−C) = −rep(C)`.
    pub reps: Vec<Vec<f64>>,
    /// Raw pair counts per class.
    pub counts: Vec<u64>,
    /// Index of the class of the negated vectors.
    pub negation: Vec<usize>,
}

impl PointSample {
    pub fn new(dim: usize, coords: Vec<f64>, region_radius: f64, label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if !(region_radius.is_finite() && region_radius > 0.0) {
            return Err(Error::invalid(format!("region radius must be positive, got {region_radius}")));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        let slack = region_radius * (1.0 + 1e-12);
        for p in coords.chunks_exact(dim) {
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("non-finite point {p:?}")));
            }
            if linalg::norm(p) > slack {
                return Err(Error::PointOutsideRegion {
                    point: p.to_vec(),
                    region: region_radius,
                });
            }
        }
        let n = coords.len() / dim;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            linalg::lex_cmp(&coords[a * dim..(a + 1) * dim], &coords[b * dim..(b + 1) * dim])
        });
        let mut sorted = Vec::with_capacity(coords.len());
        for &i in &order {
            // normalise -0.0 so equal points compare equal bitwise
            sorted.extend(coords[i * dim..(i + 1) * dim].iter().map(|x| x + 0.0));
        }
        for i in 1..n {
            let a = &sorted[(i - 1) * dim..i * dim];
            let b = &sorted[i * dim..(i + 1) * dim];
            if a == b {
                return Err(Error::DuplicatePoint(b.to_vec()));
            }
        }
        Ok(PointSample {
            dim,
            coords: sorted,
            region_radius,
            label: label.into(),
            structure: None,
        })
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>], region_radius: f64, label: impl Into<String>) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords, region_radius, label)
    }

    /// Attaches periodic construction metadata. The caller vouches that the
    /// sample is exactly `offsets + basis·Z^n` truncated to the region.
    pub fn with_structure(mut self, structure: Periodic) -> Result<Self> {
        let n = self.dim;
        if structure.basis.nrows() != n || structure.basis.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: structure.basis.nrows(),
            });
        }
        linalg::checked_inverse(&structure.basis)?;
        if structure.offsets.is_empty() {
            return Err(Error::Empty("offset list"));
        }
        if let Some(o) = structure.offsets.iter().find(|o| o.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: o.len(),
            });
        }
        self.structure = Some(structure);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn region_radius(&self) -> f64 {
        self.region_radius
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn structure(&self) -> Option<&Periodic> {
        self.structure.as_ref()
    }

    /// True when every coordinate is an integer.
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|x| x.fract() == 0.0)
    }

    /// `(Vol(B_{R_s}) / N)^{1/n}`, a rough inter-point distance.
    pub fn mean_spacing(&self) -> f64 {
        let n = self.len().max(1) as f64;
        (ball_volume(self.dim, self.region_radius) / n).powf(1.0 / self.dim as f64)
    }

    pub(crate) fn index(&self, cell: f64) -> SpatialIndex<'_> {
        SpatialIndex::new(&self.coords, self.dim, cell)
    }

    /// Whether a point within [`MERGE_TOL`] of `x` is stored.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.index(self.mean_spacing().max(1e-6)).find(x, MERGE_TOL).is_some())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_ball_inside(&self, center: &[f64], radius: f64) -> Result<()> {
        self.check_dim(center)?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!("radius must be positive, got {radius}")));
        }
        if linalg::norm(center) + radius > self.region_radius * (1.0 + 1e-12) {
            return Err(Error::BallEscapesRegion {
                center: center.to_vec(),
                radius,
                region: self.region_radius,
            });
        }
        Ok(())
    }

    /// Half the minimum pairwise distance and the covering radius measured on
    /// a probe grid over `B(0, R_s/2)`. If the grid would hold more than
    /// [`MAX_PROBES`] points its spacing is coarsened; the spacing actually
    /// used is reported.
    pub fn delone_parameters(&self, probe_spacing: f64) -> Result<DeloneParams> {
        if self.len() < 2 {
            return Err(Error::invalid("Delone parameters need at least two points"));
        }
        if !(probe_spacing.is_finite() && probe_spacing > 0.0) {
            return Err(Error::invalid(format!("probe spacing must be positive, got {probe_spacing}")));
        }
        let min_dist = min_pairwise_distance(&self.coords, self.dim, self.mean_spacing());
        let n = self.dim;
        let half = self.region_radius / 2.0;
        let mut spacing = probe_spacing;
        let expected = unit_ball_volume_unchecked(n) * (half / spacing).powi(n as i32);
        if expected > MAX_PROBES {
            spacing *= (expected / MAX_PROBES).powf(1.0 / n as f64);
        }
        let grid = DMatrix::from_diagonal_element(n, n, spacing);
        let mut probes = Vec::new();
        enumerate::ellipsoid_points(&grid, &vec![0.0; n], half, |z| {
            let g: Vec<f64> = z.iter().map(|&k| k as f64 * spacing).collect();
            if linalg::norm(&g) <= half {
                probes.extend(g);
            }
        })?;
        let cell = 2.0 * self.mean_spacing();
        let idx = self.index(cell);
        let mut covering: f64 = 0.0;
        for g in probes.chunks_exact(n) {
            let mut t = cell;
            let nearest = loop {
                let mut best = f64::INFINITY;
                idx.for_each_within(g, t, |i| best = best.min(linalg::dist_sq(idx.point(i), g)));
                if best.is_finite() {
                    break best.sqrt();
                }
                t *= 2.0;
            };
            covering = covering.max(nearest);
        }
        Ok(DeloneParams {
            r_packing: min_dist / 2.0,
            r_covering: covering,
            probe_spacing: spacing,
            probe_count: probes.len() / n,
        })
    }

    /// `#(B(c,R) ∩ Γ)`, closed ball.
    pub fn count_in_ball(&self, center: &[f64], radius: f64) -> Result<usize> {
        self.check_dim(center)?;
        Ok(self.index(radius.max(self.mean_spacing())).count_within(center, radius))
    }

    /// Uniform `R`-density: the largest `#(B(c,R)∩Γ)/Vol(B_R)` over the centres
    /// (or the value at the single centre given).
    pub fn density_at(&self, radius: f64, centers: &[Vec<f64>]) -> Result<DensityEstimate> {
        if centers.is_empty() {
            return Err(Error::Empty("centre list"));
        }
        for c in centers {
            self.check_ball_inside(c, radius)?;
        }
        let idx = self.index(radius.max(self.mean_spacing()));
        let vol = ball_volume(self.dim, radius);
        let value = centers
            .iter()
            .map(|c| idx.count_within(c, radius) as f64 / vol)
            .fold(0.0, f64::max);
        Ok(DensityEstimate {
            value,
            radius_used: radius,
            erosion_margin: centers.iter().map(|c| linalg::norm(c)).fold(0.0, f64::max),
            center_count: centers.len(),
            sup_over_centers: centers.len() > 1,
            grid_spacing: None,
            trace: vec![(radius, value)],
        })
    }

    /// Upper-density estimate: for each radius the sup over a centre grid of
    /// the given spacing (all centres whose balls fit at the largest radius);
    /// the value is the one at the largest radius.
    pub fn upper_density(&self, radii: &[f64], center_grid_spacing: f64) -> Result<DensityEstimate> {
        if radii.is_empty() {
            return Err(Error::Empty("radius list"));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("radii must be positive and increasing"));
        }
        if !(center_grid_spacing.is_finite() && center_grid_spacing > 0.0) {
            return Err(Error::invalid("centre grid spacing must be positive"));
        }
        let r_max = *radii.last().unwrap();
        if r_max + center_grid_spacing > self.region_radius {
            return Err(Error::BallEscapesRegion {
                center: vec![0.0; self.dim],
                radius: r_max + center_grid_spacing,
                region: self.region_radius,
            });
        }
        let n = self.dim;
        let reach = self.region_radius - r_max;
        let grid = DMatrix::from_diagonal_element(n, n, center_grid_spacing);
        let mut centers: Vec<Vec<f64>> = Vec::new();
        enumerate::ellipsoid_points(&grid, &vec![0.0; n], reach, |z| {
            let c: Vec<f64> = z.iter().map(|&k| k as f64 * center_grid_spacing).collect();
            if linalg::norm(&c) <= reach {
                centers.push(c);
            }
        })?;
        centers.sort_by(|a, b| linalg::lex_cmp(a, b));
        let idx = self.index(r_max.max(self.mean_spacing()));
        let mut trace = Vec::with_capacity(radii.len());
        for &r in radii {
            let vol = ball_volume(n, r);
            let v = centers
                .iter()
                .map(|c| idx.count_within(c, r) as f64 / vol)
                .fold(0.0, f64::max);
            trace.push((r, v));
        }
        Ok(DensityEstimate {
            value: trace.last().unwrap().1,
            radius_used: r_max,
            erosion_margin: centers.iter().map(|c| linalg::norm(c)).fold(0.0, f64::max),
            center_count: centers.len(),
            sup_over_centers: true,
            grid_spacing: Some(center_grid_spacing),
            trace,
        })
    }

    /// Groups the differences `q − p` (`p` accepted by `source`, `‖q−p‖ ≤ cutoff`).
    pub(crate) fn difference_classes(&self, cutoff: f64, source: impl Fn(&[f64]) -> bool) -> DifferenceClasses {
        let d = self.dim;
        let idx = self.index(cutoff.max(self.mean_spacing()).max(1e-9));
        let mut raw: HashMap<Box<[u64]>, u64> = HashMap::new();
        let mut key = vec![0u64; d];
        for i in 0..self.len() {
            let p = self.point(i);
            if !source(p) {
                continue;
            }
            idx.for_each_within(p, cutoff, |j| {
                let q = idx.point(j);
                for k in 0..d {
                    key[k] = (q[k] - p[k] + 0.0).to_bits();
                }
                match raw.get_mut(&key[..]) {
                    Some(c) => *c += 1,
                    None => {
                        raw.insert(key.clone().into_boxed_slice(), 1);
                    }
                }
            });
        }
        // make the raw set closed under negation before clustering
        let negs: Vec<Box<[u64]>> = raw
            .keys()
            .map(|k| k.iter().map(|&b| (-f64::from_bits(b) + 0.0).to_bits()).collect())
            .collect();
        for k in negs {
            raw.entry(k).or_insert(0);
        }
        let mut vecs: Vec<(Vec<f64>, u64)> = raw
            .into_iter()
            .map(|(k, c)| (k.iter().map(|&b| f64::from_bits(b)).collect(), c))
            .collect();
        vecs.sort_by(|a, b| linalg::lex_cmp(&a.0, &b.0));
        let flat: Vec<f64> = vecs.iter().flat_map(|(v, _)| v.iter().copied()).collect();
        let (ids, n_classes) = index::cluster(&flat, d, MERGE_TOL);
        let mut first: Vec<Option<usize>> = vec![None; n_classes];
        let mut counts = vec![0u64; n_classes];
        let mut has_zero = vec![false; n_classes];
        for (i, &c) in ids.iter().enumerate() {
            first[c].get_or_insert(i);
            counts[c] += vecs[i].1;
            if vecs[i].0.iter().all(|&x| x == 0.0) {
                has_zero[c] = true;
            }
        }
        let member_index = SpatialIndex::new(&flat, d, 4.0 * MERGE_TOL);
        let mut negation = vec![usize::MAX; n_classes];
        let mut reps: Vec<Vec<f64>> = vec![Vec::new(); n_classes];
        for c in 0..n_classes {
            if negation[c] != usize::MAX {
                continue;
            }
            let m = &vecs[first[c].unwrap()].0;
            let neg: Vec<f64> = m.iter().map(|x| -x + 0.0).collect();
            let j = member_index
                .find(&neg, 0.0)
                .expect("raw set is closed under negation");
            let nc = ids[j];
            negation[c] = nc;
            negation[nc] = c;
            if nc == c {
                reps[c] = if has_zero[c] { vec![0.0; d] } else { m.clone() };
                continue;
            }
            let mn = &vecs[first[nc].unwrap()].0;
            let (pos, other) = if linalg::lex_cmp(m, mn) == std::cmp::Ordering::Greater {
                (c, nc)
            } else {
                (nc, c)
            };
            let rep = vecs[first[pos].unwrap()].0.clone();
            reps[other] = rep.iter().map(|x| -x + 0.0).collect();
            reps[pos] = rep;
        }
        let mut order: Vec<usize> = (0..n_classes).collect();
        order.sort_by(|&a, &b| linalg::lex_cmp(&reps[a], &reps[b]));
        let mut position = vec![0; n_classes];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        DifferenceClasses {
            reps: order.iter().map(|&c| reps[c].clone()).collect(),
            counts: order.iter().map(|&c| counts[c]).collect(),
            negation: order.iter().map(|&c| position[negation[c]]).collect(),
        }
    }

    /// `ΔΓ ∩ B(0, cutoff)`, deduplicated within [`MERGE_TOL`] and symmetric.
    pub fn difference_set(&self, cutoff: f64) -> Result<PointSample> {
        if !(cutoff.is_finite() && cutoff >= 0.0) {
            return Err(Error::invalid(format!("cutoff must be nonnegative, got {cutoff}")));
        }
        if cutoff > 2.0 * self.region_radius {
            return Err(Error::invalid(format!(
                "cutoff {cutoff} exceeds twice the region radius {}",
                self.region_radius
            )));
        }
        let classes = self.difference_classes(cutoff, |_| true);
        let coords: Vec<f64> = classes.reps.into_iter().flatten().collect();
        PointSample::new(self.dim, coords, cutoff.max(MERGE_TOL) * (1.0 + 1e-9), format!("difference set of {}", self.label))
    }

    pub fn meyer_check(&self, cutoff: f64) -> Result<MeyerReport> {
        let diff = self.difference_set(cutoff)?;
        let min_gap = if diff.len() < 2 {
            f64::INFINITY
        } else {
            min_pairwise_distance(diff.coords(), diff.dim, diff.mean_spacing())
        };
        Ok(MeyerReport {
            is_uniformly_discrete: min_gap > MEYER_GAP,
            min_gap,
            difference_count: diff.len(),
        })
    }

    /// Patch defect with candidates drawn from points within `R/10` of `x` and `y`.
    pub fn patch_defect(&self, x: &[f64], y: &[f64], radius: f64) -> Result<PatchDefect> {
        self.patch_defect_with(x, y, radius, radius / 10.0)
    }

    /// Minimises `#((B(x,R)∩Γ) Δ ((B(y,R)∩Γ) − v)) / Vol(B_R)` over the
    /// candidates `v = q − p`, `p ∈ Γ∩B(x,near)`, `q ∈ Γ∩B(y,near)`; with no
    /// candidate available, `v = y − x` is used. Ties go to the candidate
    /// closest to `y − x`, then to the lexicographically smallest.
    pub fn patch_defect_with(&self, x: &[f64], y: &[f64], radius: f64, near: f64) -> Result<PatchDefect> {
        self.check_ball_inside(x, radius)?;
        self.check_ball_inside(y, radius)?;
        if !(near.is_finite() && near >= 0.0) {
            return Err(Error::invalid(format!("candidate radius must be nonnegative, got {near}")));
        }
        let idx = self.index(self.mean_spacing().max(near).max(1e-9));
        let collect = |c: &[f64], r: f64| {
            let mut v = Vec::new();
            idx.for_each_within(c, r, |i| v.push(i));
            v
        };
        let patch_x = collect(x, radius);
        let patch_y = collect(y, radius);
        let shift: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        let mut candidates: Vec<Vec<f64>> = Vec::new();
        for &i in &collect(x, near) {
            for &j in &collect(y, near) {
                let p = idx.point(i);
                let q = idx.point(j);
                candidates.push(q.iter().zip(p).map(|(a, b)| a - b + 0.0).collect());
            }
        }
        if candidates.is_empty() {
            candidates.push(shift.clone());
        }
        candidates.sort_by(|a, b| linalg::lex_cmp(a, b));
        candidates.dedup();
        let x_coords: Vec<f64> = patch_x.iter().flat_map(|&i| idx.point(i).iter().copied()).collect();
        let x_index = SpatialIndex::new(&x_coords, self.dim, self.mean_spacing().max(1e-6));
        let vol = ball_volume(self.dim, radius);
        let mut best: Option<(f64, f64, Vec<f64>, usize)> = None;
        for v in &candidates {
            let mut matches = 0;
            let mut target = vec![0.0; self.dim];
            for &j in &patch_y {
                for (k, t) in target.iter_mut().enumerate() {
                    *t = idx.point(j)[k] - v[k];
                }
                if x_index.find(&target, MERGE_TOL).is_some() {
                    matches += 1;
                }
            }
            let defect = (patch_x.len() + patch_y.len() - 2 * matches) as f64 / vol;
            let dist = linalg::dist_sq(v, &shift);
            let better = match &best {
                None => true,
                Some((bd, bdist, bv, _)) => {
                    defect < *bd
                        || (defect == *bd && dist < *bdist)
                        || (defect == *bd && dist == *bdist && linalg::lex_cmp(v, bv).is_lt())
                }
            };
            if better {
                best = Some((defect, dist, v.clone(), matches));
            }
        }
        let (defect, _, v_best, matches) = best.expect("at least one candidate");
        Ok(PatchDefect {
            v_best,
            defect,
            matches,
            patch_sizes: (patch_x.len(), patch_y.len()),
            candidates: candidates.len(),
            near,
        })
    }
}

/// Exact minimum distance between distinct points of a sorted flat array.
pub(crate) fn min_pairwise_distance(coords: &[f64], dim: usize, guess: f64) -> f64 {
    let n = coords.len() / dim;
    if n < 2 {
        return f64::INFINITY;
    }
    if dim == 1 {
        return coords.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    }
    let mut r = guess.max(1e-12);
    loop {
        let idx = SpatialIndex::new(coords, dim, r);
        let mut best = f64::INFINITY;
        for i in 0..n {
            let p = idx.point(i);
            idx.for_each_within(p, r, |j| {
                if j != i {
                    best = best.min(linalg::dist_sq(idx.point(j), p));
                }
            });
        }
        if best.is_finite() {
            return best.sqrt();
        }
        r *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(k: i64, r: f64) -> PointSample {
        let mut pts = Vec::new();
        let m = r.ceil() as i64;
        for i in -m..=m {
            for j in -m..=m {
                let p = vec![(k * i) as f64, j as f64];
                if linalg::norm(&p) <= r {
                    pts.push(p);
                }
            }
        }
        PointSample::from_points(2, &pts, r, "grid").unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(PointSample::new(2, vec![0.0, 0.0, 0.0, 0.0], 1.0, "dup").is_err());
        assert!(PointSample::new(2, vec![0.0, 0.0, -0.0, 0.0], 1.0, "dup").is_err());
        assert!(PointSample::new(2, vec![3.0, 0.0], 1.0, "far").is_err());
        assert!(PointSample::new(2, vec![1.0], 1.0, "ragged").is_err());
        let s = PointSample::new(1, vec![0.5, -0.5, 0.0], 1.0, "s").unwrap();
        assert_eq!(s.coords(), &[-0.5, 0.0, 0.5]);
    }

    #[test]
    fn gauss_density() {
        let z2 = grid(1, 20.0);
        let d = z2.density_at(10.0, &[vec![0.0, 0.0]]).unwrap();
        assert!((d.value - 317.0 / (100.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert!(!d.sup_over_centers);
        assert!(z2.density_at(10.0, &[vec![11.0, 0.0]]).is_err());
    }

    #[test]
    fn delone_of_integer_grid() {
        let z2 = grid(1, 20.0);
        let p = z2.delone_parameters(0.05).unwrap();
        assert_eq!(p.r_packing, 0.5);
        assert!((p.r_covering - 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn difference_set_of_grid() {
        let z2 = grid(1, 20.0);
        let diff = z2.difference_set(5.0).unwrap();
        assert_eq!(diff.len(), 81);
        assert!(diff.contains(&[0.0, 0.0]).unwrap());
        let single = PointSample::new(2, vec![0.0, 0.0], 1.0, "o").unwrap();
        assert_eq!(single.difference_set(1.0).unwrap().coords(), &[0.0, 0.0]);
    }

    #[test]
    fn near_differences_merge_symmetrically() {
        let s = PointSample::new(1, vec![0.0, 1.0, 2.0 + 2e-10, 3.0 - 1e-10], 4.0, "s").unwrap();
        let classes = s.difference_classes(10.0, |_| true);
        let reps: Vec<f64> = classes.reps.iter().map(|v| v[0]).collect();
        assert_eq!(reps.len(), 7);
        for (i, r) in reps.iter().enumerate() {
            assert_eq!(reps[classes.negation[i]], -r + 0.0);
        }
        assert_eq!(classes.counts.iter().sum::<u64>(), 16);
    }

    #[test]
    fn lattice_patches_align() {
        let z2 = grid(3, 60.0);
        let pd = z2.patch_defect(&[1.0, 2.0], &[-8.0, 5.0], 20.0).unwrap();
        assert_eq!(pd.v_best, vec![-9.0, 3.0]);
        assert_eq!(pd.defect, 0.0);
        let same = z2.patch_defect(&[1.0, 2.0], &[1.0, 2.0], 20.0).unwrap();
        assert_eq!(same.defect, 0.0);
        assert_eq!(same.v_best, vec![0.0, 0.0]);
    }
}
