//! Range queries over lexicographically sorted point arrays.

use std::collections::HashMap;

/// Ball queries over a flat, lexicographically sorted coordinate array.
///
/// One-dimensional data is searched by bisection. In higher dimension points
/// are bucketed in a hashed grid; hash collisions only merge buckets, and
/// queries whose cell box would outnumber the points fall back to a strip
/// scan on the (sorted) first coordinate.
pub(crate) struct SpatialIndex<'a> {
    coords: &'a [f64],
    dim: usize,
    cell: f64,
    grid: HashMap<u64, Vec<u32>>,
}

fn cell_hash(cell: &[i64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &c in cell {
        h ^= c as u64;
        h = h.wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(29);
    }
    h
}

impl<'a> SpatialIndex<'a> {
    pub fn new(coords: &'a [f64], dim: usize, cell: f64) -> Self {
        assert!(dim > 0 && coords.len().is_multiple_of(dim));
        assert!(cell > 0.0 && cell.is_finite());
        let mut grid: HashMap<u64, Vec<u32>> = HashMap::new();
        if dim > 1 {
            let mut key = vec![0i64; dim];
            for (i, p) in coords.chunks_exact(dim).enumerate() {
                for (k, x) in key.iter_mut().zip(p) {
                    *k = (x / cell).floor() as i64;
                }
                grid.entry(cell_hash(&key)).or_default().push(i as u32);
            }
        }
        SpatialIndex {
            coords,
            dim,
            cell,
            grid,
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn first_coord_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let n = self.len();
        let d = self.dim;
        let start = partition(n, |i| self.coords[i * d] < lo);
        let end = partition(n, |i| self.coords[i * d] <= hi);
        start..end.max(start)
    }

    /// Calls `f(i)` for every point with `‖p_i − center‖ ≤ radius`.
    pub fn for_each_within(&self, center: &[f64], radius: f64, mut f: impl FnMut(usize)) {
        let d = self.dim;
        if d == 1 {
            for i in self.first_coord_range(center[0] - radius, center[0] + radius) {
                if (self.coords[i] - center[0]).abs() <= radius {
                    f(i);
                }
            }
            return;
        }
        let r2 = radius * radius;
        let lo: Vec<i64> = center
            .iter()
            .map(|c| ((c - radius) / self.cell).floor() as i64)
            .collect();
        let hi: Vec<i64> = center
            .iter()
            .map(|c| ((c + radius) / self.cell).floor() as i64)
            .collect();
        let cells = lo
            .iter()
            .zip(&hi)
            .try_fold(1u64, |acc, (a, b)| acc.checked_mul((b - a + 1) as u64));
        match cells {
            Some(c) if c <= self.len() as u64 / 4 + 16 => {
                let mut keys = Vec::with_capacity(c as usize);
                let mut cur = lo.clone();
                loop {
                    keys.push(cell_hash(&cur));
                    let mut k = 0;
                    while k < d {
                        if cur[k] < hi[k] {
                            cur[k] += 1;
                            break;
                        }
                        cur[k] = lo[k];
                        k += 1;
                    }
                    if k == d {
                        break;
                    }
                }
                keys.sort_unstable();
                keys.dedup();
                for key in keys {
                    if let Some(bucket) = self.grid.get(&key) {
                        for &i in bucket {
                            let i = i as usize;
                            if crate::linalg::dist_sq(self.point(i), center) <= r2 {
                                f(i);
                            }
                        }
                    }
                }
            }
            _ => {
                for i in self.first_coord_range(center[0] - radius, center[0] + radius) {
                    if crate::linalg::dist_sq(self.point(i), center) <= r2 {
                        f(i);
                    }
                }
            }
        }
    }

    pub fn count_within(&self, center: &[f64], radius: f64) -> usize {
        let mut n = 0;
        self.for_each_within(center, radius, |_| n += 1);
        n
    }

    /// Index of a point within `tol` of `x`, preferring the closest.
    pub fn find(&self, x: &[f64], tol: f64) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        self.for_each_within(x, tol, |i| {
            let d = crate::linalg::dist_sq(self.point(i), x);
            if best.is_none_or(|(bd, bi)| d < bd || (d == bd && i < bi)) {
                best = Some((d, i));
            }
        });
        best.map(|(_, i)| i)
    }
}

fn partition(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Single-linkage clusters of points closer than `tol`. The input must be
/// sorted lexicographically; cluster ids are numbered by first member, so the
/// first member of each cluster is its lexicographically smallest point.
pub(crate) fn cluster(coords: &[f64], dim: usize, tol: f64) -> (Vec<usize>, usize) {
    let n = coords.len() / dim;
    let index = SpatialIndex::new(coords, dim, (tol * 4.0).max(1e-300));
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        let mut near = Vec::new();
        index.for_each_within(index.point(i), tol, |j| near.push(j));
        for j in near {
            let (a, b) = (root(&mut parent, i), root(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut ids = vec![usize::MAX; n];
    let mut label_of_root = HashMap::new();
    let mut next = 0;
    for (i, id) in ids.iter_mut().enumerate() {
        let r = root(&mut parent, i);
        *id = *label_of_root.entry(r).or_insert_with(|| {
            next += 1;
            next - 1
        });
    }
    (ids, next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn queries_match_linear_scan() {
        let mut pts = Vec::new();
        for i in -20..=20 {
            for j in -20..=20 {
                pts.push([i as f64 * 0.7, j as f64 * 1.1 + 0.05 * i as f64]);
            }
        }
        pts.sort_by(|a, b| crate::linalg::lex_cmp(a, b));
        let flat: Vec<f64> = pts.iter().flatten().copied().collect();
        for cell in [0.5, 2.0, 50.0] {
            let idx = SpatialIndex::new(&flat, 2, cell);
            for (c, r) in [([0.0, 0.0], 3.0), ([5.3, -2.2], 7.5), ([0.0, 0.0], 100.0)] {
                let brute = pts
                    .iter()
                    .filter(|p| crate::linalg::dist_sq(&p[..], &c) <= r * r)
                    .count();
                assert_eq!(idx.count_within(&c, r), brute);
            }
        }
    }

    #[test]
    fn one_dimensional_bisection() {
        let xs: Vec<f64> = (-10..=10).map(|i| i as f64).collect();
        let idx = SpatialIndex::new(&xs, 1, 1.0);
        assert_eq!(idx.count_within(&[0.0], 2.0), 5);
        assert_eq!(idx.count_within(&[0.5], 0.4), 0);
        assert_eq!(idx.find(&[3.0 + 1e-12], 1e-9), Some(13));
    }

    #[test]
    fn clusters_by_tolerance() {
        let xs = [0.0, 0.0, 1e-12, 1.0, 1.0 + 5e-10, 2.0, 3.0];
        let (ids, n) = cluster(&xs, 1, 1e-9);
        assert_eq!(n, 4);
        assert_eq!(ids, vec![0, 0, 0, 1, 1, 2, 3]);
    }
}
