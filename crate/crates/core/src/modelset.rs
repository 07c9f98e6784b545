//! Lattices, periodic sets and cut-and-project model sets.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex::ConvexBody;
use crate::enumerate;
use crate::error::{Error, Result};
use crate::index::SpatialIndex;
use crate::linalg;
use crate::pointset::{Periodic, PointSample, MERGE_TOL};

/// Which faces of a box window belong to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoxClosure {
    /// `[lo, hi)` in every coordinate.
    HalfOpen,
    /// `(lo, hi)`.
    Open,
    /// `[lo, hi]`.
    Closed,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Window {
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
        closure: BoxClosure,
    },
    /// A closed convex body centred at the origin.
    Body(ConvexBody),
}

impl Window {
    pub fn half_open(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Self::boxed(lo, hi, BoxClosure::HalfOpen)
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>, closure: BoxClosure) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().chain(&hi).any(|x| !x.is_finite()) {
            return Err(Error::invalid("window bounds must be finite"));
        }
        if let Some(i) = (0..lo.len()).find(|&i| lo[i] >= hi[i]) {
            return Err(Error::invalid(format!(
                "window needs lo < hi, got [{}, {}) in coordinate {i}",
                lo[i], hi[i]
            )));
        }
        Ok(Window::Box { lo, hi, closure })
    }

    pub fn dim(&self) -> usize {
        match self {
            Window::Box { lo, .. } => lo.len(),
            Window::Body(b) => b.dim(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Window::Box { lo, hi, closure } => (0..lo.len()).all(|i| match closure {
                BoxClosure::HalfOpen => lo[i] <= x[i] && x[i] < hi[i],
                BoxClosure::Open => lo[i] < x[i] && x[i] < hi[i],
                BoxClosure::Closed => lo[i] <= x[i] && x[i] <= hi[i],
            }),
            Window::Body(b) => b.contains_point(x),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Window::Box { lo, hi, .. } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
            Window::Body(b) => b.volume(),
        }
    }

    /// Centre and per-coordinate half-widths of a bounding box.
    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Window::Box { lo, hi, .. } => (
                lo.iter().zip(hi).map(|(a, b)| (a + b) / 2.0).collect(),
                lo.iter().zip(hi).map(|(a, b)| (b - a) / 2.0).collect(),
            ),
            Window::Body(b) => (vec![0.0; b.dim()], b.half_widths()),
        }
    }
}

/// A lattice `Λ = basis·Z^{m+n}` in `R^m × R^n` together with a window in
/// the internal space `R^m`; `p_1` keeps the first `m` coordinates and `p_2`
/// the last `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CutAndProjectScheme {
    internal_dim: usize,
    physical_dim: usize,
    basis: DMatrix<f64>,
    window: Window,
}

impl CutAndProjectScheme {
    pub fn new(internal_dim: usize, physical_dim: usize, basis: DMatrix<f64>, window: Window) -> Result<Self> {
        let total = internal_dim + physical_dim;
        if physical_dim == 0 {
            return Err(Error::invalid("physical dimension must be positive"));
        }
        if basis.nrows() != total || basis.ncols() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: basis.nrows(),
            });
        }
        linalg::checked_inverse(&basis)?;
        if window.dim() != internal_dim {
            return Err(Error::DimensionMismatch {
                expected: internal_dim,
                got: window.dim(),
            });
        }
        Ok(CutAndProjectScheme {
            internal_dim,
            physical_dim,
            basis,
            window,
        })
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn physical_dim(&self) -> usize {
        self.physical_dim
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// `Vol(W) / Covol(Λ)`.
    pub fn expected_density(&self) -> f64 {
        self.window.volume() / self.basis.determinant().abs()
    }

    /// `{p_2(λ) : λ ∈ Λ, p_1(λ) ∈ W, ‖p_2(λ)‖ ≤ R}`, enumerated exactly.
    pub fn generate(&self, radius: f64) -> Result<PointSample> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!("radius must be positive, got {radius}")));
        }
        let (m, n) = (self.internal_dim, self.physical_dim);
        if m == 0 {
            return lattice_sample(&self.basis, radius);
        }
        let (center, half) = self.window.bounding_box();
        let scale: Vec<f64> = half.iter().map(|h| 1.0 / h).chain(std::iter::repeat_n(1.0 / radius, n)).collect();
        let scaled = DMatrix::from_fn(m + n, m + n, |i, j| self.basis[(i, j)] * scale[i]);
        let mut target = vec![0.0; m + n];
        for i in 0..m {
            target[i] = center[i] * scale[i];
        }
        let mut hits: Vec<(Vec<f64>, Vec<i64>)> = Vec::new();
        enumerate::ellipsoid_points(&scaled, &target, ((m + 1) as f64).sqrt(), |z| {
            let lambda = linalg::apply_int(&self.basis, z);
            let (internal, physical) = lambda.split_at(m);
            if self.window.contains(internal) && linalg::norm(physical) <= radius {
                hits.push((physical.to_vec(), z.to_vec()));
            }
        })?;
        hits.sort_by(|a, b| linalg::lex_cmp(&a.0, &b.0));
        let coords: Vec<f64> = hits.iter().flat_map(|(p, _)| p.iter().copied()).collect();
        let idx = SpatialIndex::new(&coords, n, (radius / 64.0).max(1e-6));
        for (i, (p, z)) in hits.iter().enumerate() {
            let mut clash = None;
            idx.for_each_within(p, MERGE_TOL, |j| {
                if j != i && clash.is_none() {
                    clash = Some(j);
                }
            });
            if let Some(j) = clash {
                return Err(Error::ProjectionCollision {
                    first: z.clone(),
                    second: hits[j].1.clone(),
                });
            }
        }
        PointSample::new(n, coords, radius, format!("model set (m={m}, n={n})"))
    }
}

/// `basis·Z^n ∩ B(0,R)` (basis vectors as columns), tagged as periodic.
pub fn lattice_sample(basis: &DMatrix<f64>, radius: f64) -> Result<PointSample> {
    periodic_sample(basis, &[vec![0.0; basis.nrows()]], radius)
}

/// `(offsets + basis·Z^n) ∩ B(0,R)`, tagged as periodic.
pub fn periodic_sample(basis: &DMatrix<f64>, offsets: &[Vec<f64>], radius: f64) -> Result<PointSample> {
    let n = basis.nrows();
    if basis.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: basis.ncols(),
        });
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    linalg::checked_inverse(basis)?;
    let mut coords = Vec::new();
    for o in offsets {
        if o.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: o.len(),
            });
        }
        let target: Vec<f64> = o.iter().map(|x| -x).collect();
        enumerate::ellipsoid_points(basis, &target, radius, |z| {
            let p: Vec<f64> = linalg::apply_int(basis, z).iter().zip(o).map(|(a, b)| a + b).collect();
            if linalg::norm(&p) <= radius {
                coords.extend(p);
            }
        })?;
    }
    let det = basis.determinant().abs();
    let label = if offsets.len() == 1 {
        format!("lattice (covolume {det})")
    } else {
        format!("periodic set ({} cosets, covolume {det})", offsets.len())
    };
    PointSample::new(n, coords, radius, label)?.with_structure(Periodic {
        basis: basis.clone(),
        offsets: offsets.to_vec(),
    })
}

/// `kZ × Z ∩ B(0,R)`.
pub fn stretched_grid(k: u32, radius: f64) -> Result<PointSample> {
    if k == 0 {
        return Err(Error::invalid("stretch factor must be positive"));
    }
    let basis = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![k as f64, 1.0]));
    lattice_sample(&basis, radius)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1/2), got {eps}")));
    }
    Ok(())
}

/// `E_α^ε ∩ [−Y, Y] = {y ∈ Z : dist(y·α_i, Z) < ε for all i}`, evaluated directly.
pub fn e_alpha_epsilon(alpha: &[f64], eps: f64, y_max: u64) -> Result<PointSample> {
    check_eps(eps)?;
    if alpha.is_empty() {
        return Err(Error::Empty("slope vector"));
    }
    if alpha.iter().any(|a| !a.is_finite()) {
        return Err(Error::invalid("slopes must be finite"));
    }
    if y_max == 0 || y_max > 1 << 40 {
        return Err(Error::invalid(format!("range Y must lie in [1, 2^40], got {y_max}")));
    }
    let y_max = y_max as i64;
    let mut coords = Vec::new();
    for y in -y_max..=y_max {
        let yf = y as f64;
        let inside = alpha.iter().all(|&a| {
            let t = a * yf;
            (t - t.round()).abs() < eps
        });
        if inside {
            coords.push(yf);
        }
    }
    let label = format!("E_alpha^eps (alpha={alpha:?}, eps={eps})");
    PointSample::new(1, coords, y_max as f64, label)
}

/// The scheme whose model set is `E_α^ε`: basis columns `−e_i` (`i ≤ n`) and
/// `(α_1, …, α_n, 1)`, window the open cube `(−ε, ε)^n`.
pub fn e_alpha_scheme(alpha: &[f64], eps: f64) -> Result<CutAndProjectScheme> {
    check_eps(eps)?;
    let n = alpha.len();
    if n == 0 {
        return Err(Error::Empty("slope vector"));
    }
    let basis = DMatrix::from_fn(n + 1, n + 1, |i, j| {
        if j == n {
            if i == n {
                1.0
            } else {
                alpha[i]
            }
        } else if i == j {
            -1.0
        } else {
            0.0
        }
    });
    let window = Window::boxed(vec![-eps; n], vec![eps; n], BoxClosure::Open)?;
    CutAndProjectScheme::new(n, 1, basis, window)
}

/// Lattice points each displaced by i.i.d. uniform noise in `[−amp, amp]^n`,
/// kept when inside `B(0,R)`.
pub fn jittered_lattice(basis: &DMatrix<f64>, amplitude: f64, radius: f64, seed: u64) -> Result<PointSample> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::invalid(format!("jitter amplitude must be nonnegative, got {amplitude}")));
    }
    let n = basis.nrows();
    let reach = radius + amplitude * (n as f64).sqrt();
    let base = lattice_sample(basis, reach)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(base.coords().len());
    for p in base.points() {
        let q: Vec<f64> = p.iter().map(|x| x + rng.random_range(-amplitude..=amplitude)).collect();
        if linalg::norm(&q) <= radius {
            coords.extend(q);
        }
    }
    PointSample::new(n, coords, radius, format!("lattice jittered by {amplitude} (seed {seed})"))
}

/// `{(x, y) : x ∈ Z, y ∈ E} ∩ B(0,R)` for a one-dimensional sample `E`.
pub fn product_with_integers(e: &PointSample, radius: f64) -> Result<PointSample> {
    if e.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: e.dim(),
        });
    }
    if radius > e.region_radius() {
        return Err(Error::BallEscapesRegion {
            center: vec![0.0],
            radius,
            region: e.region_radius(),
        });
    }
    let mut coords = Vec::new();
    for p in e.points() {
        let y = p[0];
        if y.abs() > radius {
            continue;
        }
        let reach = (radius * radius - y * y).sqrt().floor() as i64;
        for x in -reach..=reach {
            let q = [x as f64, y];
            if linalg::norm(&q) <= radius {
                coords.extend(q);
            }
        }
    }
    PointSample::new(2, coords, radius, format!("Z x ({})", e.label()))
}
