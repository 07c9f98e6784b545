//! The acceptance suite: one deterministic check per criterion, each with
//! its own oracle and runtime budget.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex::ConvexBody;
use crate::dirichlet::{self, ApproximationQuery};
use crate::discretize::{self, DiscretizedSequence, Raster, WHITE};
use crate::error::Result;
use crate::frequency::{frequency_table, mean_frequency};
use crate::linalg;
use crate::minkowski;
use crate::modelset;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    /// `[PASS] C3 name: detail`, without timings so that reruns print the
    /// same text.
    pub fn line(&self) -> String {
        format!(
            "[{}] C{} {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub budget: Duration,
    check: fn() -> Result<(bool, String)>,
}

pub const SQRT2_MINUS_1: f64 = std::f64::consts::SQRT_2 - 1.0;

pub fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

const EPSILONS: [f64; 3] = [0.05, 0.1, 0.2];
const Y_MAX: u64 = 100_000;

pub fn criteria() -> Vec<Criterion> {
    let c = |id, name, secs: u64, check| Criterion {
        id,
        name,
        budget: Duration::from_secs(secs),
        check,
    };
    vec![
        c(1, "equality example is exact", 1, c1_equality),
        c(2, "classical bound on random lattices", 30, c2_classical),
        c(3, "main inequality on quasicrystals", 60, c3_main_inequality),
        c(4, "density of E_alpha^eps", 5, c4_density),
        c(5, "mean of frequencies", 60, c5_mean),
        c(6, "weak almost periodicity diagnostic", 60, c6_wap),
        c(7, "rate of injectivity", 60, c7_injectivity),
        c(8, "decay of tau over random rotations", 300, c8_decay),
        c(9, "seeded difference", 60, c9_seed),
        c(10, "Dirichlet witness", 10, c10_dirichlet),
        c(11, "image degradation", 30, c11_degradation),
    ]
}

pub fn run(criterion: &Criterion) -> CriterionResult {
    let start = Instant::now();
    let outcome = (criterion.check)();
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match outcome {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed > criterion.budget {
        pass = false;
        let _ = write!(detail, " (over the {}s budget)", criterion.budget.as_secs());
    }
    CriterionResult {
        id: criterion.id,
        name: criterion.name,
        pass,
        detail,
        elapsed,
        budget: criterion.budget,
    }
}

/// Runs the criteria whose ids are listed, or all of them for an empty list.
pub fn run_selected(ids: &[u8], mut on_result: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    criteria()
        .iter()
        .filter(|c| ids.is_empty() || ids.contains(&c.id))
        .map(|c| {
            let r = run(c);
            on_result(&r);
            r
        })
        .collect()
}

fn c1_equality() -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for k in [3, 5, 7] {
        let r = minkowski::equality_report(k)?;
        let one = BigRational::one();
        let good = match &r.exact {
            Some(e) => e.lhs == one && e.rhs == one && e.margin.is_zero(),
            None => false,
        };
        ok &= good && r.pass;
        detail.push(format!("k={k} lhs={} rhs={} margin={}", r.lhs, r.rhs, r.margin));
    }
    Ok((ok, detail.join("; ")))
}

fn random_lattice(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-1.0..1.0));
        let det = m.determinant().abs();
        if det < 0.2 {
            continue;
        }
        let target: f64 = rng.random_range(0.5..=5.0);
        return m * (target / det).sqrt();
    }
}

fn random_body(rng: &mut ChaCha8Rng) -> Result<ConvexBody> {
    if rng.random_bool(0.5) {
        return ConvexBody::ball(2, rng.random_range(0.3..4.0));
    }
    loop {
        let forms: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        if (forms[0][0] * forms[1][1] - forms[0][1] * forms[1][0]).abs() < 0.2 {
            continue;
        }
        let bounds = (0..2).map(|_| rng.random_range(0.3..2.5)).collect();
        return ConvexBody::slab(forms, bounds);
    }
}

/// Brute-force count of nonzero lattice points in `body` over a coefficient
/// box large enough to hold it.
fn box_count(basis: &DMatrix<f64>, body: &ConvexBody) -> Result<usize> {
    let inv = linalg::checked_inverse(basis)?;
    let m = (body.circumradius() * linalg::singular_range(&inv).0).ceil() as i64 + 1;
    let mut count = 0;
    for i in -m..=m {
        for j in -m..=m {
            if (i, j) != (0, 0) && body.contains(&linalg::apply_int(basis, &[i, j]))? {
                count += 1;
            }
        }
    }
    Ok(count)
}

fn c2_classical() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    let mut mismatches = 0;
    let mut tight = 0;
    for _ in 0..200 {
        let basis = random_lattice(&mut rng);
        let body = random_body(&mut rng)?;
        let r = minkowski::classical_bound_check(&basis, &body)?;
        if !r.pass {
            failures += 1;
        }
        if box_count(&basis, &body)? != r.count_nonzero {
            mismatches += 1;
        }
        if r.count_nonzero as u64 == 2 * r.k {
            tight += 1;
        }
    }
    Ok((
        failures == 0 && mismatches == 0,
        format!("trials=200 failures={failures} oracle_mismatches={mismatches} tight={tight}"),
    ))
}

fn c3_main_inequality() -> Result<(bool, String)> {
    let cutoff = 100.0;
    let mut cells = 0;
    let mut passed = 0;
    let mut ratios = Vec::new();
    for alpha in [SQRT2_MINUS_1, golden()] {
        for eps in EPSILONS {
            let gamma = modelset::e_alpha_epsilon(&[alpha], eps, Y_MAX)?;
            let table = frequency_table(&gamma, cutoff, Y_MAX as f64 - cutoff)?;
            for d in [5.0, 20.0, 100.0] {
                let body = ConvexBody::ball(1, d)?;
                let r = minkowski::verify_inequality(&table, &body)?;
                cells += 1;
                if r.lhs >= r.rhs - 3.0 * r.sampling_uncertainty {
                    passed += 1;
                }
                ratios.push(r.ratio());
            }
        }
    }
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(0.0, f64::max);
    Ok((
        passed == cells,
        format!("cells={cells} passed={passed} lhs/rhs in [{min:.4}, {max:.4}]"),
    ))
}

fn c4_density() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for alpha in [SQRT2_MINUS_1, golden()] {
        for eps in EPSILONS {
            let gamma = modelset::e_alpha_epsilon(&[alpha], eps, Y_MAX)?;
            let est = gamma.density_at(Y_MAX as f64, &[vec![0.0]])?;
            worst = worst.max((est.value / (2.0 * eps) - 1.0).abs());
        }
    }
    Ok((worst < 0.02, format!("max relative error {worst:.2e} against 2*eps")))
}

fn c5_mean() -> Result<(bool, String)> {
    let eps = 0.2;
    let gamma = modelset::e_alpha_epsilon(&[SQRT2_MINUS_1], eps, 20_000)?;
    let table = frequency_table(&gamma, 200.0, 19_000.0)?;
    let centers: Vec<Vec<f64>> = (0..10).map(|i| vec![-150.0 + 300.0 * i as f64 / 9.0]).collect();
    let m = mean_frequency(&table, 50.0, &centers)?;
    let d = table.density.value;
    let rel = (m.mean / d - 1.0).abs();
    Ok((
        rel < 0.05 && m.max_deviation < 0.05,
        format!(
            "density={d:.5} mean={:.5} relative_gap={rel:.4} max_deviation={:.4}",
            m.mean, m.max_deviation
        ),
    ))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn c6_wap() -> Result<(bool, String)> {
    let (radius, extent) = (200.0, 5000.0);
    let e = modelset::e_alpha_epsilon(&[SQRT2_MINUS_1], 0.1, extent as u64)?;
    let jit = modelset::jittered_lattice(&DMatrix::identity(1, 1), 0.3, extent, 6)?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let reach = extent - radius - 1.0;
    let mut e_max: f64 = 0.0;
    let mut jit_defects = Vec::new();
    for _ in 0..20 {
        let x = vec![rng.random_range(-reach..reach)];
        let y = vec![rng.random_range(-reach..reach)];
        e_max = e_max.max(e.patch_defect(&x, &y, radius)?.defect);
        jit_defects.push(jit.patch_defect(&x, &y, radius)?.defect);
    }
    let med = median(jit_defects);
    Ok((
        e_max <= 0.05 && med >= 0.1,
        format!("E max defect={e_max:.4} jittered median defect={med:.4}"),
    ))
}

fn chain_is_nonincreasing(chain: &[Vec<i64>], input: usize) -> bool {
    let mut prev = input;
    chain.iter().all(|img| {
        let ok = img.len() <= prev;
        prev = img.len();
        ok
    })
}

fn c7_injectivity() -> Result<(bool, String)> {
    let id = DiscretizedSequence::identity(2, 3)?;
    let quarter = DiscretizedSequence::rotations(&[PI / 2.0; 3])?;
    let eighth = DiscretizedSequence::rotations(&[PI / 4.0])?;
    let t_id = discretize::rate_of_injectivity(&id, 3, &[200.0])?;
    let t_q = discretize::rate_of_injectivity(&quarter, 3, &[200.0])?;
    let exact = t_id.tau[0].iter().chain(&t_q.tau[0]).all(|&t| t == 1.0);
    let t_e = discretize::rate_of_injectivity(&eighth, 1, &[500.0, 1000.0])?;
    let (a, b) = (t_e.tau[0][0], t_e.tau[1][0]);
    let agree = (a - b).abs() / b < 0.01;
    let mut monotone = true;
    for seq in [&id, &quarter, &discretize::random_rotation_sequence(7, 5)?] {
        let input = discretize::grid_ball(2, 200.0)?.len();
        monotone &= chain_is_nonincreasing(&discretize::image_chain(seq, seq.len(), 200.0)?, input);
    }
    Ok((
        exact && agree && monotone,
        format!("identity and quarter turn exact={exact} tau(pi/4) R=500: {a:.5} R=1000: {b:.5} monotone={monotone}"),
    ))
}

fn c8_decay() -> Result<(bool, String)> {
    let mut decayed = 0;
    let mut monotone = true;
    for seed in 0..100 {
        let seq = discretize::random_rotation_sequence(seed, 10)?;
        let chain = discretize::image_chain(&seq, 10, 500.0)?;
        monotone &= chain_is_nonincreasing(&chain, usize::MAX);
        if chain[9].len() < chain[0].len() {
            decayed += 1;
        }
    }
    Ok((
        decayed >= 95 && monotone,
        format!("sequences with tau^10 < tau^1: {decayed}/100 monotone={monotone}"),
    ))
}

fn c9_seed() -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    let z2 = modelset::lattice_sample(&DMatrix::identity(2, 2), 20.0)?;
    let image = discretize::discretized_image(&DiscretizedSequence::rotations(&[PI / 4.0])?, 1, 300.0)?;
    let tables = [
        ("Z2", frequency_table(&z2, 4.0, 10.0)?),
        ("rotated image", frequency_table(&image, 6.0, 250.0)?),
    ];
    for (name, table) in &tables {
        let d = table.density.value;
        let s = discretize::seed_difference(table, d)?;
        let unc = s.sampling_uncertainty;
        let good = s.rho0 >= d / 16.0 - unc && s.mass >= 1.0 - unc;
        ok &= good;
        detail.push(format!(
            "{name}: D={d:.4} u0={:?} rho0={:.4} mass={:.4} r={:.3}",
            s.u0, s.rho0, s.mass, s.r
        ));
    }
    Ok((ok, detail.join("; ")))
}

/// Denominators of the continued fraction convergents of `x`.
fn convergent_denominators(x: f64, terms: usize) -> Vec<i64> {
    let (mut q_prev, mut q) = (0i64, 1i64);
    let mut out = vec![1];
    let mut t = x;
    let mut a = t.floor();
    for _ in 0..terms {
        t = 1.0 / (t - a);
        a = t.floor();
        let next = a as i64 * q + q_prev;
        q_prev = q;
        q = next;
        out.push(q);
    }
    out
}

fn c10_dirichlet() -> Result<(bool, String)> {
    let alpha = dirichlet::sqrt_minus_one(2);
    let z2 = modelset::lattice_sample(&DMatrix::identity(2, 2), 260.0)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for q in [10, 100] {
        let query = ApproximationQuery::new(vec![alpha.clone()], BigRational::from_integer(BigInt::from(q)), 1.0)?;
        let w = dirichlet::find_witness(&query, &z2)?;
        let (x, dy) = (BigRational::from_integer(w.u[0].into()), BigRational::from_integer(w.u[1].into()));
        let in_slab = (&x - &alpha * &dy).abs() * BigRational::from_integer(q.into()) <= BigRational::one()
            && dy.abs() <= BigRational::from_integer((2 * q).into());
        let e = (&alpha - &x / &dy).abs();
        let slope_ok = e <= BigRational::from_integer(2.into()) / (&dy * &dy);
        let diff_ok = w.v.iter().zip(&w.w).map(|(a, b)| a - b).eq(w.u.iter().copied()) && w.v != w.w;
        let cf_ok = q != 10 || convergent_denominators(SQRT2_MINUS_1, 8).contains(&w.u[1]);
        ok &= in_slab && slope_ok && diff_ok && cf_ok;
        detail.push(format!("Q={q} u={:?} error={:.3e} convergent={cf_ok}", w.u, w.errors[0]));
    }
    Ok((ok, detail.join("; ")))
}

/// Quarter turn of a raster about the pixel `(w/2, h/2)`: the pixel at offset
/// `(x, y)` takes the value found at `(y, −x)`, white when that is outside.
fn quarter_turn_oracle(image: &Raster) -> Raster {
    let (w, h) = (image.width() as i64, image.height() as i64);
    let (cx, cy) = (w / 2, h / 2);
    let mut px = Vec::with_capacity((w * h) as usize);
    for r in 0..h {
        for c in 0..w {
            let (x, y) = (c - cx, r - cy);
            let (sc, sr) = (y + cx, -x + cy);
            px.push(if (0..w).contains(&sc) && (0..h).contains(&sr) {
                image.get(sr as usize, sc as usize)
            } else {
                WHITE
            });
        }
    }
    Raster::new(w as usize, h as usize, px).expect("same shape")
}

fn c11_degradation() -> Result<(bool, String)> {
    let img = Raster::test_pattern(220, 282);
    let same = discretize::degrade_image(&img, &DiscretizedSequence::identity(2, 10)?)? == img;
    let turned = discretize::degrade_image(&img, &DiscretizedSequence::rotations(&[PI / 2.0])?)?;
    let quarter = turned == quarter_turn_oracle(&img);
    let (_, lost) = discretize::degrade_trace(&img, &discretize::random_rotation_sequence(11, 10)?)?;
    let positive = lost.iter().all(|&l| l > 0.0);
    let monotone = lost.windows(2).all(|p| p[1] >= p[0]);
    Ok((
        same && quarter && positive && monotone,
        format!(
            "identity exact={same} quarter turn exact={quarter} lost after 1 and 10 steps: {:.4}, {:.4}",
            lost[0], lost[9]
        ),
    ))
}
