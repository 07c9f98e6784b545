use std::collections::HashSet;
use std::f64::consts::{PI, SQRT_2};

use meyerkit::convex::{ConvexBody, Shape};
use meyerkit::dirichlet::{self, ApproximationQuery};
use meyerkit::discretize::{self, DiscretizedSequence};
use meyerkit::frequency::{frequency, frequency_table, mean_frequency};
use meyerkit::minkowski;
use meyerkit::modelset::{self, BoxClosure};
use meyerkit::{CutAndProjectScheme, PointSample, Window};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALPHA: f64 = SQRT_2 - 1.0;

fn gauss_count(r: f64) -> usize {
    let m = r.floor() as i64;
    let mut n = 0;
    for x in -m..=m {
        for y in -m..=m {
            if ((x * x + y * y) as f64) <= r * r {
                n += 1;
            }
        }
    }
    n
}

fn z2(r: f64) -> PointSample {
    modelset::lattice_sample(&DMatrix::identity(2, 2), r).unwrap()
}

fn shoelace(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1])
        .sum::<f64>()
        .abs()
        / 2.0
}

/// Monte Carlo volume in the box `[−h, h]^n`, returned with its standard error.
fn monte_carlo(body: &ConvexBody, h: f64, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = body.dim();
    let mut hits = 0usize;
    let mut x = vec![0.0; n];
    for _ in 0..samples {
        for c in x.iter_mut() {
            *c = rng.random_range(-h..h);
        }
        hits += body.contains(&x).unwrap() as usize;
    }
    let box_vol = (2.0 * h).powi(n as i32);
    let p = hits as f64 / samples as f64;
    (p * box_vol, box_vol * (p * (1.0 - p) / samples as f64).sqrt())
}

#[test]
fn hexagon_area_matches_shoelace_and_monte_carlo() {
    let hex = minkowski::equality_hexagon(3).unwrap();
    let Shape::Polygon { vertices } = hex.shape() else {
        panic!("hexagon is a polygon")
    };
    assert!((vertices[0][0] + 2.2).abs() < 1e-12);
    let area = shoelace(vertices);
    assert!((hex.volume() - area).abs() < 1e-12);
    let (mc, se) = monte_carlo(&hex, 2.3, 1_000_000, 1);
    assert!((mc - area).abs() < 3.0 * se, "mc {mc} area {area} se {se}");
}

#[test]
fn closed_form_volumes_against_monte_carlo() {
    let bodies = [
        ConvexBody::ball(2, 1.5).unwrap(),
        ConvexBody::ball(3, 1.0).unwrap(),
        ConvexBody::slab(vec![vec![1.0, -0.4], vec![0.0, 1.0]], vec![0.5, 2.0]).unwrap(),
    ];
    for (i, b) in bodies.iter().enumerate() {
        let h = b.circumradius() * 1.01;
        let (mc, se) = monte_carlo(b, h, 400_000, 10 + i as u64);
        assert!((mc - b.volume()).abs() < 3.0 * se, "body {i}: mc {mc} closed {}", b.volume());
    }
}

#[test]
fn gauss_circle_density() {
    assert_eq!(gauss_count(10.0), 317);
    let gamma = z2(30.0);
    let est = gamma.density_at(10.0, &[vec![0.0, 0.0]]).unwrap();
    assert!((est.value - 317.0 / (100.0 * PI)).abs() < 1e-12);
    assert_eq!(gamma.count_in_ball(&[0.0, 0.0], 10.0).unwrap(), 317);
}

#[test]
fn identity_scheme_is_the_grid() {
    let s = modelset::lattice_sample(&DMatrix::identity(2, 2), 10.0).unwrap();
    assert_eq!(s.len(), gauss_count(10.0));
}

#[test]
fn stretched_grid_delone_parameters() {
    let gamma = modelset::stretched_grid(3, 50.0).unwrap();
    let d = gamma.delone_parameters(0.05).unwrap();
    assert!((d.r_packing - 0.5).abs() < 1e-12);
    // farthest point from 3Z × Z over one period, on a 0.01 grid
    let mut worst: f64 = 0.0;
    for i in 0..=300 {
        for j in 0..=100 {
            let (x, y) = (i as f64 * 0.01, j as f64 * 0.01);
            let mut best = f64::INFINITY;
            for a in [-3.0, 0.0, 3.0, 6.0] {
                for b in [-1.0, 0.0, 1.0, 2.0] {
                    best = best.min(((x - a).powi(2) + (y - b).powi(2)).sqrt());
                }
            }
            worst = worst.max(best);
        }
    }
    assert!((worst - 2.5f64.sqrt()).abs() < 1e-9);
    assert!((d.r_covering - worst).abs() <= d.probe_spacing, "{} vs {worst}", d.r_covering);
}

#[test]
fn tilted_scheme_matches_brute_force() {
    let basis = DMatrix::from_column_slice(2, 2, &[0.866, 0.364, -0.129, 0.987]);
    let window = Window::half_open(vec![-0.6], vec![0.9]).unwrap();
    let scheme = CutAndProjectScheme::new(1, 1, basis, window).unwrap();
    let r = 40.0;
    let got: Vec<f64> = scheme.generate(r).unwrap().points().map(|p| p[0]).collect();
    let mut expected = Vec::new();
    for i in -200i64..=200 {
        for j in -200i64..=200 {
            let internal = 0.866 * i as f64 - 0.129 * j as f64;
            let physical = 0.364 * i as f64 + 0.987 * j as f64;
            if (-0.6..0.9).contains(&internal) && physical.abs() <= r {
                expected.push(physical);
            }
        }
    }
    expected.sort_by(f64::total_cmp);
    assert_eq!(got.len(), expected.len());
    for (a, b) in got.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn e_alpha_densities() {
    let e = modelset::e_alpha_epsilon(&[ALPHA], 0.1, 100_000).unwrap();
    let direct = (-100_000i64..=100_000)
        .filter(|&y| {
            let t = ALPHA * y as f64;
            (t - t.round()).abs() < 0.1
        })
        .count();
    assert_eq!(e.len(), direct);
    assert!((direct as f64 / 200_001.0 / 0.2 - 1.0).abs() < 0.01);
    let wide = modelset::e_alpha_epsilon(&[ALPHA], 0.49, 100_000).unwrap();
    assert!((wide.len() as f64 / 200_001.0 - 0.98).abs() < 0.01);
    let scheme = modelset::e_alpha_scheme(&[ALPHA], 0.1).unwrap();
    assert!((scheme.expected_density() - 0.2).abs() < 1e-15);
}

#[test]
fn scaled_scheme_density() {
    let t = 1.5;
    let base = modelset::e_alpha_scheme(&[ALPHA], 0.2).unwrap();
    let scaled_basis = base.basis() * t;
    let window = Window::boxed(vec![-0.2 * t], vec![0.2 * t], BoxClosure::Open).unwrap();
    let scaled = CutAndProjectScheme::new(1, 1, scaled_basis, window).unwrap();
    let d0 = base.generate(3000.0).unwrap().len() as f64 / 6000.0;
    let d1 = scaled.generate(3000.0).unwrap().len() as f64 / 6000.0;
    assert!((d1 / d0 - 1.0 / t).abs() < 0.02, "{d0} {d1}");
}

#[test]
fn meyer_check_separates_model_sets_from_jitter() {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let fib = modelset::e_alpha_scheme(&[golden], 0.3).unwrap().generate(400.0).unwrap();
    let report = fib.meyer_check(20.0).unwrap();
    assert!(report.is_uniformly_discrete);
    // gap scan oracle over the integer differences
    let pts: Vec<i64> = fib.points().map(|p| p[0] as i64).collect();
    let diffs: HashSet<i64> = pts
        .iter()
        .flat_map(|a| pts.iter().map(move |b| a - b))
        .filter(|d| d.abs() <= 20)
        .collect();
    assert_eq!(report.difference_count, diffs.len());
    assert!(diffs.contains(&0) && diffs.iter().all(|d| diffs.contains(&-d)));

    let jit = modelset::jittered_lattice(&DMatrix::identity(1, 1), 0.3, 400.0, 3).unwrap();
    let report = jit.meyer_check(20.0).unwrap();
    assert!(!report.is_uniformly_discrete, "gap {}", report.min_gap);
}

#[test]
fn frequency_matches_direct_count() {
    let y_max = 20_000u64;
    let e = modelset::e_alpha_epsilon(&[ALPHA], 0.1, y_max).unwrap();
    let set: HashSet<i64> = e.points().map(|p| p[0] as i64).collect();
    let radius = 15_000.0;
    let sources: Vec<i64> = set.iter().copied().filter(|y| (*y as f64).abs() <= radius).collect();
    let oracle = |v: i64| {
        let plus = sources.iter().filter(|y| set.contains(&(**y + v))).count();
        let minus = sources.iter().filter(|y| set.contains(&(**y - v))).count();
        (plus + minus) as f64 / (2 * sources.len()) as f64
    };
    let table = frequency_table(&e, 30.0, radius).unwrap();
    // dist(α, Z) > 2ε, so no two points of the set are adjacent
    assert_eq!(frequency(&e, &[1.0], radius).unwrap(), 0.0);
    assert_eq!(oracle(1), 0.0);
    for v in [2, 5, 12] {
        let rho = frequency(&e, &[v as f64], radius).unwrap();
        assert_eq!(rho, oracle(v));
        assert!(rho > 0.0 && rho < 1.0);
        assert_eq!(table.get(&[v as f64]), rho);
    }
    assert!(table.entries.iter().all(|e| e.rho > 0.0));
}

#[test]
fn mean_frequency_of_grid_and_e_alpha() {
    let table = frequency_table(&z2(30.0), 15.0, 10.0).unwrap();
    let m = mean_frequency(&table, 10.0, &[vec![0.0, 0.0]]).unwrap();
    assert!((m.mean - 317.0 / (100.0 * PI)).abs() < 1e-12);

    let e = modelset::e_alpha_epsilon(&[ALPHA], 0.1, 20_000).unwrap();
    let table = frequency_table(&e, 200.0, 19_000.0).unwrap();
    let centers: Vec<Vec<f64>> = [-120.0, -60.0, 60.0, 120.0].iter().map(|c| vec![*c]).collect();
    let m = mean_frequency(&table, 60.0, &centers).unwrap();
    assert!((m.mean / 0.2 - 1.0).abs() < 0.05, "{}", m.mean);
}

#[test]
fn small_balls_on_the_grid() {
    let id = DMatrix::identity(2, 2);
    let r = minkowski::classical_bound_check(&id, &ConvexBody::ball(2, 1.13).unwrap()).unwrap();
    assert_eq!(r.count_nonzero, gauss_count(1.13) - 1);
    assert!(r.count_nonzero >= 2);
    let r = minkowski::classical_bound_check(&id, &ConvexBody::ball(2, 2.26).unwrap()).unwrap();
    assert_eq!(r.count_nonzero, gauss_count(2.26) - 1);
}

#[test]
fn stretched_lattice_with_hexagon() {
    let basis = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0]));
    let hex = minkowski::equality_hexagon(3).unwrap();
    let r = minkowski::classical_bound_check(&basis, &hex).unwrap();
    assert_eq!(r.count_nonzero, 0);
    assert_eq!(r.k, 0);
}

#[test]
fn grid_inequalities_count_exactly() {
    let gamma = z2(30.0);
    let table = frequency_table(&gamma, 8.0, 10.0).unwrap();
    let r = minkowski::verify_inequality(&table, &ConvexBody::ball(2, 5.0).unwrap()).unwrap();
    assert_eq!(r.lhs, gauss_count(5.0) as f64);
    assert_eq!(gauss_count(5.0), 81);
    assert!((r.rhs - PI * 6.25).abs() < 1e-12);
    assert!(r.pass);
    let r = minkowski::verify_integer_inequality(&table, &ConvexBody::ball(2, 2.5).unwrap()).unwrap();
    assert_eq!((r.lhs, r.rhs), (21.0, 5.0));
    assert_eq!(gauss_count(2.5), 21);
    assert_eq!(gauss_count(1.25), 5);
}

#[test]
fn hexagon_point_lists() {
    let (gamma, body) = minkowski::equality_instance(3, 20.0).unwrap();
    let half: Vec<(i64, i64)> = (-3..=3)
        .flat_map(|x| (-3..=3).map(move |y| (x, y)))
        .filter(|&(x, y)| body.half().contains(&[x as f64, y as f64]).unwrap())
        .collect();
    assert_eq!(half, vec![(-1, 0), (0, 0), (1, 0)]);
    let in_s: Vec<(i64, i64)> = (-4..=4)
        .flat_map(|x| (-4..=4).map(move |y| (x, y)))
        .filter(|&(x, y)| body.contains(&[x as f64, y as f64]).unwrap())
        .collect();
    assert_eq!(in_s.len(), 2 * 2 + 5);
    let table = frequency_table(&gamma, 3.0, 10.0).unwrap();
    let sum: f64 = table.entries_in(&body).map(|e| e.rho).sum();
    assert_eq!(sum, 1.0);
}

/// Integer points `(x, y)` with `|x − αy| ≤ a` and `|y| ≤ h`.
fn slab_count(alpha: f64, a: f64, h: f64) -> usize {
    let h = h.floor() as i64;
    (-h..=h)
        .map(|y| {
            let c = alpha * y as f64;
            ((c - a).ceil() as i64..=(c + a).floor() as i64).count()
        })
        .sum()
}

#[test]
fn grid_mass_in_the_slab() {
    let gamma = z2(250.0);
    for q in [10, 30, 100] {
        let query = ApproximationQuery::from_f64(&[ALPHA], q as f64, 1.0).unwrap();
        let table = frequency_table(&gamma, 2.2 * q as f64 + 1.0, 5.0).unwrap();
        let m = dirichlet::guaranteed_mass(&query, &table).unwrap();
        let expected = slab_count(ALPHA, 1.0 / q as f64, 2.0 * q as f64) - 1;
        assert_eq!(m.empirical, expected as f64, "Q={q}");
        assert!(m.empirical >= m.floor && m.empirical >= 1.0);
    }
}

#[test]
fn paired_set_mass_and_witness() {
    let e = modelset::e_alpha_epsilon(&[0.3819660112501051], 0.2, 100).unwrap();
    let paired = modelset::product_with_integers(&e, 100.0).unwrap();
    let table = frequency_table(&paired, 60.0, 30.0).unwrap();
    let d = table.density.value;
    let query = ApproximationQuery::from_f64(&[ALPHA], 10.0, d).unwrap();
    let m = dirichlet::guaranteed_mass(&query, &table).unwrap();
    assert!(m.empirical >= 1.0, "mass {}", m.empirical);
    let w = dirichlet::find_witness(&query, &paired).unwrap();
    // exhaustive check: both ends in the set, u inside the slab, bound certified
    let set: HashSet<(i64, i64)> = paired.points().map(|p| (p[0] as i64, p[1] as i64)).collect();
    assert!(set.contains(&(w.v[0], w.v[1])) && set.contains(&(w.w[0], w.w[1])));
    assert!(w.u[1] > 0 && (w.u[1] as f64) <= 20.0 / d);
    assert!((w.u[0] as f64 - ALPHA * w.u[1] as f64).abs() <= 0.1);
    assert!(w.errors[0] <= 2.0 / (d * (w.u[1] * w.u[1]) as f64));
}

fn convergent_denominators(p: &[i64]) -> Vec<i64> {
    let (mut a, mut b) = (0i64, 1i64);
    let mut out = vec![];
    for &c in p {
        let next = c * b + a;
        a = b;
        b = next;
        out.push(b);
    }
    out
}

#[test]
fn grid_witness_is_a_convergent() {
    // √2 − 1 = [0; 2, 2, 2, …]
    let dens = convergent_denominators(&[2; 8]);
    assert_eq!(&dens[..4], &[2, 5, 12, 29]);
    let alpha = dirichlet::sqrt_minus_one(2);
    let query = ApproximationQuery::new(vec![alpha], BigRational::from_integer(BigInt::from(10)), 1.0).unwrap();
    let w = dirichlet::find_witness(&query, &z2(40.0)).unwrap();
    assert!(dens.contains(&w.u[1]) && w.u[1] <= 200);
    assert_eq!(w.u, vec![2, 5]);
}

/// Rounded images of `Z² ∩ B_R` under the rotation by `θ`, deduplicated.
fn rotated_count(theta: f64, r: f64) -> (usize, usize) {
    let (s, c) = theta.sin_cos();
    let m = r.floor() as i64;
    let mut input = 0;
    let mut seen = HashSet::new();
    for x in -m..=m {
        for y in -m..=m {
            if ((x * x + y * y) as f64) > r * r {
                continue;
            }
            input += 1;
            let (xf, yf) = (x as f64, y as f64);
            seen.insert((((c * xf - s * yf) + 0.5).floor() as i64, ((s * xf + c * yf) + 0.5).floor() as i64));
        }
    }
    (input, seen.len())
}

#[test]
fn eighth_turn_counts() {
    let seq = DiscretizedSequence::rotations(&[PI / 4.0]).unwrap();
    let t = discretize::rate_of_injectivity(&seq, 1, &[500.0, 1000.0]).unwrap();
    for (i, r) in [500.0, 1000.0].iter().enumerate() {
        let (input, image) = rotated_count(PI / 4.0, *r);
        assert_eq!(t.input_counts[i], input);
        assert_eq!(t.tau[i][0], image as f64 / input as f64);
        assert!(image < input);
    }
    assert!((t.tau[0][0] / t.tau[1][0] - 1.0).abs() < 0.01);
}

#[test]
fn seed_zero_angles_are_frozen() {
    let seq = discretize::random_rotation_sequence(0, 10).unwrap();
    let expected = [
        4.455252231890435,
        2.927472519785886,
        4.392846549987766,
        0.3780665838284975,
        5.52361554646169,
        3.452806793893606,
        5.20866307963396,
        5.877458059050156,
        5.05030900462742,
        0.9694406673047486,
    ];
    assert_eq!(seq.angles().unwrap(), expected);
}

#[test]
fn seeded_difference_on_rotated_image() {
    let seq = DiscretizedSequence::rotations(&[PI / 4.0]).unwrap();
    let image = discretize::discretized_image(&seq, 1, 200.0).unwrap();
    let table = frequency_table(&image, 5.0, 150.0).unwrap();
    let d = table.density.value;
    let s = discretize::seed_difference(&table, d).unwrap();
    assert!(s.rho0 >= d / 16.0 - s.sampling_uncertainty);
    assert!(s.mass >= 1.0 - s.sampling_uncertainty);
    let best = table
        .entries
        .iter()
        .filter(|e| e.v.iter().any(|&c| c != 0.0) && e.v.iter().map(|c| c * c).sum::<f64>() <= s.r * s.r)
        .map(|e| e.rho)
        .fold(0.0, f64::max);
    assert_eq!(s.rho0, best);
}

#[test]
fn raster_loss_grows() {
    let img = discretize::Raster::test_pattern(220, 282);
    let (_, lost) = discretize::degrade_trace(&img, &discretize::random_rotation_sequence(3, 10).unwrap()).unwrap();
    assert!(lost[0] > 0.0);
    assert!(lost.windows(2).all(|w| w[1] >= w[0]));
}
