use std::f64::consts::PI;
use std::sync::OnceLock;

use meyerkit::convex::ConvexBody;
use meyerkit::dirichlet::{self, ApproximationQuery};
use meyerkit::discretize::{self, project, DiscretizedSequence};
use meyerkit::frequency::{frequency_table, FrequencyTable};
use meyerkit::minkowski;
use meyerkit::modelset;
use meyerkit::PointSample;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

const ALPHA: f64 = std::f64::consts::SQRT_2 - 1.0;

fn e_table() -> &'static (PointSample, FrequencyTable) {
    static CELL: OnceLock<(PointSample, FrequencyTable)> = OnceLock::new();
    CELL.get_or_init(|| {
        let e = modelset::e_alpha_epsilon(&[ALPHA], 0.1, 20_000).unwrap();
        let t = frequency_table(&e, 60.0, 19_000.0).unwrap();
        (e, t)
    })
}

fn body_strategy() -> impl Strategy<Value = ConvexBody> {
    prop_oneof![
        (0.2f64..5.0).prop_map(|r| ConvexBody::ball(2, r).unwrap()),
        (
            prop::array::uniform4(-2.0f64..2.0),
            0.2f64..3.0,
            0.2f64..3.0
        )
            .prop_filter_map("degenerate forms", |(f, a, b)| {
                if (f[0] * f[3] - f[1] * f[2]).abs() < 0.1 {
                    return None;
                }
                ConvexBody::slab(vec![vec![f[0], f[1]], vec![f[2], f[3]]], vec![a, b]).ok()
            }),
        (1.0f64..3.0, 0.3f64..2.0, 0.1f64..0.9).prop_map(|(w, h, t)| {
            ConvexBody::polygon(vec![[w, 0.0], [t * w, h], [-w, 0.0], [-t * w, -h]]).unwrap()
        }),
    ]
}

fn lattice_strategy() -> impl Strategy<Value = DMatrix<f64>> {
    (prop::array::uniform4(-2.0f64..2.0)).prop_filter_map("near singular", |b| {
        let m = DMatrix::from_row_slice(2, 2, &b);
        (m.determinant().abs() > 0.5).then_some(m)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bodies_are_symmetric(body in body_strategy(), x in prop::array::uniform2(-6.0f64..6.0)) {
        let neg = [-x[0], -x[1]];
        prop_assert_eq!(body.contains(&x).unwrap(), body.contains(&neg).unwrap());
    }

    #[test]
    fn volume_scales_homogeneously(body in body_strategy(), t in 0.1f64..10.0) {
        let ratio = body.scale(t).unwrap().volume() / body.volume();
        prop_assert!((ratio / (t * t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_bound_never_fails(basis in lattice_strategy(), body in body_strategy()) {
        let r = minkowski::classical_bound_check(&basis, &body).unwrap();
        prop_assert!(r.pass, "{:?}", r);
        prop_assert_eq!(r.count_nonzero % 2, 0);
    }

    #[test]
    fn lattice_inequality_is_exact(basis in lattice_strategy(), r in 0.5f64..4.0) {
        let gamma = modelset::lattice_sample(&basis, 16.0).unwrap();
        let table = frequency_table(&gamma, 5.0, 8.0).unwrap();
        prop_assert!(table.is_exact());
        prop_assert!(table.entries.iter().all(|e| e.rho == 1.0));
        let body = ConvexBody::ball(2, r).unwrap();
        let rep = minkowski::verify_inequality(&table, &body).unwrap();
        prop_assert_eq!(rep.sampling_uncertainty, 0.0);
        prop_assert!(rep.pass);
        let count = rep.lhs as usize;
        let r2 = minkowski::classical_bound_check(&basis, &body).unwrap();
        prop_assert_eq!(count, r2.count_nonzero + 1);
    }

    #[test]
    fn patch_against_itself_is_perfect(c in -17_000.0f64..17_000.0, r in 20.0f64..500.0) {
        let (e, _) = e_table();
        let p = e.patch_defect(&[c], &[c], r).unwrap();
        prop_assert_eq!(p.defect, 0.0);
        prop_assert_eq!(p.v_best, vec![0.0]);
    }

    #[test]
    fn generation_is_complete(eps in 0.05f64..0.45, r in 50.0f64..400.0) {
        let scheme = modelset::e_alpha_scheme(&[ALPHA], eps).unwrap();
        let big = scheme.generate(r * 1.5).unwrap();
        let small = scheme.generate(r).unwrap();
        let restricted: Vec<f64> = big.points().filter(|p| p[0].abs() <= r).map(|p| p[0]).collect();
        let direct: Vec<f64> = small.points().map(|p| p[0]).collect();
        prop_assert_eq!(&restricted, &direct);
        let e = modelset::e_alpha_epsilon(&[ALPHA], eps, r as u64).unwrap();
        let within: Vec<f64> = small.points().filter(|p| p[0].abs() <= r.floor()).map(|p| p[0]).collect();
        prop_assert_eq!(within, e.points().map(|p| p[0]).collect::<Vec<_>>());
        prop_assert!(small.meyer_check(20.0).unwrap().is_uniformly_discrete);
    }

    #[test]
    fn e_alpha_inequality_holds(d in 1.0f64..60.0) {
        let (_, table) = e_table();
        let body = ConvexBody::ball(1, d).unwrap();
        let r = minkowski::verify_inequality(table, &body).unwrap();
        prop_assert!(r.lhs >= r.rhs - 3.0 * r.sampling_uncertainty, "{:?}", r);
        let slab = ConvexBody::slab(vec![vec![1.0]], vec![d]).unwrap();
        let s = minkowski::verify_inequality(table, &slab).unwrap();
        prop_assert_eq!(s.lhs, r.lhs);
    }

    #[test]
    fn project_commutes_with_integer_shifts(
        x in prop::array::uniform3(-1e6f64..1e6),
        m in prop::array::uniform3(-1000i64..1000),
    ) {
        let z = project(&x);
        let shifted: Vec<f64> = x.iter().zip(&m).map(|(a, b)| a + *b as f64).collect();
        let expected: Vec<i64> = z.iter().zip(&m).map(|(a, b)| a + b).collect();
        prop_assert_eq!(project(&shifted), expected);
        let back: Vec<f64> = z.iter().map(|&c| c as f64).collect();
        prop_assert_eq!(project(&back), z);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn frequency_table_bounds(eps in 0.1f64..0.4, cutoff in 5.0f64..40.0) {
        let e = modelset::e_alpha_epsilon(&[ALPHA], eps, 3000).unwrap();
        let t = frequency_table(&e, cutoff, 2000.0).unwrap();
        prop_assert_eq!(t.get(&[0.0]), 1.0);
        for entry in &t.entries {
            prop_assert!(entry.rho > 0.0 && entry.rho <= 1.0);
            let neg: Vec<f64> = entry.v.iter().map(|c| -c).collect();
            prop_assert_eq!(t.get(&neg), entry.rho);
        }
        let diff = e.difference_set(cutoff).unwrap();
        for entry in &t.entries {
            prop_assert!(diff.contains(&entry.v).unwrap());
        }
        for v in diff.points() {
            let neg: Vec<f64> = v.iter().map(|c| -c).collect();
            prop_assert!(diff.contains(&neg).unwrap());
        }
        prop_assert!(diff.contains(&[0.0]).unwrap());
    }

    #[test]
    fn witnesses_are_certified(num in 1i64..1000, q in 3i64..60) {
        let alpha = BigRational::new(BigInt::from(num), BigInt::from(1000));
        let gamma = modelset::lattice_sample(&DMatrix::identity(2, 2), 2.0 * q as f64 + 5.0).unwrap();
        let query = ApproximationQuery::new(vec![alpha.clone()], BigRational::from_integer(q.into()), 1.0).unwrap();
        let w = dirichlet::find_witness(&query, &gamma).unwrap();
        let x = BigRational::from_integer(w.u[0].into());
        let dy = BigRational::from_integer(w.u[1].into());
        prop_assert!((&x - &alpha * &dy).abs() * BigRational::from_integer(q.into()) <= BigRational::from_integer(1.into()));
        prop_assert!(w.u[1] > 0 && w.u[1] <= 2 * q);
        let e = (&alpha - &x / &dy).abs();
        prop_assert!(e * &dy * &dy <= BigRational::from_integer(2.into()));
    }

    #[test]
    fn mass_grows_with_the_slab(q in 5.0f64..15.0, d in 0.6f64..1.0) {
        let gamma = modelset::lattice_sample(&DMatrix::identity(2, 2), 200.0).unwrap();
        let table = frequency_table(&gamma, 1.1 * 4.0 * q / d + 2.0, 3.0).unwrap();
        let small = dirichlet::guaranteed_mass(&ApproximationQuery::from_f64(&[ALPHA], q, d).unwrap(), &table).unwrap();
        let large = dirichlet::guaranteed_mass(&ApproximationQuery::from_f64(&[ALPHA], q, d / 2.0).unwrap(), &table).unwrap();
        prop_assert!(small.empirical <= large.empirical);
    }

    #[test]
    fn images_never_grow(seed in 0u64..10_000, k in 1usize..6, r in 10.0f64..80.0) {
        let seq = discretize::random_rotation_sequence(seed, k).unwrap();
        let chain = discretize::image_chain(&seq, k, r).unwrap();
        let mut prev = discretize::grid_ball(2, r).unwrap().len();
        for img in &chain {
            prop_assert!(img.len() <= prev);
            prev = img.len();
        }
        let t = discretize::rate_of_injectivity(&seq, k, &[r]).unwrap();
        prop_assert!(t.tau[0].windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn count_and_density_estimates_agree(angle in 0.0f64..(2.0 * PI)) {
        let r = 300.0;
        let seq = DiscretizedSequence::rotations(&[angle]).unwrap();
        let t = discretize::rate_of_injectivity(&seq, 1, &[r]).unwrap();
        let by_density = t.density_tau[0][0].unwrap();
        prop_assert!((t.tau[0][0] - by_density).abs() <= 3.0 * 4.0 / r, "{} {}", t.tau[0][0], by_density);
    }
}

#[test]
fn lattice_upper_density_converges() {
    let basis = DMatrix::from_row_slice(2, 2, &[1.3, 0.4, -0.2, 0.9]);
    let covol = basis.determinant().abs();
    let gamma = modelset::lattice_sample(&basis, 160.0).unwrap();
    let radius = 50.0 * covol.sqrt();
    let est = gamma.upper_density(&[radius / 2.0, radius], 10.0).unwrap();
    assert!((est.value * covol - 1.0).abs() < 0.02, "{}", est.value * covol);
    let at_zero = gamma.density_at(radius, &[vec![0.0, 0.0]]).unwrap().value;
    assert!((est.value - at_zero).abs() * covol <= 2.0 / radius * 2.0);
}

#[test]
fn e_alpha_density_stabilises() {
    let scheme = modelset::e_alpha_scheme(&[ALPHA], 0.1).unwrap();
    let d = |r: f64| scheme.generate(r).unwrap().len() as f64 / (2.0 * r);
    let (a, b) = (d(1000.0), d(2000.0));
    assert!((a - b).abs() / b < 0.02);
}
