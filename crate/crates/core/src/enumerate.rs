//! Exact enumeration of lattice points in ellipsoids and convex bodies.
//!
//! The workhorse is a Fincke–Pohst search: all `z ∈ Z^d` with
//! `‖M z − t‖ ≤ radius`, found by walking the coordinates of the upper
//! triangular QR factor from the last one down. The search radius is padded
//! slightly so that floating-point rounding can only add candidates, never
//! drop them; callers filter the candidates with their exact predicate.

use nalgebra::DMatrix;

use crate::convex::ConvexBody;
use crate::error::{Error, Result};
use crate::linalg;

/// Visits every integer vector `z` with `‖m z − target‖ ≤ radius`, plus
/// possibly a few just outside.
pub fn ellipsoid_points(
    m: &DMatrix<f64>,
    target: &[f64],
    radius: f64,
    mut visit: impl FnMut(&[i64]),
) -> Result<()> {
    let d = m.nrows();
    if m.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m.ncols(),
        });
    }
    if target.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: target.len(),
        });
    }
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::invalid(format!("search radius must be finite, got {radius}")));
    }
    linalg::checked_inverse(m)?;
    let qr = m.clone().qr();
    let r = qr.r();
    let q = qr.q();
    let y: Vec<f64> = (0..d)
        .map(|i| (0..d).map(|k| q[(k, i)] * target[k]).sum())
        .collect();
    let padded = radius * (1.0 + 1e-9) + 1e-9;
    let mut z = vec![0i64; d];
    search(&r, &y, d, padded * padded, &mut z, &mut visit);
    Ok(())
}

fn search(
    r: &DMatrix<f64>,
    y: &[f64],
    level: usize,
    remaining: f64,
    z: &mut [i64],
    visit: &mut impl FnMut(&[i64]),
) {
    if level == 0 {
        visit(z);
        return;
    }
    let i = level - 1;
    let d = y.len();
    let shift: f64 = (i + 1..d).map(|j| r[(i, j)] * z[j] as f64).sum();
    let rii = r[(i, i)];
    let center = (y[i] - shift) / rii;
    let half = remaining.max(0.0).sqrt() / rii.abs();
    let lo = (center - half).ceil() as i64;
    let hi = (center + half).floor() as i64;
    for zi in lo..=hi {
        let resid = rii * (zi as f64 - center);
        let rest = remaining - resid * resid;
        if rest < -1e-9 * remaining.max(1.0) {
            continue;
        }
        z[i] = zi;
        search(r, y, i, rest.max(0.0), z, visit);
    }
    z[i] = 0;
}

/// All points of the lattice `basis · Z^n` (basis vectors as columns) lying in
/// `body`, as `(coefficients, point)` pairs in enumeration order.
pub fn lattice_points_in_body(
    basis: &DMatrix<f64>,
    body: &ConvexBody,
) -> Result<Vec<(Vec<i64>, Vec<f64>)>> {
    let n = body.dim();
    if basis.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: basis.nrows(),
        });
    }
    let hw = body.half_widths();
    let scaled = DMatrix::from_fn(n, n, |i, j| basis[(i, j)] / hw[i]);
    let mut out = Vec::new();
    ellipsoid_points(&scaled, &vec![0.0; n], (n as f64).sqrt(), |z| {
        let p = linalg::apply_int(basis, z);
        if body.contains_point(&p) {
            out.push((z.to_vec(), p));
        }
    })?;
    Ok(out)
}

/// `#(body ∩ Z^n)`.
pub fn count_integer_points(body: &ConvexBody) -> Result<usize> {
    let id = DMatrix::identity(body.dim(), body.dim());
    Ok(lattice_points_in_body(&id, body)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_circle_counts() {
        let id = DMatrix::<f64>::identity(2, 2);
        let mut count = 0;
        ellipsoid_points(&id, &[0.0, 0.0], 10.0, |z| {
            if z[0] * z[0] + z[1] * z[1] <= 100 {
                count += 1;
            }
        })
        .unwrap();
        assert_eq!(count, 317);
        let ball = ConvexBody::ball(2, 5.0).unwrap();
        assert_eq!(count_integer_points(&ball).unwrap(), 81);
    }

    #[test]
    fn skewed_lattice_matches_box_scan() {
        let b = linalg::matrix_from_rows(&[vec![1.3, 0.7], vec![-0.2, 0.9]]).unwrap();
        let body = ConvexBody::ball(2, 6.0).unwrap();
        let found = lattice_points_in_body(&b, &body).unwrap();
        let mut brute = 0;
        for i in -40i64..=40 {
            for j in -40i64..=40 {
                let p = linalg::apply_int(&b, &[i, j]);
                if body.contains(&p).unwrap() {
                    brute += 1;
                }
            }
        }
        assert_eq!(found.len(), brute);
    }

    #[test]
    fn off_centre_target() {
        let id = DMatrix::<f64>::identity(1, 1);
        let mut hits = Vec::new();
        ellipsoid_points(&id, &[10.5], 1.0, |z| hits.push(z[0])).unwrap();
        assert_eq!(hits, vec![10, 11]);
    }
}
