//! Centrally symmetric convex bodies.
//!
//! Three shapes are supported: Euclidean balls, intersections of `n` symmetric
//! slabs `|L_i(x)| <= A_i`, and centrally symmetric polygons in the plane. All
//! bodies are closed. A body built from rational data (for instance parsed
//! from the text grammar) keeps an exact copy of that data and decides
//! membership in rational arithmetic; a body built from floats decides with
//! the absolute tolerance [`MEMBERSHIP_TOL`].

use std::f64::consts::PI;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact;
use crate::linalg;

/// Slack allowed on half-space and ball inequalities in floating-point mode.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Volume of the unit ball of R^n, via `mu_n = 2 pi mu_{n-2} / n`.
pub fn unit_ball_volume(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("unit ball volume needs n >= 1"));
    }
    Ok(unit_ball_volume_unchecked(n))
}

pub(crate) fn unit_ball_volume_unchecked(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => PI,
        _ => 2.0 * PI * unit_ball_volume_unchecked(n - 2) / n as f64,
    }
}

/// Volume of a ball of radius `r` in R^n.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    unit_ball_volume_unchecked(n) * r.powi(n as i32)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Ball { radius: f64 },
    /// `{x : |forms[i] . x| <= bounds[i]}`.
    Slab { forms: Vec<Vec<f64>>, bounds: Vec<f64> },
    /// Counterclockwise vertex list, closed under negation.
    Polygon { vertices: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq)]
enum ExactShape {
    Ball {
        radius: BigRational,
    },
    Slab {
        forms: Vec<Vec<BigRational>>,
        bounds: Vec<BigRational>,
    },
    Polygon {
        vertices: Vec<[BigRational; 2]>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexBody {
    dim: usize,
    shape: Shape,
    exact: Option<ExactShape>,
}

impl ConvexBody {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("ball dimension must be positive"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(ConvexBody {
            dim,
            shape: Shape::Ball { radius },
            exact: None,
        })
    }

    pub fn ball_exact(dim: usize, radius: BigRational) -> Result<Self> {
        let mut body = Self::ball(dim, exact::to_f64(&radius))?;
        if !radius.is_positive() {
            return Err(Error::invalid("ball radius must be positive"));
        }
        body.exact = Some(ExactShape::Ball { radius });
        Ok(body)
    }

    pub fn slab(forms: Vec<Vec<f64>>, bounds: Vec<f64>) -> Result<Self> {
        let n = forms.len();
        if n == 0 {
            return Err(Error::Empty("slab form list"));
        }
        if bounds.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bounds.len(),
            });
        }
        if let Some(b) = bounds.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(Error::invalid(format!("slab bounds must be positive, got {b}")));
        }
        let m = linalg::matrix_from_rows(&forms)?;
        let det = m.determinant();
        if !det.is_finite() || det.abs() <= linalg::SINGULAR_TOL {
            return Err(Error::Singular(det));
        }
        Ok(ConvexBody {
            dim: n,
            shape: Shape::Slab { forms, bounds },
            exact: None,
        })
    }

    pub fn slab_exact(forms: Vec<Vec<BigRational>>, bounds: Vec<BigRational>) -> Result<Self> {
        let f: Vec<Vec<f64>> = forms
            .iter()
            .map(|r| r.iter().map(exact::to_f64).collect())
            .collect();
        let b: Vec<f64> = bounds.iter().map(exact::to_f64).collect();
        let mut body = Self::slab(f, b)?;
        if bounds.iter().any(|b| !b.is_positive()) {
            return Err(Error::invalid("slab bounds must be positive"));
        }
        if exact::determinant(&forms).is_zero() {
            return Err(Error::Singular(0.0));
        }
        body.exact = Some(ExactShape::Slab { forms, bounds });
        Ok(body)
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        validate_polygon(&vertices)?;
        for v in &vertices {
            let has_opposite = vertices.iter().any(|w| {
                (w[0] + v[0]).abs() <= MEMBERSHIP_TOL && (w[1] + v[1]).abs() <= MEMBERSHIP_TOL
            });
            if !has_opposite {
                return Err(Error::invalid(format!(
                    "polygon is not centrally symmetric: no vertex opposite to {v:?}"
                )));
            }
        }
        Ok(ConvexBody {
            dim: 2,
            shape: Shape::Polygon { vertices },
            exact: None,
        })
    }

    pub fn polygon_exact(vertices: Vec<[BigRational; 2]>) -> Result<Self> {
        let approx: Vec<[f64; 2]> = vertices
            .iter()
            .map(|[x, y]| [exact::to_f64(x), exact::to_f64(y)])
            .collect();
        validate_polygon(&approx)?;
        for v in &vertices {
            let neg = [-v[0].clone(), -v[1].clone()];
            if !vertices.contains(&neg) {
                return Err(Error::invalid(format!(
                    "polygon is not centrally symmetric: no vertex opposite to {:?}",
                    [exact::to_f64(&v[0]), exact::to_f64(&v[1])]
                )));
            }
        }
        for i in 0..vertices.len() {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % vertices.len()];
            let c = &vertices[(i + 2) % vertices.len()];
            let turn = (&b[0] - &a[0]) * (&c[1] - &b[1]) - (&b[1] - &a[1]) * (&c[0] - &b[0]);
            if !turn.is_positive() {
                return Err(Error::invalid("polygon must be strictly convex, counterclockwise"));
            }
        }
        Ok(ConvexBody {
            dim: 2,
            shape: Shape::Polygon { vertices: approx },
            exact: Some(ExactShape::Polygon { vertices }),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// True when membership is decided in exact rational arithmetic.
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.contains_point(x))
    }

    /// Membership without the dimension check; `x.len()` must equal `dim()`.
    pub(crate) fn contains_point(&self, x: &[f64]) -> bool {
        match &self.exact {
            Some(exact) => {
                // rational arithmetic only near the boundary
                let slack = float_slack(&self.shape, x);
                let band = 1e-9 * (1.0 + linalg::norm(x));
                if slack > band {
                    true
                } else if slack < -band {
                    false
                } else {
                    contains_exact(exact, x)
                }
            }
            None => contains_float(&self.shape, x),
        }
    }

    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius } => ball_volume(self.dim, *radius),
            Shape::Slab { forms, bounds } => {
                let det = linalg::matrix_from_rows(forms)
                    .expect("validated at construction")
                    .determinant()
                    .abs();
                2f64.powi(self.dim as i32) * bounds.iter().product::<f64>() / det
            }
            Shape::Polygon { vertices } => shoelace(vertices).abs(),
        }
    }

    /// Exact volume for exact slabs and polygons; balls have no rational volume.
    pub fn volume_exact(&self) -> Option<BigRational> {
        match self.exact.as_ref()? {
            ExactShape::Ball { .. } => None,
            ExactShape::Slab { forms, bounds } => {
                let det = exact::determinant(forms).abs();
                let two_n = num_traits::pow(BigRational::from_integer(2.into()), self.dim);
                let prod = bounds
                    .iter()
                    .fold(BigRational::from_integer(1.into()), |acc, b| acc * b);
                Some(two_n * prod / det)
            }
            ExactShape::Polygon { vertices } => {
                let n = vertices.len();
                let mut twice = BigRational::zero();
                for i in 0..n {
                    let a = &vertices[i];
                    let b = &vertices[(i + 1) % n];
                    twice += &a[0] * &b[1] - &b[0] * &a[1];
                }
                Some(twice.abs() / BigRational::from_integer(2.into()))
            }
        }
    }

    /// Returns `t * S`.
    pub fn scale(&self, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::invalid(format!("scale factor must be positive, got {t}")));
        }
        let shape = match &self.shape {
            Shape::Ball { radius } => Shape::Ball { radius: radius * t },
            Shape::Slab { forms, bounds } => Shape::Slab {
                forms: forms.clone(),
                bounds: bounds.iter().map(|b| b * t).collect(),
            },
            Shape::Polygon { vertices } => Shape::Polygon {
                vertices: vertices.iter().map(|[x, y]| [x * t, y * t]).collect(),
            },
        };
        let exact = self.exact.as_ref().map(|e| {
            let tq = exact::from_f64(t);
            match e {
                ExactShape::Ball { radius } => ExactShape::Ball {
                    radius: radius * &tq,
                },
                ExactShape::Slab { forms, bounds } => ExactShape::Slab {
                    forms: forms.clone(),
                    bounds: bounds.iter().map(|b| b * &tq).collect(),
                },
                ExactShape::Polygon { vertices } => ExactShape::Polygon {
                    vertices: vertices
                        .iter()
                        .map(|[x, y]| [x * &tq, y * &tq])
                        .collect(),
                },
            }
        });
        Ok(ConvexBody {
            dim: self.dim,
            shape,
            exact,
        })
    }

    /// `S / 2`.
    pub fn half(&self) -> Self {
        self.scale(0.5).expect("0.5 is a valid factor")
    }

    /// Radius of the smallest origin-centred ball containing the body.
    pub fn circumradius(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius } => *radius,
            Shape::Slab { forms, bounds } => slab_vertices(forms, bounds)
                .iter()
                .map(|v| linalg::norm(v))
                .fold(0.0, f64::max),
            Shape::Polygon { vertices } => vertices
                .iter()
                .map(|v| linalg::norm(v))
                .fold(0.0, f64::max),
        }
    }

    /// Per-coordinate half-widths of the tightest origin-centred bounding box.
    pub fn half_widths(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Ball { radius } => vec![*radius; self.dim],
            Shape::Slab { forms, bounds } => {
                let inv = linalg::checked_inverse(&linalg::matrix_from_rows(forms).unwrap())
                    .expect("validated at construction");
                (0..self.dim)
                    .map(|j| (0..self.dim).map(|i| inv[(j, i)].abs() * bounds[i]).sum())
                    .collect()
            }
            Shape::Polygon { vertices } => (0..2)
                .map(|j| vertices.iter().map(|v| v[j].abs()).fold(0.0, f64::max))
                .collect(),
        }
    }
}

impl fmt::Display for ConvexBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[f64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match &self.shape {
            Shape::Ball { radius } => write!(f, "ball:r={radius}:n={}", self.dim),
            Shape::Slab { forms, bounds } => {
                let rows: Vec<String> = forms.iter().map(|r| join(r)).collect();
                write!(f, "slab:L={}:A={}", rows.join(";"), join(bounds))
            }
            Shape::Polygon { vertices } => {
                let pts: Vec<String> = vertices.iter().map(|v| join(v)).collect();
                write!(f, "poly:{}", pts.join(";"))
            }
        }
    }
}

/// Parses the body grammar: `ball:r=2.5[:n=3]`, `slab:L=1,0;0,1:A=2,1`,
/// `poly:x1,y1;x2,y2;...`. Numbers are parsed exactly, so the resulting body
/// decides membership in rational arithmetic. `dim` supplies the ball
/// dimension when the text does not.
pub fn parse_body(text: &str, dim: Option<usize>) -> Result<ConvexBody> {
    let text = text.trim();
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("body {text:?}: expected <kind>:<data>")))?;
    let numbers = |s: &str| -> Result<Vec<BigRational>> {
        s.split(',').map(exact::parse_decimal).collect()
    };
    match kind {
        "ball" => {
            let mut radius = None;
            let mut n = dim;
            for part in rest.split(':') {
                match part.split_once('=') {
                    Some(("r", v)) => radius = Some(exact::parse_decimal(v)?),
                    Some(("n", v)) => {
                        n = Some(v.trim().parse().map_err(|_| {
                            Error::invalid(format!("ball dimension {v:?} is not an integer"))
                        })?)
                    }
                    _ => return Err(Error::invalid(format!("unknown ball field {part:?}"))),
                }
            }
            let radius = radius.ok_or_else(|| Error::invalid("ball needs r=<radius>"))?;
            let n = n.ok_or_else(|| Error::invalid("ball dimension unknown; add :n=<dim>"))?;
            ConvexBody::ball_exact(n, radius)
        }
        "slab" => {
            let mut forms = None;
            let mut bounds = None;
            for part in rest.split(':') {
                match part.split_once('=') {
                    Some(("L", v)) => {
                        forms = Some(v.split(';').map(numbers).collect::<Result<Vec<_>>>()?)
                    }
                    Some(("A", v)) => bounds = Some(numbers(v)?),
                    _ => return Err(Error::invalid(format!("unknown slab field {part:?}"))),
                }
            }
            let forms = forms.ok_or_else(|| Error::invalid("slab needs L=<rows>"))?;
            let bounds = bounds.ok_or_else(|| Error::invalid("slab needs A=<bounds>"))?;
            ConvexBody::slab_exact(forms, bounds)
        }
        "poly" => {
            let vertices = rest
                .split(';')
                .map(|p| {
                    let xy = numbers(p)?;
                    match <[BigRational; 2]>::try_from(xy) {
                        Ok(v) => Ok(v),
                        Err(_) => Err(Error::invalid(format!("polygon vertex {p:?} is not 2D"))),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            ConvexBody::polygon_exact(vertices)
        }
        other => Err(Error::invalid(format!("unknown body kind {other:?}"))),
    }
}

fn contains_float(shape: &Shape, x: &[f64]) -> bool {
    match shape {
        Shape::Ball { radius } => linalg::norm(x) <= radius + MEMBERSHIP_TOL,
        Shape::Slab { forms, bounds } => forms
            .iter()
            .zip(bounds)
            .all(|(l, a)| linalg::dot(l, x).abs() <= a + MEMBERSHIP_TOL),
        Shape::Polygon { vertices } => {
            let n = vertices.len();
            (0..n).all(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                let cross = ex * (x[1] - a[1]) - ey * (x[0] - a[0]);
                cross >= -MEMBERSHIP_TOL * ex.hypot(ey)
            })
        }
    }
}

/// Smallest distance-like slack over the defining constraints; positive inside.
fn float_slack(shape: &Shape, x: &[f64]) -> f64 {
    match shape {
        Shape::Ball { radius } => radius - linalg::norm(x),
        Shape::Slab { forms, bounds } => forms
            .iter()
            .zip(bounds)
            .map(|(l, a)| (a - linalg::dot(l, x).abs()) / linalg::norm(l))
            .fold(f64::INFINITY, f64::min),
        Shape::Polygon { vertices } => {
            let n = vertices.len();
            (0..n)
                .map(|i| {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                    (ex * (x[1] - a[1]) - ey * (x[0] - a[0])) / ex.hypot(ey)
                })
                .fold(f64::INFINITY, f64::min)
        }
    }
}

fn contains_exact(shape: &ExactShape, x: &[f64]) -> bool {
    let q: Vec<BigRational> = x.iter().map(|&c| exact::from_f64(c)).collect();
    match shape {
        ExactShape::Ball { radius } => {
            let sq = q.iter().fold(BigRational::zero(), |acc, c| acc + c * c);
            sq <= radius * radius
        }
        ExactShape::Slab { forms, bounds } => forms.iter().zip(bounds).all(|(l, a)| {
            let v = l
                .iter()
                .zip(&q)
                .fold(BigRational::zero(), |acc, (li, xi)| acc + li * xi);
            v.abs() <= *a
        }),
        ExactShape::Polygon { vertices } => {
            let n = vertices.len();
            (0..n).all(|i| {
                let a = &vertices[i];
                let b = &vertices[(i + 1) % n];
                let cross = (&b[0] - &a[0]) * (&q[1] - &a[1]) - (&b[1] - &a[1]) * (&q[0] - &a[0]);
                !cross.is_negative()
            })
        }
    }
}

fn shoelace(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        / 2.0
}

fn validate_polygon(v: &[[f64; 2]]) -> Result<()> {
    if v.len() < 4 || !v.len().is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "a centrally symmetric polygon needs an even number (>= 4) of vertices, got {}",
            v.len()
        )));
    }
    if v.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::invalid("polygon vertices must be finite"));
    }
    let n = v.len();
    let mut winding = 0.0;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        let c = v[(i + 2) % n];
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - b[0], c[1] - b[1]];
        let cross = e1[0] * e2[1] - e1[1] * e2[0];
        if cross <= 0.0 {
            return Err(Error::invalid("polygon must be strictly convex, counterclockwise"));
        }
        winding += cross.atan2(e1[0] * e2[0] + e1[1] * e2[1]);
    }
    if (winding - 2.0 * PI).abs() > 1e-6 {
        return Err(Error::invalid("polygon boundary must wind exactly once"));
    }
    Ok(())
}

/// The `2^n` vertices `L^{-1}(±A_1, ..., ±A_n)` of a slab intersection.
fn slab_vertices(forms: &[Vec<f64>], bounds: &[f64]) -> Vec<Vec<f64>> {
    let n = forms.len();
    let inv = linalg::checked_inverse(&linalg::matrix_from_rows(forms).unwrap())
        .expect("validated at construction");
    (0..1u32 << n)
        .map(|mask| {
            let rhs: Vec<f64> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { bounds[i] } else { -bounds[i] })
                .collect();
            linalg::apply(&inv, &rhs)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_slab(a: &[f64]) -> ConvexBody {
        let n = a.len();
        let forms = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        ConvexBody::slab(forms, a.to_vec()).unwrap()
    }

    #[test]
    fn ball_membership_is_closed() {
        let b = ConvexBody::ball(2, 1.0).unwrap();
        assert!(b.contains(&[0.0, 0.0]).unwrap());
        assert!(b.contains(&[1.0, 0.0]).unwrap());
        assert!(!b.contains(&[1.0 + 1e-6, 0.0]).unwrap());
        assert!(b.contains(&[1.0]).is_err());
    }

    #[test]
    fn slab_membership_and_volume() {
        let s = identity_slab(&[2.0, 1.0]);
        assert!(!s.contains(&[2.5, 0.0]).unwrap());
        assert!(s.contains(&[2.0, -1.0]).unwrap());
        assert_eq!(s.volume(), 8.0);
        assert_eq!(s.half_widths(), vec![2.0, 1.0]);
        assert!((s.circumradius() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn unit_ball_volumes() {
        assert_eq!(unit_ball_volume(1).unwrap(), 2.0);
        assert_eq!(unit_ball_volume(2).unwrap(), PI);
        assert!((unit_ball_volume(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4).unwrap() - PI * PI / 2.0).abs() < 1e-14);
        assert!(unit_ball_volume(0).is_err());
        assert_eq!(ConvexBody::ball(2, 1.0).unwrap().volume(), PI);
    }

    #[test]
    fn scaling() {
        let b = ConvexBody::ball(2, 2.0).unwrap().scale(0.5).unwrap();
        assert_eq!(b, ConvexBody::ball(2, 1.0).unwrap());
        let s = identity_slab(&[2.0, 1.0]).half();
        assert_eq!(s.shape(), identity_slab(&[1.0, 0.5]).shape());
        assert_eq!(s.volume(), 2.0);
        assert!(b.scale(0.0).is_err());
        assert!(b.scale(-1.0).is_err());
    }

    #[test]
    fn rejects_degenerate_bodies() {
        assert!(ConvexBody::ball(2, 0.0).is_err());
        assert!(ConvexBody::ball(0, 1.0).is_err());
        assert!(ConvexBody::slab(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 1.0]).is_err());
        assert!(ConvexBody::slab(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, -1.0]).is_err());
        // not symmetric
        assert!(ConvexBody::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).is_err());
        // clockwise
        assert!(ConvexBody::polygon(vec![[1.0, 1.0], [1.0, -1.0], [-1.0, -1.0], [-1.0, 1.0]]).is_err());
    }

    #[test]
    fn polygon_area() {
        let sq = ConvexBody::polygon(vec![[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]).unwrap();
        assert_eq!(sq.volume(), 4.0);
        assert!(sq.contains(&[1.0, 0.3]).unwrap());
        assert!(!sq.contains(&[1.01, 0.3]).unwrap());
    }

    #[test]
    fn grammar_round_trip() {
        let b = parse_body("ball:r=2.5", Some(2)).unwrap();
        assert!(b.is_exact());
        assert!(b.contains(&[1.5, 2.0]).unwrap());
        assert!(!b.contains(&[1.5, 2.0000001]).unwrap());
        assert!(parse_body("ball:r=2.5", None).is_err());
        assert_eq!(parse_body("ball:r=1:n=3", None).unwrap().dim(), 3);

        let s = parse_body("slab:L=1,0;0,1:A=2,1", None).unwrap();
        assert_eq!(s.volume(), 8.0);
        assert_eq!(s.volume_exact().unwrap(), BigRational::from_integer(8.into()));

        let p = parse_body("poly:1,1;-1,1;-1,-1;1,-1", None).unwrap();
        assert_eq!(p.volume_exact().unwrap(), BigRational::from_integer(4.into()));
        let printed = p.to_string();
        assert_eq!(parse_body(&printed, None).unwrap().volume(), 4.0);

        for bad in ["ball", "cube:r=1", "slab:L=1,0;0,1", "poly:1,2,3;4,5", "ball:r=x:n=2"] {
            assert!(parse_body(bad, Some(2)).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn exact_mode_resolves_decimal_boundaries() {
        // 0.1 + 0.2 != 0.3 in floats, but the exact body treats the boundary exactly.
        let s = parse_body("slab:L=1,1;1,-1:A=0.3,10", None).unwrap();
        let x = [0.1, 0.2];
        assert_eq!(s.contains(&x).unwrap(), exact::from_f64(0.1) + exact::from_f64(0.2) <= exact::parse_decimal("0.3").unwrap());
        let on_boundary = [0.25, 0.05];
        let exact_sum = exact::from_f64(0.25) + exact::from_f64(0.05);
        assert_eq!(s.contains(&on_boundary).unwrap(), exact_sum <= exact::parse_decimal("0.3").unwrap());
    }
}
