//! Segment predicates: exact rational intersection and floating distances.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// How two closed segments meet.
#[derive(Clone, Debug, PartialEq)]
pub enum SegmentContact {
    Disjoint,
    /// A single common point at parameters `(s, u)` on the two segments.
    Point { s: f64, u: f64 },
    /// Collinear with a common sub-segment of positive length.
    Overlap,
}

fn exact(v: &[f64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_float(x).expect("finite coordinate")).collect()
}

fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

fn in_unit(x: &BigRational) -> bool {
    !x.is_negative() && *x <= BigRational::one()
}

fn to_f64(x: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

/// Exact contact classification of `[p0, p1]` and `[q0, q1]` in any dimension.
/// Floating inputs are converted to rationals without rounding.
pub fn segment_contact_exact(p0: &[f64], p1: &[f64], q0: &[f64], q1: &[f64]) -> SegmentContact {
    let (p0, p1, q0, q1) = (exact(p0), exact(p1), exact(q0), exact(q1));
    let d1 = sub(&p1, &p0);
    let d2 = sub(&q1, &q0);
    let r = sub(&q0, &p0);
    let a = dot(&d1, &d1);
    let b = dot(&d1, &d2);
    let c = dot(&d2, &d2);
    let det = &a * &c - &b * &b;
    if !det.is_zero() {
        // s d1 - u d2 = r in the least-squares sense, then confirm exactly
        let e = dot(&d1, &r);
        let f = dot(&d2, &r);
        let s = (&e * &c - &b * &f) / &det;
        let u = (&b * &e - &a * &f) / &det;
        if !in_unit(&s) || !in_unit(&u) {
            return SegmentContact::Disjoint;
        }
        let hit = d1.iter().zip(&d2).zip(&r).all(|((x, y), z)| &s * x - &u * y == *z);
        return if hit {
            SegmentContact::Point { s: to_f64(&s), u: to_f64(&u) }
        } else {
            SegmentContact::Disjoint
        };
    }
    // parallel: collinear iff r is parallel to d1
    let rd = dot(&r, &d1);
    if dot(&r, &r) * &a != &rd * &rd {
        return SegmentContact::Disjoint;
    }
    let lo = &rd / &a;
    let hi = (&rd + &b) / &a;
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let zero = BigRational::zero();
    let one = BigRational::one();
    if hi < zero || lo > one {
        SegmentContact::Disjoint
    } else if hi == zero {
        let u = if (&rd / &a).is_zero() { 0.0 } else { 1.0 };
        SegmentContact::Point { s: 0.0, u }
    } else if lo == one {
        let u = if (&rd / &a) == one { 0.0 } else { 1.0 };
        SegmentContact::Point { s: 1.0, u }
    } else {
        SegmentContact::Overlap
    }
}

/// Exact test whether two consecutive segments `[a, b]` and `[b, c]` fold
/// back onto each other (collinear with opposite directions).
pub fn folds_back_exact(a: &[f64], b: &[f64], c: &[f64]) -> bool {
    let (a, b, c) = (exact(a), exact(b), exact(c));
    let d1 = sub(&b, &a);
    let d2 = sub(&c, &b);
    let x = dot(&d1, &d2);
    x.is_negative() && &x * &x == dot(&d1, &d1) * dot(&d2, &d2)
}

#[inline]
pub fn dot_f(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn sub_f(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn norm_f(a: &[f64]) -> f64 {
    dot_f(a, a).sqrt()
}

pub fn dist_f(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Closest points of two segments in any dimension; returns
/// `(distance, s, u)` with the parameters along each segment.
pub fn segment_distance(p0: &[f64], p1: &[f64], q0: &[f64], q1: &[f64]) -> (f64, f64, f64) {
    let d1 = sub_f(p1, p0);
    let d2 = sub_f(q1, q0);
    let r = sub_f(p0, q0);
    let a = dot_f(&d1, &d1);
    let e = dot_f(&d2, &d2);
    let f = dot_f(&d2, &r);
    let eps = 1e-300;
    let (mut s, mut u);
    if a <= eps && e <= eps {
        return (norm_f(&r), 0.0, 0.0);
    }
    if a <= eps {
        s = 0.0;
        u = (f / e).clamp(0.0, 1.0);
    } else {
        let c = dot_f(&d1, &r);
        if e <= eps {
            u = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = dot_f(&d1, &d2);
            let denom = a * e - b * b;
            s = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            u = (b * s + f) / e;
            if u < 0.0 {
                u = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if u > 1.0 {
                u = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
        }
    }
    let gap: Vec<f64> = (0..d1.len()).map(|i| p0[i] + s * d1[i] - q0[i] - u * d2[i]).collect();
    (norm_f(&gap), s, u)
}

/// Distance from a point to a segment.
pub fn point_segment_distance(x: &[f64], p0: &[f64], p1: &[f64]) -> f64 {
    let d = sub_f(p1, p0);
    let dd = dot_f(&d, &d);
    let s = if dd > 0.0 { (dot_f(&sub_f(x, p0), &d) / dd).clamp(0.0, 1.0) } else { 0.0 };
    let proj: Vec<f64> = p0.iter().zip(&d).map(|(p, q)| p + s * q).collect();
    dist_f(x, &proj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_segments_meet() {
        let c = segment_contact_exact(&[-1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 1.0, 0.0]);
        assert_eq!(c, SegmentContact::Point { s: 0.5, u: 0.5 });
    }

    #[test]
    fn skew_segments_do_not_meet() {
        let c = segment_contact_exact(&[-1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, -1.0, 1e-300], &[0.0, 1.0, 1e-300]);
        assert_eq!(c, SegmentContact::Disjoint);
    }

    #[test]
    fn collinear_cases() {
        let o = segment_contact_exact(&[0.0, 0.0], &[2.0, 0.0], &[1.0, 0.0], &[3.0, 0.0]);
        assert_eq!(o, SegmentContact::Overlap);
        let t = segment_contact_exact(&[0.0, 0.0], &[1.0, 0.0], &[1.0, 0.0], &[3.0, 0.0]);
        assert_eq!(t, SegmentContact::Point { s: 1.0, u: 0.0 });
        let d = segment_contact_exact(&[0.0, 0.0], &[1.0, 0.0], &[1.5, 0.0], &[3.0, 0.0]);
        assert_eq!(d, SegmentContact::Disjoint);
        let par = segment_contact_exact(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 0.1], &[1.0, 0.1]);
        assert_eq!(par, SegmentContact::Disjoint);
    }

    #[test]
    fn fold_back() {
        assert!(folds_back_exact(&[0.0, 0.0], &[1.0, 0.0], &[0.5, 0.0]));
        assert!(!folds_back_exact(&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]));
        assert!(!folds_back_exact(&[0.0, 0.0], &[1.0, 0.0], &[0.5, 0.1]));
    }

    #[test]
    fn distances() {
        let (d, s, u) = segment_distance(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.5, 1.0, -1.0], &[0.5, 1.0, 1.0]);
        assert!((d - 1.0).abs() < 1e-15);
        assert!((s - 0.5).abs() < 1e-15 && (u - 0.5).abs() < 1e-15);
        let (d, _, _) = segment_distance(&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0], &[3.0, 0.0]);
        assert!((d - 1.0).abs() < 1e-15);
        assert!((point_segment_distance(&[0.5, 2.0], &[0.0, 0.0], &[1.0, 0.0]) - 2.0).abs() < 1e-15);
    }
}
