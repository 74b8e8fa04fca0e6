//! Rotation-minimising frames along PL long knots.
//!
//! Vertex frames are carried by the double-reflection method using mitred
//! tangents, then a seam correction spread over the body vertices makes the
//! frame at the right endpoint standard again.

use nalgebra::{DMatrix, Matrix3, Rotation3};

use crate::knot::predicates::{dot_f, norm_f, sub_f};
use crate::knot::LongKnotPL;

pub type Frame = Vec<Vec<f64>>;

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = norm_f(&v);
    v.into_iter().map(|x| x / n).collect()
}

fn axis(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

fn reflect(v: &[f64], normal: &[f64], c: f64) -> Vec<f64> {
    let s = 2.0 * dot_f(normal, v) / c;
    v.iter().zip(normal).map(|(x, y)| x - s * y).collect()
}

/// Mitred unit tangents at the vertices; the endpoints use the tail direction.
fn vertex_tangents(f: &LongKnotPL) -> Vec<Vec<f64>> {
    let n = f.ambient_dim();
    let pts = f.points();
    let m = pts.len() - 1;
    (0..=m)
        .map(|k| {
            if k == 0 || k == m {
                return axis(n, 0);
            }
            let a = unit(sub_f(&pts[k], &pts[k - 1]));
            let b = unit(sub_f(&pts[k + 1], &pts[k]));
            unit(a.iter().zip(&b).map(|(x, y)| x + y).collect())
        })
        .collect()
}

/// Orthonormal frames of the normal spaces of the mitred tangents, standard
/// at both endpoints.
pub fn vertex_frames(f: &LongKnotPL) -> Vec<Frame> {
    let n = f.ambient_dim();
    let pts = f.points();
    let tangents = vertex_tangents(f);
    let mut frames: Vec<Frame> = vec![(1..n).map(|i| axis(n, i)).collect()];
    for k in 0..pts.len() - 1 {
        let v1 = sub_f(&pts[k + 1], &pts[k]);
        let c1 = dot_f(&v1, &v1);
        let frame = &frames[k];
        let r: Frame = frame.iter().map(|e| reflect(e, &v1, c1)).collect();
        let t = reflect(&tangents[k], &v1, c1);
        let v2 = sub_f(&tangents[k + 1], &t);
        let c2 = dot_f(&v2, &v2);
        let next = if c2 < 1e-30 { r } else { r.iter().map(|e| reflect(e, &v2, c2)).collect() };
        frames.push(next);
    }
    correct_seam(f, &mut frames);
    frames
}

/// Holonomy of the transported frame against the standard one at the right
/// end, as the matrix `Q` with `standard_i = sum_j frame_j Q_ji`.
fn holonomy(last: &Frame) -> DMatrix<f64> {
    let k = last.len();
    let n = k + 1;
    DMatrix::from_fn(k, k, |j, i| dot_f(&last[j], &axis(n, i + 1)))
}

/// Rotation path `R(s)` in SO(k) from the identity to `q`.
fn rotation_path(q: &DMatrix<f64>) -> Box<dyn Fn(f64) -> DMatrix<f64>> {
    let k = q.nrows();
    match k {
        1 => Box::new(|_| DMatrix::identity(1, 1)),
        2 => {
            let angle = q[(1, 0)].atan2(q[(0, 0)]);
            Box::new(move |s| {
                let (sn, cs) = (s * angle).sin_cos();
                DMatrix::from_row_slice(2, 2, &[cs, -sn, sn, cs])
            })
        }
        3 => {
            let m = Matrix3::from_fn(|i, j| q[(i, j)]);
            let axis_angle = Rotation3::from_matrix(&m).scaled_axis();
            Box::new(move |s| {
                let r = Rotation3::new(axis_angle * s);
                DMatrix::from_fn(3, 3, |i, j| r[(i, j)])
            })
        }
        _ => {
            // Cayley parametrisation; a generic holonomy has no eigenvalue -1
            let id = DMatrix::<f64>::identity(k, k);
            let inv = (q + &id).try_inverse().unwrap_or_else(|| id.clone());
            let a = (q - &id) * inv;
            Box::new(move |s| {
                let sa = &a * s;
                let den = (&id - &sa).try_inverse().unwrap_or_else(|| id.clone());
                den * (&id + sa)
            })
        }
    }
}

/// Rotates the body frames within their normal spaces so that the last frame
/// is standard. Collar vertices are left alone.
fn correct_seam(f: &LongKnotPL, frames: &mut [Frame]) {
    let m = frames.len() - 1;
    if m < 3 {
        return;
    }
    let q = holonomy(&frames[m]);
    let path = rotation_path(&q);
    let ts = f.params();
    let (first, last) = (1, m - 1);
    let span = ts[last] - ts[first];
    for (k, frame) in frames.iter_mut().enumerate().skip(first) {
        let s = if k >= last { 1.0 } else { (ts[k] - ts[first]) / span };
        let r = path(s);
        let rotated: Frame = (0..frame.len())
            .map(|i| {
                let mut v = vec![0.0; frame[0].len()];
                for (j, e) in frame.iter().enumerate() {
                    for (x, y) in v.iter_mut().zip(e) {
                        *x += r[(j, i)] * y;
                    }
                }
                v
            })
            .collect();
        *frame = rotated;
    }
}

/// Gram-Schmidt on a list of vectors, in place.
pub fn orthonormalise(frame: &mut Frame) {
    for i in 0..frame.len() {
        for j in 0..i {
            let d = dot_f(&frame[i], &frame[j]);
            let prev = frame[j].clone();
            for (x, y) in frame[i].iter_mut().zip(&prev) {
                *x -= d * y;
            }
        }
        let n = norm_f(&frame[i]);
        for x in &mut frame[i] {
            *x /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::library::{figure_eight, right_trefoil};

    fn max_defect(frames: &[Frame], tangents: &[Vec<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for (fr, t) in frames.iter().zip(tangents) {
            for (i, e) in fr.iter().enumerate() {
                worst = worst.max(dot_f(e, t).abs()).max((norm_f(e) - 1.0).abs());
                for e2 in &fr[i + 1..] {
                    worst = worst.max(dot_f(e, e2).abs());
                }
            }
        }
        worst
    }

    #[test]
    fn frames_are_orthonormal_and_standard_at_ends() {
        for knot in [right_trefoil(), figure_eight(), right_trefoil().push_forward(4).unwrap(), right_trefoil().push_forward(6).unwrap()] {
            let frames = vertex_frames(&knot);
            assert!(max_defect(&frames, &vertex_tangents(&knot)) < 1e-12);
            let n = knot.ambient_dim();
            for (i, e) in frames.last().unwrap().iter().enumerate() {
                let target = axis(n, i + 1);
                assert!(dist(e, &target) < 1e-12, "{e:?}");
            }
            for (i, e) in frames[0].iter().enumerate() {
                assert_eq!(*e, axis(n, i + 1));
            }
        }
    }

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        norm_f(&sub_f(a, b))
    }

    #[test]
    fn planar_curve_frame_is_not_twisted() {
        // a planar bump: the binormal stays constant along the curve
        let k = LongKnotPL::embedded(
            3,
            vec![
                (-1.0, vec![-1.0, 0.0, 0.0]),
                (-0.5, vec![-0.5, 0.0, 0.0]),
                (0.0, vec![0.0, 0.4, 0.0]),
                (0.5, vec![0.5, 0.0, 0.0]),
                (1.0, vec![1.0, 0.0, 0.0]),
            ],
        )
        .unwrap();
        for fr in vertex_frames(&k) {
            assert!(dist(&fr[1], &[0.0, 0.0, 1.0]) < 1e-12);
        }
    }
}
