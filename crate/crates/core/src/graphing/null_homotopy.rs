//! Two null-homotopies of the inclusion `K_{n,1} -> K_{n+1,1}`, joined at `t = 0`.

use crate::error::{Error, Result};
use crate::knot::LongKnotPL;
use crate::tube::leaves::peak_bump;

/// Height of the lifting profile `b`.
pub const LIFT_HEIGHT: f64 = 0.5;

fn lift(x: f64) -> f64 {
    LIFT_HEIGHT * peak_bump(x)
}

/// `j_t(f)(x) = (f((1+t^2) x - t^3) + (t^3, 0, .., 0)) / (1+t^2)`, which
/// squeezes the knotted part of `f` into `[(t^3-1)/(1+t^2), (t^3+1)/(1+t^2)]`.
pub fn j_t(f: &LongKnotPL, t: f64) -> Result<LongKnotPL> {
    check_t(t)?;
    let n = f.ambient_dim();
    let s = 1.0 + t * t;
    let c = t * t * t;
    let mut vertices: Vec<(f64, Vec<f64>)> = f
        .params()
        .iter()
        .zip(f.points())
        .map(|(&tk, p)| {
            let mut q: Vec<f64> = p.iter().map(|x| x / s).collect();
            q[0] = (p[0] + c) / s;
            ((tk + c) / s, q)
        })
        .collect();
    let standard = |x: f64| {
        let mut p = vec![0.0; n];
        p[0] = x;
        p
    };
    // endpoints are standard, so the formula maps them to (x_k, 0, ..)
    vertices[0].1 = standard(vertices[0].0);
    let last = vertices.len() - 1;
    vertices[last].1 = standard(vertices[last].0);
    if vertices[0].0 > -1.0 {
        vertices.insert(0, (-1.0, standard(-1.0)));
    } else {
        vertices[0] = (-1.0, standard(-1.0));
    }
    let last = vertices.len() - 1;
    if vertices[last].0 < 1.0 {
        vertices.push((1.0, standard(1.0)));
    } else {
        vertices[last] = (1.0, standard(1.0));
    }
    LongKnotPL::from_vertices(n, vertices)
}

fn check_t(t: f64) -> Result<()> {
    if !(t.abs() <= 1.0) {
        return Err(Error::InvalidParameter(format!("homotopy parameter {t} outside [-1, 1]")));
    }
    Ok(())
}

fn include(p: &[f64]) -> Vec<f64> {
    let mut q = p.to_vec();
    q.push(0.0);
    q
}

/// The family `F_t`, `t in [-1, 1]`, sampled as a PL knot in `R^{n+1}`.
///
/// For `|t| <= 1/3` this is the inclusion of `j_{3t}(f)`, exact. The other
/// pieces interpolate towards `B(x) = (x, 0, .., b(x))` and then to the
/// straight line, sampled at `samples + 1` uniform parameters together
/// with the vertices of `j_{+-1}(f)`.
pub fn null_homotopy_family(f: &LongKnotPL, t: f64, samples: usize) -> Result<LongKnotPL> {
    check_t(t)?;
    let n = f.ambient_dim();
    let a = t.abs();
    if a <= 1.0 / 3.0 {
        let g = j_t(f, 3.0 * t)?;
        let pts = g.points().iter().map(|p| include(p)).collect::<Vec<_>>();
        return LongKnotPL::from_vertices(n + 1, g.params().iter().copied().zip(pts).collect());
    }
    let end = j_t(f, t.signum())?;
    let mut xs: Vec<f64> = (0..=samples.max(2)).map(|i| -1.0 + 2.0 * i as f64 / samples.max(2) as f64).collect();
    xs.extend_from_slice(end.params());
    xs.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
    xs.dedup();
    let vertices = xs
        .into_iter()
        .map(|x| {
            let mut p = vec![0.0; n + 1];
            p[0] = x;
            if a <= 2.0 / 3.0 {
                let (u, v) = (2.0 - 3.0 * a, 3.0 * a - 1.0);
                let q = end.eval(x);
                for (pi, qi) in p.iter_mut().zip(&q) {
                    *pi = u * qi;
                }
                p[0] += v * x;
                p[n] = v * lift(x);
            } else {
                p[n] = (3.0 - 3.0 * a) * lift(x);
            }
            (x, p)
        })
        .collect();
    LongKnotPL::from_vertices(n + 1, vertices)
}
