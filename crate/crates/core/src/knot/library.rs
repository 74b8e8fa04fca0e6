//! The standard knot library.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::diagram::{crossings, writhe};
use super::LongKnotPL;
use crate::actions::connect_sum;
use crate::error::{Error, Result};

pub const STANDARD_NAMES: &[&str] = &[
    "unknot",
    "trefoil",
    "right_trefoil",
    "left_trefoil",
    "figure_eight",
    "granny",
    "square",
    "immersed_trefoil",
];

const COLLAR: f64 = 0.85;
const JITTER: f64 = 2e-3;
const HAT_WIDTH: f64 = 0.15;
const VERTEX_CLEARANCE: f64 = 0.02;

fn closed_trefoil(samples: usize) -> Vec<[f64; 3]> {
    (0..samples)
        .map(|k| {
            let u = 2.0 * PI * k as f64 / samples as f64;
            [u.sin() + 2.0 * (2.0 * u).sin(), u.cos() - 2.0 * (2.0 * u).cos(), -(3.0 * u).sin()]
        })
        .collect()
}

fn closed_figure_eight(samples: usize) -> Vec<[f64; 3]> {
    (0..samples)
        .map(|k| {
            let u = 2.0 * PI * k as f64 / samples as f64;
            let r = 2.0 + (2.0 * u).cos();
            [r * (3.0 * u).cos(), r * (3.0 * u).sin(), (4.0 * u).sin()]
        })
        .collect()
}

/// Opens a closed polygon at its lowest vertex and runs the two ends down
/// to axial collars. The polygon is first scaled into
/// `[-0.6, 0.6] x [0.15, 0.8] x [-0.3, 0.3]`.
fn long_from_closed(closed: &[[f64; 3]], seed: u64) -> Result<LongKnotPL> {
    let range = |i: usize| {
        let lo = closed.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
        let hi = closed.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (x0, x1) = range(0);
    let (y0, y1) = range(1);
    let (z0, z1) = range(2);
    let mut pts: Vec<[f64; 3]> = closed
        .iter()
        .map(|p| {
            [
                -0.6 + 1.2 * (p[0] - x0) / (x1 - x0),
                0.15 + 0.65 * (p[1] - y0) / (y1 - y0),
                -0.3 + 0.6 * (p[2] - z0) / (z1 - z0),
            ]
        })
        .collect();
    let n = pts.len();
    let low = (0..n).min_by(|&a, &b| pts[a][1].partial_cmp(&pts[b][1]).expect("finite")).expect("nonempty");
    pts.rotate_left(low);
    // pts[0] is the lowest vertex; walk away from it towards smaller x
    if pts[1][0] > pts[n - 1][0] {
        pts[1..].reverse();
    }
    let lerp = |a: [f64; 3], b: [f64; 3], s: f64| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])];
    let start = lerp(pts[0], pts[1], 0.25);
    let end = lerp(pts[0], pts[n - 1], 0.25);

    let mut body: Vec<[f64; 3]> = vec![[-COLLAR, 0.0, 0.0], start];
    body.extend_from_slice(&pts[1..]);
    body.push(end);
    body.push([COLLAR, 0.0, 0.0]);
    let lengths: Vec<f64> = body
        .windows(2)
        .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2) + (w[1][2] - w[0][2]).powi(2)).sqrt())
        .collect();
    let total: f64 = lengths.iter().sum();
    let mut vertices = vec![(-1.0, vec![-1.0, 0.0, 0.0])];
    let mut acc = 0.0;
    for (k, p) in body.iter().enumerate() {
        let t = if k + 1 == body.len() { COLLAR } else { -COLLAR + 2.0 * COLLAR * acc / total };
        vertices.push((t, p.to_vec()));
        if k < lengths.len() {
            acc += lengths[k];
        }
    }
    vertices.push((1.0, vec![1.0, 0.0, 0.0]));
    let knot = LongKnotPL::embedded(3, vertices)?;
    let jittered = knot.jitter(seed, JITTER);
    jittered.check_exact_embedding()?;
    Ok(jittered)
}

fn build_right_trefoil() -> LongKnotPL {
    let mut closed = closed_trefoil(24);
    let knot = long_from_closed(&closed, 11).expect("trefoil polygon is embedded");
    // right-handed: all three crossings positive when viewed from +z
    if writhe(&knot, [0.0, 0.0, 1.0]).expect("generic view") < 0 {
        for p in &mut closed {
            p[2] = -p[2];
        }
        return long_from_closed(&closed, 11).expect("trefoil polygon is embedded");
    }
    knot
}

fn build_figure_eight() -> LongKnotPL {
    long_from_closed(&closed_figure_eight(30), 23).expect("figure-eight polygon is embedded")
}

/// The right trefoil with two of its crossings pushed together into
/// transverse double points. Each over strand is lowered by a vertical
/// piecewise linear hat, which keeps the plane projection fixed.
fn build_immersed_trefoil() -> LongKnotPL {
    let base = right_trefoil();
    let cs = crossings(&base, [0.0, 0.0, 1.0]).expect("generic view");
    assert_eq!(cs.len(), 3, "trefoil diagram has three crossings");
    let marks: Vec<f64> = cs.iter().flat_map(|c| [c.t_under, c.t_over]).collect();
    let pushed: Vec<f64> = cs.iter().take(2).flat_map(|c| [c.t_under, c.t_over]).collect();
    // keep the double points clear of nearby vertices, so both strands are
    // straight there on a scale the resolutions can use
    let mut vertices: Vec<(f64, Vec<f64>)> = base
        .params()
        .iter()
        .copied()
        .zip(base.points().iter().cloned())
        .filter(|(t, _)| pushed.iter().all(|d| (t - d).abs() >= VERTEX_CLEARANCE))
        .collect();
    let mut hats = Vec::new();
    let mut doubles = Vec::new();
    for c in cs.iter().take(2) {
        let gap = marks.iter().filter(|&&t| t != c.t_over).map(|t| (t - c.t_over).abs()).fold(f64::INFINITY, f64::min);
        let w = (0.45 * gap).min(HAT_WIDTH);
        let target = base.eval(c.t_under);
        let drop = target[2] - base.eval(c.t_over)[2];
        for t in [c.t_under, c.t_over - w, c.t_over + w] {
            if !vertices.iter().any(|v| v.0 == t) {
                vertices.push((t, base.eval(t)));
            }
        }
        vertices.retain(|v| v.0 != c.t_over);
        vertices.push((c.t_over, target));
        hats.push((c.t_over, w, drop));
        doubles.push((c.t_over.min(c.t_under), c.t_over.max(c.t_under)));
    }
    for (t, p) in &mut vertices {
        for &(centre, w, drop) in &hats {
            let weight = 1.0 - (*t - centre).abs() / w;
            if weight > 0.0 && *t != centre {
                p[2] += weight * drop;
            }
        }
    }
    vertices.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    LongKnotPL::immersed(3, vertices, doubles).expect("immersed trefoil construction")
}

fn cached(cell: &'static OnceLock<LongKnotPL>, build: fn() -> LongKnotPL) -> LongKnotPL {
    cell.get_or_init(build).clone()
}

pub fn right_trefoil() -> LongKnotPL {
    static CELL: OnceLock<LongKnotPL> = OnceLock::new();
    cached(&CELL, build_right_trefoil)
}

pub fn left_trefoil() -> LongKnotPL {
    right_trefoil().mirror()
}

pub fn figure_eight() -> LongKnotPL {
    static CELL: OnceLock<LongKnotPL> = OnceLock::new();
    cached(&CELL, build_figure_eight)
}

pub fn granny() -> LongKnotPL {
    static CELL: OnceLock<LongKnotPL> = OnceLock::new();
    cached(&CELL, || connect_sum(&right_trefoil(), &right_trefoil()).expect("sum of embedded knots"))
}

pub fn square() -> LongKnotPL {
    static CELL: OnceLock<LongKnotPL> = OnceLock::new();
    cached(&CELL, || connect_sum(&right_trefoil(), &left_trefoil()).expect("sum of embedded knots"))
}

pub fn immersed_trefoil() -> LongKnotPL {
    static CELL: OnceLock<LongKnotPL> = OnceLock::new();
    cached(&CELL, build_immersed_trefoil)
}

/// Looks up a library knot by name.
pub fn standard_knot(name: &str) -> Result<LongKnotPL> {
    Ok(match name {
        "unknot" => LongKnotPL::unknot(3),
        "trefoil" | "right_trefoil" => right_trefoil(),
        "left_trefoil" => left_trefoil(),
        "figure_eight" => figure_eight(),
        "granny" => granny(),
        "square" => square(),
        "immersed_trefoil" => immersed_trefoil(),
        other => return Err(Error::UnknownKnot(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::KnotKind;

    #[test]
    fn every_library_knot_is_valid() {
        for name in STANDARD_NAMES {
            let k = standard_knot(name).unwrap();
            k.validate().unwrap();
            if k.kind() == KnotKind::Embedded {
                let reach = k.reach_estimate().unwrap();
                assert!(reach > 0.0, "{name}");
                assert!(k.is_embedding_sampled(400, 0.05, reach.min(1.0) / 100.0), "{name}");
            }
        }
        assert_eq!(standard_knot("unknot").unwrap().interior_vertex_count(), 0);
        assert!(matches!(standard_knot("nope"), Err(Error::UnknownKnot(_))));
    }

    #[test]
    fn trefoil_is_right_handed() {
        let t = right_trefoil();
        let cs = crossings(&t, [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(cs.len(), 3);
        assert!(cs.iter().all(|c| c.sign == 1));
        assert_eq!(writhe(&left_trefoil(), [0.0, 0.0, 1.0]).unwrap(), -3);
    }

    #[test]
    fn immersed_trefoil_has_interleaved_double_points() {
        let g = immersed_trefoil();
        assert_eq!(g.kind(), KnotKind::Immersed);
        let dp = g.double_points();
        assert_eq!(dp.len(), 2);
        let (a, b) = (dp[0], dp[1]);
        // f(t1) = f(t3), f(t2) = f(t4) with t1 < t2 < t3 < t4
        assert!(a.0 < b.0 && b.0 < a.1 && a.1 < b.1, "{dp:?}");
        for &(s, t) in dp {
            assert_eq!(g.eval(s), g.eval(t));
        }
    }
}
