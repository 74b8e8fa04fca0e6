//! Planar projections of long knots in `R^3`: crossings with signs.

use super::predicates::{dot_f, norm_f, sub_f};
use super::LongKnotPL;
use crate::error::{Error, Result};

/// Tails are represented by segments reaching this far out.
const TAIL_REACH: f64 = 8.0;

/// A crossing of a projection, with parameters on the over and under strand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub t_over: f64,
    pub t_under: f64,
    /// `sign((T_over x T_under) . d)` for viewing direction `d`.
    pub sign: i32,
}

fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// An orthonormal pair spanning the plane orthogonal to the unit vector `d`.
pub fn plane_basis(d: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if d[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = cross3(d, &helper);
    let n1 = norm_f(&e1);
    let e1 = [e1[0] / n1, e1[1] / n1, e1[2] / n1];
    let e2 = cross3(d, &e1);
    (e1, e2)
}

/// Segments of the knot with the tails included, as `(t0, t1, p0, p1)`.
fn segments_with_tails(f: &LongKnotPL) -> Vec<(f64, f64, Vec<f64>, Vec<f64>)> {
    let n = f.ambient_dim();
    let axis = |x: f64| {
        let mut p = vec![0.0; n];
        p[0] = x;
        p
    };
    let mut segs = vec![(-TAIL_REACH, -1.0, axis(-TAIL_REACH), axis(-1.0))];
    let ts = f.params();
    let ps = f.points();
    for i in 0..f.segment_count() {
        segs.push((ts[i], ts[i + 1], ps[i].clone(), ps[i + 1].clone()));
    }
    segs.push((1.0, TAIL_REACH, axis(1.0), axis(TAIL_REACH)));
    segs
}

/// Crossings of the projection along the unit direction `d`, viewed from
/// `+d`. Fails with [`Error::Degenerate`] for non-generic directions.
pub fn crossings(f: &LongKnotPL, d: [f64; 3]) -> Result<Vec<Crossing>> {
    if f.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: f.ambient_dim() });
    }
    let nd = norm_f(&d);
    let d = [d[0] / nd, d[1] / nd, d[2] / nd];
    if d[0].abs() > 0.9 {
        return Err(Error::Degenerate("projection too close to the long axis".into()));
    }
    let (e1, e2) = plane_basis(&d);
    let segs = segments_with_tails(f);
    let proj = |p: &[f64]| [dot_f(p, &e1), dot_f(p, &e2)];
    let tol = 1e-9;
    let mut out = Vec::new();
    let mut points: Vec<[f64; 2]> = Vec::new();
    for i in 0..segs.len() {
        let (a0, a1) = (proj(&segs[i].2), proj(&segs[i].3));
        let da = [a1[0] - a0[0], a1[1] - a0[1]];
        let la = (da[0] * da[0] + da[1] * da[1]).sqrt();
        if la < tol {
            return Err(Error::Degenerate(format!("segment {i} projects to a point")));
        }
        for j in i + 1..segs.len() {
            let (b0, b1) = (proj(&segs[j].2), proj(&segs[j].3));
            let db = [b1[0] - b0[0], b1[1] - b0[1]];
            let lb = (db[0] * db[0] + db[1] * db[1]).sqrt();
            let r = [b0[0] - a0[0], b0[1] - a0[1]];
            let den = da[0] * db[1] - da[1] * db[0];
            if den.abs() < tol * la * lb {
                // parallel in the plane: a problem only when the images overlap
                let off = (r[0] * da[1] - r[1] * da[0]).abs() / la;
                if off < tol {
                    let s0 = (r[0] * da[0] + r[1] * da[1]) / (la * la);
                    let s1 = ((b1[0] - a0[0]) * da[0] + (b1[1] - a0[1]) * da[1]) / (la * la);
                    let (lo, hi) = (s0.min(s1), s0.max(s1));
                    let touching = hi < tol || lo > 1.0 - tol;
                    let collinear_chain = j == i + 1 && dot_f(&da, &db) > 0.0;
                    if !touching && !collinear_chain && hi > -tol && lo < 1.0 + tol {
                        return Err(Error::Degenerate(format!("segments {i} and {j} overlap in projection")));
                    }
                }
                continue;
            }
            if j == i + 1 {
                continue;
            }
            let s = (r[0] * db[1] - r[1] * db[0]) / den;
            let u = (r[0] * da[1] - r[1] * da[0]) / den;
            let margin = 1e-7;
            if s < -margin || s > 1.0 + margin || u < -margin || u > 1.0 + margin {
                continue;
            }
            if s < margin || s > 1.0 - margin || u < margin || u > 1.0 - margin {
                return Err(Error::Degenerate("crossing too close to a vertex".into()));
            }
            let pa: Vec<f64> = segs[i].2.iter().zip(&segs[i].3).map(|(x, y)| x + s * (y - x)).collect();
            let pb: Vec<f64> = segs[j].2.iter().zip(&segs[j].3).map(|(x, y)| x + u * (y - x)).collect();
            let (ha, hb) = (dot_f(&pa, &d), dot_f(&pb, &d));
            if (ha - hb).abs() < tol {
                return Err(Error::Degenerate("strands meet in space".into()));
            }
            let ta = segs[i].0 + s * (segs[i].1 - segs[i].0);
            let tb = segs[j].0 + u * (segs[j].1 - segs[j].0);
            let ta_dir = sub_f(&segs[i].3, &segs[i].2);
            let tb_dir = sub_f(&segs[j].3, &segs[j].2);
            let (t_over, t_under, dir_over, dir_under) =
                if ha > hb { (ta, tb, ta_dir, tb_dir) } else { (tb, ta, tb_dir, ta_dir) };
            let c = cross3(&dir_over, &dir_under);
            let sign = if dot_f(&c, &d) > 0.0 { 1 } else { -1 };
            let point = [a0[0] + s * da[0], a0[1] + s * da[1]];
            if points.iter().any(|q| (q[0] - point[0]).hypot(q[1] - point[1]) < 1e-8) {
                return Err(Error::Degenerate("triple point in projection".into()));
            }
            points.push(point);
            out.push(Crossing { t_over, t_under, sign });
        }
    }
    out.sort_by(|a, b| a.t_over.partial_cmp(&b.t_over).expect("finite"));
    Ok(out)
}

/// Sum of crossing signs.
pub fn writhe(f: &LongKnotPL, d: [f64; 3]) -> Result<i32> {
    Ok(crossings(f, d)?.iter().map(|c| c.sign).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknot_has_no_crossings() {
        let u = LongKnotPL::unknot(3);
        assert!(crossings(&u, [0.0, 0.0, 1.0]).unwrap().is_empty());
        assert!(crossings(&u, [1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn single_kink_crossing() {
        // over strand along (1, 0.5), under strand along (0.1, -1): negative
        let k = LongKnotPL::embedded(
            3,
            vec![
                (-1.0, vec![-1.0, 0.0, 0.0]),
                (-0.8, vec![-0.6, 0.0, 0.0]),
                (-0.4, vec![0.4, 0.5, 0.2]),
                (-0.2, vec![0.4, 0.8, 0.0]),
                (0.0, vec![-0.2, 0.8, 0.0]),
                (0.4, vec![-0.1, -0.2, -0.2]),
                (0.8, vec![0.6, 0.0, 0.0]),
                (1.0, vec![1.0, 0.0, 0.0]),
            ],
        )
        .unwrap();
        let cs = crossings(&k, [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].sign, -1);
        assert!(-0.8 < cs[0].t_over && cs[0].t_over < -0.4);
        assert!(0.0 < cs[0].t_under && cs[0].t_under < 0.4);
        assert_eq!(writhe(&k.mirror(), [0.0, 0.0, 1.0]).unwrap(), 1);
    }
}
