//! Alternating quadrisecants of polygonal long knots in `R^3` and their
//! signed count `v2`, with a Gauss-diagram oracle and a family count in `R^4`.

pub mod family;
pub mod oracle;
mod system;

use nalgebra::{DMatrix, DVector, Matrix6, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::knot::predicates::{dist_f, dot_f, norm_f, sub_f};
use crate::knot::LongKnotPL;
use crate::par::{self, Execution};
use system::{conditioning, linearise};

pub use family::{family_nu2, ConstantFamily, FamilyCount, FamilySolution, TwoParameterFamily};
pub use oracle::{v2_oracle, v2_oracle_directions};

/// Strictness of the alternation test, as a fraction of the `x3 x2` span.
pub const ALTERNATION_MARGIN: f64 = 1e-9;
/// Collinearity residual allowed after polishing, relative to the diameter.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Parameter tuples closer than this are the same quadrisecant.
pub const DEDUP_TOL: f64 = 1e-8;
/// Perturb-and-retry budget.
pub const MAX_RETRIES: usize = 5;
/// Default seed of the first degeneracy retry.
pub const PERTURBATION_SEED: u64 = 0x5175_ad5e;

/// Orientation of the collinearity co-orientation, fixed so that the
/// library right trefoil counts `+1`.
const SIGN_CONVENTION: i32 = -1;

/// Hit parameters closer than this to each other's points are treated as
/// the same point (a boundary configuration).
const COINCIDENCE: f64 = 1e-9;

/// `true` iff the order along the line, oriented from `x3` to `x2`, is
/// `x3, x1, x4, x2`. Fails on non-collinear input.
pub fn is_alternating(x1: &[f64], x2: &[f64], x3: &[f64], x4: &[f64]) -> Result<bool> {
    let pts = [x1, x2, x3, x4];
    let scale = pts.iter().flat_map(|p| p.iter()).fold(1.0f64, |a, c| a.max(c.abs()));
    let lin = linearise(pts, &[], [2, 1, 0, 3])
        .ok_or_else(|| Error::Degenerate("x3 and x2 coincide".into()))?;
    let off = lin.residual.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    if off > 1e-9 * scale {
        return Err(Error::InvalidParameter(format!("points are not collinear (offset {off:e})")));
    }
    Ok(alternates(lin.lambda))
}

fn alternates([l1, l4]: [f64; 2]) -> bool {
    let m = ALTERNATION_MARGIN;
    m < l1 && l1 + m < l4 && l4 < 1.0 - m
}

/// A line meeting four segments, with the hit parameter on each.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transversal {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    pub params: [f64; 4],
    pub residual: f64,
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn lerp(p: &[f64], q: &[f64], s: f64) -> Vec<f64> {
    p.iter().zip(q).map(|(a, b)| a + s * (b - a)).collect()
}

/// Parameter on segment `(q0, q1)` of its closest approach to the line
/// `p + l u`, or `None` when parallel.
fn closest_on_segment(p: &[f64], u: &[f64], q0: &[f64], q1: &[f64]) -> Option<f64> {
    let v = sub_f(q1, q0);
    let w = sub_f(q0, p);
    let (a, b, c) = (dot_f(u, u), dot_f(u, &v), dot_f(&v, &v));
    let (d, e) = (dot_f(u, &w), dot_f(&v, &w));
    let den = a * c - b * b;
    if den <= 1e-14 * a * c {
        return None;
    }
    Some((b * d - a * e) / den)
}

/// Candidate lines meeting the four lines through the segments, from the
/// Plücker quadric on the null space of the incidence system.
fn plucker_candidates(segs: &[(&[f64], &[f64]); 4]) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let mut rows = Vec::with_capacity(4);
    for (p0, p1) in segs {
        let d = sub_f(p1, p0);
        let n = norm_f(&d);
        if !(n > 0.0) {
            return Err(Error::Degenerate("zero-length segment".into()));
        }
        let d: Vec<f64> = d.iter().map(|x| x / n).collect();
        let m = cross(p0, &d);
        // X = (D, M) meets (d, m) iff D.m + M.d = 0
        rows.push([m[0], m[1], m[2], d[0], d[1], d[2]]);
    }
    let a = DMatrix::from_fn(4, 6, |r, c| rows[r][c]);
    let ata: Matrix6<f64> = Matrix6::from_iterator((a.transpose() * &a).iter().copied());
    let eig = SymmetricEigen::new(ata);
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].partial_cmp(&eig.eigenvalues[y]).expect("finite"));
    let top = eig.eigenvalues[order[5]];
    if eig.eigenvalues[order[2]] < 1e-18 * top.max(1e-300) {
        return Err(Error::Degenerate("incidence system has rank below four".into()));
    }
    let u: Vec<f64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
    let v: Vec<f64> = eig.eigenvectors.column(order[1]).iter().copied().collect();
    let pl = |x: &[f64], y: &[f64]| dot_f(&x[..3], &y[3..]);
    // D.M on cos(phi) U + sin(phi) V
    let qa = pl(&u, &u);
    let qc = pl(&v, &v);
    let qb = pl(&u, &v) + pl(&v, &u);
    let mean = (qa + qc) / 2.0;
    let amp = (((qa - qc) / 2.0).powi(2) + (qb / 2.0).powi(2)).sqrt();
    if amp < 1e-13 {
        if mean.abs() < 1e-13 {
            return Err(Error::Degenerate("every line of the pencil is a transversal".into()));
        }
        return Ok(Vec::new());
    }
    let ratio = -mean / amp;
    if ratio.abs() > 1.0 {
        return Ok(Vec::new());
    }
    if 1.0 - ratio.abs() < 1e-12 {
        return Err(Error::Degenerate("tangential transversal".into()));
    }
    let psi = (qb / 2.0).atan2((qa - qc) / 2.0);
    let spread = ratio.acos();
    let mut out = Vec::new();
    for two_phi in [psi + spread, psi - spread] {
        let (s, c) = (two_phi / 2.0).sin_cos();
        let x: Vec<f64> = u.iter().zip(&v).map(|(a, b)| c * a + s * b).collect();
        let (dd, mm) = (&x[..3], &x[3..]);
        let nd = norm_f(dd);
        if nd < 1e-9 {
            continue;
        }
        let point: Vec<f64> = cross(dd, mm).iter().map(|c| c / (nd * nd)).collect();
        let dir: Vec<f64> = dd.iter().map(|c| c / nd).collect();
        out.push((point, dir));
    }
    Ok(out)
}

/// Newton polishing of the hit parameters. `roles` names the two points
/// spanning the reference line and the two tested against it.
fn polish(segs: &[(&[f64], &[f64]); 4], mut s: [f64; 4], roles: [usize; 4], scale: f64) -> Option<([f64; 4], f64)> {
    let dirs: Vec<Vec<f64>> = segs.iter().map(|(p, q)| sub_f(q, p)).collect();
    let dx: Vec<[Vec<f64>; 4]> =
        (0..4).map(|v| std::array::from_fn(|k| if k == v { dirs[k].clone() } else { vec![0.0; 3] })).collect();
    let mut best = f64::INFINITY;
    for _ in 0..40 {
        let pts: Vec<Vec<f64>> = (0..4).map(|k| lerp(segs[k].0, segs[k].1, s[k])).collect();
        let lin = linearise([&pts[0], &pts[1], &pts[2], &pts[3]], &dx, roles)?;
        let r = lin.residual.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        best = r;
        if r <= 1e-14 * scale {
            break;
        }
        let step = lin.jacobian.lu().solve(&(-DVector::from_vec(lin.residual)))?;
        for k in 0..4 {
            s[k] += step[k];
        }
        if s.iter().any(|x| !x.is_finite() || x.abs() > 10.0) {
            return None;
        }
    }
    Some((s, best))
}

fn diameter(points: &[Vec<f64>]) -> f64 {
    let n = points[0].len();
    (0..n)
        .map(|i| {
            let lo = points.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
            (hi - lo).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

fn transversals_inner(segs: &[(&[f64], &[f64]); 4], scale: f64, roles: [usize; 4]) -> Result<Vec<Transversal>> {
    let mut out: Vec<Transversal> = Vec::new();
    for (p, u) in plucker_candidates(segs)? {
        let mut s = [0.0; 4];
        let mut ok = true;
        for k in 0..4 {
            match closest_on_segment(&p, &u, segs[k].0, segs[k].1) {
                Some(v) if (-0.05..=1.05).contains(&v) => s[k] = v,
                _ => ok = false,
            }
        }
        if !ok {
            continue;
        }
        let pts: Vec<Vec<f64>> = (0..4).map(|k| lerp(segs[k].0, segs[k].1, s[k])).collect();
        // lines through a shared vertex of two segments lie on the boundary
        let coincident = (0..4).any(|i| (i + 1..4).any(|j| dist_f(&pts[i], &pts[j]) < COINCIDENCE * scale));
        if coincident {
            continue;
        }
        let Some((s, residual)) = polish(segs, s, roles, scale) else {
            return Err(Error::Degenerate("collinearity system is singular at a transversal".into()));
        };
        if residual > RESIDUAL_TOL * scale {
            return Err(Error::Degenerate(format!("transversal did not polish (residual {residual:e})")));
        }
        if s.iter().any(|&v| !(-1e-12..=1.0 + 1e-12).contains(&v)) {
            continue;
        }
        let pts: Vec<Vec<f64>> = (0..4).map(|k| lerp(segs[k].0, segs[k].1, s[k])).collect();
        let (a, b) = (roles[0], roles[1]);
        let d = sub_f(&pts[b], &pts[a]);
        let nd = norm_f(&d);
        let direction: Vec<f64> = d.iter().map(|c| c / nd).collect();
        if out.iter().any(|t| t.params.iter().zip(&s).all(|(x, y)| (x - y).abs() < DEDUP_TOL)) {
            continue;
        }
        out.push(Transversal { point: pts[a].clone(), direction, params: s, residual });
    }
    Ok(out)
}

/// All lines meeting the four segments in `R^3`, polished to residual at
/// most `RESIDUAL_TOL` times the configuration diameter.
pub fn segment_transversals(segs: &[(&[f64], &[f64]); 4]) -> Result<Vec<Transversal>> {
    if segs.iter().any(|(p, q)| p.len() != 3 || q.len() != 3) {
        return Err(Error::DimensionMismatch { expected: 3, found: segs[0].0.len() });
    }
    let pts: Vec<Vec<f64>> = segs.iter().flat_map(|(p, q)| [p.to_vec(), q.to_vec()]).collect();
    let scale = diameter(&pts).max(1e-300);
    // reference line through the two segments farthest apart
    let mid = |k: usize| lerp(segs[k].0, segs[k].1, 0.5);
    let mut roles = [0, 1, 2, 3];
    let mut far = -1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            let d = dist_f(&mid(i), &mid(j));
            if d > far {
                far = d;
                let rest: Vec<usize> = (0..4).filter(|&k| k != i && k != j).collect();
                roles = [i, j, rest[0], rest[1]];
            }
        }
    }
    transversals_inner(segs, scale, roles)
}

/// An alternating quadrisecant: `f(t1), .., f(t4)` collinear in the order
/// `x3, x1, x4, x2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quadrisecant {
    pub params: [f64; 4],
    pub points: [Vec<f64>; 4],
    pub line_point: Vec<f64>,
    pub line_direction: Vec<f64>,
    pub sign: i32,
    pub residual: f64,
}

/// Options for [`enumerate_alternating_quadrisecants`].
#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    pub execution: Execution,
    /// Bounding-box pruning of segment quadruples.
    pub prune: bool,
    /// Seed of the first degeneracy retry; retry `k` uses `seed + k`.
    pub seed: u64,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { execution: Execution::Parallel, prune: true, seed: PERTURBATION_SEED }
    }
}

#[derive(Clone, Copy)]
struct Aabb {
    lo: [f64; 3],
    hi: [f64; 3],
}

impl Aabb {
    fn of(points: &[&[f64]], pad: f64) -> Aabb {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in points {
            for i in 0..3 {
                lo[i] = lo[i].min(p[i] - pad);
                hi[i] = hi[i].max(p[i] + pad);
            }
        }
        Aabb { lo, hi }
    }

    fn extend(&mut self, o: &Aabb) {
        for i in 0..3 {
            self.lo[i] = self.lo[i].min(o.lo[i]);
            self.hi[i] = self.hi[i].max(o.hi[i]);
        }
    }

    fn meets(&self, o: &Aabb) -> bool {
        (0..3).all(|i| self.lo[i] <= o.hi[i] && o.lo[i] <= self.hi[i])
    }
}

fn collinear_segments(a: (&[f64], &[f64]), b: (&[f64], &[f64]), scale: f64) -> bool {
    let d = sub_f(a.1, a.0);
    let nd = norm_f(&d);
    [b.0, b.1].iter().all(|q| norm_f(&cross(&sub_f(q, a.0), &d)) < 1e-12 * scale * nd)
}

/// Signed orientation of the collinearity system at a quadrisecant of `f`.
/// Fails when the system is singular there.
pub fn quadrisecant_sign(q: &Quadrisecant, f: &LongKnotPL) -> Result<i32> {
    let idx: Vec<usize> = q.params.iter().map(|&t| f.segment_index(t)).collect();
    let pts = f.points();
    let dx: Vec<[Vec<f64>; 4]> = (0..4)
        .map(|v| {
            std::array::from_fn(|k| {
                if k == v {
                    sub_f(&pts[idx[k] + 1], &pts[idx[k]])
                } else {
                    vec![0.0; f.ambient_dim()]
                }
            })
        })
        .collect();
    let x = [&q.points[0][..], &q.points[1][..], &q.points[2][..], &q.points[3][..]];
    let lin = linearise(x, &dx, [2, 1, 0, 3]).ok_or_else(|| Error::Degenerate("x3 = x2".into()))?;
    if conditioning(&lin.jacobian) < 1e-9 {
        return Err(Error::Degenerate("quadrisecant is not transverse".into()));
    }
    let det = lin.jacobian.determinant();
    Ok(if det > 0.0 { SIGN_CONVENTION } else { -SIGN_CONVENTION })
}

fn quadruple(f: &LongKnotPL, seg: [usize; 4], scale: f64) -> Result<Vec<Quadrisecant>> {
    let s: [(&[f64], &[f64]); 4] = std::array::from_fn(|k| f.segment(seg[k]));
    let ts = f.params();
    let mut out = Vec::new();
    for tr in transversals_inner(&s, scale, [2, 1, 0, 3])? {
        let points: [Vec<f64>; 4] = std::array::from_fn(|k| lerp(s[k].0, s[k].1, tr.params[k]));
        let x = [&points[0][..], &points[1][..], &points[2][..], &points[3][..]];
        let Some(lin) = linearise(x, &[], [2, 1, 0, 3]) else { continue };
        if !alternates(lin.lambda) {
            continue;
        }
        let params: [f64; 4] = std::array::from_fn(|k| ts[seg[k]] + tr.params[k] * (ts[seg[k] + 1] - ts[seg[k]]));
        let mut q = Quadrisecant {
            params,
            points,
            line_point: tr.point,
            line_direction: tr.direction,
            sign: 0,
            residual: tr.residual,
        };
        q.sign = quadrisecant_sign(&q, f)?;
        out.push(q);
    }
    Ok(out)
}

/// All alternating quadrisecants of a knot in `R^3`, sorted by parameters.
/// Fails with [`Error::Degenerate`] on non-generic input; see [`v2_report`]
/// for the perturb-and-retry wrapper.
pub fn enumerate_alternating_quadrisecants(f: &LongKnotPL, opts: EnumerateOptions) -> Result<Vec<Quadrisecant>> {
    if f.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: f.ambient_dim() });
    }
    let m = f.segment_count();
    if m < 4 {
        return Ok(Vec::new());
    }
    let scale = diameter(f.points()).max(1e-300);
    let pad = 1e-9 * scale;
    let boxes: Vec<Aabb> = (0..m).map(|i| {
        let (p, q) = f.segment(i);
        Aabb::of(&[p, q], pad)
    }).collect();
    let collinear: Vec<Vec<bool>> =
        (0..m).map(|i| (0..m).map(|j| i != j && collinear_segments(f.segment(i), f.segment(j), scale)).collect()).collect();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let found = par::flat_map(opts.execution, &pairs, |&(i1, i2)| {
        let mut local = Vec::new();
        if collinear[i1][i2] {
            return local;
        }
        for i3 in i2 + 1..m {
            if collinear[i1][i3] || collinear[i2][i3] {
                continue;
            }
            // x1 and x4 lie between x3 and x2
            let (a2, b2) = f.segment(i2);
            let (a3, b3) = f.segment(i3);
            let hull = Aabb::of(&[a2, b2, a3, b3], pad);
            if opts.prune && !boxes[i1].meets(&hull) {
                continue;
            }
            for i4 in i3 + 1..m {
                if collinear[i1][i4] || collinear[i2][i4] || collinear[i3][i4] {
                    continue;
                }
                if opts.prune && !boxes[i4].meets(&hull) {
                    continue;
                }
                local.push(quadruple(f, [i1, i2, i3, i4], scale));
            }
        }
        local
    });
    let mut all = Vec::new();
    for r in found {
        all.extend(r?);
    }
    all.sort_by(|a, b| a.params.partial_cmp(&b.params).expect("finite"));
    let mut out: Vec<Quadrisecant> = Vec::new();
    for q in all {
        if let Some(prev) = out.last() {
            if prev.params.iter().zip(&q.params).all(|(x, y)| (x - y).abs() < DEDUP_TOL) {
                continue;
            }
        }
        out.push(q);
    }
    Ok(out)
}

/// A perturbation applied to reach generic position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Perturbation {
    pub seed: u64,
    pub magnitude: f64,
}

/// Result of [`v2_report`].
#[derive(Clone, Debug, Serialize)]
pub struct V2Report {
    pub v2: i64,
    pub quadrisecants: Vec<Quadrisecant>,
    /// The perturbation in effect for the reported quadrisecants, if any.
    pub perturbation: Option<Perturbation>,
    /// Every attempt that hit a degeneracy, in order.
    pub failed_attempts: Vec<String>,
}

/// `v2` as the signed count of alternating quadrisecants, perturbing the
/// knot by seeded jitter of size `reach/100 * 2^k` on degeneracy.
pub fn v2_report(f: &LongKnotPL, opts: EnumerateOptions) -> Result<V2Report> {
    f.validate()?;
    let mut failed = Vec::new();
    match enumerate_alternating_quadrisecants(f, opts) {
        Ok(qs) => return Ok(report(qs, None, failed)),
        Err(Error::Degenerate(msg)) => failed.push(msg),
        Err(e) => return Err(e),
    }
    let reach = f.reach_estimate()?;
    for k in 0..MAX_RETRIES {
        let p = Perturbation { seed: opts.seed.wrapping_add(k as u64), magnitude: reach / 100.0 * (1u64 << k) as f64 };
        let g = f.jitter(p.seed, p.magnitude);
        if let Err(e) = g.validate() {
            failed.push(format!("perturbation {k}: {e}"));
            continue;
        }
        match enumerate_alternating_quadrisecants(&g, opts) {
            Ok(qs) => return Ok(report(qs, Some(p), failed)),
            Err(Error::Degenerate(msg)) => failed.push(msg),
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegeneracyBudgetExhausted { retries: MAX_RETRIES })
}

fn report(quadrisecants: Vec<Quadrisecant>, perturbation: Option<Perturbation>, failed_attempts: Vec<String>) -> V2Report {
    let v2 = quadrisecants.iter().map(|q| q.sign as i64).sum();
    V2Report { v2, quadrisecants, perturbation, failed_attempts }
}

/// The signed count of alternating quadrisecants.
pub fn v2(f: &LongKnotPL) -> Result<i64> {
    Ok(v2_report(f, EnumerateOptions::default())?.v2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::library;

    #[test]
    fn alternation_pattern() {
        let p = |x: f64| vec![x, 0.0, 0.0];
        assert!(is_alternating(&p(1.0), &p(3.0), &p(0.0), &p(2.0)).unwrap());
        assert!(!is_alternating(&p(0.0), &p(1.0), &p(2.0), &p(3.0)).unwrap());
        // [x1, x4] overlaps [x3, x2] without being contained in it
        assert!(!is_alternating(&p(1.0), &p(2.0), &p(0.0), &p(3.0)).unwrap());
        // reversed orientation of the line is the same pattern
        assert!(is_alternating(&p(-1.0), &p(-3.0), &p(0.0), &p(-2.0)).unwrap());
        assert!(is_alternating(&[0.0, 1.0, 0.0], &p(3.0), &p(0.0), &p(2.0)).is_err());
    }

    #[test]
    fn axis_transversal_found() {
        // four skew segments, each crossing the x axis at x = k
        let segs_owned: Vec<(Vec<f64>, Vec<f64>)> = (0..4)
            .map(|k| {
                let a = k as f64 * 0.7;
                let (c, s) = (a.cos(), a.sin());
                (vec![k as f64, -c, -s], vec![k as f64, c, s])
            })
            .collect();
        let segs: [(&[f64], &[f64]); 4] = std::array::from_fn(|k| (&segs_owned[k].0[..], &segs_owned[k].1[..]));
        let ts = segment_transversals(&segs).unwrap();
        let axis = ts.iter().find(|t| t.params.iter().all(|s| (s - 0.5).abs() < 1e-9)).expect("x axis");
        assert!(axis.direction[1].abs() < 1e-9 && axis.direction[2].abs() < 1e-9);
        assert!(axis.residual <= 1e-10 * 3.0);
    }

    /// Brute force: does any line through a grid point of the first segment
    /// and a grid point of the second pass within `tol` of the other two?
    fn brute_force_has_transversal(segs: &[(&[f64], &[f64]); 4], n: usize, tol: f64) -> bool {
        for i in 0..=n {
            for j in 0..=n {
                let p = lerp(segs[0].0, segs[0].1, i as f64 / n as f64);
                let q = lerp(segs[1].0, segs[1].1, j as f64 / n as f64);
                let u = sub_f(&q, &p);
                let close = segs[2..].iter().all(|(a, b)| {
                    (0..=n).any(|k| {
                        let x = lerp(a, b, k as f64 / n as f64);
                        let w = sub_f(&x, &p);
                        norm_f(&cross(&w, &u)) / norm_f(&u) < tol
                    })
                });
                if close {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn no_transversal_for_far_apart_segments() {
        let owned = [
            (vec![0.0, 0.0, 0.0], vec![0.1, 0.0, 0.0]),
            (vec![5.0, 5.0, 0.0], vec![5.0, 5.1, 0.0]),
            (vec![-3.0, 4.0, 2.0], vec![-3.0, 4.0, 2.1]),
            (vec![2.0, -6.0, -3.0], vec![2.05, -6.05, -3.0]),
        ];
        let segs: [(&[f64], &[f64]); 4] = std::array::from_fn(|k| (&owned[k].0[..], &owned[k].1[..]));
        assert!(segment_transversals(&segs).unwrap().is_empty());
        assert!(!brute_force_has_transversal(&segs, 40, 0.05));
    }

    #[test]
    fn coplanar_quadruple_is_degenerate() {
        let owned = [
            (vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]),
            (vec![0.0, 1.0, 0.0], vec![1.0, 1.5, 0.0]),
            (vec![0.0, 2.0, 0.0], vec![1.0, 2.2, 0.0]),
            (vec![0.0, 3.0, 0.0], vec![1.0, 3.7, 0.0]),
        ];
        let segs: [(&[f64], &[f64]); 4] = std::array::from_fn(|k| (&owned[k].0[..], &owned[k].1[..]));
        assert!(matches!(segment_transversals(&segs), Err(Error::Degenerate(_))));
    }

    #[test]
    fn unknot_has_none() {
        assert!(enumerate_alternating_quadrisecants(&LongKnotPL::unknot(3), EnumerateOptions::default())
            .unwrap()
            .is_empty());
        assert_eq!(v2(&LongKnotPL::unknot(3)).unwrap(), 0);
    }

    #[test]
    fn right_trefoil_counts_plus_one() {
        let r = v2_report(&library::right_trefoil(), EnumerateOptions::default()).unwrap();
        assert!(!r.quadrisecants.is_empty());
        assert_eq!(r.v2, 1);
        for q in &r.quadrisecants {
            assert!(q.params.windows(2).all(|w| w[0] < w[1]));
            assert!(is_alternating(&q.points[0], &q.points[1], &q.points[2], &q.points[3]).unwrap());
        }
    }

    #[test]
    fn pruning_and_threads_do_not_change_the_output() {
        let f = library::figure_eight();
        let runs: Vec<Vec<[f64; 4]>> = [(Execution::Parallel, true), (Execution::Sequential, true), (Execution::Parallel, false)]
            .into_iter()
            .map(|(execution, prune)| {
                enumerate_alternating_quadrisecants(&f, EnumerateOptions { execution, prune, ..Default::default() })
                    .unwrap()
                    .into_iter()
                    .map(|q| q.params)
                    .collect()
            })
            .collect();
        for r in &runs[1..] {
            assert_eq!(r.len(), runs[0].len());
            for (a, b) in r.iter().zip(&runs[0]) {
                assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-8));
            }
        }
    }
}
