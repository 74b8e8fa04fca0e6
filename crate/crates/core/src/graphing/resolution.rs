//! Resolutions of a long curve with two transverse double points.

use crate::error::{Error, Result};
use crate::knot::predicates::{dot_f, norm_f, point_segment_distance, sub_f};
use crate::knot::{ImmersedKnotPL, KnotKind, LongKnotPL};
use crate::quadrisecant::TwoParameterFamily;

/// Directions must be unit and normal to both strands up to this tolerance.
pub const DIRECTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
struct Push {
    /// Vertex moved by the push.
    vertex: usize,
    /// Unit tangents of the two strands at the double point.
    tangents: [Vec<f64>; 2],
    /// Orthonormal basis of the normal space of both tangents.
    basis: Vec<Vec<f64>>,
}

/// The resolution map `S_1 x S_2 -> K_{n,1}`: at each double point the
/// vertex of the lower-parameter strand is moved by `h` in the chosen
/// normal direction, turning its two segments into a tent.
#[derive(Clone, Debug)]
pub struct ResolutionFamily {
    base: LongKnotPL,
    pushes: [Push; 2],
    height: f64,
    double_points: Vec<(f64, f64)>,
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = norm_f(&v);
    v.into_iter().map(|x| x / n).collect()
}

/// Unit tangent at a vertex, averaging the two sides.
fn vertex_tangent(ts_pts: (&[f64], &[Vec<f64>]), k: usize) -> Vec<f64> {
    let pts = ts_pts.1;
    let a = unit(sub_f(&pts[k], &pts[k - 1]));
    let b = unit(sub_f(&pts[k + 1], &pts[k]));
    unit(a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

/// Orthonormal basis of the complement of `span(a, b)`, oriented so that
/// `(a, b', e_1, .., e_{n-2})` is positive, with `b'` the Gram-Schmidt of `b`.
fn normal_basis(a: &[f64], b: &[f64]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut span = vec![a.to_vec()];
    let d = dot_f(a, b);
    span.push(unit(b.iter().zip(a).map(|(x, y)| x - d * y).collect()));
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        for s in &span {
            let d = dot_f(&e, s);
            for (x, y) in e.iter_mut().zip(s) {
                *x -= d * y;
            }
        }
        let len = norm_f(&e);
        if len > 0.5 / (n as f64).sqrt() && span.len() < n {
            span.push(e.into_iter().map(|x| x / len).collect());
        }
    }
    let m = nalgebra::DMatrix::from_fn(n, n, |r, c| span[c][r]);
    if m.determinant() < 0.0 {
        for x in &mut span[n - 1] {
            *x = -*x;
        }
    }
    span.split_off(2)
}

impl ResolutionFamily {
    pub fn new(g: &ImmersedKnotPL) -> Result<Self> {
        if g.kind() != KnotKind::Immersed || g.double_points().len() != 2 {
            return Err(Error::InvalidKnot("resolution needs exactly two double points".into()));
        }
        let n = g.ambient_dim();
        let mut ts = g.params().to_vec();
        let mut pts = g.points().to_vec();
        let insert = |t: f64, ts: &mut Vec<f64>, pts: &mut Vec<Vec<f64>>| -> usize {
            let k = ts.partition_point(|&s| s < t);
            if ts[k] != t {
                let p = g.eval(t);
                ts.insert(k, t);
                pts.insert(k, p);
            }
            k
        };
        let mut centres = Vec::new();
        for &(ta, _) in g.double_points() {
            insert(ta, &mut ts, &mut pts);
            centres.push(ta);
        }
        let index = |t: f64, ts: &[f64]| ts.iter().position(|&s| s == t).expect("inserted vertex");
        let mut pushes = Vec::new();
        for (i, &(ta, tb)) in g.double_points().iter().enumerate() {
            let ka = index(centres[i], &ts);
            let kb = ts.partition_point(|&s| s < tb);
            let ta_dir = vertex_tangent((&ts, &pts), ka);
            let tb_dir = if ts[kb] == tb { vertex_tangent((&ts, &pts), kb) } else { unit(sub_f(&pts[kb], &pts[kb - 1])) };
            let cos = dot_f(&ta_dir, &tb_dir);
            if cos.abs() > 1.0 - 1e-9 {
                return Err(Error::InvalidKnot(format!("double point at ({ta}, {tb}) is not transverse")));
            }
            let basis = normal_basis(&ta_dir, &tb_dir);
            pushes.push(Push { vertex: ka, tangents: [ta_dir, tb_dir], basis });
        }
        // height: a quarter of the clearance from each double point to the
        // segments away from both strands
        let mut clearance = f64::INFINITY;
        for (i, &(ta, tb)) in g.double_points().iter().enumerate() {
            let x = &pts[pushes[i].vertex];
            for s in 0..ts.len() - 1 {
                let near = |t: f64| ts[s] <= t + 0.03 && ts[s + 1] >= t - 0.03;
                if near(ta) || near(tb) {
                    continue;
                }
                clearance = clearance.min(point_segment_distance(x, &pts[s], &pts[s + 1]));
            }
        }
        let height = (clearance / 4.0).min(0.05);
        let base = LongKnotPL::raw(n, ts, pts);
        let pushes: [Push; 2] = pushes.try_into().expect("two double points");
        Ok(ResolutionFamily { base, pushes, height, double_points: g.double_points().to_vec() })
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.ambient_dim()
    }

    /// The same family with every free base vertex moved by a fixed seeded
    /// vector of length at most `magnitude`, independent of the angles.
    /// Needs `magnitude < height / 2`; members on a `samples x samples`
    /// grid of angles are checked to be embedded.
    pub fn perturbed(&self, seed: u64, magnitude: f64, samples: usize) -> Result<Self> {
        if !(magnitude >= 0.0 && magnitude < self.height / 2.0) {
            return Err(Error::PerturbationTooLarge { magnitude, limit: self.height / 2.0 });
        }
        let fam = ResolutionFamily { base: self.base.jitter(seed, magnitude), ..self.clone() };
        if fam.ambient_dim() >= 4 {
            for a in 0..samples {
                for b in 0..samples {
                    let th = |i: usize| std::f64::consts::TAU * i as f64 / samples as f64;
                    fam.at_angles(th(a), th(b))?;
                }
            }
        }
        Ok(fam)
    }

    /// Parameter pairs of the resolved double points.
    pub fn double_points(&self) -> &[(f64, f64)] {
        &self.double_points
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// Orthonormal basis of the normal plane `P_i`, `i` in `{0, 1}`.
    pub fn basis(&self, i: usize) -> &[Vec<f64>] {
        &self.pushes[i].basis
    }

    pub fn params(&self) -> &[f64] {
        self.base.params()
    }

    fn check_direction(&self, i: usize, v: &[f64]) -> Result<()> {
        let push = &self.pushes[i];
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), found: v.len() });
        }
        if (norm_f(v) - 1.0).abs() > DIRECTION_TOL {
            return Err(Error::InvalidDirection(format!("v{} is not a unit vector", i + 1)));
        }
        for t in &push.tangents {
            if dot_f(v, t).abs() > DIRECTION_TOL {
                return Err(Error::InvalidDirection(format!("v{} is not orthogonal to the strand tangents", i + 1)));
            }
        }
        Ok(())
    }

    /// Vertex positions of the resolution, without any checks.
    pub fn positions(&self, v1: &[f64], v2: &[f64]) -> Vec<Vec<f64>> {
        let mut pts = self.base.points().to_vec();
        for (push, v) in self.pushes.iter().zip([v1, v2]) {
            for (x, d) in pts[push.vertex].iter_mut().zip(v) {
                *x += self.height * d;
            }
        }
        pts
    }

    /// The resolution in directions `(v1, v2)`, validated as an embedding.
    pub fn resolve(&self, v1: &[f64], v2: &[f64]) -> Result<LongKnotPL> {
        self.check_direction(0, v1)?;
        self.check_direction(1, v2)?;
        let knot = self.base.with_points(self.positions(v1, v2))?;
        knot.check_exact_embedding()?;
        Ok(knot)
    }

    /// Unit direction at angle `theta` in `P_i` (needs `dim P_i >= 2`).
    pub fn direction(&self, i: usize, theta: f64) -> Vec<f64> {
        let b = &self.pushes[i].basis;
        let (s, c) = theta.sin_cos();
        b[0].iter().zip(&b[1]).map(|(x, y)| c * x + s * y).collect()
    }

    /// The torus of resolutions in `R^4` by angles.
    pub fn at_angles(&self, theta1: f64, theta2: f64) -> Result<LongKnotPL> {
        if self.ambient_dim() < 4 {
            return Err(Error::DimensionMismatch { expected: 4, found: self.ambient_dim() });
        }
        self.resolve(&self.direction(0, theta1), &self.direction(1, theta2))
    }

    /// The four resolutions in `R^3`, in the order `(+,+), (+,-), (-,+), (-,-)`.
    pub fn planar_resolutions(&self) -> Result<Vec<LongKnotPL>> {
        if self.ambient_dim() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: self.ambient_dim() });
        }
        let (b1, b2) = (&self.pushes[0].basis[0], &self.pushes[1].basis[0]);
        let neg = |v: &Vec<f64>| v.iter().map(|x| -x).collect::<Vec<_>>();
        let mut out = Vec::new();
        for v1 in [b1.clone(), neg(b1)] {
            for v2 in [b2.clone(), neg(b2)] {
                out.push(self.resolve(&v1, &v2)?);
            }
        }
        Ok(out)
    }
}

impl TwoParameterFamily for ResolutionFamily {
    fn ambient_dim(&self) -> usize {
        self.base.ambient_dim()
    }

    fn params(&self) -> &[f64] {
        self.base.params()
    }

    fn positions(&self, theta: [f64; 2]) -> Vec<Vec<f64>> {
        ResolutionFamily::positions(self, &self.direction(0, theta[0]), &self.direction(1, theta[1]))
    }

    fn vertex(&self, k: usize, theta: [f64; 2]) -> Vec<f64> {
        let mut p = self.base.points()[k].clone();
        for (i, push) in self.pushes.iter().enumerate() {
            if push.vertex == k {
                for (x, d) in p.iter_mut().zip(self.direction(i, theta[i])) {
                    *x += self.height * d;
                }
            }
        }
        p
    }

    fn dependence(&self) -> Vec<[bool; 2]> {
        let mut dep = vec![[false; 2]; self.base.points().len()];
        for (i, push) in self.pushes.iter().enumerate() {
            dep[push.vertex][i] = true;
        }
        dep
    }
}

/// One resolution of `g` in directions `(v1, v2)`.
pub fn resolution_family(g: &ImmersedKnotPL, v1: &[f64], v2: &[f64]) -> Result<LongKnotPL> {
    ResolutionFamily::new(g)?.resolve(v1, v2)
}
