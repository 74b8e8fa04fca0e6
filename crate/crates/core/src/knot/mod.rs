//! Piecewise-linear long knots `R -> R^n`, standard outside `[-1, 1]`.

pub mod diagram;
pub mod library;
pub mod predicates;

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use predicates::{dist_f, folds_back_exact, segment_contact_exact, segment_distance, SegmentContact};

pub use library::{standard_knot, STANDARD_NAMES};

/// Parameter pairs closer than this are identified when matching double points.
pub const DOUBLE_POINT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KnotKind {
    Embedded,
    Immersed,
}

/// A PL long knot. Vertex parameters run from `-1` to `1`; outside that
/// range the curve is the standard line `t -> (t, 0, .., 0)`.
///
/// Immersed knots carry their double points as parameter pairs `ta < tb`.
#[derive(Clone, Debug, PartialEq)]
pub struct LongKnotPL {
    dim: usize,
    ts: Vec<f64>,
    pts: Vec<Vec<f64>>,
    double_points: Vec<(f64, f64)>,
}

/// Alias used where an immersed curve is expected.
pub type ImmersedKnotPL = LongKnotPL;

#[derive(Serialize, Deserialize)]
struct KnotJson {
    version: u32,
    ambient_dim: usize,
    vertices: Vec<Vec<f64>>,
    kind: KnotKind,
    #[serde(default)]
    double_points: Vec<[f64; 2]>,
}

impl Serialize for LongKnotPL {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LongKnotPL {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = KnotJson::deserialize(d)?;
        LongKnotPL::from_json_value(raw).map_err(serde::de::Error::custom)
    }
}

impl LongKnotPL {
    /// Builds a knot from `(t, point)` pairs and checks the structural
    /// invariants. Embeddedness is checked separately.
    pub fn from_vertices(dim: usize, vertices: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        let (ts, pts) = vertices.into_iter().unzip();
        let knot = LongKnotPL { dim, ts, pts, double_points: Vec::new() };
        knot.check_structure()?;
        Ok(knot)
    }

    /// Like [`from_vertices`](Self::from_vertices), then requires the
    /// exact embedding certificate.
    pub fn embedded(dim: usize, vertices: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        let knot = Self::from_vertices(dim, vertices)?;
        knot.check_exact_embedding()?;
        Ok(knot)
    }

    /// An immersed knot whose self-intersections must be exactly the listed
    /// double points, each transverse.
    pub fn immersed(
        dim: usize,
        vertices: Vec<(f64, Vec<f64>)>,
        double_points: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let mut knot = Self::from_vertices(dim, vertices)?;
        knot.double_points = double_points
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        knot.double_points.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        knot.check_double_points()?;
        Ok(knot)
    }

    /// The straight line in `R^n`.
    pub fn unknot(dim: usize) -> Self {
        let mut lo = vec![0.0; dim];
        let mut hi = vec![0.0; dim];
        lo[0] = -1.0;
        hi[0] = 1.0;
        LongKnotPL { dim, ts: vec![-1.0, 1.0], pts: vec![lo, hi], double_points: Vec::new() }
    }

    fn check_structure(&self) -> Result<()> {
        let n = self.dim;
        if n < 2 {
            return Err(Error::InvalidKnot(format!("ambient dimension {n} < 2")));
        }
        let m = self.ts.len();
        if m < 2 {
            return Err(Error::InvalidKnot("need at least two vertices".into()));
        }
        if let Some(p) = self.pts.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
        if self.ts[0] != -1.0 || self.ts[m - 1] != 1.0 {
            return Err(Error::InvalidKnot("parameters must start at -1 and end at 1".into()));
        }
        if self.ts.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidKnot("parameters must be strictly increasing".into()));
        }
        let standard = |p: &[f64], x: f64| p[0] == x && p[1..].iter().all(|&c| c == 0.0);
        if !standard(&self.pts[0], -1.0) || !standard(&self.pts[m - 1], 1.0) {
            return Err(Error::InvalidKnot("endpoints must be (-1,0,..) and (1,0,..)".into()));
        }
        for (k, p) in self.pts.iter().enumerate() {
            if p.iter().any(|c| !c.is_finite() || c.abs() > 1.0) {
                return Err(Error::InvalidKnot(format!("vertex {k} leaves the unit cube")));
            }
        }
        if self.pts.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidKnot("consecutive vertices coincide".into()));
        }
        if !(self.pts[1][0] > -1.0) || !(self.pts[m - 2][0] < 1.0) {
            return Err(Error::InvalidKnot("end segments must leave along the tails".into()));
        }
        Ok(())
    }

    /// Exact self-contacts of the polyline: fold-backs at vertices and
    /// contacts between non-adjacent segments, as parameter pairs.
    fn exact_contacts(&self) -> Result<Vec<(f64, f64, bool)>> {
        let m = self.segment_count();
        for k in 1..m {
            if folds_back_exact(&self.pts[k - 1], &self.pts[k], &self.pts[k + 1]) {
                return Err(Error::NotEmbedded(format!("polyline folds back at vertex {k}")));
            }
        }
        let pairs: Vec<(usize, usize)> =
            (0..m).flat_map(|i| (i + 2..m).map(move |j| (i, j))).collect();
        let found = par::map(Execution::Parallel, &pairs, |&(i, j)| {
            let (p0, p1) = (&self.pts[i], &self.pts[i + 1]);
            let (q0, q1) = (&self.pts[j], &self.pts[j + 1]);
            // cheap rejection; exact test only for near pairs
            let (d, _, _) = segment_distance(p0, p1, q0, q1);
            let scale = 1.0 + p0.iter().chain(q0).fold(0.0f64, |a, c| a.max(c.abs()));
            if d > 1e-9 * scale {
                return Ok(None);
            }
            match segment_contact_exact(p0, p1, q0, q1) {
                SegmentContact::Disjoint => Ok(None),
                SegmentContact::Overlap => {
                    Err(Error::NotEmbedded(format!("segments {i} and {j} overlap")))
                }
                SegmentContact::Point { s, u } => {
                    let ta = self.ts[i] + s * (self.ts[i + 1] - self.ts[i]);
                    let tb = self.ts[j] + u * (self.ts[j + 1] - self.ts[j]);
                    let da: Vec<f64> = predicates::sub_f(p1, p0);
                    let db: Vec<f64> = predicates::sub_f(q1, q0);
                    let cos = predicates::dot_f(&da, &db)
                        / (predicates::norm_f(&da) * predicates::norm_f(&db));
                    Ok(Some((ta, tb, cos.abs() < 1.0 - 1e-12)))
                }
            }
        });
        let mut out = Vec::new();
        for r in found {
            if let Some(c) = r? {
                out.push(c);
            }
        }
        Ok(out)
    }

    /// Exact certificate that the polyline is injective.
    pub fn check_exact_embedding(&self) -> Result<()> {
        let contacts = self.exact_contacts()?;
        if let Some(&(ta, tb, _)) = contacts.first() {
            return Err(Error::NotEmbedded(format!("f({ta}) = f({tb})")));
        }
        Ok(())
    }

    fn check_double_points(&self) -> Result<()> {
        let contacts = self.exact_contacts()?;
        let mut found: Vec<(f64, f64)> = Vec::new();
        for &(ta, tb, transverse) in &contacts {
            if !transverse {
                return Err(Error::NotEmbedded(format!("double point at ({ta}, {tb}) is not transverse")));
            }
            if !found.iter().any(|&(a, b)| (a - ta).abs() < DOUBLE_POINT_TOL && (b - tb).abs() < DOUBLE_POINT_TOL) {
                found.push((ta, tb));
            }
        }
        let matches = |list: &[(f64, f64)], a: f64, b: f64| {
            list.iter().any(|&(x, y)| (x - a).abs() < DOUBLE_POINT_TOL && (y - b).abs() < DOUBLE_POINT_TOL)
        };
        let all_listed = found.iter().all(|&(a, b)| matches(&self.double_points, a, b));
        let all_found = self.double_points.iter().all(|&(a, b)| matches(&found, a, b));
        if !all_listed || !all_found {
            return Err(Error::InvalidKnot(format!(
                "double points {:?} do not match the self-intersections {:?}",
                self.double_points, found
            )));
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> KnotKind {
        if self.double_points.is_empty() {
            KnotKind::Embedded
        } else {
            KnotKind::Immersed
        }
    }

    pub fn double_points(&self) -> &[(f64, f64)] {
        &self.double_points
    }

    pub fn params(&self) -> &[f64] {
        &self.ts
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.pts
    }

    pub fn vertex_count(&self) -> usize {
        self.ts.len()
    }

    pub fn segment_count(&self) -> usize {
        self.ts.len() - 1
    }

    /// Vertices strictly between the endpoints.
    pub fn interior_vertex_count(&self) -> usize {
        self.ts.len() - 2
    }

    pub fn segment(&self, i: usize) -> (&[f64], &[f64]) {
        (&self.pts[i], &self.pts[i + 1])
    }

    /// True when every vertex lies on the first coordinate axis.
    pub fn is_straight(&self) -> bool {
        self.pts.iter().all(|p| p[1..].iter().all(|&c| c == 0.0))
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        if t <= -1.0 || t >= 1.0 {
            let mut p = vec![0.0; self.dim];
            p[0] = t;
            return p;
        }
        let k = self.ts.partition_point(|&s| s <= t).saturating_sub(1).min(self.ts.len() - 2);
        let (t0, t1) = (self.ts[k], self.ts[k + 1]);
        if t == t0 {
            return self.pts[k].clone();
        }
        let standard = |j: usize| self.pts[j][0] == self.ts[j] && self.pts[j][1..].iter().all(|&c| c == 0.0);
        if standard(k) && standard(k + 1) {
            let mut p = vec![0.0; self.dim];
            p[0] = t;
            return p;
        }
        let lam = (t - t0) / (t1 - t0);
        self.pts[k].iter().zip(&self.pts[k + 1]).map(|(a, b)| a + lam * (b - a)).collect()
    }

    /// Unit tangent on the segment containing `t` (right-continuous).
    pub fn tangent(&self, t: f64) -> Vec<f64> {
        if !(-1.0..1.0).contains(&t) {
            let mut d = vec![0.0; self.dim];
            d[0] = 1.0;
            return d;
        }
        let k = self.ts.partition_point(|&s| s <= t).saturating_sub(1).min(self.ts.len() - 2);
        let d = predicates::sub_f(&self.pts[k + 1], &self.pts[k]);
        let n = predicates::norm_f(&d);
        d.into_iter().map(|x| x / n).collect()
    }

    /// Index of the segment containing `t` in `[-1, 1)`.
    pub fn segment_index(&self, t: f64) -> usize {
        self.ts.partition_point(|&s| s <= t).saturating_sub(1).min(self.ts.len() - 2)
    }

    /// Applies `f` to every vertex position; no validation.
    pub fn map_points<F: Fn(&mut Vec<f64>)>(&self, f: F) -> LongKnotPL {
        let mut out = self.clone();
        for p in &mut out.pts {
            f(p);
        }
        out
    }

    /// Reflection in the last coordinate.
    pub fn mirror(&self) -> LongKnotPL {
        let mut out = self.clone();
        for p in &mut out.pts {
            let last = p.len() - 1;
            p[last] = -p[last];
        }
        out
    }

    /// The same knot in `R^m`, `m >= n`, padded with zero coordinates.
    pub fn push_forward(&self, m: usize) -> Result<LongKnotPL> {
        if m < self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: m });
        }
        let mut out = self.clone();
        out.dim = m;
        for p in &mut out.pts {
            p.resize(m, 0.0);
        }
        Ok(out)
    }

    /// Segments lying on the first coordinate axis.
    fn is_axial_segment(&self, i: usize) -> bool {
        let on_axis = |p: &[f64]| p[1..].iter().all(|&c| c == 0.0);
        on_axis(&self.pts[i]) && on_axis(&self.pts[i + 1])
    }

    /// Lower bound on the embedded tube radius. `f64::INFINITY` for the
    /// straight line.
    pub fn reach_estimate(&self) -> Result<f64> {
        let m = self.segment_count();
        let mut reach = f64::INFINITY;
        for k in 1..m {
            let d1 = predicates::sub_f(&self.pts[k], &self.pts[k - 1]);
            let d2 = predicates::sub_f(&self.pts[k + 1], &self.pts[k]);
            let (l1, l2) = (predicates::norm_f(&d1), predicates::norm_f(&d2));
            if l1 == 0.0 || l2 == 0.0 {
                return Err(Error::InvalidKnot("zero-length segment".into()));
            }
            let cos = (predicates::dot_f(&d1, &d2) / (l1 * l2)).clamp(-1.0, 1.0);
            let turn = cos.acos();
            if turn > 0.0 {
                reach = reach.min(l1.min(l2) / (2.0 * (turn / 2.0).tan()));
            }
        }
        for i in 0..m {
            for j in i + 2..m {
                if self.is_axial_segment(i) && self.is_axial_segment(j) {
                    continue;
                }
                let (d, _, _) = segment_distance(&self.pts[i], &self.pts[i + 1], &self.pts[j], &self.pts[j + 1]);
                reach = reach.min(d / 2.0);
            }
        }
        Ok(reach)
    }

    /// Indices of vertices held fixed by perturbations: the endpoints and
    /// the far ends of axial end collars.
    pub fn pinned_vertices(&self) -> Vec<usize> {
        let m = self.segment_count();
        let mut pinned = vec![0, m];
        if m >= 2 && self.is_axial_segment(0) {
            pinned.push(1);
        }
        if m >= 2 && self.is_axial_segment(m - 1) {
            pinned.push(m - 1);
        }
        pinned
    }

    /// Moves each free vertex by a seeded random vector of length at most
    /// `eps`, without any validity check.
    pub fn jitter(&self, seed: u64, eps: f64) -> LongKnotPL {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pinned = self.pinned_vertices();
        let scale = eps / (self.dim as f64).sqrt();
        let mut out = self.clone();
        for (k, p) in out.pts.iter_mut().enumerate() {
            // draw for every vertex so streams do not depend on pinning
            let delta: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..=1.0) * scale).collect();
            if pinned.contains(&k) {
                continue;
            }
            for (c, d) in p.iter_mut().zip(delta) {
                *c = (*c + d).clamp(-1.0, 1.0);
            }
        }
        out
    }

    /// Seeded perturbation of magnitude `eps < reach / 10`; the result keeps
    /// the exact embedding certificate.
    pub fn perturb(&self, seed: u64, eps: f64) -> Result<LongKnotPL> {
        if eps < 0.0 || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!("perturbation magnitude {eps}")));
        }
        if eps == 0.0 {
            return Ok(self.clone());
        }
        let limit = self.reach_estimate()? / 10.0;
        if eps >= limit {
            return Err(Error::PerturbationTooLarge { magnitude: eps, limit });
        }
        let out = self.jitter(seed, eps);
        out.check_structure()?;
        if self.kind() == KnotKind::Embedded {
            out.check_exact_embedding()?;
        }
        Ok(out)
    }

    /// Sup distance to another knot over `samples` uniform parameters in `[-1, 1]`.
    pub fn sup_distance(&self, other: &LongKnotPL, samples: usize) -> f64 {
        (0..=samples)
            .map(|i| {
                let t = -1.0 + 2.0 * i as f64 / samples as f64;
                dist_f(&self.eval(t), &other.eval(t))
            })
            .chain(self.ts.iter().chain(&other.ts).map(|&t| dist_f(&self.eval(t), &other.eval(t))))
            .fold(0.0, f64::max)
    }

    /// Distance between the knot's images on the sampled grid is at least
    /// `eps` for parameters at least `delta` apart, and the exact segment
    /// certificate holds.
    pub fn is_embedding_sampled(&self, samples: usize, delta: f64, eps: f64) -> bool {
        if self.check_exact_embedding().is_err() {
            return false;
        }
        let params: Vec<Vec<f64>> =
            (0..samples).map(|i| vec![-1.0 + 2.0 * (i as f64 + 0.5) / samples as f64]).collect();
        let images: Vec<Vec<f64>> = params.iter().map(|p| self.eval(p[0])).collect();
        injectivity_proxy(&params, &images, delta, eps)
    }

    pub fn to_json_value(&self) -> impl Serialize + '_ {
        KnotJson {
            version: 1,
            ambient_dim: self.dim,
            vertices: self
                .ts
                .iter()
                .zip(&self.pts)
                .map(|(t, p)| std::iter::once(*t).chain(p.iter().copied()).collect())
                .collect(),
            kind: self.kind(),
            double_points: self.double_points.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    fn from_json_value(raw: KnotJson) -> Result<Self> {
        if raw.version != 1 {
            return Err(Error::Parse(format!("unsupported knot version {}", raw.version)));
        }
        let n = raw.ambient_dim;
        let mut vertices = Vec::with_capacity(raw.vertices.len());
        for v in raw.vertices {
            if v.len() != n + 1 {
                return Err(Error::DimensionMismatch { expected: n + 1, found: v.len() });
            }
            vertices.push((v[0], v[1..].to_vec()));
        }
        match raw.kind {
            KnotKind::Embedded => {
                if !raw.double_points.is_empty() {
                    return Err(Error::InvalidKnot("embedded knot lists double points".into()));
                }
                LongKnotPL::embedded(n, vertices)
            }
            KnotKind::Immersed => LongKnotPL::immersed(
                n,
                vertices,
                raw.double_points.into_iter().map(|[a, b]| (a, b)).collect(),
            ),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("knots serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// `t,x1,..,xn` rows at `samples + 1` uniform parameters in `[-1, 1]`.
    pub fn to_csv(&self, samples: usize) -> String {
        let mut out = String::from("t");
        for i in 1..=self.dim {
            let _ = write!(out, ",x{i}");
        }
        out.push('\n');
        for i in 0..=samples {
            let t = -1.0 + 2.0 * i as f64 / samples.max(1) as f64;
            let _ = write!(out, "{t}");
            for c in self.eval(t) {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }

    /// Replaces vertex positions wholesale; used by constructions that
    /// keep the parameter grid.
    pub(crate) fn with_points(&self, pts: Vec<Vec<f64>>) -> Result<LongKnotPL> {
        let knot = LongKnotPL { dim: self.dim, ts: self.ts.clone(), pts, double_points: Vec::new() };
        knot.check_structure()?;
        Ok(knot)
    }

    /// Unchecked constructor for internal splicing code that validates later.
    pub(crate) fn raw(dim: usize, ts: Vec<f64>, pts: Vec<Vec<f64>>) -> LongKnotPL {
        LongKnotPL { dim, ts, pts, double_points: Vec::new() }
    }

    /// Structure plus the exact embedding certificate, or for immersed knots
    /// the check that the listed double points are exactly the self-intersections.
    pub fn validate(&self) -> Result<()> {
        self.check_structure()?;
        if self.double_points.is_empty() {
            self.check_exact_embedding()
        } else {
            self.check_double_points()
        }
    }
}

/// Numerical injectivity proxy: every pair of samples whose parameters are
/// at least `delta` apart has images at least `eps` apart.
///
/// Uses a hash grid of cell size `eps` on the images, so only nearby pairs
/// are compared.
pub fn injectivity_proxy(params: &[Vec<f64>], images: &[Vec<f64>], delta: f64, eps: f64) -> bool {
    use std::collections::HashMap;
    assert_eq!(params.len(), images.len());
    if images.is_empty() {
        return true;
    }
    if images.iter().flatten().any(|c| !c.is_finite()) {
        return false;
    }
    let dim = images[0].len();
    let key = |x: &[f64]| -> Vec<i64> { x.iter().map(|c| (c / eps).floor() as i64).collect() };
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, x) in images.iter().enumerate() {
        grid.entry(key(x)).or_default().push(i);
    }
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(dim as u32))
        .map(|mut code| {
            (0..dim)
                .map(|_| {
                    let o = (code % 3) as i64 - 1;
                    code /= 3;
                    o
                })
                .collect()
        })
        .collect();
    let bad = par::map_range(Execution::Parallel, images.len(), |i| {
        let k = key(&images[i]);
        offsets.iter().any(|off| {
            let cell: Vec<i64> = k.iter().zip(off).map(|(a, b)| a + b).collect();
            grid.get(&cell).is_some_and(|members| {
                members.iter().any(|&j| {
                    j > i && dist_f(&images[i], &images[j]) < eps && dist_f(&params[i], &params[j]) >= delta
                })
            })
        })
    });
    !bad.into_iter().any(|b| b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump_knot(h: f64) -> LongKnotPL {
        LongKnotPL::embedded(
            3,
            vec![
                (-1.0, vec![-1.0, 0.0, 0.0]),
                (-0.5, vec![-0.5, 0.0, 0.0]),
                (0.0, vec![0.0, h, 0.0]),
                (0.5, vec![0.5, 0.0, 0.0]),
                (1.0, vec![1.0, 0.0, 0.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn unknot_evaluation() {
        let u = LongKnotPL::unknot(3);
        assert_eq!(u.eval(0.37), vec![0.37, 0.0, 0.0]);
        assert_eq!(u.eval(2.0), vec![2.0, 0.0, 0.0]);
        assert_eq!(u.eval(-2.0), vec![-2.0, 0.0, 0.0]);
        assert_eq!(u.interior_vertex_count(), 0);
        assert_eq!(u.reach_estimate().unwrap(), f64::INFINITY);
    }

    #[test]
    fn vertices_evaluate_exactly() {
        let k = bump_knot(0.3);
        for (t, p) in k.params().iter().zip(k.points()) {
            assert_eq!(&k.eval(*t), p);
        }
        assert_eq!(k.eval(1.5), vec![1.5, 0.0, 0.0]);
    }

    #[test]
    fn structural_errors() {
        let bad_end = LongKnotPL::from_vertices(2, vec![(-1.0, vec![-1.0, 0.1]), (1.0, vec![1.0, 0.0])]);
        assert!(matches!(bad_end, Err(Error::InvalidKnot(_))));
        let non_monotone = LongKnotPL::from_vertices(
            2,
            vec![(-1.0, vec![-1.0, 0.0]), (0.5, vec![0.0, 0.5]), (0.2, vec![0.2, 0.5]), (1.0, vec![1.0, 0.0])],
        );
        assert!(non_monotone.is_err());
        let outside = LongKnotPL::from_vertices(
            2,
            vec![(-1.0, vec![-1.0, 0.0]), (0.0, vec![0.0, 1.5]), (1.0, vec![1.0, 0.0])],
        );
        assert!(outside.is_err());
    }

    #[test]
    fn forced_crossing_is_rejected() {
        // a planar curve that crosses itself
        let v = vec![
            (-1.0, vec![-1.0, 0.0]),
            (-0.5, vec![0.5, 0.5]),
            (0.0, vec![0.5, -0.5]),
            (0.5, vec![-0.5, 0.0]),
            (0.75, vec![0.9, 0.0]),
            (1.0, vec![1.0, 0.0]),
        ];
        let k = LongKnotPL::from_vertices(2, v.clone()).unwrap();
        assert!(!k.is_embedding_sampled(200, 0.01, 1e-3));
        assert!(matches!(LongKnotPL::embedded(2, v), Err(Error::NotEmbedded(_))));
    }

    #[test]
    fn bump_reach_matches_direct_computation() {
        let h = 0.1;
        let k = bump_knot(h);
        // segments 0 and 2 are non-adjacent: the apex side versus the line
        let (d02, _, _) = segment_distance(&k.pts[0], &k.pts[1], &k.pts[2], &k.pts[3]);
        let (d13, _, _) = segment_distance(&k.pts[1], &k.pts[2], &k.pts[3], &k.pts[4]);
        let l = (0.25f64 + h * h).sqrt();
        let apex_turn = 2.0 * (h / 0.5).atan();
        let foot_turn = (h / 0.5).atan();
        let lfs = (l.min(0.5) / (2.0 * (foot_turn / 2.0).tan())).min(l / (2.0 * (apex_turn / 2.0).tan()));
        // segments 0 and 3 both lie on the axis and are skipped
        let expected = (d02 / 2.0).min(d13 / 2.0).min(lfs);
        assert!((k.reach_estimate().unwrap() - expected).abs() < 1e-15);
        assert!(expected.is_finite() && expected > 0.0);
    }

    #[test]
    fn perturb_is_bounded_and_seeded() {
        let k = bump_knot(0.3);
        assert_eq!(k.perturb(1, 0.0).unwrap(), k);
        let eps = k.reach_estimate().unwrap() / 20.0;
        let a = k.perturb(9, eps).unwrap();
        let b = k.perturb(9, eps).unwrap();
        assert_eq!(a, b);
        assert!(k.sup_distance(&a, 1000) <= eps + 1e-15);
        let too_big = k.reach_estimate().unwrap();
        assert!(matches!(k.perturb(1, too_big), Err(Error::PerturbationTooLarge { .. })));
    }

    #[test]
    fn json_round_trip() {
        let k = bump_knot(0.25);
        let s = k.to_json();
        assert!(s.contains("\"kind\": \"embedded\""));
        let back = LongKnotPL::from_json(&s).unwrap();
        assert_eq!(back, k);
        let csv = k.to_csv(4);
        assert!(csv.starts_with("t,x1,x2,x3\n-1,-1,0,0\n"));
    }

    #[test]
    fn mirror_negates_last_coordinate() {
        let k = bump_knot(0.25).push_forward(3).unwrap();
        let m = k.mirror();
        assert_eq!(m.mirror(), k);
        assert_eq!(m.eval(0.0), k.eval(0.0));
    }
}
