//! Tube embeddings: supported self-embeddings of `R^j x D^k` as evaluable
//! expression trees, and pseudoisotopy embeddings with a top face.

pub mod frame;
pub mod leaves;
pub mod pec;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AffineF64, AxisAffine, LittleCube};
use crate::graphing::TubeLoop;
use crate::knot::{injectivity_proxy, LongKnotPL};
use crate::par::{self, Execution};
pub use leaves::{BoxBump, KnotTube, Shear, Twist};
pub use pec::PseudoIsotopyEmbedding;

/// Closed box in the domain `R^j` outside which a tube is the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SupportBox {
    pub fn unit(j: usize) -> Self {
        SupportBox { lo: vec![-1.0; j], hi: vec![1.0; j] }
    }

    pub fn contains(&self, t: &[f64]) -> bool {
        self.lo.iter().zip(&self.hi).zip(t).all(|((l, h), x)| l <= x && x <= h)
    }

    fn hull(&self, other: &SupportBox) -> SupportBox {
        SupportBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    fn mapped(&self, maps: &[AffineF64]) -> SupportBox {
        SupportBox {
            lo: maps.iter().zip(&self.lo).map(|(l, x)| l.apply(*x)).collect(),
            hi: maps.iter().zip(&self.hi).map(|(l, x)| l.apply(*x)).collect(),
        }
    }

    /// True when the box lies inside `L(I^j)`.
    pub fn within_cube(&self, cube: &LittleCube, tol: f64) -> bool {
        cube.factors_f64()
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(l, (lo, hi))| *lo >= l.low() - tol && *hi <= l.high() + tol)
    }
}

#[derive(Debug)]
enum Node {
    Identity,
    Knot(KnotTube),
    Twist(Twist),
    Shear(Shear),
    Graph(TubeLoop),
    /// `parts[0] o parts[1] o ...`
    Compose(Vec<TubeEmbedding>),
    Conjugate { cube: LittleCube, maps: Vec<AffineF64>, inner: TubeEmbedding },
}

/// An element of `EC(j, D^k)`.
#[derive(Clone, Debug)]
pub struct TubeEmbedding {
    j: usize,
    k: usize,
    support: Option<SupportBox>,
    node: Arc<Node>,
}

impl TubeEmbedding {
    fn leaf(j: usize, k: usize, support: Option<SupportBox>, node: Node) -> Self {
        TubeEmbedding { j, k, support, node: Arc::new(node) }
    }

    pub fn identity(j: usize, k: usize) -> Self {
        TubeEmbedding::leaf(j, k, None, Node::Identity)
    }

    pub fn knot_tube(tube: KnotTube) -> Self {
        let n = tube.knot().ambient_dim();
        TubeEmbedding::leaf(1, n - 1, Some(SupportBox::unit(1)), Node::Knot(tube))
    }

    pub fn twist(t: Twist) -> Self {
        let support = SupportBox { lo: t.bump.lo(), hi: t.bump.hi() };
        TubeEmbedding::leaf(t.j(), t.k, Some(support), Node::Twist(t))
    }

    pub fn shear(s: Shear) -> Self {
        let support = SupportBox { lo: s.bump.lo(), hi: s.bump.hi() };
        TubeEmbedding::leaf(s.j(), s.k, Some(support), Node::Shear(s))
    }

    /// `(t_0, t, m) -> (t_0, loop(t_0)(t, m))` for a loop based at the identity.
    pub fn graph(lp: TubeLoop) -> Result<Self> {
        lp.check_based_at_identity()?;
        let (j, k) = (lp.domain_dim(), lp.disk_dim());
        let support = lp.support().map(|s| SupportBox {
            lo: std::iter::once(-1.0).chain(s.lo).collect(),
            hi: std::iter::once(1.0).chain(s.hi).collect(),
        });
        Ok(TubeEmbedding::leaf(j + 1, k, support, Node::Graph(lp)))
    }

    /// `parts[0] o parts[1] o ...`; the empty composition is not allowed.
    pub fn compose(parts: Vec<TubeEmbedding>) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("empty composition".into()))?;
        let (j, k) = (first.j, first.k);
        for p in &parts {
            if p.j != j {
                return Err(Error::DimensionMismatch { expected: j, found: p.j });
            }
            if p.k != k {
                return Err(Error::DimensionMismatch { expected: k, found: p.k });
            }
        }
        let parts: Vec<TubeEmbedding> = parts.into_iter().filter(|p| !p.is_identity_node()).collect();
        match parts.len() {
            0 => Ok(TubeEmbedding::identity(j, k)),
            1 => Ok(parts.into_iter().next().expect("one part")),
            _ => {
                let support = parts
                    .iter()
                    .filter_map(|p| p.support.clone())
                    .reduce(|a, b| a.hull(&b));
                Ok(TubeEmbedding::leaf(j, k, support, Node::Compose(parts)))
            }
        }
    }

    /// `mu(L, f) = (L x Id) o f o (L^-1 x Id)`.
    pub fn conjugate(cube: &LittleCube, inner: TubeEmbedding) -> Result<Self> {
        if cube.dim() != inner.j {
            return Err(Error::DimensionMismatch { expected: inner.j, found: cube.dim() });
        }
        if inner.is_identity_node() {
            return Ok(inner);
        }
        let maps = cube.factors_f64();
        let support = inner.support.as_ref().map(|s| s.mapped(&maps));
        let (j, k) = (inner.j, inner.k);
        Ok(TubeEmbedding::leaf(j, k, support, Node::Conjugate { cube: cube.clone(), maps, inner }))
    }

    fn is_identity_node(&self) -> bool {
        matches!(*self.node, Node::Identity)
    }

    pub fn domain_dim(&self) -> usize {
        self.j
    }

    pub fn disk_dim(&self) -> usize {
        self.k
    }

    /// Declared support box in the domain, `None` for the identity.
    pub fn support(&self) -> Option<&SupportBox> {
        self.support.as_ref()
    }

    /// Evaluates at a point of `R^j x D^k`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.j + self.k {
            return Err(Error::DimensionMismatch { expected: self.j + self.k, found: x.len() });
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite evaluation point".into()));
        }
        self.eval_unchecked(x)
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.support {
            None => return Ok(x.to_vec()),
            Some(s) if !s.contains(&x[..self.j]) => return Ok(x.to_vec()),
            _ => {}
        }
        match &*self.node {
            Node::Identity => Ok(x.to_vec()),
            Node::Knot(t) => t.eval(x),
            Node::Twist(t) => t.eval(x),
            Node::Shear(s) => s.eval(x),
            Node::Graph(lp) => {
                let s = x[0];
                if s <= -1.0 || s >= 1.0 {
                    return Ok(x.to_vec());
                }
                let mut out = vec![s];
                out.extend(lp.eval_at(s, &x[1..])?);
                Ok(out)
            }
            Node::Compose(parts) => {
                let mut y = x.to_vec();
                for p in parts.iter().rev() {
                    y = p.eval_unchecked(&y)?;
                }
                Ok(y)
            }
            Node::Conjugate { maps, inner, .. } => conjugate_eval(maps, x, |y| inner.eval_unchecked(y)),
        }
    }

    /// Restriction to the core `R^j x {0}`.
    pub fn eval_core(&self, t: &[f64]) -> Result<Vec<f64>> {
        let mut x = t.to_vec();
        x.resize(self.j + self.k, 0.0);
        self.eval(&x)
    }

    /// Parameters where the core may have kinks, mapped through conjugations.
    fn core_breakpoints(&self) -> Vec<f64> {
        match &*self.node {
            Node::Knot(t) => t.knot().params().to_vec(),
            Node::Compose(parts) => parts.iter().flat_map(|p| p.core_breakpoints()).collect(),
            Node::Conjugate { maps, inner, .. } => {
                inner.core_breakpoints().into_iter().map(|t| maps[0].apply(t)).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Deterministic sample points: a domain grid of `samples` per axis on
    /// `[-1.1, 1.1]^j` times a disk grid of `disk_samples` per axis on the
    /// cube `[-1,1]^k` pulled radially onto the unit ball.
    pub fn sample_points(&self, samples: usize, disk_samples: usize) -> Vec<Vec<f64>> {
        let domain = grid(self.j, samples, 1.1);
        let disk: Vec<Vec<f64>> = grid(self.k, disk_samples, 1.0).into_iter().map(|c| cube_to_ball(&c)).collect();
        let mut out = Vec::with_capacity(domain.len() * disk.len());
        for t in &domain {
            for m in &disk {
                let mut x = t.clone();
                x.extend_from_slice(m);
                out.push(x);
            }
        }
        out
    }

    /// Injectivity proxy: sampled points at least `delta` apart map at least
    /// `eps` apart.
    pub fn is_embedding_sampled(&self, samples: usize, disk_samples: usize, delta: f64, eps: f64) -> Result<bool> {
        let params = self.sample_points(samples, disk_samples);
        let images = par::map(Execution::Parallel, &params, |x| self.eval(x));
        let images = images.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(injectivity_proxy(&params, &images, delta, eps))
    }

    /// Largest deviation from the identity over the given points.
    pub fn deviation_from_identity(&self, points: &[Vec<f64>]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for x in points {
            let y = self.eval(x)?;
            worst = worst.max(x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
        Ok(worst)
    }

    /// Wavefront OBJ of the image of `[-1.2, 1.2] x S^1` for a tube in `R^3`.
    pub fn to_obj(&self, samples: usize, around: usize) -> Result<String> {
        if self.j != 1 || self.k != 2 {
            return Err(Error::DimensionMismatch { expected: 3, found: self.j + self.k });
        }
        let mut out = String::from("# tube surface\n");
        for a in 0..=samples {
            let t = -1.2 + 2.4 * a as f64 / samples as f64;
            for b in 0..around {
                let phi = 2.0 * std::f64::consts::PI * b as f64 / around as f64;
                let p = self.eval(&[t, phi.cos(), phi.sin()])?;
                out.push_str(&format!("v {} {} {}\n", p[0], p[1], p[2]));
            }
        }
        for a in 0..samples {
            for b in 0..around {
                let idx = |a: usize, b: usize| a * around + (b % around) + 1;
                out.push_str(&format!("f {} {} {} {}\n", idx(a, b), idx(a + 1, b), idx(a + 1, b + 1), idx(a, b + 1)));
            }
        }
        Ok(out)
    }

    pub fn to_spec(&self) -> TubeSpec {
        match &*self.node {
            Node::Identity => TubeSpec::Identity { j: self.j, k: self.k },
            Node::Knot(t) => TubeSpec::KnotTube { knot: t.knot().clone(), radius: t.radius() },
            Node::Twist(t) => TubeSpec::Twist(t.clone()),
            Node::Shear(s) => TubeSpec::Shear(s.clone()),
            Node::Graph(lp) => TubeSpec::Graph { tube_loop: Box::new(lp.to_spec()) },
            Node::Compose(parts) => TubeSpec::Compose { parts: parts.iter().map(TubeEmbedding::to_spec).collect() },
            Node::Conjugate { cube, inner, .. } => {
                TubeSpec::Conjugate { cube: cube.clone(), inner: Box::new(inner.to_spec()) }
            }
        }
    }

    pub fn from_spec(spec: &TubeSpec) -> Result<Self> {
        Ok(match spec {
            TubeSpec::Identity { j, k } => TubeEmbedding::identity(*j, *k),
            TubeSpec::KnotTube { knot, radius } => TubeEmbedding::knot_tube(KnotTube::new(knot.clone(), *radius)?),
            TubeSpec::Twist(t) => TubeEmbedding::twist(Twist::new(t.k, BoxBump::new(t.bump.center.clone(), t.bump.half_width.clone())?, t.angle)?),
            TubeSpec::Shear(s) => TubeEmbedding::shear(Shear::new(s.k, BoxBump::new(s.bump.center.clone(), s.bump.half_width.clone())?, s.amplitude)?),
            TubeSpec::Graph { tube_loop } => TubeEmbedding::graph(TubeLoop::from_spec(tube_loop)?)?,
            TubeSpec::Compose { parts } => {
                TubeEmbedding::compose(parts.iter().map(TubeEmbedding::from_spec).collect::<Result<Vec<_>>>()?)?
            }
            TubeSpec::Conjugate { cube, inner } => TubeEmbedding::conjugate(cube, TubeEmbedding::from_spec(inner)?)?,
        })
    }
}

/// `(L x Id) o g o (L^-1 x Id)` at `x`, with `L` given by its factors.
pub(crate) fn conjugate_eval<F>(maps: &[AffineF64], x: &[f64], g: F) -> Result<Vec<f64>>
where
    F: FnOnce(&[f64]) -> Result<Vec<f64>>,
{
    let mut y = x.to_vec();
    for (c, l) in y.iter_mut().zip(maps) {
        *c = l.apply_inverse(*c);
    }
    let mut z = g(&y)?;
    for (c, l) in z.iter_mut().zip(maps) {
        *c = l.apply(*c);
    }
    Ok(z)
}

/// Serialisable form of a tube tree.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TubeSpec {
    Identity { j: usize, k: usize },
    KnotTube { knot: LongKnotPL, radius: f64 },
    Twist(Twist),
    Shear(Shear),
    Graph { tube_loop: Box<crate::graphing::TubeLoopSpec> },
    Compose { parts: Vec<TubeSpec> },
    Conjugate { cube: LittleCube, inner: Box<TubeSpec> },
}

impl Serialize for TubeEmbedding {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TubeEmbedding {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = TubeSpec::deserialize(d)?;
        TubeEmbedding::from_spec(&spec).map_err(serde::de::Error::custom)
    }
}

/// Uniform grid of `n` points per axis on `[-r, r]^dim`, cell-centred.
pub fn grid(dim: usize, n: usize, r: f64) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..n).map(|i| -r + 2.0 * r * (i as f64 + 0.5) / n as f64).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

/// Radial map from the cube `[-1,1]^k` onto the unit ball.
pub fn cube_to_ball(c: &[f64]) -> Vec<f64> {
    let sup = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let euc = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if euc == 0.0 {
        return c.to_vec();
    }
    c.iter().map(|x| x * sup / euc).collect()
}

/// Seeded random points of `[-r, r]^j x D^k`.
pub fn random_points(seed: u64, count: usize, j: usize, k: usize, r: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut x: Vec<f64> = (0..j).map(|_| rng.gen_range(-r..=r)).collect();
            let c: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            x.extend(cube_to_ball(&c));
            x
        })
        .collect()
}

/// The tube around `f` of the given radius; the straight line gives the identity.
pub fn tube_from_knot(f: &LongKnotPL, radius: f64) -> Result<TubeEmbedding> {
    if f.is_straight() && f.segment_count() >= 1 {
        return Ok(TubeEmbedding::identity(1, f.ambient_dim() - 1));
    }
    Ok(TubeEmbedding::knot_tube(KnotTube::new(f.clone(), radius)?))
}

/// Samples the core of a `j = 1` tube and refits a PL knot.
pub fn knot_from_tube(e: &TubeEmbedding) -> Result<LongKnotPL> {
    knot_from_tube_sampled(e, 2000)
}

pub fn knot_from_tube_sampled(e: &TubeEmbedding, samples: usize) -> Result<LongKnotPL> {
    if e.j != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: e.j });
    }
    let n = e.k + 1;
    let mut ts: Vec<f64> = (0..=samples).map(|i| -1.0 + 2.0 * i as f64 / samples as f64).collect();
    ts.extend(e.core_breakpoints().into_iter().filter(|t| t.abs() < 1.0));
    ts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let pts = par::map(Execution::Parallel, &ts, |&t| e.eval_core(&[t]));
    let pts = pts.into_iter().collect::<Result<Vec<_>>>()?;
    let mut vertices: Vec<(f64, Vec<f64>)> = Vec::new();
    let m = ts.len() - 1;
    for i in 0..=m {
        let keep = i == 0 || i == m || {
            let (t0, p0) = vertices.last().expect("first vertex kept");
            let (t1, p1) = (ts[i + 1], &pts[i + 1]);
            let lam = (ts[i] - t0) / (t1 - t0);
            pts[i].iter().zip(p0).zip(p1).any(|((x, a), b)| (x - (a + lam * (b - a))).abs() > 1e-13)
        };
        if keep {
            vertices.push((ts[i], pts[i].clone()));
        }
    }
    let last = vertices.len() - 1;
    for (k, t) in [(0, -1.0), (last, 1.0)] {
        vertices[k].0 = t;
        vertices[k].1 = vec![0.0; n];
        vertices[k].1[0] = t;
    }
    let knot = LongKnotPL::from_vertices(n, vertices)?;
    let pars: Vec<Vec<f64>> = ts.iter().map(|&t| vec![t]).collect();
    let scale = pts.iter().flatten().fold(0.0f64, |a, b| a.max(b.abs())).max(1.0);
    if !injectivity_proxy(&pars, &pts, 4.0 / samples as f64, 1e-9 * scale) {
        return Err(Error::NotEmbedded("sampled core of the tube is not injective".into()));
    }
    Ok(knot)
}
