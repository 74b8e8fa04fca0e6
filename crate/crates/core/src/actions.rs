//! Cube actions: the axis action on long knots, and the overlap and
//! pseudoisotopy actions on tube embeddings.

use crate::error::{Error, Result};
use crate::geometry::{AxisAffine, LittleCube, Scalar};
use crate::knot::LongKnotPL;
use crate::operad::{height_permutation, CubeConfig};
use crate::tube::{PseudoIsotopyEmbedding, TubeEmbedding};

/// A PL long knot with exact rational vertex data, in canonical form: no
/// vertex can be removed without changing the map.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactKnot {
    dim: usize,
    ts: Vec<Scalar>,
    pts: Vec<Vec<Scalar>>,
}

impl ExactKnot {
    /// Exact copy of a floating knot (every float is a dyadic rational).
    pub fn from_knot(f: &LongKnotPL) -> Result<Self> {
        let ts = f.params().iter().map(|&t| Scalar::from_f64(t)).collect::<Result<Vec<_>>>()?;
        let pts = f
            .points()
            .iter()
            .map(|p| p.iter().map(|&c| Scalar::from_f64(c)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactKnot { dim: f.ambient_dim(), ts, pts }.canonical())
    }

    pub fn unknot(dim: usize) -> Self {
        let std = |t: i64| {
            let mut p = vec![Scalar::zero(); dim];
            p[0] = Scalar::from_int(t);
            p
        };
        ExactKnot { dim, ts: vec![Scalar::from_int(-1), Scalar::one()], pts: vec![std(-1), std(1)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.ts.len()
    }

    fn standard_at(&self, t: &Scalar) -> Vec<Scalar> {
        let mut p = vec![Scalar::zero(); self.dim];
        p[0] = t.clone();
        p
    }

    fn is_standard_vertex(&self, k: usize) -> bool {
        self.pts[k][0] == self.ts[k] && self.pts[k][1..].iter().all(Scalar::is_zero)
    }

    /// Exact evaluation, with standard tails.
    pub fn eval(&self, t: &Scalar) -> Vec<Scalar> {
        let m = self.ts.len();
        if *t <= self.ts[0] || *t >= self.ts[m - 1] {
            return self.standard_at(t);
        }
        let k = self.ts.partition_point(|s| s <= t) - 1;
        let lam = (t - &self.ts[k]) / (&self.ts[k + 1] - &self.ts[k]);
        self.pts[k].iter().zip(&self.pts[k + 1]).map(|(a, b)| a + &(&lam * &(b - a))).collect()
    }

    /// Smallest closed interval outside which the knot is standard, or
    /// `None` for the straight line.
    pub fn support(&self) -> Option<(Scalar, Scalar)> {
        let m = self.ts.len();
        let first = (0..m).find(|&k| !self.is_standard_vertex(k))?;
        let last = (0..m).rev().find(|&k| !self.is_standard_vertex(k))?;
        Some((self.ts[first - 1].clone(), self.ts[last + 1].clone()))
    }

    /// Maximal parameter intervals on which the knot is not standard.
    fn support_intervals(&self) -> Vec<(Scalar, Scalar)> {
        let mut out: Vec<(Scalar, Scalar)> = Vec::new();
        for k in 0..self.ts.len() - 1 {
            if self.is_standard_vertex(k) && self.is_standard_vertex(k + 1) {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.1 == self.ts[k] => last.1 = self.ts[k + 1].clone(),
                _ => out.push((self.ts[k].clone(), self.ts[k + 1].clone())),
            }
        }
        out
    }

    /// Removes every vertex at which the map is affine on both sides.
    fn canonical(mut self) -> Self {
        let mut k = 1;
        while k + 1 < self.ts.len() {
            let dt0 = &self.ts[k] - &self.ts[k - 1];
            let dt1 = &self.ts[k + 1] - &self.ts[k];
            let straight = (0..self.dim).all(|i| {
                (&self.pts[k][i] - &self.pts[k - 1][i]) * &dt1 == (&self.pts[k + 1][i] - &self.pts[k][i]) * &dt0
            });
            if straight {
                self.ts.remove(k);
                self.pts.remove(k);
                k = k.max(2) - 1;
            } else {
                k += 1;
            }
        }
        self
    }

    /// `L.f`: the domain reparametrised by `L`, the first ambient coordinate
    /// by `L` and the normal coordinates scaled by the slope of `L`.
    pub fn act(&self, cube: &LittleCube) -> Result<ExactKnot> {
        if cube.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: cube.dim() });
        }
        let l = &cube.factors()[0];
        let a = l.slope();
        let mut ts = vec![Scalar::from_int(-1)];
        let mut pts = vec![self.standard_at(&Scalar::from_int(-1))];
        for (t, p) in self.ts.iter().zip(&self.pts) {
            let mut q: Vec<Scalar> = p.iter().map(|c| a * c).collect();
            q[0] = l.apply(&p[0]);
            ts.push(l.apply(t));
            pts.push(q);
        }
        ts.push(Scalar::one());
        pts.push(self.standard_at(&Scalar::one()));
        // drop duplicated endpoints when the cube touches the boundary
        let mut out = ExactKnot { dim: self.dim, ts: Vec::new(), pts: Vec::new() };
        for (t, p) in ts.into_iter().zip(pts) {
            if out.ts.last() != Some(&t) {
                out.ts.push(t);
                out.pts.push(p);
            }
        }
        Ok(out.canonical())
    }

    /// `f o g` for knots with disjoint supports: `f + g - std`.
    pub fn compose_disjoint(&self, other: &ExactKnot) -> Result<ExactKnot> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let (fs, gs) = (self.support_intervals(), other.support_intervals());
        if fs.iter().any(|(a0, a1)| gs.iter().any(|(b0, b1)| a0 < b1 && b0 < a1)) {
            return Err(Error::OverlappingSupports);
        }
        let mut ts: Vec<Scalar> = self.ts.iter().chain(&other.ts).cloned().collect();
        ts.sort();
        ts.dedup();
        let pts = ts
            .iter()
            .map(|t| {
                let (f, g, s) = (self.eval(t), other.eval(t), self.standard_at(t));
                f.iter().zip(&g).zip(&s).map(|((x, y), z)| x + &(y - z)).collect()
            })
            .collect();
        Ok(ExactKnot { dim: self.dim, ts, pts }.canonical())
    }

    /// Nearest floating knot, validated.
    pub fn to_knot(&self) -> Result<LongKnotPL> {
        let vertices = self
            .ts
            .iter()
            .zip(&self.pts)
            .map(|(t, p)| (t.to_f64(), p.iter().map(Scalar::to_f64).collect()))
            .collect();
        LongKnotPL::embedded(self.dim, vertices)
    }
}

/// `f o g` for floating knots with disjoint parameter supports.
pub fn disjoint_support_compose(f: &LongKnotPL, g: &LongKnotPL) -> Result<LongKnotPL> {
    ExactKnot::from_knot(f)?.compose_disjoint(&ExactKnot::from_knot(g)?)?.to_knot()
}

/// The axis action in exact arithmetic: `L_1.f_1 o .. o L_i.f_i`.
pub fn kappa_axis_exact(c: &CubeConfig, knots: &[ExactKnot]) -> Result<ExactKnot> {
    if c.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: c.dim() });
    }
    if knots.len() != c.arity() {
        return Err(Error::ArityMismatch { expected: c.arity(), found: knots.len() });
    }
    let dim = knots.first().map_or(3, ExactKnot::dim);
    let mut acc = ExactKnot::unknot(dim);
    for (cube, f) in c.cubes().iter().zip(knots) {
        acc = acc.compose_disjoint(&f.act(cube)?)?;
    }
    Ok(acc)
}

/// The axis action of `C_1(i)` on PL long knots; the output is validated.
pub fn kappa_axis(c: &CubeConfig, knots: &[LongKnotPL]) -> Result<LongKnotPL> {
    let exact = knots.iter().map(ExactKnot::from_knot).collect::<Result<Vec<_>>>()?;
    if c.arity() == 0 {
        return Ok(LongKnotPL::unknot(knots.first().map_or(3, LongKnotPL::ambient_dim)));
    }
    kappa_axis_exact(c, &exact)?.to_knot()
}

/// Connected sum: `f` in `[-1, 0]`, `g` in `[0, 1]`.
pub fn connect_sum(f: &LongKnotPL, g: &LongKnotPL) -> Result<LongKnotPL> {
    let half = Scalar::ratio(1, 2);
    let left = LittleCube::from_box(&[Scalar::from_int(-1)], &[Scalar::zero()])?;
    let right = LittleCube::from_box(&[Scalar::zero()], &[Scalar::one()])?;
    debug_assert_eq!(left.factors()[0].slope(), &half);
    kappa_axis(&CubeConfig::new(1, vec![left, right])?, &[f.clone(), g.clone()])
}

/// `mu(L, f) = (L x Id) o f o (L^-1 x Id)`.
pub fn conjugate(cube: &LittleCube, f: &TubeEmbedding) -> Result<TubeEmbedding> {
    TubeEmbedding::conjugate(cube, f.clone())
}

/// The overlap action of `C_{j+1}(i)` on tube embeddings of `R^j x D^k`:
/// conjugate by the projections and compose in ascending height order.
pub fn kappa_overlap(c: &CubeConfig, tubes: &[TubeEmbedding]) -> Result<TubeEmbedding> {
    if tubes.len() != c.arity() {
        return Err(Error::ArityMismatch { expected: c.arity(), found: tubes.len() });
    }
    if c.arity() == 0 {
        return Err(Error::InvalidParameter(
            "nullary overlap action needs the ambient shape; use kappa_overlap_nullary".into(),
        ));
    }
    let (j, k) = (tubes[0].domain_dim(), tubes[0].disk_dim());
    if c.dim() != j + 1 {
        return Err(Error::DimensionMismatch { expected: j + 1, found: c.dim() });
    }
    let sigma = height_permutation(c)?;
    let mut parts = Vec::with_capacity(tubes.len());
    for &i in sigma.images() {
        let t = &tubes[i];
        if t.domain_dim() != j || t.disk_dim() != k {
            return Err(Error::DimensionMismatch { expected: j, found: t.domain_dim() });
        }
        let (pi, _) = c.cubes()[i].project()?;
        parts.push(TubeEmbedding::conjugate(&pi, t.clone())?);
    }
    TubeEmbedding::compose(parts)
}

/// `kappa_0(*) = Id`.
pub fn kappa_overlap_nullary(j: usize, k: usize) -> TubeEmbedding {
    TubeEmbedding::identity(j, k)
}

/// The action of `C_j(i)` on pseudoisotopy embeddings of `R^j x D^k`.
/// The first coordinate is the special one: cubes are ordered by the
/// height of their first factor and conjugate the whole domain.
pub fn kappa_pec(c: &CubeConfig, ps: &[PseudoIsotopyEmbedding]) -> Result<PseudoIsotopyEmbedding> {
    if ps.len() != c.arity() {
        return Err(Error::ArityMismatch { expected: c.arity(), found: ps.len() });
    }
    if ps.is_empty() {
        return Err(Error::InvalidParameter(
            "nullary pseudoisotopy action needs the ambient shape; use PseudoIsotopyEmbedding::identity".into(),
        ));
    }
    let j = ps[0].domain_dim();
    if c.dim() != j {
        return Err(Error::DimensionMismatch { expected: j, found: c.dim() });
    }
    // order by the first factor: rotate it into the last slot for sorting
    let sigma = height_permutation(&c.rotate_first_to_last())?;
    let mut parts = Vec::with_capacity(ps.len());
    for &i in sigma.images() {
        parts.push(PseudoIsotopyEmbedding::conjugate(&c.cubes()[i], ps[i].clone())?);
    }
    PseudoIsotopyEmbedding::compose(parts)
}

/// The top-face restriction of a pseudoisotopy embedding, checked against
/// direct evaluation at `t_1 = 1` on `samples` points.
pub fn restrict_face(p: &PseudoIsotopyEmbedding, samples: usize, tol: f64) -> Result<TubeEmbedding> {
    let g = p.face();
    let deviation = p.face_deviation(&g, samples);
    if !(deviation <= tol) {
        return Err(Error::FaceMismatch { deviation });
    }
    Ok(g)
}
