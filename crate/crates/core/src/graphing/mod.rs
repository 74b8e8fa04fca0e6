//! Graphing and spinning: `gr_1` on loops of knots and of tubes, its
//! iterates, Litherland spinning, the resolution family of a doubly
//! immersed curve and the null-homotopy family of the stabilisation.

pub mod null_homotopy;
pub mod profiles;
pub mod resolution;
pub mod tube_loop;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knot::{injectivity_proxy, LongKnotPL};
use crate::par::{self, Execution};
use crate::tube::grid;
pub use null_homotopy::null_homotopy_family;
pub use profiles::{smoothing_profiles, ProfileKind, ProfileTable};
pub use resolution::{resolution_family, ResolutionFamily};
pub use tube_loop::{gr1_tube, kappa_prime, TubeLoop, TubeLoopSpec};

/// Entries closer than this in sup norm count as equal.
const ENTRY_TOL: f64 = 1e-12;

/// A loop of long knots, piecewise linear in the loop parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLoop", into = "RawLoop")]
pub struct LoopOfKnots {
    base: LongKnotPL,
    entries: Vec<(f64, LongKnotPL)>,
}

#[derive(Serialize, Deserialize)]
struct RawLoop {
    base: LongKnotPL,
    entries: Vec<(f64, LongKnotPL)>,
}

impl TryFrom<RawLoop> for LoopOfKnots {
    type Error = Error;
    fn try_from(raw: RawLoop) -> Result<Self> {
        LoopOfKnots::new(raw.base, raw.entries)
    }
}

impl From<LoopOfKnots> for RawLoop {
    fn from(l: LoopOfKnots) -> Self {
        RawLoop { base: l.base, entries: l.entries }
    }
}

fn knots_equal(a: &LongKnotPL, b: &LongKnotPL) -> bool {
    a.ambient_dim() == b.ambient_dim() && a.sup_distance(b, 2000) <= ENTRY_TOL
}

impl LoopOfKnots {
    /// Entries must span `[-1, 1]` with strictly increasing parameters and a
    /// common ambient dimension. Basedness and closedness are checked by the
    /// constructions that need them.
    pub fn new(base: LongKnotPL, entries: Vec<(f64, LongKnotPL)>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidParameter("a loop needs at least two entries".into()));
        }
        if entries[0].0 != -1.0 || entries[entries.len() - 1].0 != 1.0 {
            return Err(Error::InvalidParameter("loop samples must span [-1, 1]".into()));
        }
        if entries.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidParameter("loop samples must be strictly increasing".into()));
        }
        let n = base.ambient_dim();
        if let Some((_, k)) = entries.iter().find(|(_, k)| k.ambient_dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: k.ambient_dim() });
        }
        Ok(LoopOfKnots { base, entries })
    }

    /// `q + 1` equally spaced copies of `f`.
    pub fn constant(f: &LongKnotPL, q: usize) -> Self {
        let entries = (0..=q.max(1)).map(|i| (sample_param(i, q.max(1)), f.clone())).collect();
        LoopOfKnots { base: f.clone(), entries }
    }

    /// The knot spun once about the long axis (in the plane of the second and
    /// third coordinates), sampled at `q + 1` parameters.
    pub fn rotation(f: &LongKnotPL, q: usize) -> Result<Self> {
        if f.ambient_dim() < 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: f.ambient_dim() });
        }
        let q = q.max(2);
        let entries = (0..=q)
            .map(|i| {
                let s = sample_param(i, q);
                let theta = PI * (s + 1.0);
                (s, if i == 0 || i == q { f.clone() } else { rotate_about_axis(f, theta) })
            })
            .collect();
        Ok(LoopOfKnots { base: f.clone(), entries })
    }

    pub fn base(&self) -> &LongKnotPL {
        &self.base
    }

    pub fn entries(&self) -> &[(f64, LongKnotPL)] {
        &self.entries
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.ambient_dim()
    }

    /// First and last entries equal the base.
    pub fn check_based(&self) -> Result<()> {
        let (first, last) = (&self.entries[0].1, &self.entries[self.entries.len() - 1].1);
        if !knots_equal(first, &self.base) || !knots_equal(last, &self.base) {
            return Err(Error::NotBased("first and last entries must equal the base knot".into()));
        }
        Ok(())
    }

    /// First entry equals the last one.
    pub fn check_closed(&self) -> Result<()> {
        if !knots_equal(&self.entries[0].1, &self.entries[self.entries.len() - 1].1) {
            return Err(Error::NotClosed("first and last entries differ".into()));
        }
        Ok(())
    }

    /// `f(s)(t)`, interpolated linearly in `s`; the base outside `(-1, 1)`.
    pub fn eval(&self, s: f64, t: f64) -> Vec<f64> {
        if s <= -1.0 || s >= 1.0 {
            return if s <= -1.0 { self.entries[0].1.eval(t) } else { self.entries[self.entries.len() - 1].1.eval(t) };
        }
        let i = self.entries.partition_point(|(u, _)| *u <= s) - 1;
        let (s0, f0) = &self.entries[i];
        let (s1, f1) = &self.entries[i + 1];
        let lam = (s - s0) / (s1 - s0);
        let a = f0.eval(t);
        if lam == 0.0 {
            return a;
        }
        let b = f1.eval(t);
        a.iter().zip(&b).map(|(p, q)| p + lam * (q - p)).collect()
    }

    /// Every entry is an embedded knot.
    pub fn check_entries(&self) -> Result<()> {
        for (_, k) in &self.entries {
            k.check_exact_embedding()?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("loops serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn sample_param(i: usize, q: usize) -> f64 {
    if i == q {
        1.0
    } else {
        -1.0 + 2.0 * i as f64 / q as f64
    }
}

/// Rotation by `theta` in the plane of the second and third coordinates.
pub fn rotate_about_axis(f: &LongKnotPL, theta: f64) -> LongKnotPL {
    let (s, c) = theta.sin_cos();
    f.map_points(|p| {
        let (y, z) = (p[1], p[2]);
        p[1] = c * y - s * z;
        p[2] = s * y + c * z;
    })
}

/// A based family of long knots over `[-1,1]^i`, multilinear between grid
/// nodes and equal to the base outside the cube.
#[derive(Clone, Debug)]
pub struct KnotFamily {
    base: LongKnotPL,
    axes: usize,
    nodes: Vec<f64>,
    entries: Vec<LongKnotPL>,
}

impl KnotFamily {
    /// `entries` are in row-major order over `nodes^axes`, the last axis
    /// varying fastest. Entries on the boundary of the cube must equal the base.
    pub fn new(base: LongKnotPL, axes: usize, nodes: Vec<f64>, entries: Vec<LongKnotPL>) -> Result<Self> {
        if axes == 0 {
            return Err(Error::InvalidParameter("a family needs at least one parameter".into()));
        }
        if nodes.len() < 2 || nodes[0] != -1.0 || nodes[nodes.len() - 1] != 1.0 || nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("family nodes must increase from -1 to 1".into()));
        }
        let expected = nodes.len().pow(axes as u32);
        if entries.len() != expected {
            return Err(Error::ArityMismatch { expected, found: entries.len() });
        }
        let n = base.ambient_dim();
        if let Some(k) = entries.iter().find(|k| k.ambient_dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: k.ambient_dim() });
        }
        let fam = KnotFamily { base, axes, nodes, entries };
        for (idx, k) in fam.entries.iter().enumerate() {
            let on_boundary = fam.multi_index(idx).iter().any(|&i| i == 0 || i + 1 == fam.nodes.len());
            if on_boundary && !knots_equal(k, &fam.base) {
                return Err(Error::NotBased(format!("boundary entry {idx} differs from the base")));
            }
        }
        Ok(fam)
    }

    /// The family `s -> f(s)` from a based loop.
    pub fn from_loop(lp: &LoopOfKnots) -> Result<Self> {
        lp.check_based()?;
        let nodes = lp.entries.iter().map(|(s, _)| *s).collect();
        let entries = lp.entries.iter().map(|(_, k)| k.clone()).collect();
        KnotFamily::new(lp.base.clone(), 1, nodes, entries)
    }

    /// A family built from a function on the node grid.
    pub fn tabulate<F>(base: LongKnotPL, axes: usize, q: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Result<LongKnotPL> + Sync,
    {
        let nodes: Vec<f64> = (0..=q).map(|i| sample_param(i, q)).collect();
        let count = nodes.len().pow(axes as u32);
        let entries = par::map_range(Execution::Parallel, count, |idx| {
            let mut s = vec![0.0; axes];
            let mut rem = idx;
            for a in (0..axes).rev() {
                s[a] = nodes[rem % nodes.len()];
                rem /= nodes.len();
            }
            if s.iter().any(|x| x.abs() == 1.0) {
                Ok(base.clone())
            } else {
                f(&s)
            }
        });
        KnotFamily::new(base.clone(), axes, nodes, entries.into_iter().collect::<Result<Vec<_>>>()?)
    }

    fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let q = self.nodes.len();
        let mut out = vec![0; self.axes];
        for a in (0..self.axes).rev() {
            out[a] = idx % q;
            idx /= q;
        }
        out
    }

    pub fn axes(&self) -> usize {
        self.axes
    }

    pub fn base(&self) -> &LongKnotPL {
        &self.base
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.ambient_dim()
    }

    /// `f(s)(t)`.
    pub fn eval(&self, s: &[f64], t: f64) -> Vec<f64> {
        if s.iter().any(|x| x.abs() >= 1.0) {
            return self.base.eval(t);
        }
        let q = self.nodes.len();
        let cells: Vec<(usize, f64)> = s
            .iter()
            .map(|&x| {
                let i = self.nodes.partition_point(|&u| u <= x) - 1;
                (i, (x - self.nodes[i]) / (self.nodes[i + 1] - self.nodes[i]))
            })
            .collect();
        // corner values, then one linear interpolation per axis; exact when
        // neighbouring entries agree
        let mut values: Vec<Vec<f64>> = (0..(1usize << self.axes))
            .map(|corner| {
                let idx = cells.iter().enumerate().fold(0, |idx, (a, &(i, _))| idx * q + i + ((corner >> a) & 1));
                self.entries[idx].eval(t)
            })
            .collect();
        for &(_, lam) in cells.iter() {
            values = values
                .chunks(2)
                .map(|pair| {
                    if lam == 0.0 {
                        return pair[0].clone();
                    }
                    pair[0].iter().zip(&pair[1]).map(|(p, r)| p + lam * (r - p)).collect()
                })
                .collect();
        }
        values.pop().expect("one value left")
    }
}

/// A sampled map `R^j -> R^n` on a regular grid.
#[derive(Clone, Debug, Serialize)]
pub struct SpunKnotSampled {
    pub ambient_dim: usize,
    pub domain_dim: usize,
    pub samples: usize,
    /// Half-width of the sampled domain cube.
    pub extent: f64,
    pub params: Vec<Vec<f64>>,
    pub images: Vec<Vec<f64>>,
    /// Whether the map is the standard inclusion outside `I^j`.
    pub standard_outside: bool,
}

impl SpunKnotSampled {
    fn build<F>(ambient_dim: usize, domain_dim: usize, samples: usize, extent: f64, standard_outside: bool, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Sync,
    {
        let params = grid(domain_dim, samples, extent);
        let images = par::map(Execution::Parallel, &params, |x| f(x));
        SpunKnotSampled { ambient_dim, domain_dim, samples, extent, params, images, standard_outside }
    }

    /// The injectivity proxy on the sampled grid.
    pub fn passes_proxy(&self, delta: f64, eps: f64) -> bool {
        injectivity_proxy(&self.params, &self.images, delta, eps)
    }

    /// Default proxy thresholds: `delta` = two grid steps, `eps` = a tenth of a step.
    pub fn passes_default_proxy(&self) -> bool {
        let step = 2.0 * self.extent / self.samples as f64;
        self.passes_proxy(2.0 * step, 0.1 * step)
    }

    /// Largest deviation from the standard inclusion over samples outside `I^j`.
    pub fn deviation_outside(&self) -> f64 {
        self.params
            .iter()
            .zip(&self.images)
            .filter(|(p, _)| p.iter().any(|x| x.abs() > 1.0))
            .map(|(p, y)| deviation_from_standard(p, y))
            .fold(0.0, f64::max)
    }

    /// Largest deviation from the standard inclusion over all samples.
    pub fn deviation_from_standard(&self) -> f64 {
        self.params.iter().zip(&self.images).map(|(p, y)| deviation_from_standard(p, y)).fold(0.0, f64::max)
    }

    /// Wavefront OBJ of a sampled surface, using the first three coordinates.
    pub fn to_obj(&self) -> Result<String> {
        if self.domain_dim != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.domain_dim });
        }
        let mut out = format!("# sampled surface in R^{}, first three coordinates\n", self.ambient_dim);
        for y in &self.images {
            out.push_str(&format!("v {} {} {}\n", y[0], y[1], y.get(2).copied().unwrap_or(0.0)));
        }
        let n = self.samples;
        for a in 0..n - 1 {
            for b in 0..n - 1 {
                let idx = |a: usize, b: usize| a * n + b + 1;
                out.push_str(&format!("f {} {} {} {}\n", idx(a, b), idx(a + 1, b), idx(a + 1, b + 1), idx(a, b + 1)));
            }
        }
        Ok(out)
    }
}

fn deviation_from_standard(p: &[f64], y: &[f64]) -> f64 {
    y.iter()
        .enumerate()
        .map(|(i, v)| (v - p.get(i).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Default half-width of sampled domains: a margin outside `I^j` shows the
/// standard behaviour.
pub const SPIN_EXTENT: f64 = 1.1;

/// `gr_1` of a based loop: `(t_0, t_1) -> (t_0, f(t_0)(t_1))`.
pub fn gr1_loop(lp: &LoopOfKnots, samples: usize) -> Result<SpunKnotSampled> {
    let fam = KnotFamily::from_loop(lp)?;
    gr_i(&fam, samples, usize::MAX)
}

/// `gr_i` of an `i`-parameter based family: `(s, t) -> (s, f(s)(t))` in
/// `R^{n+i}`. Fails when `n + i` exceeds `max_ambient`.
pub fn gr_i(fam: &KnotFamily, samples: usize, max_ambient: usize) -> Result<SpunKnotSampled> {
    let i = fam.axes();
    let n = fam.ambient_dim() + i;
    if n > max_ambient {
        return Err(Error::InvalidParameter(format!("ambient dimension {n} exceeds the cap {max_ambient}")));
    }
    let standard = fam.base().is_straight();
    Ok(SpunKnotSampled::build(n, i + 1, samples, SPIN_EXTENT, standard, |x| {
        let mut out = x[..i].to_vec();
        out.extend(fam.eval(&x[..i], x[i]));
        out
    }))
}

/// `P_2(t_1, t_2) = ((t_2 + 2)/3 cos(pi t_1), (t_2 + 2)/3 sin(pi t_1))`.
pub fn p2(t1: f64, t2: f64) -> (f64, f64) {
    let r = (t2 + 2.0) / 3.0;
    (r * (PI * t1).cos(), r * (PI * t1).sin())
}

/// Inverse of `P_2` on its image, the closed annulus `1/3 <= r <= 1`.
pub fn p2_inverse(x: f64, y: f64) -> Option<(f64, f64)> {
    let r = x.hypot(y);
    if !(1.0 / 3.0..=1.0).contains(&r) {
        return None;
    }
    Some((y.atan2(x) / PI, 3.0 * r - 2.0))
}

/// Litherland spinning of a free loop of long knots in `R^{n-1}`, giving a
/// sampled long 2-knot in `R^n`.
#[derive(Clone, Debug)]
pub struct LitherlandSpin {
    lp: LoopOfKnots,
}

impl LitherlandSpin {
    pub fn new(lp: &LoopOfKnots) -> Result<Self> {
        lp.check_closed()?;
        Ok(LitherlandSpin { lp: lp.clone() })
    }

    pub fn ambient_dim(&self) -> usize {
        self.lp.ambient_dim() + 1
    }

    /// `P_n o h o P_2^-1` on the annulus, standard elsewhere.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let n = self.ambient_dim();
        let mut out = vec![0.0; n];
        out[0] = x[0];
        out[1] = x[1];
        let Some((t0, t1)) = p2_inverse(x[0], x[1]) else {
            return out;
        };
        self.on_annulus(t0, t1)
    }

    fn on_annulus(&self, t0: f64, t1: f64) -> Vec<f64> {
        let f = self.lp.eval(t0.clamp(-1.0, 1.0), t1);
        let (a, b) = p2(t0, f[0]);
        let mut out = vec![a, b];
        out.extend_from_slice(&f[1..]);
        out
    }

    /// Largest deviation from the standard inclusion on `samples` points of
    /// each boundary circle of the annulus.
    pub fn boundary_deviation(&self, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            let t0 = -1.0 + 2.0 * i as f64 / samples as f64;
            for t1 in [-1.0, 1.0] {
                let (x, y) = p2(t0, t1);
                let img = self.on_annulus(t0, t1);
                let mut std = vec![0.0; self.ambient_dim()];
                std[0] = x;
                std[1] = y;
                worst = worst.max(deviation_from_standard(&std, &img));
            }
        }
        worst
    }

    /// Difference of the one-sided limits across the seam `t_0 = +-1`.
    pub fn seam_gap(&self, samples: usize) -> f64 {
        (0..=samples)
            .map(|i| {
                let t1 = -1.0 + 2.0 * i as f64 / samples as f64;
                let (a, b) = (self.on_annulus(-1.0, t1), self.on_annulus(1.0, t1));
                a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Litherland spinning sampled on a `samples^2` grid.
pub fn litherland_spin(lp: &LoopOfKnots, samples: usize) -> Result<SpunKnotSampled> {
    let spin = LitherlandSpin::new(lp)?;
    Ok(SpunKnotSampled::build(spin.ambient_dim(), 2, samples, SPIN_EXTENT, true, |x| spin.eval(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::library::right_trefoil;

    #[test]
    fn p2_examples() {
        let (x, y) = p2(1.0, 0.5);
        assert!((x + 2.5 / 3.0).abs() < 1e-15 && y.abs() < 1e-15);
        let (t1, t2) = p2_inverse(p2(0.3, -0.4).0, p2(0.3, -0.4).1).unwrap();
        assert!((t1 - 0.3).abs() < 1e-14 && (t2 + 0.4).abs() < 1e-14);
        assert!(p2_inverse(0.1, 0.0).is_none());
    }

    #[test]
    fn constant_unknot_loop_is_standard() {
        let lp = LoopOfKnots::constant(&LongKnotPL::unknot(3), 4);
        let g = gr1_loop(&lp, 16).unwrap();
        assert_eq!(g.deviation_from_standard(), 0.0);
        assert!(g.standard_outside);
        let l = litherland_spin(&lp, 16).unwrap();
        assert!(l.deviation_from_standard() < 1e-15);
    }

    #[test]
    fn constant_trefoil_loop_is_a_product() {
        let f = right_trefoil();
        let lp = LoopOfKnots::constant(&f, 4);
        let g = gr1_loop(&lp, 24).unwrap();
        for (p, y) in g.params.iter().zip(&g.images) {
            assert_eq!(y[0], p[0]);
            assert_eq!(y[1..], f.eval(p[1])[..]);
        }
        assert!(g.passes_default_proxy());
        assert!(!g.standard_outside);
    }

    #[test]
    fn rotation_loop_is_based_and_closed() {
        let f = right_trefoil();
        let lp = LoopOfKnots::rotation(&f, 32).unwrap();
        lp.check_based().unwrap();
        lp.check_closed().unwrap();
        lp.check_entries().unwrap();
        let spin = LitherlandSpin::new(&lp).unwrap();
        assert!(spin.boundary_deviation(500) <= 1e-12);
        assert!(spin.seam_gap(200) <= 1e-9);
    }

    #[test]
    fn loop_validation() {
        let f = right_trefoil();
        let u = LongKnotPL::unknot(3);
        let lp = LoopOfKnots::new(u.clone(), vec![(-1.0, u.clone()), (1.0, f.clone())]).unwrap();
        assert!(matches!(lp.check_based(), Err(Error::NotBased(_))));
        assert!(matches!(lp.check_closed(), Err(Error::NotClosed(_))));
        assert!(gr1_loop(&lp, 8).is_err());
        assert!(litherland_spin(&lp, 8).is_err());
        assert!(LoopOfKnots::new(u.clone(), vec![(-1.0, u.clone()), (0.5, u.clone())]).is_err());
        let js = LoopOfKnots::constant(&f, 2).to_json();
        assert_eq!(LoopOfKnots::from_json(&js).unwrap(), LoopOfKnots::constant(&f, 2));
    }

    #[test]
    fn gr_i_bookkeeping() {
        let f = right_trefoil();
        let lp = LoopOfKnots::rotation(&f, 8).unwrap();
        let one = gr1_loop(&lp, 12).unwrap();
        let again = gr_i(&KnotFamily::from_loop(&lp).unwrap(), 12, 10).unwrap();
        assert_eq!(one.images, again.images);
        let u = LongKnotPL::unknot(3);
        let flat = KnotFamily::tabulate(u.clone(), 2, 4, |_| Ok(u.clone())).unwrap();
        let g2 = gr_i(&flat, 8, 10).unwrap();
        assert_eq!((g2.ambient_dim, g2.domain_dim), (5, 3));
        assert_eq!(g2.deviation_from_standard(), 0.0);
        assert!(gr_i(&flat, 8, 4).is_err());
    }
}
