//! Pseudoisotopy embeddings of `R^j x D^k`: standard for `t_1 <= -1`, equal
//! to a tube embedding of one dimension lower for `t_1 >= 1`.

use std::sync::Arc;

use super::leaves::smoothstep;
use super::{conjugate_eval, random_points, TubeEmbedding};
use crate::error::{Error, Result};
use crate::geometry::{AffineF64, AxisAffine, LittleCube};

#[derive(Debug)]
enum PNode {
    Identity,
    /// Shrinks the face into `s I^{j-1}` with `s` rising from 0 to 1 over `t_1 in [-1, 1]`.
    Sweep(TubeEmbedding),
    Compose(Vec<PseudoIsotopyEmbedding>),
    Conjugate { cube: LittleCube, maps: Vec<AffineF64>, inner: PseudoIsotopyEmbedding },
}

/// An element of `PEC(j, D^k)`.
#[derive(Clone, Debug)]
pub struct PseudoIsotopyEmbedding {
    j: usize,
    k: usize,
    node: Arc<PNode>,
}

impl PseudoIsotopyEmbedding {
    fn new(j: usize, k: usize, node: PNode) -> Self {
        PseudoIsotopyEmbedding { j, k, node: Arc::new(node) }
    }

    pub fn identity(j: usize, k: usize) -> Self {
        PseudoIsotopyEmbedding::new(j, k, PNode::Identity)
    }

    /// A pseudoisotopy from the identity to `face`.
    pub fn sweep(face: TubeEmbedding) -> Self {
        PseudoIsotopyEmbedding::new(face.domain_dim() + 1, face.disk_dim(), PNode::Sweep(face))
    }

    pub fn compose(parts: Vec<PseudoIsotopyEmbedding>) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("empty composition".into()))?;
        let (j, k) = (first.j, first.k);
        if let Some(p) = parts.iter().find(|p| p.j != j || p.k != k) {
            return Err(Error::DimensionMismatch { expected: j + k, found: p.j + p.k });
        }
        let parts: Vec<_> = parts.into_iter().filter(|p| !matches!(*p.node, PNode::Identity)).collect();
        Ok(match parts.len() {
            0 => PseudoIsotopyEmbedding::identity(j, k),
            1 => parts.into_iter().next().expect("one part"),
            _ => PseudoIsotopyEmbedding::new(j, k, PNode::Compose(parts)),
        })
    }

    pub fn conjugate(cube: &LittleCube, inner: PseudoIsotopyEmbedding) -> Result<Self> {
        if cube.dim() != inner.j {
            return Err(Error::DimensionMismatch { expected: inner.j, found: cube.dim() });
        }
        if matches!(*inner.node, PNode::Identity) {
            return Ok(inner);
        }
        let (j, k) = (inner.j, inner.k);
        let maps = cube.factors_f64();
        Ok(PseudoIsotopyEmbedding::new(j, k, PNode::Conjugate { cube: cube.clone(), maps, inner }))
    }

    pub fn domain_dim(&self) -> usize {
        self.j
    }

    pub fn disk_dim(&self) -> usize {
        self.k
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.j + self.k {
            return Err(Error::DimensionMismatch { expected: self.j + self.k, found: x.len() });
        }
        self.eval_unchecked(x)
    }

    fn eval_unchecked(&self, x: &[f64]) -> Result<Vec<f64>> {
        // support lies in [-1, inf) x I^{j-1} x D^k
        if x[0] <= -1.0 || x[1..self.j].iter().any(|t| t.abs() > 1.0) {
            return Ok(x.to_vec());
        }
        match &*self.node {
            PNode::Identity => Ok(x.to_vec()),
            PNode::Sweep(face) => {
                let s = if x[0] >= 1.0 { 1.0 } else { smoothstep((x[0] + 1.0) / 2.0) };
                let mut y: Vec<f64> = x[1..].to_vec();
                if s < 1.0 {
                    for c in &mut y[..self.j - 1] {
                        *c /= s;
                    }
                }
                if !face.support().is_some_and(|b| b.contains(&y[..self.j - 1])) {
                    return Ok(x.to_vec());
                }
                let mut z = face.eval_unchecked(&y)?;
                if s < 1.0 {
                    for c in &mut z[..self.j - 1] {
                        *c *= s;
                    }
                }
                let mut out = vec![x[0]];
                out.extend(z);
                Ok(out)
            }
            PNode::Compose(parts) => {
                let mut y = x.to_vec();
                for p in parts.iter().rev() {
                    y = p.eval_unchecked(&y)?;
                }
                Ok(y)
            }
            PNode::Conjugate { maps, inner, .. } => conjugate_eval(maps, x, |y| inner.eval_unchecked(y)),
        }
    }

    /// The tube on the face `t_1 >= 1`.
    pub fn face(&self) -> TubeEmbedding {
        match &*self.node {
            PNode::Identity => TubeEmbedding::identity(self.j - 1, self.k),
            PNode::Sweep(face) => face.clone(),
            PNode::Compose(parts) => {
                TubeEmbedding::compose(parts.iter().map(|p| p.face()).collect()).expect("parts share dimensions")
            }
            PNode::Conjugate { cube, inner, .. } => {
                let rest = cube.drop_first().expect("pseudoisotopies have j >= 2");
                TubeEmbedding::conjugate(&rest, inner.face()).expect("dimensions match")
            }
        }
    }

    /// Largest discrepancy between the map on `t_1 >= 1` and `(t_1, g(rest))`.
    pub fn face_deviation(&self, g: &TubeEmbedding, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, rest) in random_points(0x5eed, samples, self.j - 1, self.k, 1.2).into_iter().enumerate() {
            let t1 = 1.0 + (i % 4) as f64 * 0.25;
            let mut x = vec![t1];
            x.extend_from_slice(&rest);
            let (Ok(lhs), Ok(rhs)) = (self.eval(&x), g.eval(&rest)) else {
                return f64::INFINITY;
            };
            let dev = std::iter::once((lhs[0] - t1).abs())
                .chain(lhs[1..].iter().zip(&rhs).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            worst = worst.max(dev);
        }
        worst
    }
}

/// Checks the declared shape of a pseudoisotopy on sampled points: standard
/// below `t_1 = -1` and outside `I^{j-1}` in the remaining domain directions.
pub fn support_violation(p: &PseudoIsotopyEmbedding, samples: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in random_points(0xface, samples, p.domain_dim(), p.disk_dim(), 2.0) {
        let outside = x[0] <= -1.0 || x[1..p.domain_dim()].iter().any(|t| t.abs() > 1.0);
        if outside {
            let y = p.eval(&x)?;
            worst = worst.max(x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{kappa_overlap, kappa_pec, restrict_face};
    use crate::operad::{operad_compose, random::random_config, symmetric_action, CubeConfig, Permutation};
    use crate::tube::{BoxBump, Shear, Twist};
    use rand::SeedableRng;

    fn twist(center: f64, angle: f64) -> TubeEmbedding {
        TubeEmbedding::twist(Twist::new(2, BoxBump::new(vec![center], vec![0.5]).unwrap(), angle).unwrap())
    }

    fn shear(amp: f64) -> TubeEmbedding {
        TubeEmbedding::shear(Shear::new(2, BoxBump::new(vec![0.1], vec![0.6]).unwrap(), amp).unwrap())
    }

    fn corpus() -> Vec<PseudoIsotopyEmbedding> {
        vec![
            PseudoIsotopyEmbedding::sweep(twist(0.2, 1.3)),
            PseudoIsotopyEmbedding::sweep(shear(0.15)),
            PseudoIsotopyEmbedding::sweep(TubeEmbedding::compose(vec![twist(-0.3, -0.7), shear(-0.1)]).unwrap()),
        ]
    }

    fn max_dev(a: &PseudoIsotopyEmbedding, b: &PseudoIsotopyEmbedding, seed: u64) -> f64 {
        random_points(seed, 1000, 2, 2, 1.3)
            .iter()
            .map(|x| {
                let (p, q) = (a.eval(x).unwrap(), b.eval(x).unwrap());
                p.iter().zip(&q).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn sweep_has_the_declared_shape() {
        let p = PseudoIsotopyEmbedding::sweep(twist(0.0, 2.0));
        assert_eq!(support_violation(&p, 500).unwrap(), 0.0);
        let g = restrict_face(&p, 200, 0.0).unwrap();
        assert_eq!(p.face_deviation(&g, 200), 0.0);
        let id = PseudoIsotopyEmbedding::identity(2, 2);
        let x = [0.3, 0.2, 0.1, 0.1];
        assert_eq!(id.eval(&x).unwrap(), x.to_vec());
        assert!(restrict_face(&p, 50, 1e-9).is_ok());
    }

    #[test]
    fn pec_action_axioms() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let ps = corpus();
        // identity
        let unit = CubeConfig::unit(2);
        assert_eq!(max_dev(&kappa_pec(&unit, &ps[..1]).unwrap(), &ps[0], 1), 0.0);
        for case in 0..5 {
            let c = random_config(&mut rng, 2, 3);
            let alpha = Permutation::random(3, &mut rng);
            let lhs = kappa_pec(&symmetric_action(&c, &alpha).unwrap(), &alpha.permute(&ps).unwrap()).unwrap();
            let rhs = kappa_pec(&c, &ps).unwrap();
            assert!(max_dev(&lhs, &rhs, case) < 1e-9);

            let outer = random_config(&mut rng, 2, 2);
            let inner: Vec<CubeConfig> = (0..2).map(|_| random_config(&mut rng, 2, 2)).collect();
            let leaves: Vec<PseudoIsotopyEmbedding> = (0..4).map(|i| ps[i % 3].clone()).collect();
            let flat = kappa_pec(&operad_compose(&outer, &inner).unwrap(), &leaves).unwrap();
            let nested_inputs: Vec<_> =
                (0..2).map(|i| kappa_pec(&inner[i], &leaves[2 * i..2 * i + 2]).unwrap()).collect();
            let nested = kappa_pec(&outer, &nested_inputs).unwrap();
            assert!(max_dev(&flat, &nested, case + 100) < 1e-9);
        }
    }

    #[test]
    fn restriction_is_equivariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        let ps = corpus();
        for _ in 0..5 {
            let c = random_config(&mut rng, 2, 3);
            let lhs = restrict_face(&kappa_pec(&c, &ps).unwrap(), 500, 1e-9).unwrap();
            let faces: Vec<TubeEmbedding> = ps.iter().map(|p| p.face()).collect();
            let rhs = kappa_overlap(&c.rotate_first_to_last(), &faces).unwrap();
            for x in random_points(9, 500, 1, 2, 1.3) {
                let (a, b) = (lhs.eval(&x).unwrap(), rhs.eval(&x).unwrap());
                assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-9));
            }
        }
    }
}
