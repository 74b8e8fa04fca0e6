//! Loops of tube embeddings based at the identity, and the action of
//! `(j+2)`-cubes on them that makes graphing equivariant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AffineF64, AxisAffine};
use crate::operad::{height_permutation, CubeConfig};
use crate::tube::{conjugate_eval, random_points, Shear, SupportBox, TubeEmbedding, TubeSpec, Twist};

/// `sin(pi (s + 1) / 2)`: vanishes at both ends of the loop.
fn loop_profile(s: f64) -> f64 {
    (std::f64::consts::FRAC_PI_2 * (s + 1.0)).sin()
}

#[derive(Clone, Debug)]
pub struct ActPart {
    /// First factor: reparametrises the loop variable.
    l1: AffineF64,
    /// Middle factors: conjugate the tube domain.
    maps: Vec<AffineF64>,
    support: Option<SupportBox>,
}

/// A loop `s -> f(s)` in `EC(j, D^k)` with `f(s) = Id` for `|s| >= 1`.
#[derive(Clone, Debug)]
pub enum TubeLoop {
    /// Piecewise-linear in `s` through the given tubes.
    Sampled { j: usize, k: usize, entries: Vec<(f64, TubeEmbedding)> },
    /// The twist leaf with angle scaled by the loop profile.
    Twist(Twist),
    /// The shear leaf with amplitude scaled by the loop profile.
    Shear(Shear),
    /// `kappa'(L, f_1, .., f_i)(s) = kappa(L^beta, f_1(l_1^-1 s), ..)`.
    Act { config: CubeConfig, loops: Vec<TubeLoop>, order: Vec<usize>, parts: Vec<ActPart> },
}

/// Serialisable form of a [`TubeLoop`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TubeLoopSpec {
    Sampled { j: usize, k: usize, entries: Vec<(f64, TubeSpec)> },
    Twist(Twist),
    Shear(Shear),
    Act { config: CubeConfig, loops: Vec<TubeLoopSpec> },
}

impl TubeLoop {
    pub fn sampled(j: usize, k: usize, entries: Vec<(f64, TubeEmbedding)>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidParameter("a sampled loop needs at least two entries".into()));
        }
        if entries[0].0 != -1.0 || entries[entries.len() - 1].0 != 1.0 {
            return Err(Error::InvalidParameter("loop samples must span [-1, 1]".into()));
        }
        if entries.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidParameter("loop samples must be strictly increasing".into()));
        }
        if let Some((_, e)) = entries.iter().find(|(_, e)| e.domain_dim() != j || e.disk_dim() != k) {
            return Err(Error::DimensionMismatch { expected: j + k, found: e.domain_dim() + e.disk_dim() });
        }
        let lp = TubeLoop::Sampled { j, k, entries };
        lp.check_based_at_identity()?;
        Ok(lp)
    }

    pub fn domain_dim(&self) -> usize {
        match self {
            TubeLoop::Sampled { j, .. } => *j,
            TubeLoop::Twist(t) => t.j(),
            TubeLoop::Shear(s) => s.j(),
            TubeLoop::Act { config, .. } => config.dim() - 2,
        }
    }

    pub fn disk_dim(&self) -> usize {
        match self {
            TubeLoop::Sampled { k, .. } => *k,
            TubeLoop::Twist(t) => t.k,
            TubeLoop::Shear(s) => s.k,
            TubeLoop::Act { loops, .. } => loops[0].disk_dim(),
        }
    }

    /// Box in `R^j` containing the supports of all `f(s)`.
    pub fn support(&self) -> Option<SupportBox> {
        match self {
            TubeLoop::Sampled { entries, .. } => entries
                .iter()
                .filter_map(|(_, e)| e.support().cloned())
                .reduce(|a, b| hull(&a, &b)),
            TubeLoop::Twist(t) => Some(SupportBox { lo: t.bump.lo(), hi: t.bump.hi() }),
            TubeLoop::Shear(s) => Some(SupportBox { lo: s.bump.lo(), hi: s.bump.hi() }),
            TubeLoop::Act { parts, .. } => parts.iter().filter_map(|p| p.support.clone()).reduce(|a, b| hull(&a, &b)),
        }
    }

    /// Sampled loops must start and end at the identity; the other kinds
    /// are based by construction.
    pub fn check_based_at_identity(&self) -> Result<()> {
        match self {
            TubeLoop::Sampled { j, k, entries } => {
                let probe = random_points(0xba5e, 200, *j, *k, 1.2);
                for (s, e) in [&entries[0], &entries[entries.len() - 1]] {
                    let dev = e.deviation_from_identity(&probe)?;
                    if dev > 1e-12 {
                        return Err(Error::NotBased(format!("entry at s = {s} deviates from the identity by {dev}")));
                    }
                }
                Ok(())
            }
            TubeLoop::Act { loops, .. } => loops.iter().try_for_each(TubeLoop::check_based_at_identity),
            _ => Ok(()),
        }
    }

    /// `f(s)(x)`.
    pub fn eval_at(&self, s: f64, x: &[f64]) -> Result<Vec<f64>> {
        if s <= -1.0 || s >= 1.0 {
            return Ok(x.to_vec());
        }
        match self {
            TubeLoop::Sampled { entries, .. } => {
                let i = entries.partition_point(|(t, _)| *t <= s) - 1;
                let (s0, e0) = &entries[i];
                let (s1, e1) = &entries[i + 1];
                let lam = (s - s0) / (s1 - s0);
                let a = e0.eval_unchecked(x)?;
                if lam == 0.0 {
                    return Ok(a);
                }
                let b = e1.eval_unchecked(x)?;
                Ok(a.iter().zip(&b).map(|(p, q)| p + lam * (q - p)).collect())
            }
            TubeLoop::Twist(t) => Twist { angle: t.angle * loop_profile(s), ..t.clone() }.eval(x),
            TubeLoop::Shear(sh) => Shear { amplitude: sh.amplitude * loop_profile(s), ..sh.clone() }.eval(x),
            TubeLoop::Act { loops, order, parts, .. } => {
                let j = self.domain_dim();
                let mut y = x.to_vec();
                for &i in order.iter().rev() {
                    let part = &parts[i];
                    if !part.support.as_ref().is_some_and(|b| b.contains(&y[..j])) {
                        continue;
                    }
                    let s_i = part.l1.apply_inverse(s);
                    y = conjugate_eval(&part.maps, &y, |z| loops[i].eval_at(s_i, z))?;
                }
                Ok(y)
            }
        }
    }

    pub fn to_spec(&self) -> TubeLoopSpec {
        match self {
            TubeLoop::Sampled { j, k, entries } => TubeLoopSpec::Sampled {
                j: *j,
                k: *k,
                entries: entries.iter().map(|(s, e)| (*s, e.to_spec())).collect(),
            },
            TubeLoop::Twist(t) => TubeLoopSpec::Twist(t.clone()),
            TubeLoop::Shear(s) => TubeLoopSpec::Shear(s.clone()),
            TubeLoop::Act { config, loops, .. } => TubeLoopSpec::Act {
                config: config.clone(),
                loops: loops.iter().map(TubeLoop::to_spec).collect(),
            },
        }
    }

    pub fn from_spec(spec: &TubeLoopSpec) -> Result<Self> {
        match spec {
            TubeLoopSpec::Sampled { j, k, entries } => TubeLoop::sampled(
                *j,
                *k,
                entries
                    .iter()
                    .map(|(s, e)| Ok((*s, TubeEmbedding::from_spec(e)?)))
                    .collect::<Result<Vec<_>>>()?,
            ),
            TubeLoopSpec::Twist(t) => Ok(TubeLoop::Twist(Twist::new(t.k, t.bump.clone(), t.angle)?)),
            TubeLoopSpec::Shear(s) => Ok(TubeLoop::Shear(Shear::new(s.k, s.bump.clone(), s.amplitude)?)),
            TubeLoopSpec::Act { config, loops } => {
                kappa_prime(config, &loops.iter().map(TubeLoop::from_spec).collect::<Result<Vec<_>>>()?)
            }
        }
    }
}

fn hull(a: &SupportBox, b: &SupportBox) -> SupportBox {
    SupportBox {
        lo: a.lo.iter().zip(&b.lo).map(|(x, y)| x.min(*y)).collect(),
        hi: a.hi.iter().zip(&b.hi).map(|(x, y)| x.max(*y)).collect(),
    }
}

/// The action of `C_{j+2}(i)` on loops in `EC(j, D^k)`: the first factor of
/// each cube reparametrises its loop, the rest act by the overlap action.
pub fn kappa_prime(config: &CubeConfig, loops: &[TubeLoop]) -> Result<TubeLoop> {
    if loops.len() != config.arity() {
        return Err(Error::ArityMismatch { expected: config.arity(), found: loops.len() });
    }
    let Some(first) = loops.first() else {
        return Err(Error::InvalidParameter("nullary loop action: use the constant identity loop".into()));
    };
    let (j, k) = (first.domain_dim(), first.disk_dim());
    if config.dim() != j + 2 {
        return Err(Error::DimensionMismatch { expected: j + 2, found: config.dim() });
    }
    if let Some(lp) = loops.iter().find(|l| l.domain_dim() != j || l.disk_dim() != k) {
        return Err(Error::DimensionMismatch { expected: j, found: lp.domain_dim() });
    }
    // L^beta drops the first factor; its projection drops the last one, so
    // the heights are those of the full configuration
    let order = height_permutation(config)?.images().to_vec();
    let parts = config
        .cubes()
        .iter()
        .zip(loops)
        .map(|(cube, lp)| {
            let f = cube.factors_f64();
            let maps = f[1..=j].to_vec();
            let support = lp.support().map(|b| SupportBox {
                lo: maps.iter().zip(&b.lo).map(|(l, x)| l.apply(*x)).collect(),
                hi: maps.iter().zip(&b.hi).map(|(l, x)| l.apply(*x)).collect(),
            });
            ActPart { l1: f[0], maps, support }
        })
        .collect();
    Ok(TubeLoop::Act { config: config.clone(), loops: loops.to_vec(), order, parts })
}

/// `gr_1` on loops of tube embeddings: `(t_0, t, m) -> (t_0, f(t_0)(t, m))`.
pub fn gr1_tube(lp: &TubeLoop) -> Result<TubeEmbedding> {
    TubeEmbedding::graph(lp.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::kappa_overlap;
    use crate::operad::random::random_config;
    use crate::tube::BoxBump;
    use rand::SeedableRng;

    pub(crate) fn sample_loops() -> Vec<TubeLoop> {
        let tw = Twist::new(2, BoxBump::new(vec![0.1], vec![0.7]).unwrap(), 2.5).unwrap();
        let sh = Shear::new(2, BoxBump::new(vec![-0.2], vec![0.6]).unwrap(), 0.15).unwrap();
        let mid = TubeEmbedding::compose(vec![
            TubeEmbedding::twist(Twist::new(2, BoxBump::new(vec![0.0], vec![0.9]).unwrap(), -1.0).unwrap()),
            TubeEmbedding::shear(sh.clone()),
        ])
        .unwrap();
        let sampled = TubeLoop::sampled(
            1,
            2,
            vec![(-1.0, TubeEmbedding::identity(1, 2)), (0.2, mid), (1.0, TubeEmbedding::identity(1, 2))],
        )
        .unwrap();
        vec![TubeLoop::Twist(tw), TubeLoop::Shear(sh), sampled]
    }

    #[test]
    fn constant_identity_loop_graphs_to_identity() {
        let lp = TubeLoop::sampled(1, 2, vec![(-1.0, TubeEmbedding::identity(1, 2)), (1.0, TubeEmbedding::identity(1, 2))]).unwrap();
        let g = gr1_tube(&lp).unwrap();
        let pts = g.sample_points(8, 4);
        assert_eq!(g.deviation_from_identity(&pts).unwrap(), 0.0);
    }

    #[test]
    fn unbased_loop_rejected() {
        let tw = TubeEmbedding::twist(Twist::new(2, BoxBump::new(vec![0.0], vec![0.5]).unwrap(), 1.0).unwrap());
        let err = TubeLoop::sampled(1, 2, vec![(-1.0, tw), (1.0, TubeEmbedding::identity(1, 2))]);
        assert!(matches!(err, Err(Error::NotBased(_))));
    }

    #[test]
    fn graphing_is_equivariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let loops = sample_loops();
        for case in 0..4 {
            let c = random_config(&mut rng, 3, 3);
            let lhs = gr1_tube(&kappa_prime(&c, &loops).unwrap()).unwrap();
            let tubes: Vec<TubeEmbedding> = loops.iter().map(|l| gr1_tube(l).unwrap()).collect();
            let rhs = kappa_overlap(&c, &tubes).unwrap();
            for x in random_points(case, 1000, 2, 2, 1.1) {
                let (a, b) = (lhs.eval(&x).unwrap(), rhs.eval(&x).unwrap());
                assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() <= 1e-9), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn spec_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let act = kappa_prime(&random_config(&mut rng, 3, 3), &sample_loops()).unwrap();
        let js = serde_json::to_string(&act.to_spec()).unwrap();
        let back = TubeLoop::from_spec(&serde_json::from_str(&js).unwrap()).unwrap();
        for x in random_points(1, 100, 1, 2, 1.1) {
            assert_eq!(back.eval_at(0.3, &x).unwrap(), act.eval_at(0.3, &x).unwrap());
        }
    }
}
