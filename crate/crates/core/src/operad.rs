//! The little n-cubes operad: configurations, composition, the symmetric
//! group action and the height ordering used by the overlap actions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cubes_disjoint, AxisAffine, LittleCube, Scalar};

/// A point of `C_n(j)`: `j` little n-cubes with disjoint interiors.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct CubeConfig {
    dim: usize,
    cubes: Vec<LittleCube>,
}

#[derive(Deserialize)]
struct RawConfig {
    dim: usize,
    cubes: Vec<LittleCube>,
}

impl TryFrom<RawConfig> for CubeConfig {
    type Error = Error;
    fn try_from(raw: RawConfig) -> Result<Self> {
        CubeConfig::new(raw.dim, raw.cubes)
    }
}

impl CubeConfig {
    pub fn new(dim: usize, cubes: Vec<LittleCube>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if let Some(c) = cubes.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: c.dim() });
        }
        if !cubes_disjoint(&cubes) {
            return Err(Error::OverlappingCubes);
        }
        Ok(CubeConfig { dim, cubes })
    }

    /// The unique point of `C_n(0)`.
    pub fn empty(dim: usize) -> Self {
        CubeConfig { dim, cubes: Vec::new() }
    }

    pub fn unit(dim: usize) -> Self {
        CubeConfig { dim, cubes: vec![LittleCube::identity(dim)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.cubes.len()
    }

    pub fn cubes(&self) -> &[LittleCube] {
        &self.cubes
    }

    /// Same cubes with the first axis moved to the last position.
    pub fn rotate_first_to_last(&self) -> CubeConfig {
        CubeConfig {
            dim: self.dim,
            cubes: self.cubes.iter().map(LittleCube::rotate_first_to_last).collect(),
        }
    }

    /// Heights `L_i^t` (last factor at `-1`).
    pub fn heights(&self) -> Result<Vec<Scalar>> {
        self.cubes.iter().map(|c| c.project().map(|(_, h)| h)).collect()
    }
}

/// A bijection of `{0, .., n-1}`, stored as its list of images.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Swap of `i` and `j` in `{0, .., n-1}`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n {
            return Err(Error::InvalidPermutation(format!("({i} {j}) out of range for {n}")));
        }
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, j);
        Ok(Permutation(v))
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            v.swap(i, j);
        }
        Permutation(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::ArityMismatch { expected: self.len(), found: other.len() });
        }
        Ok(Permutation(other.0.iter().map(|&i| self.0[i]).collect()))
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s] = i;
        }
        Permutation(inv)
    }

    /// Reindex a sequence: `out[i] = items[self(i)]`.
    pub fn permute<T: Clone>(&self, items: &[T]) -> Result<Vec<T>> {
        if items.len() != self.len() {
            return Err(Error::ArityMismatch { expected: self.len(), found: items.len() });
        }
        Ok(self.0.iter().map(|&i| items[i].clone()).collect())
    }

    /// Direct sum `self ⊕ other` acting on the concatenated index set.
    pub fn direct_sum(perms: &[Permutation]) -> Permutation {
        let mut out = Vec::new();
        let mut offset = 0;
        for p in perms {
            out.extend(p.0.iter().map(|&i| i + offset));
            offset += p.len();
        }
        Permutation(out)
    }

    /// Permute blocks of the given sizes by `self`, keeping each block's
    /// internal order: output block `i` is input block `self(i)`.
    pub fn block(&self, sizes: &[usize]) -> Result<Permutation> {
        if sizes.len() != self.len() {
            return Err(Error::ArityMismatch { expected: self.len(), found: sizes.len() });
        }
        let mut starts = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for &s in sizes {
            starts.push(acc);
            acc += s;
        }
        let mut out = Vec::with_capacity(acc);
        for &b in &self.0 {
            out.extend(starts[b]..starts[b] + sizes[b]);
        }
        Ok(Permutation(out))
    }
}

/// `γ(outer; inners)`: cube `(i, k)` of the result is `outer_i ∘ inner_i[k]`.
pub fn operad_compose(outer: &CubeConfig, inners: &[CubeConfig]) -> Result<CubeConfig> {
    if inners.len() != outer.arity() {
        return Err(Error::ArityMismatch { expected: outer.arity(), found: inners.len() });
    }
    let mut cubes = Vec::new();
    for (o, inner) in outer.cubes.iter().zip(inners) {
        if inner.dim != outer.dim {
            return Err(Error::DimensionMismatch { expected: outer.dim, found: inner.dim });
        }
        for c in &inner.cubes {
            cubes.push(o.compose(c)?);
        }
    }
    // disjoint-into-disjoint stays disjoint; re-checked by the constructor
    CubeConfig::new(outer.dim, cubes)
}

/// `c·σ`: cube `i` of the result is cube `σ(i)` of `c`.
pub fn symmetric_action(c: &CubeConfig, perm: &Permutation) -> Result<CubeConfig> {
    Ok(CubeConfig { dim: c.dim, cubes: perm.permute(&c.cubes)? })
}

/// Stable sort permutation of the cube heights: `σ(0)` is the lowest cube.
/// Equal heights keep their original relative order.
pub fn height_permutation(c: &CubeConfig) -> Result<Permutation> {
    let heights = c.heights()?;
    let mut order: Vec<usize> = (0..heights.len()).collect();
    order.sort_by(|&i, &j| heights[i].cmp(&heights[j]));
    Ok(Permutation(order))
}

/// Random rational configurations for property checks.
pub mod random {
    use super::*;

    fn rational_in<R: Rng>(rng: &mut R, lo: &Scalar, hi: &Scalar, steps: i64) -> Scalar {
        let k = rng.gen_range(0..=steps);
        lo + &((hi - lo) * Scalar::ratio(k, steps))
    }

    fn sub_interval<R: Rng>(rng: &mut R, lo: &Scalar, hi: &Scalar) -> (Scalar, Scalar) {
        let steps = *[4i64, 6, 8, 12].get(rng.gen_range(0..4)).unwrap();
        loop {
            let a = rational_in(rng, lo, hi, steps);
            let b = rational_in(rng, lo, hi, steps);
            if a < b {
                return (a, b);
            }
            if b < a {
                return (b, a);
            }
        }
    }

    fn random_box<R: Rng>(
        rng: &mut R,
        lo: &[Scalar],
        hi: &[Scalar],
        count: usize,
        out: &mut Vec<(Vec<Scalar>, Vec<Scalar>)>,
    ) {
        let dim = lo.len();
        if count == 0 {
            return;
        }
        if count == 1 {
            let (l, h): (Vec<_>, Vec<_>) =
                (0..dim).map(|i| sub_interval(rng, &lo[i], &hi[i])).unzip();
            out.push((l, h));
            return;
        }
        // slice along a random axis into `parts` slabs, recurse
        let axis = rng.gen_range(0..dim);
        let parts = rng.gen_range(2..=count.min(3));
        let mut cuts: Vec<Scalar> = (1..parts)
            .map(|k| &lo[axis] + &((&hi[axis] - &lo[axis]) * Scalar::ratio(k as i64, parts as i64)))
            .collect();
        cuts.insert(0, lo[axis].clone());
        cuts.push(hi[axis].clone());
        let mut remaining = count;
        for p in 0..parts {
            let take = if p + 1 == parts {
                remaining
            } else {
                let max = remaining - (parts - p - 1);
                rng.gen_range(1..=max.max(1)).min(max)
            };
            remaining -= take;
            let mut l = lo.to_vec();
            let mut h = hi.to_vec();
            l[axis] = cuts[p].clone();
            h[axis] = cuts[p + 1].clone();
            random_box(rng, &l, &h, take, out);
        }
    }

    /// A random point of `C_dim(arity)` with small-denominator rational data.
    pub fn random_config<R: Rng>(rng: &mut R, dim: usize, arity: usize) -> CubeConfig {
        let lo = vec![Scalar::from_int(-1); dim];
        let hi = vec![Scalar::from_int(1); dim];
        let mut boxes = Vec::with_capacity(arity);
        random_box(rng, &lo, &hi, arity, &mut boxes);
        let mut cubes: Vec<LittleCube> = boxes
            .into_iter()
            .map(|(l, h)| LittleCube::from_box(&l, &h).expect("boxes are nondegenerate"))
            .collect();
        // random labelling so block structure is not visible in the order
        let perm = Permutation::random(cubes.len(), rng);
        cubes = perm.permute(&cubes).expect("same length");
        CubeConfig::new(dim, cubes).expect("slicing produces disjoint cubes")
    }

    pub fn random_cube<R: Rng>(rng: &mut R, dim: usize) -> LittleCube {
        random_config(rng, dim, 1).cubes.pop().expect("one cube")
    }
}

/// Outcome of the operad axiom suite.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct SelfCheckReport {
    pub cases: usize,
    pub unit_failures: usize,
    pub associativity_failures: usize,
    pub equivariance_failures: usize,
}

impl SelfCheckReport {
    pub fn passed(&self) -> bool {
        self.unit_failures == 0 && self.associativity_failures == 0 && self.equivariance_failures == 0
    }
}

/// Checks one unit law instance.
pub fn check_unit(c: &CubeConfig) -> Result<bool> {
    let left = operad_compose(&CubeConfig::unit(c.dim), std::slice::from_ref(c))?;
    let units = vec![CubeConfig::unit(c.dim); c.arity()];
    let right = operad_compose(c, &units)?;
    Ok(left == *c && right == *c)
}

/// Checks `γ(γ(c; d); e) = γ(c; γ(d_1; e_1), ..)` for one instance.
pub fn check_associativity(c: &CubeConfig, d: &[CubeConfig], e: &[CubeConfig]) -> Result<bool> {
    let left = operad_compose(&operad_compose(c, d)?, e)?;
    let mut offset = 0;
    let mut grouped = Vec::with_capacity(d.len());
    for di in d {
        grouped.push(operad_compose(di, &e[offset..offset + di.arity()])?);
        offset += di.arity();
    }
    let right = operad_compose(c, &grouped)?;
    Ok(left == right)
}

/// Checks both equivariance laws of the operad for one instance.
pub fn check_equivariance(
    c: &CubeConfig,
    d: &[CubeConfig],
    sigma: &Permutation,
    taus: &[Permutation],
) -> Result<bool> {
    let base = operad_compose(c, d)?;
    let sizes: Vec<usize> = d.iter().map(CubeConfig::arity).collect();

    // γ(c·σ; d_σ(1), ..) = γ(c; d)·σ⟨sizes⟩
    let left = operad_compose(&symmetric_action(c, sigma)?, &sigma.permute(d)?)?;
    let right = symmetric_action(&base, &sigma.block(&sizes)?)?;

    // γ(c; d_1·τ_1, ..) = γ(c; d)·(τ_1 ⊕ ..)
    let permuted: Vec<CubeConfig> =
        d.iter().zip(taus).map(|(di, t)| symmetric_action(di, t)).collect::<Result<_>>()?;
    let left2 = operad_compose(c, &permuted)?;
    let right2 = symmetric_action(&base, &Permutation::direct_sum(taus))?;
    Ok(left == right && left2 == right2)
}

/// Runs unit, associativity and equivariance checks over `cases` random
/// configurations per law.
pub fn selfcheck(seed: u64, cases: usize) -> SelfCheckReport {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut report = SelfCheckReport { cases, ..Default::default() };
    for _ in 0..cases {
        let dim = rng.gen_range(1..=3);
        let arity = rng.gen_range(0..=4);
        let c = random::random_config(&mut rng, dim, arity);
        if !check_unit(&c).unwrap_or(false) {
            report.unit_failures += 1;
        }

        let d: Vec<CubeConfig> = (0..c.arity())
            .map(|_| {
                let k = rng.gen_range(0..=3);
                random::random_config(&mut rng, dim, k)
            })
            .collect();
        let total: usize = d.iter().map(CubeConfig::arity).sum();
        let e: Vec<CubeConfig> =
            (0..total)
            .map(|_| {
                let k = rng.gen_range(0..=2);
                random::random_config(&mut rng, dim, k)
            })
            .collect();
        if !check_associativity(&c, &d, &e).unwrap_or(false) {
            report.associativity_failures += 1;
        }

        let sigma = Permutation::random(c.arity(), &mut rng);
        let taus: Vec<Permutation> = d.iter().map(|di| Permutation::random(di.arity(), &mut rng)).collect();
        if !check_equivariance(&c, &d, &sigma, &taus).unwrap_or(false) {
            report.equivariance_failures += 1;
        }
    }
    report
}
