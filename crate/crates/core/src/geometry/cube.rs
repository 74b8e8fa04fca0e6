//! Little cubes and the monoid of axis-aligned increasing affine maps.

use serde::{Deserialize, Serialize};

use super::scalar::{Scalar, VecN};
use crate::error::{Error, Result};

/// An increasing affine map `t -> a t + b` with `a > 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawAffine")]
pub struct AffineInc {
    a: Scalar,
    b: Scalar,
}

#[derive(Deserialize)]
struct RawAffine {
    a: Scalar,
    b: Scalar,
}

impl TryFrom<RawAffine> for AffineInc {
    type Error = Error;
    fn try_from(raw: RawAffine) -> Result<Self> {
        AffineInc::new(raw.a, raw.b)
    }
}

impl AffineInc {
    pub fn new(a: Scalar, b: Scalar) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::DegenerateCube);
        }
        Ok(AffineInc { a, b })
    }

    pub fn from_ratios(a: (i64, i64), b: (i64, i64)) -> Result<Self> {
        AffineInc::new(Scalar::ratio(a.0, a.1), Scalar::ratio(b.0, b.1))
    }

    pub fn identity() -> Self {
        AffineInc { a: Scalar::one(), b: Scalar::zero() }
    }

    /// The map sending `[-1,1]` onto `[lo, hi]`.
    pub fn onto(lo: &Scalar, hi: &Scalar) -> Result<Self> {
        let two = Scalar::from_int(2);
        AffineInc::new((hi - lo) / &two, (hi + lo) / &two)
    }

    pub fn slope(&self) -> &Scalar {
        &self.a
    }

    pub fn offset(&self) -> &Scalar {
        &self.b
    }

    pub fn apply(&self, t: &Scalar) -> Scalar {
        &self.a * t + &self.b
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineInc) -> AffineInc {
        AffineInc { a: &self.a * &other.a, b: &self.a * &other.b + &self.b }
    }

    pub fn inverse(&self) -> AffineInc {
        let inv = self.a.recip().expect("slope is positive");
        AffineInc { b: -(&self.b * &inv), a: inv }
    }

    pub fn low(&self) -> Scalar {
        &self.b - &self.a
    }

    pub fn high(&self) -> Scalar {
        &self.b + &self.a
    }

    pub fn to_f64(&self) -> AffineF64 {
        AffineF64 { a: self.a.to_f64(), b: self.b.to_f64() }
    }

    fn is_self_map_of_interval(&self) -> bool {
        let one = Scalar::one();
        self.low() >= -&one && self.high() <= one
    }
}

/// Floating shadow of an [`AffineInc`], used on evaluation paths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineF64 {
    pub a: f64,
    pub b: f64,
}

impl AffineF64 {
    #[inline]
    pub fn apply(&self, t: f64) -> f64 {
        self.a * t + self.b
    }

    #[inline]
    pub fn apply_inverse(&self, t: f64) -> f64 {
        (t - self.b) / self.a
    }

    pub fn low(&self) -> f64 {
        self.b - self.a
    }

    pub fn high(&self) -> f64 {
        self.b + self.a
    }
}

/// Anything that is a product of increasing affine maps, one per axis.
pub trait AxisAffine {
    fn factors(&self) -> &[AffineInc];

    fn dim(&self) -> usize {
        self.factors().len()
    }

    fn apply(&self, x: &VecN) -> Result<VecN> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        VecN::new(self.factors().iter().zip(x.coords()).map(|(l, t)| l.apply(t)).collect())
    }

    fn factors_f64(&self) -> Vec<AffineF64> {
        self.factors().iter().map(AffineInc::to_f64).collect()
    }

    /// Smallest slope over all axes.
    fn min_slope(&self) -> Scalar {
        self.factors()
            .iter()
            .map(|l| l.slope().clone())
            .min()
            .expect("cubes have positive dimension")
    }
}

/// An element of the monoid CAut_n: no constraint on the image.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawCube", into = "RawCube")]
pub struct CAutElement {
    factors: Vec<AffineInc>,
}

/// A little n-cube: a [`CAutElement`] mapping `[-1,1]^n` into itself.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawCube", into = "RawCube")]
pub struct LittleCube {
    factors: Vec<AffineInc>,
}

#[derive(Serialize, Deserialize)]
struct RawCube {
    dim: usize,
    factors: Vec<AffineInc>,
}

impl TryFrom<RawCube> for CAutElement {
    type Error = Error;
    fn try_from(raw: RawCube) -> Result<Self> {
        if raw.dim != raw.factors.len() {
            return Err(Error::DimensionMismatch { expected: raw.dim, found: raw.factors.len() });
        }
        CAutElement::new(raw.factors)
    }
}

impl TryFrom<RawCube> for LittleCube {
    type Error = Error;
    fn try_from(raw: RawCube) -> Result<Self> {
        if raw.dim != raw.factors.len() {
            return Err(Error::DimensionMismatch { expected: raw.dim, found: raw.factors.len() });
        }
        LittleCube::new(raw.factors)
    }
}

impl From<CAutElement> for RawCube {
    fn from(c: CAutElement) -> Self {
        RawCube { dim: c.factors.len(), factors: c.factors }
    }
}

impl From<LittleCube> for RawCube {
    fn from(c: LittleCube) -> Self {
        RawCube { dim: c.factors.len(), factors: c.factors }
    }
}

impl AxisAffine for CAutElement {
    fn factors(&self) -> &[AffineInc] {
        &self.factors
    }
}

impl AxisAffine for LittleCube {
    fn factors(&self) -> &[AffineInc] {
        &self.factors
    }
}

impl CAutElement {
    pub fn new(factors: Vec<AffineInc>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        Ok(CAutElement { factors })
    }

    pub fn identity(dim: usize) -> Self {
        CAutElement { factors: vec![AffineInc::identity(); dim] }
    }

    /// Factorwise `self ∘ other`.
    pub fn compose(&self, other: &CAutElement) -> Result<CAutElement> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(CAutElement {
            factors: self.factors.iter().zip(&other.factors).map(|(l, m)| l.compose(m)).collect(),
        })
    }

    pub fn inverse(&self) -> CAutElement {
        CAutElement { factors: self.factors.iter().map(AffineInc::inverse).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(|l| *l == AffineInc::identity())
    }

    /// Returns the element as a little cube when its image lies in `[-1,1]^n`.
    pub fn to_little_cube(&self) -> Result<LittleCube> {
        LittleCube::new(self.factors.clone())
    }
}

impl LittleCube {
    pub fn new(factors: Vec<AffineInc>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if let Some(index) = factors.iter().position(|l| !l.is_self_map_of_interval()) {
            return Err(Error::NotALittleCube { index });
        }
        Ok(LittleCube { factors })
    }

    /// Builds a cube from `(a, b)` pairs given as `((num, den), (num, den))`.
    pub fn from_ratios(pairs: &[((i64, i64), (i64, i64))]) -> Result<Self> {
        let factors = pairs
            .iter()
            .map(|&(a, b)| AffineInc::from_ratios(a, b))
            .collect::<Result<Vec<_>>>()?;
        LittleCube::new(factors)
    }

    /// The cube with image `Π [lo_i, hi_i]`.
    pub fn from_box(lo: &[Scalar], hi: &[Scalar]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        let factors = lo
            .iter()
            .zip(hi)
            .map(|(l, h)| AffineInc::onto(l, h))
            .collect::<Result<Vec<_>>>()?;
        LittleCube::new(factors)
    }

    pub fn identity(dim: usize) -> Self {
        LittleCube { factors: vec![AffineInc::identity(); dim] }
    }

    pub fn as_caut(&self) -> CAutElement {
        CAutElement { factors: self.factors.clone() }
    }

    /// Little cubes are closed under composition.
    pub fn compose(&self, other: &LittleCube) -> Result<LittleCube> {
        let c = self.as_caut().compose(&other.as_caut())?;
        Ok(LittleCube { factors: c.factors })
    }

    pub fn inverse(&self) -> CAutElement {
        self.as_caut().inverse()
    }

    /// Drop the last factor; return it evaluated at `-1` as the height.
    pub fn project(&self) -> Result<(LittleCube, Scalar)> {
        if self.dim() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dim() });
        }
        let (last, rest) = self.factors.split_last().expect("dim >= 2");
        Ok((LittleCube { factors: rest.to_vec() }, last.low()))
    }

    /// The factor list rotated so the first axis becomes the last one.
    pub fn rotate_first_to_last(&self) -> LittleCube {
        let mut factors = self.factors.clone();
        factors.rotate_left(1);
        LittleCube { factors }
    }

    /// Drop the first factor (used on the top face of pseudoisotopies).
    pub fn drop_first(&self) -> Result<LittleCube> {
        if self.dim() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dim() });
        }
        Ok(LittleCube { factors: self.factors[1..].to_vec() })
    }

    /// Lower and upper corners of the image box.
    pub fn image_box(&self) -> (Vec<Scalar>, Vec<Scalar>) {
        (
            self.factors.iter().map(AffineInc::low).collect(),
            self.factors.iter().map(AffineInc::high).collect(),
        )
    }
}

/// `L(x)` for a little cube or monoid element.
pub fn cube_apply<C: AxisAffine>(cube: &C, x: &VecN) -> Result<VecN> {
    cube.apply(x)
}

pub fn cube_compose(l: &CAutElement, m: &CAutElement) -> Result<CAutElement> {
    l.compose(m)
}

pub fn cube_inverse(l: &LittleCube) -> CAutElement {
    l.inverse()
}

pub fn cube_project(l: &LittleCube) -> Result<(LittleCube, Scalar)> {
    l.project()
}

fn open_images_disjoint(l: &LittleCube, m: &LittleCube) -> bool {
    l.factors.iter().zip(&m.factors).any(|(p, q)| p.high() <= q.low() || q.high() <= p.low())
}

/// True iff the open images of the cubes are pairwise disjoint.
pub fn cubes_disjoint(cubes: &[LittleCube]) -> bool {
    cubes.iter().enumerate().all(|(i, l)| cubes[i + 1..].iter().all(|m| open_images_disjoint(l, m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn apply_examples() {
        let id = LittleCube::identity(2);
        let x = VecN::from_ratios(&[(1, 2), (-1, 3)]).unwrap();
        assert_eq!(cube_apply(&id, &x).unwrap(), x);

        let l = LittleCube::from_ratios(&[((1, 2), (1, 2)), ((1, 2), (1, 2))]).unwrap();
        let corner = VecN::from_ratios(&[(-1, 1), (-1, 1)]).unwrap();
        assert_eq!(cube_apply(&l, &corner).unwrap(), VecN::from_ratios(&[(0, 1), (0, 1)]).unwrap());

        let l = LittleCube::from_ratios(&[((1, 4), (-1, 2))]).unwrap();
        let one = VecN::from_ratios(&[(1, 1)]).unwrap();
        assert_eq!(cube_apply(&l, &one).unwrap(), VecN::from_ratios(&[(-1, 4)]).unwrap());

        assert!(matches!(cube_apply(&l, &corner), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn compose_examples() {
        let l = AffineInc::from_ratios((1, 2), (1, 2)).unwrap();
        let m = AffineInc::from_ratios((1, 2), (-1, 2)).unwrap();
        let lm = CAutElement::new(vec![l])
            .unwrap()
            .compose(&CAutElement::new(vec![m]).unwrap())
            .unwrap();
        assert_eq!(lm.factors()[0], AffineInc::from_ratios((1, 4), (1, 4)).unwrap());

        let id = CAutElement::identity(1);
        assert_eq!(id.compose(&lm).unwrap(), lm);
        assert!(id.compose(&CAutElement::identity(2)).is_err());
    }

    #[test]
    fn inverse_examples() {
        let l = LittleCube::from_ratios(&[((1, 2), (1, 2))]).unwrap();
        let inv = cube_inverse(&l);
        assert_eq!(inv.factors()[0], AffineInc::new(s(2, 1), s(-1, 1)).unwrap());
        assert!(l.as_caut().compose(&inv).unwrap().is_identity());
        assert!(cube_inverse(&LittleCube::identity(3)).is_identity());
    }

    #[test]
    fn degenerate_and_oversized_cubes_rejected() {
        assert_eq!(AffineInc::new(Scalar::zero(), Scalar::zero()), Err(Error::DegenerateCube));
        assert_eq!(AffineInc::new(s(-1, 2), Scalar::zero()), Err(Error::DegenerateCube));
        assert_eq!(
            LittleCube::from_ratios(&[((1, 2), (3, 4))]),
            Err(Error::NotALittleCube { index: 0 })
        );
        // identity slope is allowed
        assert!(LittleCube::from_ratios(&[((1, 1), (0, 1))]).is_ok());
    }

    #[test]
    fn disjointness_examples() {
        let single = vec![LittleCube::identity(2)];
        assert!(cubes_disjoint(&single));

        let left = LittleCube::from_box(&[s(-1, 1)], &[s(0, 1)]).unwrap();
        let right = LittleCube::from_box(&[s(0, 1)], &[s(1, 1)]).unwrap();
        assert!(cubes_disjoint(&[left, right]));

        let a = LittleCube::from_box(&[s(-1, 2), s(-1, 2)], &[s(1, 2), s(1, 2)]).unwrap();
        let b = LittleCube::from_box(&[s(0, 1), s(0, 1)], &[s(1, 1), s(1, 1)]).unwrap();
        assert!(!cubes_disjoint(&[a, b]));
    }

    #[test]
    fn projection_examples() {
        let (pi, h) = cube_project(&LittleCube::identity(2)).unwrap();
        assert_eq!(pi, LittleCube::identity(1));
        assert_eq!(h, s(-1, 1));

        let l = LittleCube::from_ratios(&[((1, 2), (0, 1)), ((1, 4), (1, 4))]).unwrap();
        let (pi, h) = cube_project(&l).unwrap();
        assert_eq!(pi, LittleCube::from_ratios(&[((1, 2), (0, 1))]).unwrap());
        assert_eq!(h, Scalar::zero());

        let heights: Vec<Scalar> = [((1, 4), (-1, 4)), ((1, 4), (1, 2)), ((1, 8), (0, 1))]
            .iter()
            .map(|&last| {
                let c = LittleCube::from_ratios(&[((1, 4), (0, 1)), last]).unwrap();
                cube_project(&c).unwrap().1
            })
            .collect();
        assert_eq!(heights, vec![s(-1, 2), s(1, 4), s(-1, 8)]);

        assert!(cube_project(&LittleCube::identity(1)).is_err());
    }

    #[test]
    fn json_shape() {
        let l = LittleCube::from_ratios(&[((1, 2), (-1, 3))]).unwrap();
        let js = serde_json::to_string(&l).unwrap();
        assert_eq!(js, r#"{"dim":1,"factors":[{"a":"1/2","b":"-1/3"}]}"#);
        let back: LittleCube = serde_json::from_str(&js).unwrap();
        assert_eq!(back, l);
        let bad = r#"{"dim":1,"factors":[{"a":"0","b":"0"}]}"#;
        assert!(serde_json::from_str::<LittleCube>(bad).is_err());
        let oversized = r#"{"dim":1,"factors":[{"a":"1","b":"1/2"}]}"#;
        assert!(serde_json::from_str::<LittleCube>(oversized).is_err());
        assert!(serde_json::from_str::<CAutElement>(oversized).is_ok());
    }
}
