//! Closed-form leaf primitives of tube embedding trees.

use serde::{Deserialize, Serialize};

use super::frame::{orthonormalise, vertex_frames, Frame};
use crate::error::{Error, Result};
use crate::knot::LongKnotPL;

/// Disk points may exceed the unit ball by this much before a leaf refuses them.
pub const DISK_SLACK: f64 = 1e-9;

/// `exp(1 - 1/(1-u^2))` on `(-1, 1)`, zero outside; peak value 1 at 0.
pub fn peak_bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

pub fn peak_bump_derivative(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let w = 1.0 - u * u;
        -2.0 * u / (w * w) * peak_bump(u)
    }
}

/// Cubic smoothstep on `[0, 1]`, clamped outside.
pub fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

pub(crate) fn disk_norm(m: &[f64]) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn check_disk(leaf: &str, m: &[f64]) -> Result<()> {
    let r = disk_norm(m);
    if !(r <= 1.0 + DISK_SLACK) {
        return Err(Error::LeafDomain { leaf: leaf.into(), reason: format!("disk coordinate of norm {r} outside D^k") });
    }
    Ok(())
}

/// A product of peak bumps over a box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxBump {
    pub center: Vec<f64>,
    pub half_width: Vec<f64>,
}

impl BoxBump {
    pub fn new(center: Vec<f64>, half_width: Vec<f64>) -> Result<Self> {
        if center.len() != half_width.len() || center.is_empty() {
            return Err(Error::DimensionMismatch { expected: center.len(), found: half_width.len() });
        }
        for (c, h) in center.iter().zip(&half_width) {
            if !(*h > 0.0) || c - h < -1.0 || c + h > 1.0 {
                return Err(Error::InvalidParameter(format!("bump box [{}, {}] not inside [-1,1]", c - h, c + h)));
            }
        }
        Ok(BoxBump { center, half_width })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.center
            .iter()
            .zip(&self.half_width)
            .zip(x)
            .map(|((c, h), t)| peak_bump((t - c) / h))
            .product()
    }

    /// Partial derivative in the first coordinate.
    pub fn d_first(&self, x: &[f64]) -> f64 {
        let mut v = peak_bump_derivative((x[0] - self.center[0]) / self.half_width[0]) / self.half_width[0];
        for i in 1..x.len() {
            v *= peak_bump((x[i] - self.center[i]) / self.half_width[i]);
        }
        v
    }

    pub fn lo(&self) -> Vec<f64> {
        self.center.iter().zip(&self.half_width).map(|(c, h)| c - h).collect()
    }

    pub fn hi(&self) -> Vec<f64> {
        self.center.iter().zip(&self.half_width).map(|(c, h)| c + h).collect()
    }
}

/// Largest value of `|d/du peak_bump|`.
pub fn peak_bump_slope_bound() -> f64 {
    (0..=20_000).map(|i| peak_bump_derivative(-1.0 + i as f64 / 10_000.0).abs()).fold(0.0, f64::max) * 1.01
}

/// Rotation of the first two disk coordinates by `angle * bump(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Twist {
    pub k: usize,
    pub bump: BoxBump,
    pub angle: f64,
}

impl Twist {
    pub fn new(k: usize, bump: BoxBump, angle: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter("a twist needs disk dimension >= 2".into()));
        }
        if !angle.is_finite() {
            return Err(Error::InvalidParameter("twist angle must be finite".into()));
        }
        Ok(Twist { k, bump, angle })
    }

    pub fn j(&self) -> usize {
        self.bump.center.len()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let j = self.j();
        check_disk("twist", &x[j..])?;
        let theta = self.angle * self.bump.value(&x[..j]);
        let mut out = x.to_vec();
        if theta != 0.0 {
            let (s, c) = theta.sin_cos();
            let (a, b) = (x[j], x[j + 1]);
            out[j] = c * a - s * b;
            out[j + 1] = s * a + c * b;
        }
        Ok(out)
    }
}

/// Slides the first domain coordinate by `amplitude * bump(t) * (1-|m|^2)^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shear {
    pub k: usize,
    pub bump: BoxBump,
    pub amplitude: f64,
}

impl Shear {
    pub fn new(k: usize, bump: BoxBump, amplitude: f64) -> Result<Self> {
        let limit = bump.half_width[0] / peak_bump_slope_bound();
        if !(amplitude.abs() < limit) {
            return Err(Error::InvalidParameter(format!(
                "shear amplitude {amplitude} would fold the domain (limit {limit})"
            )));
        }
        Ok(Shear { k, bump, amplitude })
    }

    pub fn j(&self) -> usize {
        self.bump.center.len()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let j = self.j();
        check_disk("shear", &x[j..])?;
        let r2 = x[j..].iter().map(|c| c * c).sum::<f64>();
        let fall = (1.0 - r2).max(0.0).powi(2);
        let mut out = x.to_vec();
        out[0] += self.amplitude * self.bump.value(&x[..j]) * fall;
        Ok(out)
    }
}

/// The tube of radius `radius` around a PL long knot in `R^n`, as a
/// self-embedding of `R x D^{n-1}`. The disk radius ramps from 1 down to
/// `radius` over the outer half of each end collar, and the frame is
/// standard there.
#[derive(Clone, Debug)]
pub struct KnotTube {
    knot: LongKnotPL,
    radius: f64,
    frames: Vec<Frame>,
}

impl KnotTube {
    pub fn new(knot: LongKnotPL, radius: f64) -> Result<Self> {
        let m = knot.segment_count();
        let axial = |i: usize| {
            let (a, b) = knot.segment(i);
            a[1..].iter().chain(&b[1..]).all(|&c| c == 0.0)
        };
        if m < 3 || !axial(0) || !axial(m - 1) {
            return Err(Error::InvalidKnot("tube model needs axial end collars".into()));
        }
        let limit = knot.reach_estimate()? / 2.0;
        if !(radius > 0.0 && radius < limit) {
            return Err(Error::RadiusTooLarge { radius, limit });
        }
        let frames = vertex_frames(&knot);
        Ok(KnotTube { knot, radius, frames })
    }

    pub fn knot(&self) -> &LongKnotPL {
        &self.knot
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn disk_radius(&self, t: f64) -> f64 {
        let ts = self.knot.params();
        let m = ts.len() - 1;
        let left = (ts[1] - ts[0]) / 2.0;
        let right = (ts[m] - ts[m - 1]) / 2.0;
        let ramp = if t < -1.0 + left {
            1.0 - smoothstep((t + 1.0) / left)
        } else if t > 1.0 - right {
            1.0 - smoothstep((1.0 - t) / right)
        } else {
            0.0
        };
        self.radius + (1.0 - self.radius) * ramp
    }

    /// Unit normal frame at parameter `t` in `[-1, 1]`.
    pub fn frame(&self, t: f64) -> Frame {
        let ts = self.knot.params();
        let last = ts.len() - 2;
        let k = self.knot.segment_index(t);
        let mut lam = ((t - ts[k]) / (ts[k + 1] - ts[k])).clamp(0.0, 1.0);
        if k == 0 {
            lam = (2.0 * lam - 1.0).max(0.0);
        }
        if k == last {
            lam = (2.0 * lam).min(1.0);
        }
        let mut frame: Frame = self.frames[k]
            .iter()
            .zip(&self.frames[k + 1])
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + lam * (y - x)).collect())
            .collect();
        orthonormalise(&mut frame);
        frame
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let t = x[0];
        let m = &x[1..];
        check_disk("knot-tube", m)?;
        if t <= -1.0 || t >= 1.0 {
            return Ok(x.to_vec());
        }
        let r = self.disk_radius(t);
        let mut out = self.knot.eval(t);
        for (e, c) in self.frame(t).iter().zip(m) {
            for (o, v) in out.iter_mut().zip(e) {
                *o += r * c * v;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_profile() {
        assert_eq!(peak_bump(0.0), 1.0);
        assert_eq!(peak_bump(1.0), 0.0);
        assert_eq!(peak_bump(-1.5), 0.0);
        assert!((peak_bump(0.5) - peak_bump(-0.5)).abs() < 1e-15);
        let h = 1e-6;
        let fd = (peak_bump(0.3 + h) - peak_bump(0.3 - h)) / (2.0 * h);
        assert!((fd - peak_bump_derivative(0.3)).abs() < 1e-6);
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(2.0), 1.0);
    }

    #[test]
    fn twist_preserves_radius() {
        let tw = Twist::new(2, BoxBump::new(vec![0.0], vec![0.5]).unwrap(), 2.0).unwrap();
        let y = tw.eval(&[0.1, 0.6, 0.3]).unwrap();
        assert!((disk_norm(&y[1..]) - disk_norm(&[0.6, 0.3])).abs() < 1e-15);
        assert_eq!(tw.eval(&[0.7, 0.6, 0.3]).unwrap(), vec![0.7, 0.6, 0.3]);
        assert!(matches!(tw.eval(&[0.0, 1.0, 1.0]), Err(Error::LeafDomain { .. })));
    }

    #[test]
    fn shear_amplitude_is_bounded() {
        let b = BoxBump::new(vec![0.0], vec![0.5]).unwrap();
        assert!(Shear::new(2, b.clone(), 1.0).is_err());
        let sh = Shear::new(2, b, 0.2).unwrap();
        // boundary of the disk is fixed
        assert_eq!(sh.eval(&[0.0, 1.0, 0.0]).unwrap(), vec![0.0, 1.0, 0.0]);
        assert!((sh.eval(&[0.0, 0.0, 0.0]).unwrap()[0] - 0.2).abs() < 1e-15);
    }
}
