//! Smooth one-variable profiles: the normalised bump and the wet blanket.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tube::leaves::peak_bump;

const QUAD_PANELS: usize = 4096;

/// Composite Simpson rule on `[a, b]`.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| simpson(peak_bump, -1.0, 1.0, 2 * QUAD_PANELS))
}

/// Even bump supported in `[-1, 1]` with unit integral, increasing on `(-1, 0)`.
pub fn bump(x: f64) -> f64 {
    peak_bump(x) / bump_mass()
}

/// `b_{eps,t}(x) = b((x - t) / eps) / eps`.
pub fn scaled_bump(eps: f64, t: f64, x: f64) -> f64 {
    bump((x - t) / eps) / eps
}

/// The bump moved to `[0, 1]`: `B(x) = 2 b(2x - 1)`.
fn unit_interval_bump(x: f64) -> f64 {
    2.0 * bump(2.0 * x - 1.0)
}

/// `b(x) = int_0^x (1 - int_0^y B)`, written as `x (1 - G(x)) + M(x)` with
/// `G` the mass and `M` the first moment of `B` on `[0, x]`.
pub fn wet_blanket(x: f64) -> f64 {
    if x <= 0.0 {
        return x;
    }
    let top = x.min(1.0);
    let panels = ((QUAD_PANELS as f64) * top).ceil() as usize + 2;
    let g = simpson(unit_interval_bump, 0.0, top, panels);
    let m = simpson(|y| y * unit_interval_bump(y), 0.0, top, panels);
    if x >= 1.0 {
        // G(1) = 1 and M(1) = 1/2 up to quadrature error
        return m + (1.0 - g) * x;
    }
    x * (1.0 - g) + m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Bump,
    WetBlanket,
}

impl std::str::FromStr for ProfileKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bump" => Ok(ProfileKind::Bump),
            "wet_blanket" => Ok(ProfileKind::WetBlanket),
            other => Err(Error::InvalidParameter(format!("unknown profile `{other}`"))),
        }
    }
}

/// A tabulated profile.
#[derive(Clone, Debug, Serialize)]
pub struct ProfileTable {
    pub kind: ProfileKind,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

/// Tabulates a profile at `samples` points of `[lo, hi]`. The bump takes
/// `(eps, t)` as `b_{eps,t}`; the wet blanket ignores them.
pub fn smoothing_profiles(kind: ProfileKind, eps: f64, t: f64, lo: f64, hi: f64, samples: usize) -> Result<ProfileTable> {
    if !(eps > 0.0) || !eps.is_finite() || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("profile parameters eps={eps}, t={t}")));
    }
    if !(lo < hi) || samples < 2 {
        return Err(Error::InvalidParameter("profile range needs lo < hi and at least two samples".into()));
    }
    let xs: Vec<f64> = (0..samples).map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64).collect();
    let values = xs
        .iter()
        .map(|&x| match kind {
            ProfileKind::Bump => scaled_bump(eps, t, x),
            ProfileKind::WetBlanket => wet_blanket(x),
        })
        .collect();
    Ok(ProfileTable { kind, xs, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_properties() {
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.0), 0.0);
        assert_eq!(bump(3.0), 0.0);
        for i in 0..100 {
            let x = i as f64 / 100.0;
            assert!((bump(x) - bump(-x)).abs() <= 1e-12);
            if i > 0 {
                assert!(bump(-x) < bump(-x + 0.01));
            }
        }
        // independent check with a midpoint rule
        let n = 200_000;
        let h = 2.0 / n as f64;
        let integral: f64 = (0..n).map(|i| bump(-1.0 + (i as f64 + 0.5) * h) * h).sum();
        assert!((integral - 1.0).abs() < 1e-9, "{integral}");
        let scaled: f64 = (0..n).map(|i| scaled_bump(0.25, 0.3, 0.05 + 0.5 * (i as f64 + 0.5) / n as f64) * 0.5 / n as f64).sum();
        assert!((scaled - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wet_blanket_properties() {
        assert_eq!(wet_blanket(-0.5), -0.5);
        assert_eq!(wet_blanket(0.0), 0.0);
        assert!((wet_blanket(1.0) - 0.5).abs() <= 1e-12);
        assert!((wet_blanket(3.0) - 0.5).abs() <= 1e-12);
        let mut prev = wet_blanket(-0.1);
        for i in 0..=100 {
            let v = wet_blanket(i as f64 / 100.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn tables() {
        let t = smoothing_profiles(ProfileKind::Bump, 1.0, 0.0, -2.0, 2.0, 5).unwrap();
        assert_eq!(t.values[0], 0.0);
        assert_eq!(t.values[4], 0.0);
        assert!(smoothing_profiles(ProfileKind::Bump, 0.0, 0.0, -1.0, 1.0, 5).is_err());
        assert_eq!("wet_blanket".parse::<ProfileKind>().unwrap(), ProfileKind::WetBlanket);
    }
}
