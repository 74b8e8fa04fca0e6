//! Independent `v2` from the Gauss diagram of a generic projection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knot::diagram::{crossings, Crossing};
use crate::knot::LongKnotPL;

const ORACLE_SEED: u64 = 0x0ac1e;
const MAX_ATTEMPTS: usize = 64;

/// `v2` of the Gauss diagram: the sum of `sign(c) sign(d)` over pairs of
/// crossings met in the order `c` under, `d` over, `c` over, `d` under.
pub fn gauss_v2(cs: &[Crossing]) -> i64 {
    let mut total = 0i64;
    for c in cs {
        if !(c.t_under < c.t_over) {
            continue;
        }
        for d in cs {
            if d.t_over < d.t_under && c.t_under < d.t_over && d.t_over < c.t_over && c.t_over < d.t_under {
                total += (c.sign * d.sign) as i64;
            }
        }
    }
    total
}

fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.2 && n <= 1.0 && (v[0] / n).abs() < 0.8 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// `v2` from `count` generic projection directions, with the directions used.
pub fn v2_oracle_directions(f: &LongKnotPL, count: usize) -> Result<Vec<([f64; 3], i64)>> {
    if f.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: f.ambient_dim() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let mut out = Vec::new();
    for _ in 0..MAX_ATTEMPTS {
        if out.len() == count {
            break;
        }
        let d = random_direction(&mut rng);
        match crossings(f, d) {
            Ok(cs) => out.push((d, gauss_v2(&cs))),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    if out.len() < count {
        return Err(Error::Degenerate(format!("found {} generic projections of {count}", out.len())));
    }
    Ok(out)
}

/// `v2` from the Gauss diagram, checked across three projection directions.
pub fn v2_oracle(f: &LongKnotPL) -> Result<i64> {
    let values = v2_oracle_directions(f, 3)?;
    let v = values[0].1;
    if values.iter().any(|&(_, w)| w != v) {
        return Err(Error::Degenerate(format!(
            "projections disagree: {:?}",
            values.iter().map(|x| x.1).collect::<Vec<_>>()
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::library;

    #[test]
    fn library_values() {
        assert_eq!(v2_oracle(&LongKnotPL::unknot(3)).unwrap(), 0);
        assert_eq!(v2_oracle(&library::right_trefoil()).unwrap(), 1);
        assert_eq!(v2_oracle(&library::left_trefoil()).unwrap(), 1);
        assert_eq!(v2_oracle(&library::figure_eight()).unwrap(), -1);
    }

    #[test]
    fn direction_independent() {
        let vals = v2_oracle_directions(&library::granny(), 6).unwrap();
        assert!(vals.iter().all(|v| v.1 == 2), "{vals:?}");
    }
}
