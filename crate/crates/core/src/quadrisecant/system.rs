//! The collinearity system of four points and its linearisation.

use nalgebra::DMatrix;

use crate::knot::predicates::{dot_f, norm_f, sub_f};

/// Orthonormal basis of the orthogonal complement of the unit vector `u`.
pub(crate) fn complement_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut span: Vec<Vec<f64>> = vec![u.to_vec()];
    // add standard vectors in order of least overlap with u
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| u[a].abs().partial_cmp(&u[b].abs()).expect("finite"));
    for i in order {
        if span.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        for _ in 0..2 {
            for s in &span {
                let d = dot_f(&e, s);
                for (x, y) in e.iter_mut().zip(s) {
                    *x -= d * y;
                }
            }
        }
        let len = norm_f(&e);
        if len > 1e-6 {
            span.push(e.into_iter().map(|x| x / len).collect());
        }
    }
    span.split_off(1)
}

/// Residual and Jacobian of the collinearity of `x[c]`, `x[d]` with the
/// line from `x[a]` to `x[b]`.
pub(crate) struct Linearised {
    /// Normal components of `x[c] - x[a]`, then of `x[d] - x[a]`.
    pub residual: Vec<f64>,
    /// One column per variable.
    pub jacobian: DMatrix<f64>,
    /// Positions of `x[c]` and `x[d]` along the line, with `x[a] = 0`, `x[b] = 1`.
    pub lambda: [f64; 2],
}

/// `dx[v][k]` is the derivative of point `k` with respect to variable `v`.
///
/// The Jacobian is exact on the solution set and first-order accurate off it.
pub(crate) fn linearise(x: [&[f64]; 4], dx: &[[Vec<f64>; 4]], roles: [usize; 4]) -> Option<Linearised> {
    let [a, b, c, d] = roles;
    let axis = sub_f(x[b], x[a]);
    let length = norm_f(&axis);
    if !(length > 0.0) {
        return None;
    }
    let u: Vec<f64> = axis.iter().map(|v| v / length).collect();
    let basis = complement_basis(&u);
    let wc = sub_f(x[c], x[a]);
    let wd = sub_f(x[d], x[a]);
    let lc = dot_f(&wc, &u) / length;
    let ld = dot_f(&wd, &u) / length;
    let mut residual: Vec<f64> = basis.iter().map(|e| dot_f(e, &wc)).collect();
    residual.extend(basis.iter().map(|e| dot_f(e, &wd)));
    let rows = residual.len();
    let mut jacobian = DMatrix::zeros(rows, dx.len());
    let m = basis.len();
    for (v, dv) in dx.iter().enumerate() {
        for (half, (lam, k)) in [(lc, c), (ld, d)].into_iter().enumerate() {
            for (r, e) in basis.iter().enumerate() {
                let value = dot_f(e, &dv[k]) - (1.0 - lam) * dot_f(e, &dv[a]) - lam * dot_f(e, &dv[b]);
                jacobian[(half * m + r, v)] = value;
            }
        }
    }
    Some(Linearised { residual, jacobian, lambda: [lc, ld] })
}

/// Smallest singular value of the column-normalised matrix: a scale-free
/// transversality measure. Zero columns give zero.
pub(crate) fn conditioning(j: &DMatrix<f64>) -> f64 {
    let mut m = j.clone();
    for mut col in m.column_iter_mut() {
        let n = col.norm();
        if n == 0.0 {
            return 0.0;
        }
        col /= n;
    }
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        for u in [vec![1.0, 0.0, 0.0], vec![0.6, 0.8, 0.0], vec![0.5, 0.5, 0.5, 0.5]] {
            let b = complement_basis(&u);
            assert_eq!(b.len(), u.len() - 1);
            for (i, e) in b.iter().enumerate() {
                assert!(dot_f(e, &u).abs() < 1e-14);
                for f in &b[i + 1..] {
                    assert!(dot_f(e, f).abs() < 1e-14);
                }
                assert!((norm_f(e) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn residual_vanishes_on_a_line() {
        let p = |s: f64| vec![s, 2.0 * s, -s];
        let pts = [p(0.3), p(1.0), p(0.0), p(0.7)];
        let x = [&pts[0][..], &pts[1][..], &pts[2][..], &pts[3][..]];
        let lin = linearise(x, &[], [2, 1, 0, 3]).unwrap();
        assert!(lin.residual.iter().all(|r| r.abs() < 1e-15));
        assert!((lin.lambda[0] - 0.3).abs() < 1e-15 && (lin.lambda[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn jacobian_matches_finite_differences_on_the_solution_set() {
        // four lines through a common line, each moved by its own variable
        let dirs = [[0.0, 1.0, 0.2], [0.1, 0.0, 1.0], [0.3, -1.0, 0.5], [-0.2, 0.4, 1.0]];
        let base = [0.2, 1.0, 0.0, 0.6];
        let line = [1.0, 0.3, -0.2];
        let point = |k: usize, s: f64| (0..3).map(|i| base[k] * line[i] + s * dirs[k][i]).collect::<Vec<f64>>();
        let eval = |s: [f64; 4]| {
            let pts: Vec<Vec<f64>> = (0..4).map(|k| point(k, s[k])).collect();
            let dx: Vec<[Vec<f64>; 4]> = (0..4)
                .map(|v| std::array::from_fn(|k| if k == v { dirs[k].to_vec() } else { vec![0.0; 3] }))
                .collect();
            let x = [&pts[0][..], &pts[1][..], &pts[2][..], &pts[3][..]];
            let lin = linearise(x, &dx, [2, 1, 0, 3]).unwrap();
            (lin.residual, lin.jacobian)
        };
        let (_, j) = eval([0.0; 4]);
        let h = 1e-6;
        for v in 0..4 {
            let mut sp = [0.0; 4];
            let mut sm = [0.0; 4];
            sp[v] = h;
            sm[v] = -h;
            let (rp, _) = eval(sp);
            let (rm, _) = eval(sm);
            for r in 0..4 {
                let fd = (rp[r] - rm[r]) / (2.0 * h);
                assert!((fd - j[(r, v)]).abs() < 1e-6, "{fd} vs {}", j[(r, v)]);
            }
        }
        assert!(conditioning(&j) > 0.0);
    }
}
