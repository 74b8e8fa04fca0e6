//! Alternating quadrisecants of 2-parameter families of knots in `R^4`.
//!
//! Four collinear points in `R^4` are six conditions, matched by the two
//! family angles and four curve parameters. Each quadruple of segments is
//! solved on its own, where the system is smooth: Newton iteration starts
//! from the cells of a grid of angles, seeded by the line transversals of
//! the projection to `R^3`. Solutions are counted with the sign of the
//! Jacobian determinant.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::system::{conditioning, linearise};
use super::{
    alternates, closest_on_segment, diameter, enumerate_alternating_quadrisecants, lerp, plucker_candidates, Aabb,
    EnumerateOptions, COINCIDENCE, SIGN_CONVENTION,
};
use crate::error::{Error, Result};
use crate::knot::predicates::dist_f;
use crate::knot::LongKnotPL;
use crate::par::{self, Execution};

/// Columns with normalised smallest singular value below this are rejected.
pub const TRANSVERSALITY_TOL: f64 = 1e-7;
const NEWTON_STEPS: usize = 30;
const ANGLE_STEP: f64 = 1e-6;
const CONVERGED: f64 = 1e-12;

/// A family of PL knots over the torus of angles, sharing one vertex grid.
pub trait TwoParameterFamily: Sync {
    fn ambient_dim(&self) -> usize;
    /// Vertex parameters, common to every member.
    fn params(&self) -> &[f64];
    /// Vertex positions at the given angles.
    fn positions(&self, theta: [f64; 2]) -> Vec<Vec<f64>>;

    /// Position of vertex `k` at the given angles.
    fn vertex(&self, k: usize, theta: [f64; 2]) -> Vec<f64> {
        self.positions(theta).swap_remove(k)
    }

    /// Which angles each vertex moves with, found by sampling.
    fn dependence(&self) -> Vec<[bool; 2]> {
        let base = self.positions([0.0, 0.0]);
        let mut dep = vec![[false; 2]; base.len()];
        for a in [0.9, 2.3, 4.1] {
            for (j, th) in [[a, 0.0], [0.0, a]].into_iter().enumerate() {
                for (k, p) in self.positions(th).iter().enumerate() {
                    if p != &base[k] {
                        dep[k][j] = true;
                    }
                }
            }
        }
        dep
    }
}

/// The constant family at one knot.
pub struct ConstantFamily {
    knot: LongKnotPL,
}

impl ConstantFamily {
    pub fn new(knot: LongKnotPL) -> Self {
        ConstantFamily { knot }
    }

    /// Quadrisecants of the knot when it lies in `R^3`.
    pub fn r3_quadrisecants(&self) -> Vec<[f64; 4]> {
        let pts = self.knot.points();
        if self.knot.ambient_dim() < 3 || pts.iter().any(|p| p[3..].iter().any(|&c| c != 0.0)) {
            return Vec::new();
        }
        let flat = LongKnotPL::raw(3, self.knot.params().to_vec(), pts.iter().map(|p| p[..3].to_vec()).collect());
        enumerate_alternating_quadrisecants(&flat, EnumerateOptions::default())
            .map(|qs| qs.into_iter().map(|q| q.params).collect())
            .unwrap_or_default()
    }
}

impl TwoParameterFamily for ConstantFamily {
    fn ambient_dim(&self) -> usize {
        self.knot.ambient_dim()
    }

    fn params(&self) -> &[f64] {
        self.knot.params()
    }

    fn positions(&self, _: [f64; 2]) -> Vec<Vec<f64>> {
        self.knot.points().to_vec()
    }

    fn vertex(&self, k: usize, _: [f64; 2]) -> Vec<f64> {
        self.knot.points()[k].clone()
    }

    fn dependence(&self) -> Vec<[bool; 2]> {
        vec![[false; 2]; self.knot.points().len()]
    }
}

/// One transverse solution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilySolution {
    pub theta: [f64; 2],
    pub params: [f64; 4],
    pub sign: i32,
    pub conditioning: f64,
}

/// Result of [`family_nu2`].
#[derive(Clone, Debug, Serialize)]
pub struct FamilyCount {
    pub nu2: i64,
    pub solutions: Vec<FamilySolution>,
    /// Distinct parameter tuples of alternating quadrisecants at which the
    /// family is not transverse.
    pub rejected_non_transverse: usize,
    pub grid: usize,
    /// The count on the grid refined once.
    pub refined_nu2: i64,
    /// Unchanged under one grid refinement.
    pub stable: bool,
}

/// The vertex positions a quadruple needs, with static ones cached.
struct Evaluator<'a, F: TwoParameterFamily + ?Sized> {
    fam: &'a F,
    base: &'a [Vec<f64>],
    dep: &'a [[bool; 2]],
}

impl<F: TwoParameterFamily + ?Sized> Evaluator<'_, F> {
    fn vertex(&self, k: usize, theta: [f64; 2]) -> Vec<f64> {
        if self.dep[k] == [false, false] {
            self.base[k].clone()
        } else {
            self.fam.vertex(k, theta)
        }
    }

    fn angle_derivative(&self, k: usize, theta: [f64; 2], j: usize) -> Vec<f64> {
        if !self.dep[k][j] {
            return vec![0.0; self.base[k].len()];
        }
        let (mut up, mut down) = (theta, theta);
        up[j] += ANGLE_STEP;
        down[j] -= ANGLE_STEP;
        let (a, b) = (self.fam.vertex(k, up), self.fam.vertex(k, down));
        a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * ANGLE_STEP)).collect()
    }
}

enum Outcome {
    Transverse(FamilySolution),
    NonTransverse([f64; 4]),
    Failed,
}

/// A segment quadruple and the angles it moves with.
struct Quadruple {
    seg: [usize; 4],
    angles: Vec<usize>,
}

/// Newton iteration on the four fixed segments, over the angles the
/// quadruple depends on and the four segment parameters.
fn newton<F: TwoParameterFamily + ?Sized>(
    ev: &Evaluator<'_, F>,
    q: &Quadruple,
    mut theta: [f64; 2],
    mut s: [f64; 4],
    scale: f64,
) -> Outcome {
    let ends = |th: [f64; 2]| -> Vec<(Vec<f64>, Vec<f64>)> {
        q.seg.iter().map(|&i| (ev.vertex(i, th), ev.vertex(i + 1, th))).collect()
    };
    let na = q.angles.len();
    for _ in 0..NEWTON_STEPS {
        if s.iter().any(|v| !(-1.0..=2.0).contains(v)) {
            return Outcome::Failed;
        }
        let e = ends(theta);
        let pts: Vec<Vec<f64>> = (0..4).map(|k| lerp(&e[k].0, &e[k].1, s[k])).collect();
        let mut dx: Vec<[Vec<f64>; 4]> = q
            .angles
            .iter()
            .map(|&j| {
                std::array::from_fn(|k| {
                    let da = ev.angle_derivative(q.seg[k], theta, j);
                    let db = ev.angle_derivative(q.seg[k] + 1, theta, j);
                    da.iter().zip(&db).map(|(a, b)| (1.0 - s[k]) * a + s[k] * b).collect()
                })
            })
            .collect();
        for v in 0..4 {
            let n = pts[0].len();
            dx.push(std::array::from_fn(|k| {
                if k == v {
                    e[k].1.iter().zip(&e[k].0).map(|(b, a)| b - a).collect()
                } else {
                    vec![0.0; n]
                }
            }));
        }
        let Some(lin) = linearise([&pts[0], &pts[1], &pts[2], &pts[3]], &dx, [2, 1, 0, 3]) else {
            return Outcome::Failed;
        };
        let r = lin.residual.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if r <= CONVERGED * scale {
            return classify(ev, q, theta, s, &pts, &lin.jacobian, lin.lambda, scale);
        }
        let Ok(step) = lin.jacobian.clone().svd(true, true).solve(&(-DVector::from_vec(lin.residual)), 1e-14) else {
            return Outcome::Failed;
        };
        // keep angle steps small
        let big = step.iter().take(na).fold(0.0f64, |a, v| a.max(v.abs()));
        let damp = if big > 0.2 { 0.2 / big } else { 1.0 };
        for (i, &j) in q.angles.iter().enumerate() {
            theta[j] += damp * step[i];
        }
        for k in 0..4 {
            s[k] += damp * step[na + k];
        }
    }
    Outcome::Failed
}

#[allow(clippy::too_many_arguments)]
fn classify<F: TwoParameterFamily + ?Sized>(
    ev: &Evaluator<'_, F>,
    q: &Quadruple,
    theta: [f64; 2],
    s: [f64; 4],
    pts: &[Vec<f64>],
    jacobian: &DMatrix<f64>,
    lambda: [f64; 2],
    scale: f64,
) -> Outcome {
    if s.iter().any(|&v| !(0.0..=1.0).contains(&v)) || !alternates(lambda) {
        return Outcome::Failed;
    }
    // lines through a shared vertex lie on the boundary
    if (0..4).any(|i| (i + 1..4).any(|j| dist_f(&pts[i], &pts[j]) < COINCIDENCE * scale)) {
        return Outcome::Failed;
    }
    let ts = ev.fam.params();
    let params: [f64; 4] = std::array::from_fn(|k| ts[q.seg[k]] + s[k] * (ts[q.seg[k] + 1] - ts[q.seg[k]]));
    if q.angles.len() < 2 {
        return Outcome::NonTransverse(params);
    }
    let cond = conditioning(jacobian);
    if cond < TRANSVERSALITY_TOL {
        return Outcome::NonTransverse(params);
    }
    let det = jacobian.determinant();
    let sign = if det > 0.0 { SIGN_CONVENTION } else { -SIGN_CONVENTION };
    let theta = [theta[0].rem_euclid(TAU), theta[1].rem_euclid(TAU)];
    Outcome::Transverse(FamilySolution { theta, params, sign, conditioning: cond })
}

/// Segment parameter seeds from the transversals of the projection to `R^3`.
fn projected_seeds(ends: &[(Vec<f64>, Vec<f64>)]) -> Vec<[f64; 4]> {
    let flat: Vec<(Vec<f64>, Vec<f64>)> = ends.iter().map(|(a, b)| (a[..3].to_vec(), b[..3].to_vec())).collect();
    let segs: [(&[f64], &[f64]); 4] = std::array::from_fn(|k| (&flat[k].0[..], &flat[k].1[..]));
    let Ok(lines) = plucker_candidates(&segs) else {
        return vec![[0.5; 4]];
    };
    lines
        .iter()
        .filter_map(|(p, u)| {
            let mut s = [0.0; 4];
            for k in 0..4 {
                s[k] = closest_on_segment(p, u, segs[k].0, segs[k].1)?;
                if !(-0.25..=1.25).contains(&s[k]) {
                    return None;
                }
            }
            Some(s)
        })
        .collect()
}

fn angle_close(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d) < 1e-7
}

fn cell_centre(grid: usize, i: usize) -> f64 {
    TAU * (i as f64 + 0.5) / grid as f64
}

struct Pass {
    solutions: Vec<FamilySolution>,
    rejected: usize,
}

fn solve_on_grid<F: TwoParameterFamily + ?Sized>(fam: &F, grid: usize, exec: Execution) -> Pass {
    let base = fam.positions([0.0, 0.0]);
    let dep = fam.dependence();
    let ev = Evaluator { fam, base: &base, dep: &dep };
    let scale = diameter(&base).max(1e-300);
    let m = base.len() - 1;
    let cells: Vec<[f64; 2]> =
        (0..grid).flat_map(|a| (0..grid).map(move |b| [cell_centre(grid, a), cell_centre(grid, b)])).collect();
    // boxes swept over the grid, padded by the largest move between cells
    let mut sweep_pad = 0.0f64;
    let swept: Vec<Vec<Vec<f64>>> = (0..=m)
        .map(|k| {
            if dep[k] == [false, false] {
                return vec![base[k].clone()];
            }
            let samples: Vec<Vec<f64>> = cells.iter().map(|&th| fam.vertex(k, th)).collect();
            for a in 0..grid {
                for b in 0..grid {
                    let here = &samples[a * grid + b];
                    let right = &samples[a * grid + (b + 1) % grid];
                    let up = &samples[((a + 1) % grid) * grid + b];
                    sweep_pad = sweep_pad.max(dist_f(here, right)).max(dist_f(here, up));
                }
            }
            samples
        })
        .collect();
    let boxes: Vec<Aabb> = (0..m)
        .map(|i| {
            let pts: Vec<&[f64]> = swept[i].iter().chain(&swept[i + 1]).map(|p| &p[..]).collect();
            Aabb::of(&pts, sweep_pad + 1e-9 * scale)
        })
        .collect();
    let seg_dep = |i: usize| [dep[i][0] || dep[i + 1][0], dep[i][1] || dep[i + 1][1]];
    let mut quads = Vec::new();
    for i1 in 0..m {
        for i2 in i1 + 1..m {
            for i3 in i2 + 1..m {
                let mut hull = boxes[i2];
                hull.extend(&boxes[i3]);
                if !boxes[i1].meets(&hull) {
                    continue;
                }
                for i4 in i3 + 1..m {
                    if !boxes[i4].meets(&hull) {
                        continue;
                    }
                    let seg = [i1, i2, i3, i4];
                    let angles: Vec<usize> = (0..2).filter(|&j| seg.iter().any(|&i| seg_dep(i)[j])).collect();
                    quads.push(Quadruple { seg, angles });
                }
            }
        }
    }
    let outcomes = par::flat_map(exec, &quads, |q| {
        let starts: Vec<[f64; 2]> = match q.angles.as_slice() {
            [] => vec![[0.0, 0.0]],
            [j] => (0..grid).map(|a| if *j == 0 { [cell_centre(grid, a), 0.0] } else { [0.0, cell_centre(grid, a)] }).collect(),
            _ => cells.clone(),
        };
        let mut out = Vec::new();
        for th in starts {
            let ends: Vec<(Vec<f64>, Vec<f64>)> = q.seg.iter().map(|&i| (ev.vertex(i, th), ev.vertex(i + 1, th))).collect();
            let pts: Vec<&[f64]> = ends.iter().flat_map(|(a, b)| [&a[..], &b[..]]).collect();
            let near = |k: usize| Aabb::of(&[&ends[k].0, &ends[k].1], sweep_pad);
            let hull = Aabb::of(&pts[2..6], sweep_pad);
            if !near(0).meets(&hull) || !near(3).meets(&hull) {
                continue;
            }
            for s in projected_seeds(&ends) {
                out.push(newton(&ev, q, th, s, scale));
            }
        }
        out
    });
    let mut solutions: Vec<FamilySolution> = Vec::new();
    let mut rejected: Vec<[f64; 4]> = Vec::new();
    let close = |p: &[f64; 4], r: &[f64; 4]| p.iter().zip(r).all(|(x, y)| (x - y).abs() < 1e-7);
    for o in outcomes {
        match o {
            Outcome::Transverse(s) => {
                let same = |q: &FamilySolution| {
                    angle_close(q.theta[0], s.theta[0]) && angle_close(q.theta[1], s.theta[1]) && close(&q.params, &s.params)
                };
                if !solutions.iter().any(same) {
                    solutions.push(s);
                }
            }
            Outcome::NonTransverse(p) => {
                if !rejected.iter().any(|r| close(r, &p)) {
                    rejected.push(p);
                }
            }
            Outcome::Failed => {}
        }
    }
    solutions.sort_by(|a, b| (a.theta, a.params).partial_cmp(&(b.theta, b.params)).expect("finite"));
    Pass { solutions, rejected: rejected.len() }
}

/// Signed count of transverse alternating quadrisecants of a family in `R^4`,
/// searched from a `grid x grid` lattice of angles and refined once.
pub fn family_nu2<F: TwoParameterFamily + ?Sized>(fam: &F, grid: usize, exec: Execution) -> Result<FamilyCount> {
    if fam.ambient_dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: fam.ambient_dim() });
    }
    if grid == 0 {
        return Err(Error::InvalidParameter("grid must be positive".into()));
    }
    let coarse = solve_on_grid(fam, grid, exec);
    let fine = solve_on_grid(fam, 2 * grid, exec);
    let count = |p: &Pass| p.solutions.iter().map(|s| s.sign as i64).sum::<i64>();
    let (nu2, refined_nu2) = (count(&coarse), count(&fine));
    Ok(FamilyCount {
        nu2,
        stable: nu2 == refined_nu2 && coarse.solutions.len() == fine.solutions.len(),
        refined_nu2,
        rejected_non_transverse: coarse.rejected,
        solutions: coarse.solutions,
        grid,
    })
}
