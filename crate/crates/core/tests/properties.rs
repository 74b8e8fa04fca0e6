use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use knotcubes::actions::kappa_axis;
use knotcubes::geometry::{cube_apply, cube_compose, cube_inverse, cubes_disjoint, AxisAffine, LittleCube, Scalar, VecN};
use knotcubes::graphing::{gr1_loop, LoopOfKnots};
use knotcubes::knot::{standard_knot, LongKnotPL};
use knotcubes::operad::random::random_config;
use knotcubes::operad::{height_permutation, operad_compose, CubeConfig};
use knotcubes::par::Execution;
use knotcubes::quadrisecant::{enumerate_alternating_quadrisecants, v2, v2_oracle, EnumerateOptions};
use knotcubes::tube::{knot_from_tube, tube_from_knot, BoxBump, Twist, TubeEmbedding};

const EMBEDDED: &[&str] = &["unknot", "right_trefoil", "left_trefoil", "figure_eight", "granny", "square"];
const PRIMES: &[&str] = &["right_trefoil", "left_trefoil", "figure_eight"];

/// `[lo, hi]` with rational endpoints on a grid of spacing `2/den`.
fn interval() -> impl Strategy<Value = (Scalar, Scalar)> {
    (1i64..=12).prop_flat_map(|den| {
        (0..2 * den, 1..=2 * den).prop_filter_map("empty", move |(a, w)| {
            let b = a + w;
            (b <= 2 * den).then(|| (Scalar::ratio(a - den, den), Scalar::ratio(b - den, den)))
        })
    })
}

fn cube(dim: usize) -> impl Strategy<Value = LittleCube> {
    prop::collection::vec(interval(), dim).prop_map(|iv| {
        let (lo, hi): (Vec<Scalar>, Vec<Scalar>) = iv.into_iter().unzip();
        LittleCube::from_box(&lo, &hi).unwrap()
    })
}

fn cubes_of_dim(count: usize) -> impl Strategy<Value = Vec<LittleCube>> {
    (1usize..=3).prop_flat_map(move |d| prop::collection::vec(cube(d), count))
}

fn perturbed(name: &str, seed: u64) -> LongKnotPL {
    let f = standard_knot(name).unwrap();
    let reach = f.reach_estimate().unwrap().min(1.0);
    f.perturb(seed, reach / 20.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cube_composition_is_associative_and_unital(cs in cubes_of_dim(3)) {
        let [a, b, c] = [&cs[0], &cs[1], &cs[2]].map(LittleCube::as_caut);
        let left = cube_compose(&cube_compose(&a, &b).unwrap(), &c).unwrap();
        let right = cube_compose(&a, &cube_compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let id = LittleCube::identity(cs[0].dim()).as_caut();
        prop_assert_eq!(cube_compose(&id, &a).unwrap(), a.clone());
        prop_assert_eq!(cube_compose(&a, &id).unwrap(), a);
    }

    #[test]
    fn cube_inverse_is_two_sided(l in (1usize..=3).prop_flat_map(cube)) {
        let inv = cube_inverse(&l);
        prop_assert!(cube_compose(&l.as_caut(), &inv).unwrap().is_identity());
        prop_assert!(cube_compose(&inv, &l.as_caut()).unwrap().is_identity());
    }

    #[test]
    fn cubes_map_the_unit_cube_into_itself(l in (1usize..=3).prop_flat_map(cube)) {
        let n = l.dim();
        for mask in 0..(1u32 << n) {
            let corner: Vec<(i64, i64)> = (0..n).map(|i| if mask >> i & 1 == 1 { (1, 1) } else { (-1, 1) }).collect();
            let y = cube_apply(&l, &VecN::from_ratios(&corner).unwrap()).unwrap();
            prop_assert!(y.coords().iter().all(|c| c.abs() <= Scalar::one()));
        }
    }

    #[test]
    fn disjointness_is_symmetric_and_order_free(cs in cubes_of_dim(3), rot in 0usize..3) {
        let d = cubes_disjoint(&cs);
        prop_assert_eq!(cubes_disjoint(&[cs[1].clone(), cs[0].clone()]), cubes_disjoint(&[cs[0].clone(), cs[1].clone()]));
        let mut r = cs.clone();
        r.rotate_left(rot);
        prop_assert_eq!(cubes_disjoint(&r), d);
        r.reverse();
        prop_assert_eq!(cubes_disjoint(&r), d);
    }

    #[test]
    fn operad_composition_stays_disjoint(seed: u64, dim in 1usize..=3, arity in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_config(&mut rng, dim, arity);
        let inner: Vec<CubeConfig> = (0..arity).map(|k| random_config(&mut rng, dim, k % 3)).collect();
        let out = operad_compose(&c, &inner).unwrap();
        prop_assert!(cubes_disjoint(out.cubes()));
    }

    #[test]
    fn height_permutation_sorts_heights(seed: u64, dim in 2usize..=3, arity in 0usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_config(&mut rng, dim, arity);
        let h = c.heights().unwrap();
        let sigma = height_permutation(&c).unwrap();
        let sorted: Vec<&Scalar> = sigma.images().iter().map(|&i| &h[i]).collect();
        prop_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn conjugation_is_supported_in_the_cube(l in cube(1), x in -1.3f64..1.3, m in prop::array::uniform2(-0.7f64..0.7)) {
        let tw = TubeEmbedding::twist(Twist::new(2, BoxBump::new(vec![0.0], vec![0.8]).unwrap(), 1.7).unwrap());
        let e = TubeEmbedding::conjugate(&l, tw).unwrap();
        let (lo, hi) = l.image_box();
        let p = [x, m[0], m[1]];
        if x <= lo[0].to_f64() || x >= hi[0].to_f64() {
            prop_assert_eq!(e.eval(&p).unwrap(), p.to_vec());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn axis_action_output_is_embedded(seed: u64, picks in prop::collection::vec(0usize..6, 1..=3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_config(&mut rng, 1, picks.len());
        let knots: Vec<LongKnotPL> = picks.iter().map(|&i| standard_knot(EMBEDDED[i]).unwrap()).collect();
        let g = kappa_axis(&c, &knots).unwrap();
        prop_assert!(g.check_exact_embedding().is_ok());
    }

    #[test]
    fn perturbation_keeps_the_embedding_certificate(seed: u64, i in 0usize..6, frac in 0.001f64..0.099) {
        let f = standard_knot(EMBEDDED[i]).unwrap();
        let reach = f.reach_estimate().unwrap().min(1.0);
        let g = f.perturb(seed, frac * reach).unwrap();
        prop_assert!(g.check_exact_embedding().is_ok());
        prop_assert!(f.sup_distance(&g, 2000) <= frac * reach);
    }

    #[test]
    fn v2_is_stable_under_small_perturbations(seed: u64, i in 0usize..6) {
        let f = standard_knot(EMBEDDED[i]).unwrap();
        prop_assert_eq!(v2(&perturbed(EMBEDDED[i], seed)).unwrap(), v2(&f).unwrap());
    }

    #[test]
    fn mirrors_agree_with_the_oracle(seed: u64, i in 0usize..6) {
        let f = perturbed(EMBEDDED[i], seed).mirror();
        let q = v2(&f).unwrap();
        prop_assert_eq!(q, v2_oracle(&f).unwrap());
        prop_assert_eq!(q, v2(&standard_knot(EMBEDDED[i]).unwrap()).unwrap());
    }

    #[test]
    fn connect_sum_is_additive(seed: u64, a in 0usize..3, b in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g) = (standard_knot(PRIMES[a]).unwrap(), standard_knot(PRIMES[b]).unwrap());
        let c = random_config(&mut rng, 1, 2);
        let sum = kappa_axis(&c, &[f.clone(), g.clone()]).unwrap();
        prop_assert_eq!(v2(&sum).unwrap(), v2(&f).unwrap() + v2(&g).unwrap());
    }

    #[test]
    fn enumeration_ignores_threads_and_pruning(seed: u64, i in 1usize..6) {
        let f = perturbed(EMBEDDED[i], seed);
        let run = |execution, prune| {
            let mut ps: Vec<[f64; 4]> = enumerate_alternating_quadrisecants(&f, EnumerateOptions { execution, prune, seed: 0 })
                .unwrap()
                .into_iter()
                .map(|q| q.params)
                .collect();
            ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ps
        };
        let reference = run(Execution::Parallel, true);
        for other in [run(Execution::Sequential, true), run(Execution::Parallel, false), run(Execution::Sequential, false)] {
            prop_assert_eq!(other.len(), reference.len());
            for (p, q) in other.iter().zip(&reference) {
                prop_assert!(p.iter().zip(q).all(|(x, y)| (x - y).abs() <= 1e-8));
            }
        }
    }

    #[test]
    fn tube_core_round_trip(i in 1usize..6, frac in 0.05f64..0.45) {
        let f = standard_knot(EMBEDDED[i]).unwrap();
        let e = tube_from_knot(&f, frac * f.reach_estimate().unwrap()).unwrap();
        prop_assert!(f.sup_distance(&knot_from_tube(&e).unwrap(), 1000) <= 1e-9);
    }

    #[test]
    fn graphing_a_rotation_loop_is_injective(i in 0usize..6, q in 8usize..24) {
        let lp = LoopOfKnots::rotation(&standard_knot(EMBEDDED[i]).unwrap(), q).unwrap();
        prop_assert!(gr1_loop(&lp, 32).unwrap().passes_default_proxy());
    }
}
