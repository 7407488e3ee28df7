//! Property tests of the exact identities: everything here must hold with
//! zero tolerance in rational arithmetic.

use num::{BigInt, One, Signed, Zero};
use proptest::prelude::*;

use renyi_lab::cylinders::{
    bbl_conditional, cylinder, cylinder_measure, s_sequence, transition_prob,
};
use renyi_lab::expansion::{convergents, error_bound, evaluate, expand, renyi_map};
use renyi_lab::natural_ext::{ext_inverse_exact, ext_map_exact};
use renyi_lab::rational::Rational;
use renyi_lab::Params;

fn param_strategy() -> impl Strategy<Value = Params> {
    prop_oneof![Just(2u32), Just(3), Just(5), Just(10)].prop_map(|n| Params::new(n).unwrap())
}

/// Digits with the heavy 1/i² tail of the digit law.
fn digit_strategy(n: u32) -> impl Strategy<Value = u64> {
    (0.0f64..0.999_999).prop_map(move |v| {
        let k = (f64::from(n) / (1.0 - v) - 1.0).ceil() as u64;
        k.max(u64::from(n))
    })
}

fn block_strategy(max_len: usize) -> impl Strategy<Value = (Params, Vec<u64>)> {
    param_strategy().prop_flat_map(move |params| {
        let digits = prop::collection::vec(digit_strategy(params.n()), 1..=max_len);
        (Just(params), digits)
    })
}

fn unit_rational_strategy() -> impl Strategy<Value = Rational> {
    (2u64..u64::MAX / 4)
        .prop_flat_map(|den| (0..den, Just(den)))
        .prop_map(|(num, den)| Rational::new(BigInt::from(num), BigInt::from(den)))
}

proptest! {
    /// p_{k−1} q_k − p_k q_{k−1} = N^k at every prefix, exactly.
    #[test]
    fn determinant_identity((params, block) in block_strategy(50)) {
        let convs = convergents(&params, &block).unwrap();
        let mut power = BigInt::one();
        for k in 1..=block.len() {
            power *= params.n_big();
            prop_assert_eq!(&convs[k - 1].p * &convs[k].q - &convs[k].p * &convs[k - 1].q, power.clone());
        }
    }

    /// q is strictly increasing with gaps growing at least geometrically.
    #[test]
    fn monotone_denominators((params, block) in block_strategy(50)) {
        let convs = convergents(&params, &block).unwrap();
        for k in 1..=block.len() {
            prop_assert!(convs[k].q > convs[k - 1].q);
            if k >= 2 {
                let gap = &convs[k].q - &convs[k - 1].q;
                let prev_gap = &convs[k - 1].q - &convs[k - 2].q;
                prop_assert!(gap >= params.n_big() * prev_gap);
            }
        }
    }

    /// evaluate(expand(x, n), R^n(x)) returns x exactly.
    #[test]
    fn reconstruction(params in param_strategy(), x in unit_rational_strategy(), n in 1usize..=30) {
        let e = expand(&params, &x, n).unwrap();
        prop_assert!(!e.truncated);
        prop_assert!(e.digits.iter().all(|&d| d >= params.n_u64()));
        let mut tail = x.clone();
        for _ in 0..n {
            tail = renyi_map(&params, &tail).unwrap();
        }
        prop_assert_eq!(evaluate(&params, &e.digits, &tail).unwrap(), x);
    }

    /// |x − p_k/q_k| ≤ N^k/(q_k (q_k − q_{k−1})) along the expansion of x.
    #[test]
    fn convergent_error_bound(params in param_strategy(), x in unit_rational_strategy()) {
        let e = expand(&params, &x, 12).unwrap();
        let convs = convergents(&params, &e.digits).unwrap();
        for k in 1..convs.len() {
            let approx = Rational::new(convs[k].p.clone(), convs[k].q.clone());
            let bound = error_bound(&params, &convs[k], &convs[k - 1]).unwrap();
            prop_assert!((&x - approx).abs() <= bound);
            prop_assert!(bound.is_positive());
        }
    }

    /// A cylinder is tiled exactly by its children: shared endpoints,
    /// adjacent children, and measures that close up with the exact tail.
    #[test]
    fn cylinder_refinement((params, block) in block_strategy(10)) {
        let parent = cylinder(&params, &block).unwrap();
        prop_assert!(parent.left < parent.right);

        let n = params.n_u64();
        let mut child_block = block.clone();
        child_block.push(n);
        let first = cylinder(&params, &child_block).unwrap();
        prop_assert_eq!(first.left.clone(), parent.left.clone());

        let last_digit = n + 6;
        let mut measures = Rational::zero();
        for i in n..=last_digit {
            *child_block.last_mut().unwrap() = i;
            let child = cylinder(&params, &child_block).unwrap();
            prop_assert!(child.left < child.right);
            measures += child.measure();

            *child_block.last_mut().unwrap() = i + 1;
            let next = cylinder(&params, &child_block).unwrap();
            prop_assert_eq!(child.right.clone(), next.left.clone());
        }
        // mass of the children so far + the remaining stretch = parent mass
        *child_block.last_mut().unwrap() = last_digit + 1;
        let rest = &parent.right - cylinder(&params, &child_block).unwrap().left;
        prop_assert_eq!(measures + rest, parent.measure());
    }

    /// The conditional law of the tail equals the exact measure ratio.
    #[test]
    fn bbl_formula_is_exact_measure_ratio(
        n in prop_oneof![Just(2u32), Just(3), Just(5)],
        raw_digits in prop::collection::vec(0.0f64..0.999, 1..=6),
        x in unit_rational_strategy(),
    ) {
        let params = Params::new(n).unwrap();
        let block: Vec<u64> = raw_digits
            .iter()
            .map(|v| ((f64::from(n) / (1.0 - v) - 1.0).ceil() as u64).max(u64::from(n)))
            .collect();
        let cyl = cylinder(&params, &block).unwrap();
        let upper = evaluate(&params, &block, &x).unwrap();
        let ratio = (upper - &cyl.left) / cyl.measure();
        let s = s_sequence(&params, &block).unwrap();
        prop_assert_eq!(ratio, bbl_conditional(&params, s.last().unwrap(), &x));
    }

    /// λ(a_{n+1} = i | block) as a ratio of exact cylinder measures equals
    /// the kernel evaluated at s_n.
    #[test]
    fn kernel_consistency((params, block) in block_strategy(8), extra in 0u64..40) {
        let i = params.n_u64() + extra;
        let mut child = block.clone();
        child.push(i);
        let ratio = cylinder_measure(&params, &child).unwrap()
            / cylinder_measure(&params, &block).unwrap();
        let s = s_sequence(&params, &block).unwrap();
        prop_assert_eq!(ratio, transition_prob(&params, s.last().unwrap(), i).unwrap());
    }

    /// s by recursion equals 1 − N q_{k−1}/q_k from the convergents.
    #[test]
    fn s_duality((params, block) in block_strategy(30)) {
        let s = s_sequence(&params, &block).unwrap();
        let convs = convergents(&params, &block).unwrap();
        for k in 1..=block.len() {
            let dual = Rational::one()
                - Rational::new(params.n_big() * &convs[k - 1].q, convs[k].q.clone());
            prop_assert_eq!(s[k].clone(), dual);
            prop_assert!(!s[k].is_negative() && s[k] < Rational::one());
        }
    }

    /// The extension round-trips bit-exactly in rational arithmetic.
    #[test]
    fn extension_bijectivity(
        params in param_strategy(),
        x in unit_rational_strategy(),
        y in unit_rational_strategy(),
    ) {
        let (fx, fy) = ext_map_exact(&params, &x, &y).unwrap();
        let (bx, by) = ext_inverse_exact(&params, &fx, &fy).unwrap();
        prop_assert_eq!((bx, by), (x.clone(), y.clone()));

        let (ix, iy) = ext_inverse_exact(&params, &x, &y).unwrap();
        let (rx, ry) = ext_map_exact(&params, &ix, &iy).unwrap();
        prop_assert_eq!((rx, ry), (x, y));
    }
}

#[test]
fn first_level_partition_tiles_unit_interval() {
    // exact adjacency of I(i) from N up, closing with the tail to 1
    for n in [2u32, 3, 5, 10] {
        let params = Params::new(n).unwrap();
        let mut expected_left = Rational::zero();
        let mut total = Rational::zero();
        for i in params.n_u64()..params.n_u64() + 200 {
            let c = cylinder(&params, &[i]).unwrap();
            assert_eq!(c.left, expected_left);
            total += c.measure();
            expected_left = c.right.clone();
        }
        let tail = Rational::one() - &expected_left;
        assert_eq!(total + tail, Rational::one());
    }
}
