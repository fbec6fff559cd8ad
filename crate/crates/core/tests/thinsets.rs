use num_rational::BigRational;

use thinset::arith::{expand, ArithmeticSequence, CircleRational, TermSequence};
use thinset::ideals::{ideal_member, IdealDescriptor, Outcome, SetDescriptor};
use thinset::thinsets::{
    classical_convergence, default_epsilons, ideal_convergence, nset_partial_sums, weight_ideal_link, Point,
    WeightRule,
};

fn point(num: u64, den: u64) -> Point {
    Point::Rational(CircleRational::from_parts(num, den).unwrap())
}

fn r(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

#[test]
fn dyadic_rationals_converge_and_thirds_do_not() {
    let a: TermSequence = "2^n".parse().unwrap();
    let eps = default_epsilons();
    let v = classical_convergence(&point(5, 32), &a, 1000, &eps).unwrap().verdict;
    assert_eq!(v.outcome, Outcome::Member);
    let v = classical_convergence(&point(1, 3), &a, 1000, &eps).unwrap().verdict;
    assert_eq!(v.outcome, Outcome::NotMember);
    for ideal in [IdealDescriptor::Density, IdealDescriptor::harmonic()] {
        let v = ideal_convergence(&point(1, 3), &a, &ideal, 1000, &r(1, 4)).unwrap();
        assert_eq!(v.outcome, Outcome::NotMember, "{ideal}");
    }
}

#[test]
fn expansion_and_rational_points_agree() {
    let seq = ArithmeticSequence::factorial();
    let a = TermSequence::new(1u32.into(), seq.clone()).unwrap();
    let x = CircleRational::from_parts(7, 24).unwrap();
    let e = expand(&x, &seq, 40).unwrap();
    let eps = [r(1, 8)];
    let from_rational = classical_convergence(&Point::Rational(x), &a, 200, &eps).unwrap();
    let from_digits = classical_convergence(&Point::Expansion(e), &a, 200, &eps).unwrap();
    assert_eq!(from_rational.verdict.outcome, from_digits.verdict.outcome);
    assert_eq!(from_rational.verdict.outcome, Outcome::Member);
}

#[test]
fn harmonic_weights_against_thirds() {
    let a: TermSequence = "2^n".parse().unwrap();
    let rep = nset_partial_sums(&point(1, 3), &a, &WeightRule::harmonic(), 10_000).unwrap();
    assert_eq!(rep.verdict.outcome, Outcome::NotMember);
    assert!(rep.norm_lower <= rep.norm_upper);
    assert!(rep.lower_envelope() <= rep.upper_envelope());
    assert!(rep.norm_lower > r(3, 1));
}

#[test]
fn link_counterexamples_lie_outside_the_ideal() {
    let v = weight_ideal_link(&WeightRule::InversePower(2), &IdealDescriptor::Density);
    assert_eq!(v.outcome, Outcome::NotMember);
    let c = v.counterexample.unwrap();
    assert_eq!(ideal_member(&IdealDescriptor::Density, &c, 10_000).outcome, Outcome::NotMember);
    assert_eq!(ideal_member(&IdealDescriptor::Density, &SetDescriptor::geometric(2), 10_000).outcome, Outcome::Member);
}
