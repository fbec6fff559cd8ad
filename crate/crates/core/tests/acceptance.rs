//! One line per acceptance criterion; exits non-zero when any fails.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thinset::arith::{decompose, expand, ArithmeticSequence, CircleRational, Depth, DigitExpansion, TermSequence};
use thinset::ideals::{IdealDescriptor, Outcome, SetDescriptor};
use thinset::thinsets::{
    classical_convergence, ideal_convergence, membership_by_support, nset_partial_sums, Point, WeightRule,
};
use thinset::witnesses::{
    build_and_verify, digit_choice, plan_witness, verify_certificate, Theorem, WitnessCertificate,
};

type Outcome_ = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn q(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// `u_1 .. u_k` from explicit ratios, independent of the library.
fn prefix_products(ratios: &dyn Fn(u64) -> u64, k: u64) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    for n in 1..=k {
        let next = out.last().unwrap() * big(ratios(n));
        out.push(next);
    }
    out
}

fn criterion_1() -> Outcome_ {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut counts = [0u32; 3];
    for trial in 0..1000u32 {
        let kind = (trial % 3) as usize;
        let cyc: Vec<u64> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(2..=9)).collect();
        let (seq, ratio): (ArithmeticSequence, Box<dyn Fn(u64) -> u64>) = match kind {
            0 => (ArithmeticSequence::dyadic(), Box::new(|_| 2)),
            1 => (ArithmeticSequence::factorial(), Box::new(|n| n)),
            _ => {
                let c = cyc.clone();
                (ArithmeticSequence::from_small_ratios(&cyc).unwrap(), Box::new(move |n| c[((n - 1) % c.len() as u64) as usize]))
            }
        };
        let k = rng.gen_range(1..=30u64);
        let u = prefix_products(&*ratio, k);
        let m = rng.gen_biguint_below(&u[k as usize]);
        let x = q(m, u[k as usize].clone());
        let cx = CircleRational::new(x.clone()).map_err(|e| e.to_string())?;
        let e = expand(&cx, &seq, k.max(1)).map_err(|e| e.to_string())?;
        ensure(e.is_finite(), || format!("m/u_{k} did not terminate over {seq}"))?;
        // independent reconstruction: Σ c_n / u_n with our own u_n
        let mut sum = BigRational::zero();
        for (&n, c) in e.nonzero_digits() {
            ensure(c < &big(ratio(n)), || format!("digit c_{n} = {c} too large"))?;
            sum += q(c.clone(), u[n as usize].clone());
        }
        ensure(sum == x, || format!("digit sum differs for {x} over {seq}"))?;
        let back = e.reconstruct(k).map_err(|e| e.to_string())?;
        ensure(back.value() == &x, || format!("reconstruct(expand({x})) = {back}"))?;
        counts[kind] += 1;
    }
    Ok(format!("1000 exact round trips (dyadic {}, factorial {}, random ratios {})", counts[0], counts[1], counts[2]))
}

trait GenBig {
    fn gen_biguint_below(&mut self, bound: &BigUint) -> BigUint;
}

impl GenBig for ChaCha8Rng {
    fn gen_biguint_below(&mut self, bound: &BigUint) -> BigUint {
        let bits = bound.bits();
        loop {
            let mut x = BigUint::zero();
            for _ in 0..bits.div_ceil(32) {
                x = (x << 32) + big(self.gen::<u32>() as u64);
            }
            x >>= bits.div_ceil(32) * 32 - bits;
            if &x < bound {
                return x;
            }
        }
    }
}

fn criterion_2() -> Outcome_ {
    let mut cases = 0;
    for qq in 2..=64u64 {
        for v in 1..qq {
            let d = digit_choice(&big(qq), &big(v)).map_err(|e| e.to_string())?;
            let l = v % qq;
            let m = if 2 * l <= qq { 2 * l } else { 2 * (qq - l) };
            let c = qq / m;
            ensure(d.l == big(l) && d.m == big(m) && d.c == big(c), || format!("q={qq} v={v}: formula mismatch"))?;
            let r = (c * l) % qq;
            // 1/4 <= r/q <= 3/4
            ensure(4 * r >= qq && 4 * r <= 3 * qq, || format!("q={qq} v={v}: {{c l/q}} = {r}/{qq}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} pairs (q, v) with {{c l / q}} in [1/4, 3/4]"))
}

/// Exact value of the truncated witness from its digits.
fn truncated_value(e: &DigitExpansion, ratio: &dyn Fn(u64) -> u64) -> BigRational {
    let last = e.nonzero_digits().keys().last().copied().unwrap_or(0);
    let u = prefix_products(ratio, last);
    e.nonzero_digits().iter().map(|(&n, c)| q(c.clone(), u[n as usize].clone())).sum()
}

fn criterion_3(certs: &mut Vec<WitnessCertificate>) -> Outcome_ {
    let seq = ArithmeticSequence::dyadic();
    let a: TermSequence = "3*2^n".parse().unwrap();
    let plan = plan_witness(Theorem::Th6, &seq, &a, &IdealDescriptor::Density, 16).map_err(|e| e.to_string())?;
    let cert = build_and_verify(&plan).map_err(|e| e.to_string())?;
    ensure(cert.pass && cert.checks.len() == 16, || "certificate does not pass".into())?;
    let lo = BigRational::new(1.into(), 4.into());
    let hi = BigRational::new(7.into(), 8.into());
    let x_t = truncated_value(&cert.digits, &|_| 2);
    for ch in &cert.checks {
        ensure(ch.interval.lo() >= &lo && ch.interval.hi() <= &hi, || format!("check {} interval {}", ch.i, ch.interval))?;
        // the truncated point lies at the left end of the enclosure
        let y = frac(&(BigRational::from_integer(BigInt::from(a.term(ch.n))) * &x_t));
        ensure(ch.interval.contains(&y), || format!("check {}: {{a x_T}} outside {}", ch.i, ch.interval))?;
    }
    let by_support = membership_by_support(&cert.digits, &IdealDescriptor::Density);
    ensure(by_support.outcome == Outcome::Member, || format!("support rule gave {:?}", by_support.outcome))?;
    let eps = BigRational::new(1.into(), 8.into());
    let x = Point::Expansion(cert.digits.clone());
    let report = classical_convergence(&x, &a, 100_000, std::slice::from_ref(&eps)).map_err(|e| e.to_string())?;
    let density = report.final_density(&eps).unwrap();
    ensure(density <= BigRational::new(1.into(), 50.into()), || format!("exceptional density {density}"))?;
    let along = ideal_convergence(&x, &a, &IdealDescriptor::Density, 100_000, &eps).map_err(|e| e.to_string())?;
    ensure(along.outcome == Outcome::Member, || format!("ideal convergence gave {:?}", along.outcome))?;
    let ks: Vec<u64> = cert.plan.indices.iter().map(|p| p.k).collect();
    certs.push(cert);
    Ok(format!(
        "16 intervals in [1/4, 7/8] for k = {}..{}, support rule Member, E_1/8 density {} at 10^5",
        ks[0],
        ks[15],
        density
    ))
}

fn criterion_4(certs: &mut Vec<WitnessCertificate>) -> Outcome_ {
    let mut lines = vec![];
    for p in [2u64, 3, 5] {
        let seq = ArithmeticSequence::geometric(p).unwrap();
        let a: TermSequence = format!("2*{p}^n").parse().unwrap();
        let plan = plan_witness(Theorem::Th2, &seq, &a, &IdealDescriptor::Density, 12).map_err(|e| e.to_string())?;
        let cert = build_and_verify(&plan).map_err(|e| e.to_string())?;
        ensure(cert.pass && cert.checks.len() == 12, || format!("p = {p}: certificate does not pass"))?;
        let target = BigRational::new(BigInt::from(p - 1), BigInt::from(p * p));
        for (idx, ch) in cert.checks.iter().enumerate() {
            let planned = &cert.plan.indices[idx];
            // head {v/p} and the tail below v / p^{b_i}
            let l = (&planned.v % big(p)).to_u64().unwrap();
            let head = BigRational::new(BigInt::from(l), BigInt::from(p));
            ensure(ch.interval.lo() == &head, || format!("p = {p}, check {}: head {}", ch.i, ch.interval))?;
            let one = BigRational::one();
            let near = ch.interval.lo().clone().min(one.clone() - ch.interval.lo());
            let far = ch.interval.hi().clone().min(one - ch.interval.hi());
            ensure(near > target && far > target, || format!("p = {p}, check {}: {} vs {target}", ch.i, ch.interval))?;
            ensure(ch.norm.lo() > &target, || format!("p = {p}, check {}: norm {}", ch.i, ch.norm))?;
        }
        lines.push(format!("p={p} (k_12 = {})", cert.plan.indices[11].k));
        certs.push(cert);
    }
    Ok(format!("12 norms above (p-1)/p^2 for {}", lines.join(", ")))
}

fn criterion_5(certs: &mut Vec<WitnessCertificate>) -> Outcome_ {
    let seq = ArithmeticSequence::dyadic();
    let a: TermSequence = "3*2^n".parse().unwrap();
    let plan = plan_witness(Theorem::Th1, &seq, &a, &IdealDescriptor::Density, 10).map_err(|e| e.to_string())?;
    let cert = build_and_verify(&plan).map_err(|e| e.to_string())?;
    ensure(cert.pass, || "certificate does not pass".into())?;
    ensure(cert.blocks.len() == 9, || format!("{} blocks", cert.blocks.len()))?;
    let horizon = cert.plan.horizon.as_ref().unwrap().k;
    let x_t = truncated_value(&cert.digits, &|_| 2);
    let env = BigRational::new(22.into(), 7.into());
    for b in &cert.blocks {
        let k_prev = b.from - 1;
        let bound = BigRational::new(44.into(), BigInt::from(7 * k_prev));
        ensure(b.bound == bound, || format!("block {}: bound {}", b.i, b.bound))?;
        ensure(b.sum_upper <= bound, || format!("block {}: {} > {}", b.i, b.sum_upper, bound))?;
        // direct sum over the truncated point, allowing for the cut-off tail
        let mut direct = BigRational::zero();
        let mut pow = BigRational::from_integer(BigInt::from(2u32).pow(b.from as u32));
        for j in b.from..=b.to {
            let y = frac(&(&pow * &x_t));
            let norm = y.clone().min(BigRational::one() - y);
            direct += &env * norm / BigRational::from_integer(BigInt::from(j));
            pow *= BigRational::from_integer(2.into());
        }
        let slack = &env * BigRational::new(BigInt::one(), BigInt::from(2u32).pow((horizon - b.to - 1) as u32));
        ensure(direct <= &b.sum_upper + slack, || format!("block {}: direct sum exceeds the stored bound", b.i))?;
    }
    let last = cert.blocks.last().unwrap();
    let summary = format!("{} blocks within 2(22/7)/k_(i-1), last block [{}, {}]", cert.blocks.len(), last.from, last.to);
    certs.push(cert);
    Ok(summary)
}

fn criterion_6() -> Outcome_ {
    let dyadic = ArithmeticSequence::dyadic();
    let fact = ArithmeticSequence::factorial();
    let mut checked = 0;
    for (seq, ratio) in [(&dyadic, (&|_: u64| 2u64) as &dyn Fn(u64) -> u64), (&fact, &|n: u64| n)] {
        let u = prefix_products(ratio, 20);
        for a in 1..=10_000u64 {
            let k = (0..=20).filter(|&k| (big(a) % &u[k]).is_zero()).max().unwrap() as u64;
            let v = big(a) / &u[k as usize];
            let d = decompose(seq, &big(a));
            ensure(d.k == k && d.v == v, || format!("{a} over {seq}: got ({}, {}), want ({k}, {v})", d.k, d.v))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} decompositions match the divisor search"))
}

fn criterion_7() -> Outcome_ {
    let n = 10_000u64;
    let x = Point::Rational(CircleRational::from_parts(1, 3).unwrap());
    let report = nset_partial_sums(&x, &"2^n".parse().unwrap(), &WeightRule::harmonic(), n).map_err(|e| e.to_string())?;
    let exact = report.exact.ok_or("no exact sum")?;
    let mut l = BigUint::one();
    for k in 1..=n {
        // gcd(k, l) = gcd(k, l mod k) keeps the gcd small
        let g = (&l % big(k)).gcd(&big(k));
        l *= big(k) / g;
    }
    let mut num = BigUint::zero();
    for k in 1..=n {
        num += &l / big(k);
    }
    let third = q(num, l * 3u32);
    ensure(exact == third, || "S_N differs from H_N / 3".into())?;
    ensure(exact > BigRational::from_integer(3.into()), || "S_N <= 3".into())?;
    Ok(format!("S_10000 = H_10000/3 exactly, about {:.4} > 3", exact.to_f64().unwrap_or(f64::NAN)))
}

fn criterion_8() -> Outcome_ {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let depths = [100u64, 1_000, 10_000, 100_000];
    let mut runs = 0;
    let mut members = 0;
    for trial in 0..100usize {
        let (seq, name) = match trial % 3 {
            0 => (ArithmeticSequence::dyadic(), "dyadic".to_string()),
            1 => (ArithmeticSequence::factorial(), "factorial".to_string()),
            _ => {
                let r: Vec<u64> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(2..=7)).collect();
                (ArithmeticSequence::from_small_ratios(&r).unwrap(), format!("{r:?}"))
            }
        };
        let base = *[2u64, 3, 4].get(rng.gen_range(0..3)).unwrap();
        let shift = rng.gen_range(0..4i64);
        let support = SetDescriptor::geometric(base).shift(shift);
        let depth = depths[trial % depths.len()];
        let stored = depth + 200;
        let mut digits = std::collections::BTreeMap::new();
        for r in support.elements_upto(stored).map_err(|e| e.to_string())? {
            let qr = seq.ratio(r).to_u64().unwrap_or(u64::MAX).min(1 << 20);
            if qr >= 2 {
                digits.insert(r, big(rng.gen_range(1..qr)));
            }
        }
        let e = DigitExpansion::new(seq.clone(), digits, Depth::Truncated(stored))
            .map_err(|e| e.to_string())?
            .with_support_bound(support.clone());
        let v = membership_by_support(&e, &IdealDescriptor::Density);
        ensure(v.outcome == Outcome::Member, || format!("trial {trial}: support {support} over {name} gave {:?}", v.outcome))?;
        let a = TermSequence::new(big(rng.gen_range(1..=5)), seq.clone()).unwrap();
        let x = Point::Expansion(e);
        for eps in [BigRational::new(1.into(), 4.into()), BigRational::new(1.into(), 16.into())] {
            let verdict = ideal_convergence(&x, &a, &IdealDescriptor::Density, depth, &eps).map_err(|e| e.to_string())?;
            ensure(verdict.outcome != Outcome::NotMember, || format!("trial {trial}: NotMember at depth {depth}"))?;
            runs += 1;
            members += (verdict.outcome == Outcome::Member) as u32;
        }
    }
    Ok(format!("100 expansions Member by support; {runs} convergence runs, {members} Member, none NotMember"))
}

fn criterion_9(certs: &[WitnessCertificate]) -> Outcome_ {
    ensure(certs.len() == 5, || format!("expected 5 certificates from criteria 3-5, have {}", certs.len()))?;
    for c in certs {
        let text = serde_json::to_string(c).map_err(|e| e.to_string())?;
        let back: WitnessCertificate = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        ensure(&back == c, || format!("{} certificate changed in transit", c.theorem))?;
        ensure(serde_json::to_string(&back).unwrap() == text, || "re-serialization differs".into())?;
        let report = verify_certificate(&back).map_err(|e| e.to_string())?;
        ensure(report.pass && back.pass, || format!("{} certificate failed verification: {:?}", c.theorem, report.mismatches))?;
    }
    Ok(format!("{} certificates round-trip and re-verify", certs.len()))
}

fn main() {
    let start = Instant::now();
    let mut certs = vec![];
    let mut results: Vec<(u32, Outcome_, f64)> = vec![];
    // ACCEPTANCE_ONLY=3,5 runs a subset
    let only: Option<Vec<u32>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|p| p.trim().parse().ok()).collect());
    let mut run = |n: u32, f: &mut dyn FnMut() -> Outcome_| {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            return;
        }
        let t = Instant::now();
        let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        results.push((n, r, t.elapsed().as_secs_f64()));
    };
    run(1, &mut criterion_1);
    run(2, &mut criterion_2);
    run(3, &mut || criterion_3(&mut certs));
    run(4, &mut || criterion_4(&mut certs));
    run(5, &mut || criterion_5(&mut certs));
    run(6, &mut criterion_6);
    run(7, &mut criterion_7);
    run(8, &mut criterion_8);
    run(9, &mut || criterion_9(&certs));
    let mut failed = 0;
    for (n, r, secs) in &results {
        match r {
            Ok(msg) => println!("criterion {n}: PASS ({secs:.2}s) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL ({secs:.2}s) {msg}");
            }
        }
    }
    println!("acceptance: {}/{} passed in {:.1}s", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
