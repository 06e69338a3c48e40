//! Contour-weighted sums and convergence diagnostics. Everything real-valued
//! is reported as a rational interval with outward rounding: the module
//! exists to certify inequalities, not to approximate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::counters::{e_upper_bound, Count, CountReport};
use crate::error::{Error, Result};

/// Size-dependent contour weight `w(n)`: either an activity `λ` with
/// `w(n) = λ^n`, or an inverse temperature `β` with `w(n) = exp(-2βn)`
/// (i.e. `λ = exp(-2β)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightSpec {
    Activity(BigRational),
    ExpBeta(BigRational),
}

/// A rigorous enclosure `lower <= value <= upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lower: BigRational,
    pub upper: BigRational,
}

fn round_down(r: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    BigRational::new((r * &scale).floor().to_integer(), scale)
}

fn round_up(r: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    BigRational::new((r * &scale).ceil().to_integer(), scale)
}

/// Encloses `exp(x)` for rational `x >= 0` by a Taylor partial sum; the tail
/// after term `N` is below twice the next term once `x/(N+2) <= 1/2`.
fn exp_enclosure(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(!x.is_negative());
    let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let mut sum = BigRational::one();
    let mut term = BigRational::one();
    let mut k = BigInt::zero();
    loop {
        k += 1;
        term = term * x / BigRational::from_integer(k.clone());
        sum += &term;
        // the tail past x^k/k! is at most twice the next term once
        // x/(k+2) <= 1/2
        let next = &term * x / BigRational::from_integer(&k + BigInt::one());
        let bound = &next + &next;
        if x <= &BigRational::new(&k + BigInt::from(2), BigInt::from(2)) && bound < eps {
            return (sum.clone(), sum + bound);
        }
    }
}

/// The activity interval for a weight: exact for [`WeightSpec::Activity`],
/// an outward-rounded enclosure of `exp(-2β)` for [`WeightSpec::ExpBeta`].
fn activity_interval(weight: &WeightSpec, bits: u32) -> (BigRational, BigRational) {
    match weight {
        WeightSpec::Activity(lambda) => {
            assert!(!lambda.is_negative(), "activity must be nonnegative");
            (lambda.clone(), lambda.clone())
        }
        WeightSpec::ExpBeta(beta) => {
            assert!(beta.is_positive(), "inverse temperature must be positive");
            let (lo, hi) = exp_enclosure(&(beta * BigRational::from_integer(BigInt::from(2))), bits);
            // exp(-2β) = 1/exp(2β); invert and round outward
            (round_down(&hi.recip(), bits), round_up(&lo.recip(), bits))
        }
    }
}

/// Rigorous enclosure of the Peierls partial sum
/// `Σ_{n<=n_max} w(n) · counts[n]`. Sizes absent from the report contribute
/// nothing; any size of infinite multiplicity is an error, since a
/// size-dependent weight cannot damp infinitely many equal summands.
pub fn peierls_partial_sum(
    counts: &CountReport,
    weight: &WeightSpec,
    n_max: usize,
    precision_bits: u32,
) -> Result<Enclosure> {
    assert!(n_max >= 1 && precision_bits >= 64);
    let (lam_lo, lam_hi) = activity_interval(weight, precision_bits);
    let mut lower = BigRational::zero();
    let mut upper = BigRational::zero();
    let mut pow_lo = BigRational::one();
    let mut pow_hi = BigRational::one();
    for n in 1..=n_max {
        pow_lo *= &lam_lo;
        pow_hi *= &lam_hi;
        match counts.counts.get(&n) {
            None => {}
            Some(Count::Infinite) => return Err(Error::InfiniteMultiplicity { n }),
            Some(Count::Finite(c)) => {
                let c = BigRational::from_integer(c.clone());
                lower += &c * &pow_lo;
                upper += c * &pow_hi;
            }
        }
    }
    Ok(Enclosure { lower, upper })
}

/// Per-step geometric growth estimate of the counts: the ratio of the last
/// two nonzero entries, normalized by the gap between them. Needs at least
/// ten nonzero finite entries.
pub fn estimate_growth_rate(counts: &CountReport, n_max: usize) -> Result<f64> {
    let nonzero: Vec<(usize, &BigInt)> = counts
        .counts
        .iter()
        .take_while(|(&n, _)| n <= n_max)
        .filter_map(|(&n, c)| match c {
            Count::Finite(v) if !v.is_zero() => Some((n, v)),
            _ => None,
        })
        .collect();
    if nonzero.len() < 10 {
        return Err(Error::InsufficientData { needed: 10, found: nonzero.len() });
    }
    let (m, a_m) = nonzero[nonzero.len() - 2];
    let (n, a_n) = nonzero[nonzero.len() - 1];
    let step = (n - m) as f64;
    Ok(ratio_to_f64(a_n, a_m).powf(1.0 / step))
}

/// `num/den` as f64 for positive big integers far beyond f64 range, by
/// discarding equal numbers of low bits from both.
fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    let bits = num.bits().max(den.bits());
    let shift = bits.saturating_sub(64);
    let n = num_traits::ToPrimitive::to_f64(&(num >> shift)).expect("<= 64 bits");
    let d = num_traits::ToPrimitive::to_f64(&(den >> shift)).expect("<= 64 bits");
    n / d
}

/// A certified lower bound on the radius of convergence of `Σ a_n λ^n` for
/// the `d`-ary counts: `λ* = (e·d)^{-1/(d-1)}` rounded down, so the series
/// converges for every activity below the returned value.
pub fn critical_activity_bound(d: usize, precision_bits: u32) -> BigRational {
    assert!(d >= 2 && precision_bits >= 8);
    let m = (d - 1) as u32;
    let u = e_upper_bound(precision_bits) * BigRational::from_integer(BigInt::from(d));
    // smallest dyadic t/2^p with (t/2^p)^m >= u, hence 2^p/t <= (ed)^{-1/m}
    let p = precision_bits;
    let scaled = u * BigRational::from_integer(BigInt::one() << (p * m));
    let target = scaled.ceil().to_integer();
    let mut t = nth_root(&target, m);
    if num_traits::pow(t.clone(), m as usize) < target {
        t += 1;
    }
    BigRational::new(BigInt::one() << p, t)
}

/// Floor of the `m`-th root of a nonnegative integer, by bisection.
fn nth_root(v: &BigInt, m: u32) -> BigInt {
    assert!(!v.is_negative() && m >= 1);
    let mut lo = BigInt::zero();
    // 2^(ceil(bits/m)) is an upper bound on the root
    let mut hi = BigInt::one() << (v.bits().div_ceil(u64::from(m)) + 1);
    while &lo + 1u32 < hi {
        let mid: BigInt = (&lo + &hi) >> 1;
        if num_traits::pow(mid.clone(), m as usize) <= *v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
