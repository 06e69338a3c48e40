//! Exact contour counts for the built-in families and for grammar trees,
//! together with the lower/upper bounds that sandwich them. All results are
//! arbitrary-precision integers or rationals; nothing is ever rounded toward
//! the count.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::series_engine::{
    lagrange_dary_coefficient, solve_dary_fixed_point, solve_grammar_system, IntSeries,
};
use crate::structure_analyzer::{
    classify_size, find_infinite_independent_path, SizeClass,
};
use crate::tree_core::{TreeGrammar, DEFAULT_VERTEX_BUDGET};

/// A per-size count; `Infinite` when the size admits infinitely many
/// contours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Count {
    Finite(BigInt),
    Infinite,
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(v) => write!(f, "{v}"),
            Count::Infinite => write!(f, "infinite"),
        }
    }
}

/// Which tree a report refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Dary(usize),
    Regular(usize),
    Grammar(String),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Dary(d) => write!(f, "dary:{d}"),
            Family::Regular(k) => write!(f, "regular:{k}"),
            Family::Grammar(name) => write!(f, "grammar:{name}"),
        }
    }
}

/// Counts per contour size for one family, up to `order`. Sizes of infinite
/// multiplicity are marked; when any exist, undetermined finite sizes are
/// simply absent from the map.
#[derive(Debug, Clone)]
pub struct CountReport {
    pub family: Family,
    pub rooted: bool,
    pub counts: BTreeMap<usize, Count>,
    pub order: usize,
}

/// Number of contours of size `n` around the root of the rooted `d`-ary
/// tree: `binom(n+k-1, k) / n` with `k = (n-1)/(d-1)` when `d-1` divides
/// `n-1` and `n >= 2`, else 0.
pub fn count_dary(d: usize, n: usize) -> BigInt {
    assert!(d >= 2 && n >= 1);
    if n == 1 {
        return BigInt::zero();
    }
    lagrange_dary_coefficient(d, n)
}

/// All of `count_dary(d, 1..=n_max)` in one pass over the series fixed
/// point (index 0 unused and zero).
pub fn count_dary_upto(d: usize, n_max: usize) -> Vec<BigInt> {
    solve_dary_fixed_point(d, n_max).coeffs().to_vec()
}

fn regular_series(degree: usize, n_max: usize) -> IntSeries {
    assert!(degree >= 3);
    let f = solve_dary_fixed_point(degree - 1, n_max);
    // g = X f + f^2
    IntSeries::x(n_max).mul(&f).unwrap().add(&f.mul(&f).unwrap()).unwrap()
}

/// Number of contours of size `n` around a vertex of the `degree`-regular
/// tree: `b_n = a_{n-1} + sum_{k=1}^{n-1} a_k a_{n-k}` with `a` the
/// `(degree-1)`-ary counts and `a_0 = 0`.
pub fn count_regular(degree: usize, n: usize) -> BigInt {
    assert!(degree >= 3 && n >= 1);
    let d = degree - 1;
    let mut b = if n >= 2 { count_dary(d, n - 1) } else { BigInt::zero() };
    for k in 1..n {
        let (x, y) = (count_dary(d, k), count_dary(d, n - k));
        if !x.is_zero() && !y.is_zero() {
            b += x * y;
        }
    }
    b
}

/// All of `count_regular(degree, 1..=n_max)` via the series identity
/// `g = X f + f^2` (index 0 unused and zero).
pub fn count_regular_upto(degree: usize, n_max: usize) -> Vec<BigInt> {
    regular_series(degree, n_max).coeffs().to_vec()
}

/// Number of size-`n` contours around the root of the `d`-ary tree that
/// contain an edge incident with the root: the coefficient of `f - f^d`.
/// Zero whenever `n < d`.
pub fn count_rooted_dary(d: usize, n: usize) -> BigInt {
    count_rooted_dary_upto(d, n).swap_remove(n)
}

/// All of `count_rooted_dary(d, 1..=n_max)` (index 0 unused and zero).
pub fn count_rooted_dary_upto(d: usize, n_max: usize) -> Vec<BigInt> {
    let f = solve_dary_fixed_point(d, n_max);
    let out = f.sub(&f.pow(d as u32)).unwrap();
    for n in 1..d.min(n_max + 1) {
        assert!(out.coeff(n).is_zero(), "rooted d-ary count must vanish below n = d");
    }
    out.coeffs().to_vec()
}

/// Number of size-`n` contours around a vertex of the `degree`-regular tree
/// that contain an edge incident with that vertex: the coefficient of
/// `g - f^(d+1)` with `d = degree - 1`. Zero whenever `n < degree`.
pub fn count_rooted_regular(degree: usize, n: usize) -> BigInt {
    count_rooted_regular_upto(degree, n).swap_remove(n)
}

/// All of `count_rooted_regular(degree, 1..=n_max)` (index 0 unused and
/// zero).
pub fn count_rooted_regular_upto(degree: usize, n_max: usize) -> Vec<BigInt> {
    let d = degree - 1;
    let f = solve_dary_fixed_point(d, n_max);
    let out = regular_series(degree, n_max).sub(&f.pow((d + 1) as u32)).unwrap();
    for n in 1..degree.min(n_max + 1) {
        assert!(out.coeff(n).is_zero(), "rooted regular count must vanish below n = degree");
    }
    out.coeffs().to_vec()
}

/// Rational upper enclosure of Euler's number: a Taylor partial sum plus the
/// tail bound `2/(N+1)!`, with `N` chosen so the excess is below
/// `2^-precision_bits`.
pub(crate) fn e_upper_bound(precision_bits: u32) -> BigRational {
    let mut terms = 1usize;
    let mut fact = BigInt::one();
    loop {
        // need 2/(terms+1)! < 2^-precision_bits, i.e. (terms+1)! > 2^(bits+1)
        let next = &fact * BigInt::from(terms + 1);
        if next > BigInt::one() << (precision_bits + 1) {
            break;
        }
        fact = next;
        terms += 1;
    }
    let mut sum = BigRational::zero();
    let mut f = BigInt::one();
    for i in 0..=terms {
        if i > 0 {
            f *= BigInt::from(i);
        }
        sum += BigRational::new(BigInt::one(), f.clone());
    }
    sum + BigRational::new(BigInt::from(2), &f * BigInt::from(terms + 1))
}

/// The sandwich `d^k/n <= a_n <= (ed)^k/n` with `k = (n-1)/(d-1)`. The lower
/// bound is exact; the upper bound replaces `e` by a rational upper
/// enclosure accurate to at least 64 fractional bits, so it is never
/// understated.
pub fn bounds_dary(d: usize, n: usize) -> Result<(BigRational, BigRational)> {
    assert!(d >= 2);
    if n < 2 || (n - 1) % (d - 1) != 0 {
        return Err(crate::Error::Precondition(format!(
            "bounds_dary requires n >= 2 with n = 1 mod {}, got n = {n}",
            d - 1
        )));
    }
    let k = (n - 1) / (d - 1);
    let dn = BigRational::from(BigInt::from(d));
    let inv_n = BigRational::new(BigInt::one(), BigInt::from(n));
    let lower = pow_rational(&dn, k) * &inv_n;
    let upper = pow_rational(&(e_upper_bound(64) * dn), k) * inv_n;
    Ok((lower, upper))
}

fn pow_rational(base: &BigRational, exp: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// The binomial upper bound `binom(n + floor((n-r)/(r-1)), floor(...))` on
/// the number of size-`n` contours in any tree whose vertices all have at
/// least `r` children. For `n < r` the floor argument is clamped to 0 and
/// the bound is 1 (no contour that small exists anyway).
pub fn bound_bollobas(r: usize, n: usize) -> BigInt {
    assert!(r >= 2 && n >= 1);
    let k = if n < r { 0 } else { (n - r) / (r - 1) };
    binomial(BigInt::from(n + k), BigInt::from(k))
}

/// Counts for the `d`-ary family packaged as a report.
pub fn dary_report(d: usize, n_max: usize, rooted: bool) -> CountReport {
    let all = if rooted { count_rooted_dary_upto(d, n_max) } else { count_dary_upto(d, n_max) };
    CountReport {
        family: Family::Dary(d),
        rooted,
        counts: all.into_iter().enumerate().skip(1).map(|(n, v)| (n, Count::Finite(v))).collect(),
        order: n_max,
    }
}

/// Counts for the regular family packaged as a report.
pub fn regular_report(degree: usize, n_max: usize, rooted: bool) -> CountReport {
    let all = if rooted {
        count_rooted_regular_upto(degree, n_max)
    } else {
        count_regular_upto(degree, n_max)
    };
    CountReport {
        family: Family::Regular(degree),
        rooted,
        counts: all.into_iter().enumerate().skip(1).map(|(n, v)| (n, Count::Finite(v))).collect(),
        order: n_max,
    }
}

/// Per-size counts for a grammar tree. When the tree has an infinite
/// independent path, each size up to `n_max` is classified individually and
/// only the infinite ones are reported; otherwise all counts come from the
/// generating-series system.
pub fn count_grammar(grammar: &TreeGrammar, n_max: usize) -> Result<CountReport> {
    grammar.validate()?;
    assert!(n_max >= 1);
    let mut counts = BTreeMap::new();
    if find_infinite_independent_path(grammar).is_some() {
        for n in 1..=n_max {
            if classify_size(grammar, n, DEFAULT_VERTEX_BUDGET)? == SizeClass::Infinite {
                counts.insert(n, Count::Infinite);
            }
        }
    } else {
        let sol = solve_grammar_system(grammar, n_max)?;
        let f = &sol[grammar.root_class()];
        for n in 1..=n_max {
            counts.insert(n, Count::Finite(f.coeff(n).clone()));
        }
    }
    Ok(CountReport {
        family: Family::Grammar(grammar.root_class().to_string()),
        rooted: false,
        counts,
        order: n_max,
    })
}
