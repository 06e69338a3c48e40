//! Truncated formal power series with exact arbitrary-precision integer
//! coefficients, fixed-point solving of the counting equations, and the
//! Lagrange-inversion closed form.
//!
//! Everything here is exact: no floating point, no implicit resizing.
//! Binary operations require equal truncation orders.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::tree_core::TreeGrammar;

/// A formal power series truncated at an explicit order `N`: index `k` holds
/// the exact integer coefficient of `X^k`, and `coeffs.len() == N + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSeries {
    coeffs: Vec<BigInt>,
}

impl IntSeries {
    pub fn zero(order: usize) -> IntSeries {
        IntSeries { coeffs: vec![BigInt::zero(); order + 1] }
    }

    /// The series `X` at the given order.
    pub fn x(order: usize) -> IntSeries {
        let mut s = IntSeries::zero(order);
        if order >= 1 {
            s.coeffs[1] = BigInt::one();
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> IntSeries {
        assert!(!coeffs.is_empty(), "a series carries at least the constant term");
        IntSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The coefficient-extraction operator `[X^n]`.
    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn check_order(&self, other: &IntSeries) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    pub fn add(&self, other: &IntSeries) -> Result<IntSeries> {
        self.check_order(other)?;
        Ok(IntSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &IntSeries) -> Result<IntSeries> {
        self.check_order(other)?;
        Ok(IntSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    /// Convolution truncated at the common order.
    pub fn mul(&self, other: &IntSeries) -> Result<IntSeries> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![BigInt::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(IntSeries { coeffs: out })
    }

    /// Power by repeated squaring over the truncated product.
    pub fn pow(&self, e: u32) -> IntSeries {
        assert!(e >= 1, "series_pow requires a positive exponent");
        let mut base = self.clone();
        let mut acc: Option<IntSeries> = None;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base).expect("equal orders"),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("equal orders");
            }
        }
        acc.expect("e >= 1")
    }
}

/// Solves `f = (X + f)^d` for the unique series with zero constant term, up
/// to the given order, working coefficient by coefficient: with
/// `h = X + f`, the equation reads `h = X + h^d`, and `[X^n] h^d` only
/// involves coefficients of `h` below `n`.
pub fn solve_dary_fixed_point(d: usize, order: usize) -> IntSeries {
    assert!(d >= 2, "d-ary fixed point requires d >= 2");
    assert!(order >= 1);
    let n = order;
    // h[k] for k <= n, plus running power tables pows[j] = h^(j+2).
    let mut h = vec![BigInt::zero(); n + 1];
    h[1] = BigInt::one();
    let mut pows: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n + 1]; d - 1];
    for m in 2..=n {
        // pows[0][m] = [X^m] h^2, pows[j][m] = [X^m] h * h^(j+1)
        for j in 0..d - 1 {
            let mut acc = BigInt::zero();
            for i in 1..m {
                let other = if j == 0 { &h[m - i] } else { &pows[j - 1][m - i] };
                if !h[i].is_zero() && !other.is_zero() {
                    acc += &h[i] * other;
                }
            }
            pows[j][m] = acc;
        }
        h[m] = pows[d - 2][m].clone();
    }
    h[1] = BigInt::zero(); // f = h - X
    IntSeries::from_coeffs(h)
}

/// `[X^n] h` where `h = X + f` solves `h = X + h^d`, by Lagrange inversion
/// with `phi(X) = (1 - X^{d-1})^{-1}`: equals `binom(n+k-1, k) / n` with
/// `k = (n-1)/(d-1)` when `d-1` divides `n-1`, and 0 otherwise. The division
/// is always exact and is asserted, never rounded.
pub fn lagrange_dary_coefficient(d: usize, n: usize) -> BigInt {
    assert!(d >= 2 && n >= 1);
    if n == 1 {
        return BigInt::one();
    }
    if (n - 1) % (d - 1) != 0 {
        return BigInt::zero();
    }
    let k = (n - 1) / (d - 1);
    let b = binomial(BigInt::from(n + k - 1), BigInt::from(k));
    let (q, r) = num_integer::Integer::div_rem(&b, &BigInt::from(n));
    assert!(r.is_zero(), "binom(n+k-1, k) must be divisible by n");
    q
}

/// Solves the per-class system `f_t = prod_{c in children(t)} (X + f_c)` for
/// the unique tuple of series with zero constant terms.
///
/// Coefficients are computed order by order (all classes' coefficient `n`
/// before any coefficient `n+1`). Classes with a single child are evaluated
/// in topological order within each sweep; a cycle of one-child classes means
/// the generated tree has an infinite independent path and the coefficients
/// are not finite.
pub fn solve_grammar_system(
    grammar: &TreeGrammar,
    order: usize,
) -> Result<BTreeMap<String, IntSeries>> {
    grammar.validate()?;
    assert!(order >= 1);
    let classes: Vec<String> = grammar.class_names().map(String::from).collect();
    let index: BTreeMap<&str, usize> =
        classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let kids: Vec<Vec<usize>> = classes
        .iter()
        .map(|c| grammar.children_of(c).iter().map(|k| index[k.as_str()]).collect())
        .collect();

    // Topological order over one-child classes; a cycle among them is an
    // infinite independent path.
    let single: Vec<usize> = (0..classes.len()).filter(|&i| kids[i].len() == 1).collect();
    let mut chain_order = Vec::new();
    {
        let mut state = vec![0u8; classes.len()]; // 0 unvisited, 1 on stack, 2 done
        fn visit(
            i: usize,
            kids: &[Vec<usize>],
            state: &mut [u8],
            out: &mut Vec<usize>,
            classes: &[String],
        ) -> Result<()> {
            if state[i] == 2 {
                return Ok(());
            }
            if state[i] == 1 {
                let cycle: Vec<String> = classes
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| state[*j] == 1 && kids[*j].len() == 1)
                    .map(|(_, c)| c.clone())
                    .collect();
                return Err(Error::InfiniteCoefficients(cycle));
            }
            state[i] = 1;
            if kids[i].len() == 1 {
                visit(kids[i][0], kids, state, out, classes)?;
                out.push(i);
            }
            state[i] = 2;
            Ok(())
        }
        for &i in &single {
            visit(i, &kids, &mut state, &mut chain_order, &classes)?;
        }
    }

    let n = order;
    let zero = BigInt::zero();
    // f[i][k] plus, for multi-child classes, running prefix products
    // prefix[i][j] = (X+f_{c1})...(X+f_{c(j+2)}).
    let mut f = vec![vec![BigInt::zero(); n + 1]; classes.len()];
    let mut prefix: Vec<Vec<Vec<BigInt>>> = kids
        .iter()
        .map(|ks| {
            if ks.len() >= 2 {
                vec![vec![BigInt::zero(); n + 1]; ks.len() - 1]
            } else {
                Vec::new()
            }
        })
        .collect();
    // g_c[k] = [X^k](X + f_c)
    let g = |f: &Vec<Vec<BigInt>>, c: usize, k: usize| -> BigInt {
        if k == 1 {
            &f[c][1] + 1
        } else {
            f[c][k].clone()
        }
    };
    for m in 1..=n {
        // Multi-child classes: coefficient m depends only on strictly
        // smaller coefficients of every factor.
        for i in 0..classes.len() {
            if kids[i].len() < 2 {
                continue;
            }
            let ks = &kids[i];
            for j in 0..ks.len() - 1 {
                let mut acc = BigInt::zero();
                for t in 1..m {
                    let left = if j == 0 { g(&f, ks[0], t) } else { prefix[i][j - 1][t].clone() };
                    if left.is_zero() {
                        continue;
                    }
                    let right = g(&f, ks[j + 1], m - t);
                    if !right.is_zero() {
                        acc += left * right;
                    }
                }
                prefix[i][j][m] = acc;
            }
            f[i][m] = prefix[i][ks.len() - 2][m].clone();
        }
        // One-child classes in topological order: f_t = X + f_c.
        for &i in &chain_order {
            let c = kids[i][0];
            f[i][m] = f[c][m].clone() + if m == 1 { BigInt::one() } else { zero.clone() };
        }
    }
    Ok(classes
        .into_iter()
        .zip(f)
        .map(|(name, coeffs)| (name, IntSeries::from_coeffs(coeffs)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap as Map;

    fn series(v: &[i64]) -> IntSeries {
        IntSeries::from_coeffs(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn binomial_square() {
        let one_plus_x = series(&[1, 1, 0]);
        assert_eq!(one_plus_x.mul(&one_plus_x).unwrap(), series(&[1, 2, 1]));
    }

    #[test]
    fn truncation_drops_high_coefficients() {
        let x = IntSeries::x(1);
        assert_eq!(x.mul(&x).unwrap(), IntSeries::zero(1));
    }

    #[test]
    fn pow_cube_of_x_plus_x_squared() {
        let s = series(&[0, 1, 1, 0, 0, 0, 0]);
        assert_eq!(s.pow(3), series(&[0, 0, 0, 1, 3, 3, 1]));
    }

    #[test]
    fn mismatched_orders_rejected() {
        let a = IntSeries::zero(3);
        let b = IntSeries::zero(4);
        assert!(matches!(a.add(&b), Err(Error::OrderMismatch(3, 4))));
        assert!(matches!(a.mul(&b), Err(Error::OrderMismatch(3, 4))));
    }

    #[test]
    fn binary_fixed_point_coefficients() {
        let f = solve_dary_fixed_point(2, 5);
        let got: Vec<i64> = f.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect();
        assert_eq!(got, vec![0, 0, 1, 2, 5, 14]);
    }

    #[test]
    fn ternary_fixed_point_coefficients() {
        let f = solve_dary_fixed_point(3, 5);
        let got: Vec<i64> = f.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect();
        assert_eq!(got, vec![0, 0, 0, 1, 0, 3]);
    }

    #[test]
    fn fixed_point_linear_coefficient_vanishes() {
        for d in 2..=6 {
            assert!(solve_dary_fixed_point(d, 8).coeff(1).is_zero());
        }
    }

    #[test]
    fn fixed_point_satisfies_equation() {
        // h = X + h^d to the truncation order
        for d in 2..=4u32 {
            let order = 20;
            let f = solve_dary_fixed_point(d as usize, order);
            let h = IntSeries::x(order).add(&f).unwrap();
            let rhs = IntSeries::x(order).add(&h.pow(d)).unwrap();
            assert_eq!(h, rhs, "d = {d}");
        }
    }

    #[test]
    fn lagrange_examples() {
        assert_eq!(lagrange_dary_coefficient(2, 1), BigInt::one());
        assert_eq!(lagrange_dary_coefficient(2, 5), BigInt::from(14));
        assert_eq!(lagrange_dary_coefficient(3, 4), BigInt::zero());
    }

    #[test]
    fn lagrange_matches_fixed_point() {
        for d in 2..=6 {
            let f = solve_dary_fixed_point(d, 60);
            for n in 2..=60 {
                assert_eq!(
                    lagrange_dary_coefficient(d, n),
                    f.coeff(n).clone(),
                    "d = {d}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn grammar_system_matches_dary_solver() {
        let g = TreeGrammar::dary(2);
        let sol = solve_grammar_system(&g, 5).unwrap();
        assert_eq!(sol["A"], solve_dary_fixed_point(2, 5));
    }

    #[test]
    fn grammar_system_root_over_binary_subtrees() {
        let mut classes = Map::new();
        classes.insert("R".into(), vec!["A".into(); 3]);
        classes.insert("A".into(), vec!["A".into(); 2]);
        let g = TreeGrammar::new("R", classes).unwrap();
        let sol = solve_grammar_system(&g, 4).unwrap();
        let got: Vec<i64> = sol["R"].coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect();
        assert_eq!(got, vec![0, 0, 0, 1, 3]);
    }

    #[test]
    fn grammar_system_rejects_one_child_cycle() {
        let mut classes = Map::new();
        classes.insert("R".into(), vec!["P".into(), "P".into()]);
        classes.insert("P".into(), vec!["P".into()]);
        let g = TreeGrammar::new("R", classes).unwrap();
        match solve_grammar_system(&g, 3) {
            Err(Error::InfiniteCoefficients(cycle)) => assert!(cycle.contains(&"P".to_string())),
            other => panic!("expected InfiniteCoefficients, got {other:?}"),
        }
    }

    #[test]
    fn grammar_system_handles_acyclic_one_child_chain() {
        // Root with a single edge into a binary tree: f_R = X + f_A.
        let mut classes = Map::new();
        classes.insert("R".into(), vec!["A".into()]);
        classes.insert("A".into(), vec!["A".into(); 2]);
        let g = TreeGrammar::new("R", classes).unwrap();
        let sol = solve_grammar_system(&g, 4).unwrap();
        let got: Vec<i64> = sol["R"].coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect();
        assert_eq!(got, vec![0, 1, 1, 2, 5]);
    }

    #[test]
    fn distributivity_exact() {
        let a = series(&[1, 2, 3, 4]);
        let b = series(&[0, 1, 1, 0]);
        let c = series(&[5, 0, 2, 1]);
        let left = a.add(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap();
        assert_eq!(left, right);
    }
}
