//! The Artin–Hasse exponential
//!
//! ```text
//! E_p(x) = exp(x + x^p/p + x^{p^2}/p^2 + ...)
//!        = prod_{(n,p)=1} (1 - x^n)^{-mu(n)/n}
//! ```
//!
//! built both ways as exact truncated series. The product is infinite; the
//! factor for `n` is `1 + O(x^n)`, so factors with `n > N` leave every
//! coefficient up to `x^N` unchanged and the finite product over `n <= N` is
//! exact to order `N`. With `p = 1` no `n` is excluded and the product is
//! `exp(x)`; 1 is accepted there as a sentinel, not as a prime.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::powser::TruncSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AhForm {
    ExpSum,
    Product,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArtinHasseSeries {
    pub p: u64,
    pub order: usize,
    pub series: TruncSeries,
    pub form: AhForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralityReport {
    pub p: u64,
    pub order: usize,
    pub passed: bool,
    /// Index of the first coefficient whose denominator is divisible by `p`.
    pub first_failure: Option<usize>,
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    Ok(())
}

/// `sum_{p^i <= N} x^{p^i} / p^i`.
pub fn p_power_sum(p: u64, order: usize) -> TruncSeries {
    let mut c = vec![Rational::zero(); order + 1];
    let mut q = 1u64;
    while (q as usize) <= order {
        c[q as usize] = Rational::new(BigInt::from(1), BigInt::from(q));
        match q.checked_mul(p) {
            Some(next) => q = next,
            None => break,
        }
    }
    TruncSeries::new(c)
}

/// `E_p` from the exponential of the p-power sum.
pub fn ah_exp_form(p: u64, order: usize) -> Result<ArtinHasseSeries> {
    if !exact::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    check_order(order)?;
    let series = p_power_sum(p, order).exp()?;
    Ok(ArtinHasseSeries {
        p,
        order,
        series,
        form: AhForm::ExpSum,
    })
}

/// `E_p` from the Möbius product over `n <= N` coprime to `p` (`p = 1`
/// takes every `n`).
pub fn ah_product_form(p: u64, order: usize) -> Result<ArtinHasseSeries> {
    if p != 1 && !exact::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    check_order(order)?;
    let mut factors = Vec::new();
    for n in 1..=order as u64 {
        if p != 1 && n % p == 0 {
            continue;
        }
        let mu = exact::mobius(n);
        if mu == 0 {
            continue;
        }
        let mut base = vec![Rational::zero(); order + 1];
        base[0] = exact::int(1);
        base[n as usize] = exact::int(-1);
        let alpha = Rational::new(BigInt::from(-mu), BigInt::from(n));
        factors.push(TruncSeries::new(base).pow_rational(&alpha)?);
    }
    Ok(ArtinHasseSeries {
        p,
        order,
        series: product_tree(factors, order),
        form: AhForm::Product,
    })
}

/// Balanced product, so partial products stay comparable in size.
fn product_tree(mut items: Vec<TruncSeries>, order: usize) -> TruncSeries {
    if items.is_empty() {
        return TruncSeries::one(order);
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a.mul(&b),
                None => a,
            });
        }
        items = next;
    }
    items.pop().unwrap()
}

/// Scans denominators for divisibility by `p`.
pub fn check_p_integral(series: &TruncSeries, p: u64) -> IntegralityReport {
    let first_failure = series.coeffs().iter().position(|c| !exact::is_p_integral(c, p));
    IntegralityReport {
        p,
        order: series.order(),
        passed: first_failure.is_none(),
        first_failure,
    }
}

impl ArtinHasseSeries {
    pub fn integrality(&self) -> IntegralityReport {
        check_p_integral(&self.series, self.p)
    }

    /// `1 + x^{p-1} + x^{p^2-1} + ...` to order `N - 1`, the logarithmic
    /// derivative of `E_p`.
    pub fn log_derivative(&self) -> TruncSeries {
        p_power_sum(self.p, self.order).derivative()
    }
}
