//! Exact evaluation of the corner amplitudes through Chebyshev polynomials.
//!
//! Since `cos(t·arccos x) = T_t(x)` and `x = 1 − 2m/n` is rational, `α_t` and
//! `γ_t` are rational numbers. Evaluated over [`BigRational`] they serve as a
//! ground-truth oracle for the floating-point engine; evaluated over `f64`
//! they give an independent floating-point route (three-term recurrence
//! instead of trigonometric phases).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num};

/// `2^-n Σ_m C(n,m) s^m T_t(1 − 2m/n)` for `t = 0..=horizon`.
fn chebyshev_series<F>(n: usize, horizon: usize, alternating: bool) -> Vec<F>
where
    F: Clone + Num + FromPrimitive,
{
    let from = |x: i64| F::from_i64(x).expect("small integer representable");
    let nf = from(n as i64);
    let mut out = vec![F::zero(); horizon + 1];
    let mut binom = F::one();
    for m in 0..=n {
        if m > 0 {
            binom = binom * from((n - m + 1) as i64) / from(m as i64);
        }
        let coeff = if alternating && m % 2 == 1 {
            F::zero() - binom.clone()
        } else {
            binom.clone()
        };
        let x = from(n as i64 - 2 * m as i64) / nf.clone();
        let two_x = from(2) * x.clone();
        let mut prev = F::one();
        let mut cur = x;
        for (t, slot) in out.iter_mut().enumerate() {
            let value = match t {
                0 => F::one(),
                1 => cur.clone(),
                _ => {
                    let next = two_x.clone() * cur.clone() - prev.clone();
                    prev = cur;
                    cur = next;
                    cur.clone()
                }
            };
            *slot = slot.clone() + coeff.clone() * value;
        }
    }
    let mut pow2 = F::one();
    for _ in 0..n {
        pow2 = pow2 * from(2);
    }
    out.into_iter().map(|v| v / pow2.clone()).collect()
}

/// `α_0..=α_horizon` over the field `F`.
pub fn chebyshev_alpha_series<F>(n: usize, horizon: usize) -> Vec<F>
where
    F: Clone + Num + FromPrimitive,
{
    chebyshev_series(n, horizon, true)
}

/// `γ_0..=γ_horizon` over the field `F`.
pub fn chebyshev_gamma_series<F>(n: usize, horizon: usize) -> Vec<F>
where
    F: Clone + Num + FromPrimitive,
{
    chebyshev_series(n, horizon, false)
}

/// Exact `α_0..=α_horizon`.
pub fn alpha_exact(n: usize, horizon: usize) -> Vec<BigRational> {
    chebyshev_alpha_series(n, horizon)
}

/// Exact `γ_0..=γ_horizon`.
pub fn gamma_exact(n: usize, horizon: usize) -> Vec<BigRational> {
    chebyshev_gamma_series(n, horizon)
}

/// Exact `h(0)` for the simple walk from a corner to its opposite: the sum of
/// the expected times `E_w` to climb from weight `w` to `w + 1`, where
/// `E_w = (n + w·E_{w−1}) / (n − w)`.
pub fn corner_hitting_exact(n: usize) -> BigRational {
    let mut e = BigRational::from_integer(BigInt::from(0));
    let mut total = BigRational::from_integer(BigInt::from(0));
    let nb = BigInt::from(n);
    for w in 0..n {
        let wb = BigInt::from(w);
        e = (BigRational::from_integer(nb.clone()) + BigRational::from_integer(wb.clone()) * e)
            / BigRational::from_integer(nb.clone() - wb);
        total += e.clone();
    }
    total
}
