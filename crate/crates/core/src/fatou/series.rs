//! Truncated power series in one complex variable.

use crate::dynamics::{ComplexParam, C64};

pub(crate) fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (i, &x) in a.iter().enumerate() {
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        for (j, &y) in b.iter().take(n - i).enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub(crate) fn powu(a: &[C64], e: u32) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len()];
    out[0] = C64::new(1.0, 0.0);
    for _ in 0..e {
        out = mul(&out, a);
    }
    out
}

/// Applies `P_c(w) = (w^d + conj c)^d + c` to a series.
pub(crate) fn apply_second_iterate(param: &ComplexParam, s: &[C64]) -> Vec<C64> {
    let mut u = powu(s, param.d);
    u[0] += param.c.conj();
    let mut p = powu(&u, param.d);
    p[0] += param.c;
    p
}

/// Taylor coefficients of `P_c^k` about `z0`, up to `h^order`.
pub(crate) fn jet(param: &ComplexParam, k: usize, z0: C64, order: usize) -> Vec<C64> {
    let mut s = vec![C64::new(0.0, 0.0); order + 1];
    s[0] = z0;
    if order >= 1 {
        s[1] = C64::new(1.0, 0.0);
    }
    for _ in 0..k {
        s = apply_second_iterate(param, &s);
    }
    s
}

pub(crate) fn eval(s: &[C64], h: C64) -> C64 {
    s.iter().rev().fold(C64::new(0.0, 0.0), |acc, &x| acc * h + x)
}
