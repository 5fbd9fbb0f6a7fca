//! Special functions: Bessel functions of the first kind of integer order,
//! zeros of `J_0`, and complete elliptic integrals in the parameter
//! convention (`K(m) = ∫ dθ / sqrt(1 - m sin²θ)`).

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Largest |x| for which the power series is used.
const SERIES_LIMIT: f64 = 12.0;

/// Bessel function `J_n(x)` for integer order `n` and real `x`.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    if n < 0 {
        let v = bessel_j(-n, x);
        return if n % 2 == 0 { v } else { -v };
    }
    if x < 0.0 {
        let v = bessel_j(n, -x);
        return if n % 2 == 0 { v } else { -v };
    }
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        series(n as u32, x)
    } else {
        miller(n as u32, x)
    }
}

fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    // Leading term (x/2)^n / n!, built by products to stay finite for large n.
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let mut sum = term;
    let mut k = 1u32;
    loop {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k as f64 > half {
            break;
        }
        k += 1;
        if k > 500 {
            break;
        }
    }
    sum
}

fn miller(n: u32, x: f64) -> f64 {
    let big = n.max(x as u32) as f64;
    let mut start = (big + 30.0 + (60.0 * big).sqrt()) as u32;
    start += start % 2;
    let mut next = 0.0; // j_{k+1}
    let mut cur = 1e-30; // j_k
    let mut sum = 0.0;
    let mut wanted = 0.0;
    let mut k = start;
    while k > 0 {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if k.is_multiple_of(2) && k > 0 {
            sum += 2.0 * cur;
        }
        if k == n {
            wanted = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            sum *= 1e-250;
            wanted *= 1e-250;
        }
    }
    sum += cur;
    wanted / sum
}

/// The `s`-th positive zero of `J_0` (`s >= 1`), by a McMahon estimate refined
/// with Newton's method.
pub fn bessel_j0_zero(s: usize) -> Result<f64> {
    if s == 0 {
        return Err(Error::Domain {
            function: "bessel_j0_zero",
            detail: "zero index must be at least 1".into(),
        });
    }
    let beta = (s as f64 - 0.25) * PI;
    let e = 8.0 * beta;
    let mut z = beta + 1.0 / e - 124.0 / (3.0 * e.powi(3)) + 120928.0 / (15.0 * e.powi(5));
    for _ in 0..50 {
        let step = bessel_j(0, z) / bessel_j(1, z);
        z += step;
        if step.abs() <= 4.0 * f64::EPSILON * z {
            break;
        }
    }
    Ok(z)
}

/// Arithmetic-geometric mean iteration returning `(agm, Σ 2^(k-1) c_k²)` where
/// the sum starts from `c_0² = c0_sq`.
fn agm(b0: f64, c0_sq: f64) -> (f64, f64) {
    let mut a = 1.0;
    let mut b = b0;
    let mut sum = 0.5 * c0_sq;
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        if c.abs() <= 1e-15 * a {
            break;
        }
        pow *= 2.0;
        sum += pow * c * c;
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    (a, sum)
}

fn check_parameter(function: &'static str, m: f64) -> Result<()> {
    if !m.is_finite() || m >= 1.0 {
        return Err(Error::Domain {
            function,
            detail: format!("parameter m = {m} must satisfy m < 1"),
        });
    }
    Ok(())
}

/// Complete elliptic integral of the first kind `K(m)` for `m < 1`.
pub fn elliptic_k(m: f64) -> Result<f64> {
    check_parameter("elliptic_k", m)?;
    if m < 0.0 {
        let mm = -m;
        return Ok(elliptic_k(mm / (1.0 + mm))? / (1.0 + mm).sqrt());
    }
    let (a, _) = agm((1.0 - m).sqrt(), m);
    Ok(FRAC_PI_2 / a)
}

/// Complete elliptic integral of the second kind `E(m)` for `m <= 1`.
pub fn elliptic_e(m: f64) -> Result<f64> {
    if m == 1.0 {
        return Ok(1.0);
    }
    check_parameter("elliptic_e", m)?;
    if m < 0.0 {
        let mm = -m;
        return Ok(elliptic_e(mm / (1.0 + mm))? * (1.0 + mm).sqrt());
    }
    let (a, sum) = agm((1.0 - m).sqrt(), m);
    Ok(FRAC_PI_2 / a * (1.0 - sum))
}
