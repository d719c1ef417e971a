//! Bessel functions of the first kind J_m and their positive zeros.
//!
//! Evaluation strategy: the ascending power series for x < 12, and Miller's
//! backward recurrence with the J_0 + 2 J_2 + 2 J_4 + ... = 1 normalization
//! for x >= 12. The series is only used where it is cancellation-safe; near
//! and above the turning point x ~ m the leading terms of the series exceed
//! the result by e^{O(m)}, so large orders at large arguments must go
//! through the recurrence, which is uniformly accurate there.
//!
//! Zeros come from Newton iteration seeded with the McMahon expansion
//! (moderate order or large index) or the large-order Airy-based expansion
//! (m large, n small), where McMahon diverges.

use std::f64::consts::PI;

use super::SpectralError;

/// Largest order accepted by the checked entry points.
pub const MAX_ORDER: u32 = 60;
/// Largest argument accepted by the checked entry points.
pub const MAX_ARGUMENT: f64 = 500.0;
/// Largest zero index accepted by the checked entry points.
pub const MAX_ZERO_INDEX: u32 = 200;

const SERIES_CUTOFF: f64 = 12.0;

/// J_m(x) for 0 <= m <= 60, 0 <= x <= 500. Absolute error <= ~1e-12.
pub fn bessel_j(m: u32, x: f64) -> Result<f64, SpectralError> {
    check_range(m, x)?;
    Ok(bessel_j_raw(m, x))
}

/// d/dx J_m(x) via J_m' = (J_{m-1} - J_{m+1}) / 2, with J_{-1} = -J_1.
pub fn bessel_j_prime(m: u32, x: f64) -> Result<f64, SpectralError> {
    check_range(m, x)?;
    let w = j_window(m + 1, x);
    Ok(prime_from_window(&w, m))
}

fn check_range(m: u32, x: f64) -> Result<(), SpectralError> {
    if m > MAX_ORDER || !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(SpectralError::OutOfValidatedRange {
            what: format!("bessel_j(m = {m}, x = {x})"),
        });
    }
    Ok(())
}

pub(crate) fn prime_from_window(w: &[f64], m: u32) -> f64 {
    if m == 0 {
        -w[1]
    } else {
        0.5 * (w[(m - 1) as usize] - w[(m + 1) as usize])
    }
}

/// Unchecked evaluation; callers guarantee sane arguments.
pub(crate) fn bessel_j_raw(m: u32, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < SERIES_CUTOFF {
        series(m, x)
    } else {
        miller_window(m, x)[m as usize]
    }
}

/// J_0(x)..J_{m_max}(x) in one pass.
pub(crate) fn j_window(m_max: u32, x: f64) -> Vec<f64> {
    if x < SERIES_CUTOFF {
        (0..=m_max).map(|m| series(m, x)).collect()
    } else {
        miller_window(m_max, x)
    }
}

fn series(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    // leading term (x/2)^m / m!
    let mut term = 1.0;
    for k in 1..=m {
        term *= half / k as f64;
    }
    let z2 = half * half;
    let mut sum = term;
    for j in 1..=72u32 {
        term *= -z2 / (j as f64 * (j + m) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-280) && j as f64 > half {
            break;
        }
    }
    sum
}

fn miller_window(m_max: u32, x: f64) -> Vec<f64> {
    // start high enough that the downward recurrence has forgotten the
    // arbitrary seed by the time it reaches the orders we keep
    let mut n_start = (x + 16.0 * x.cbrt() + 24.0).ceil() as usize;
    n_start = n_start.max(m_max as usize + 16);
    if n_start % 2 == 1 {
        n_start += 1;
    }
    let mut vals = vec![0.0; n_start + 1];
    let mut jp = 0.0_f64; // J_{n+1}
    let mut jc = 1e-30_f64; // J_n
    vals[n_start] = jc;
    let mut n = n_start;
    while n > 0 {
        let jm = (2.0 * n as f64 / x) * jc - jp;
        jp = jc;
        jc = jm;
        n -= 1;
        vals[n] = jc;
        if jc.abs() > 1e250 {
            let scale = 1e-250;
            jp *= scale;
            jc *= scale;
            for v in vals[n..].iter_mut() {
                *v *= scale;
            }
        }
    }
    let mut norm = vals[0];
    let mut k = 2;
    while k <= n_start {
        norm += 2.0 * vals[k];
        k += 2;
    }
    let inv = 1.0 / norm;
    vals.truncate(m_max as usize + 1);
    for v in vals.iter_mut() {
        *v *= inv;
    }
    vals
}

/// n-th positive zero of J_m, to ~1e-12 relative accuracy.
///
/// Validated for m <= 60, 1 <= n <= 200. Non-convergence of the Newton
/// polish is reported, never silently ignored.
pub fn bessel_zero(m: u32, n: u32) -> Result<f64, SpectralError> {
    if m > MAX_ORDER || n == 0 || n > MAX_ZERO_INDEX {
        return Err(SpectralError::OutOfValidatedRange {
            what: format!("bessel_zero(m = {m}, n = {n})"),
        });
    }
    let guess = if m >= 10 && (n as f64) < 0.6 * m as f64 {
        olver_guess(m, n)
    } else {
        mcmahon_guess(m, n)
    };
    newton_polish(m, guess).ok_or(SpectralError::BesselZeroNoConvergence { m, n })
}

fn mcmahon_guess(m: u32, n: u32) -> f64 {
    let mu = 4.0 * (m as f64) * (m as f64);
    let beta = (n as f64 + 0.5 * m as f64 - 0.25) * PI;
    let p = 8.0 * beta;
    let p2 = p * p;
    let mut j = beta - (mu - 1.0) / p;
    j -= 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * p * p2);
    j -= 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * p * p2 * p2);
    j
}

fn olver_guess(m: u32, n: u32) -> f64 {
    let a = airy_zero_abs(n);
    let mf = m as f64;
    let c1 = 2f64.powf(-1.0 / 3.0);
    let c2 = 0.3 * 2f64.powf(-2.0 / 3.0);
    mf + c1 * a * mf.cbrt() + c2 * a * a / mf.cbrt()
}

/// |a_n| for the n-th zero of the Airy function Ai, via the standard
/// asymptotic expansion; accurate to ~1e-3 even at n = 1, which is plenty
/// for a Newton seed.
fn airy_zero_abs(n: u32) -> f64 {
    let t = 3.0 * PI * (4.0 * n as f64 - 1.0) / 8.0;
    let t2 = t * t;
    t.powf(2.0 / 3.0) * (1.0 + 5.0 / (48.0 * t2) - 5.0 / (36.0 * t2 * t2))
}

fn newton_polish(m: u32, guess: f64) -> Option<f64> {
    let mut z = guess.max(0.5);
    let mut small_steps = 0;
    for _ in 0..80 {
        let w = j_window(m + 1, z);
        let val = w[m as usize];
        let der = prime_from_window(&w, m);
        if der == 0.0 {
            return None;
        }
        let mut step = val / der;
        // consecutive zeros are more than 3 apart; a clamped step cannot
        // jump into a neighboring basin
        step = step.clamp(-1.2, 1.2);
        z -= step;
        if step.abs() < 1e-13 * z.max(1.0) {
            small_steps += 1;
            if small_steps >= 2 {
                return Some(z);
            }
        } else {
            small_steps = 0;
        }
    }
    None
}

/// Independent zero finder: scan for sign changes in steps of 1.2 starting
/// just above m, then bisect. Slow but free of asymptotic guesses; used as
/// a cross-check oracle in tests.
pub fn bessel_zero_scan(m: u32, n: u32) -> Result<f64, SpectralError> {
    if m > MAX_ORDER || n == 0 || n > MAX_ZERO_INDEX {
        return Err(SpectralError::OutOfValidatedRange {
            what: format!("bessel_zero_scan(m = {m}, n = {n})"),
        });
    }
    // first zero exceeds m for every order
    let mut a = if m == 0 { 0.5 } else { m as f64 };
    let mut fa = bessel_j_raw(m, a);
    let step = 1.2;
    let mut found = 0;
    for _ in 0..10_000 {
        let b = a + step;
        let fb = bessel_j_raw(m, b);
        if fa == 0.0 {
            found += 1;
            if found == n {
                return Ok(a);
            }
        } else if fa * fb < 0.0 {
            found += 1;
            if found == n {
                let (mut lo, mut hi, mut flo) = (a, b, fa);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fm = bessel_j_raw(m, mid);
                    if flo * fm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                    if hi - lo < 1e-13 * hi.max(1.0) {
                        break;
                    }
                }
                return Ok(0.5 * (lo + hi));
            }
        }
        a = b;
        fa = fb;
    }
    Err(SpectralError::BesselZeroNoConvergence { m, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_argument_reference_values() {
        // 16-digit references
        assert_relative_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_relative_eq!(bessel_j(0, 1.0).unwrap(), 0.7651976865579666, epsilon = 1e-14);
        assert_relative_eq!(bessel_j(1, 1.0).unwrap(), 0.4400505857449335, epsilon = 1e-14);
        assert_relative_eq!(bessel_j(2, 1.0).unwrap(), 0.11490348493190048, epsilon = 1e-14);
        assert_relative_eq!(bessel_j(0, 5.0).unwrap(), -0.17759677131433830, epsilon = 1e-13);
        assert_relative_eq!(bessel_j(5, 10.0).unwrap(), -0.23406152818679364, epsilon = 1e-13);
    }

    #[test]
    fn large_argument_reference_values() {
        assert_relative_eq!(bessel_j(0, 15.0).unwrap(), -0.014224472826780773, epsilon = 1e-12);
        assert_relative_eq!(bessel_j(1, 20.0).unwrap(), 0.066833124175850045, epsilon = 1e-12);
        assert_relative_eq!(bessel_j(10, 25.0).unwrap(), -0.075179843948523284, epsilon = 1e-12);
        // deep turning-point regime, the place the plain series cannot reach
        assert_relative_eq!(bessel_j(60, 60.0).unwrap(), 0.11425208221300292, epsilon = 1e-12);
        assert_relative_eq!(bessel_j(40, 100.0).unwrap(), 0.072701754822811057, epsilon = 1e-12);
        assert_relative_eq!(bessel_j(0, 500.0).unwrap(), -0.034100556880731998, epsilon = 1e-12);
        // either side of the series/recurrence split, including m > x
        assert_relative_eq!(bessel_j(12, 11.9).unwrap(), 0.18774083708567414, epsilon = 1e-13);
        assert_relative_eq!(bessel_j(12, 12.1).unwrap(), 0.20275679771741341, epsilon = 1e-13);
        assert_relative_eq!(bessel_j(25, 12.0).unwrap(), 4.4184178792297717e-7, epsilon = 1e-12);
        assert_relative_eq!(bessel_j(30, 12.0).unwrap(), 2.5522590430344171e-10, epsilon = 1e-12);
    }

    #[test]
    fn series_and_miller_agree_at_the_cutoff() {
        for m in 0..=30u32 {
            for dx in [-0.5, -0.1, 0.1, 0.5, 2.0] {
                let x = SERIES_CUTOFF + dx;
                let a = if x < SERIES_CUTOFF {
                    series(m, x)
                } else {
                    miller_window(m, x)[m as usize]
                };
                // evaluate with the other method regardless of the cutoff
                let b = if x < SERIES_CUTOFF {
                    miller_window(m, x)[m as usize]
                } else if m as f64 > x / 2.0 {
                    series(m, x)
                } else {
                    continue; // series is not trustworthy there, skip
                };
                assert!(
                    (a - b).abs() < 1e-12,
                    "m = {m}, x = {x}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn squared_sum_identity() {
        // J_0^2 + 2 sum_{k>=1} J_k^2 = 1 for every x
        for x in [0.3, 3.0, 11.0, 14.0, 60.0, 211.5] {
            let top = (x as u32) + 40;
            let w = j_window(top.min(560), x);
            let s: f64 = w[0] * w[0]
                + 2.0 * w[1..].iter().map(|v| v * v).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-11, "x = {x}: {s}");
        }
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(bessel_j(61, 1.0).is_err());
        assert!(bessel_j(0, 501.0).is_err());
        assert!(bessel_j(0, -1.0).is_err());
        assert!(bessel_zero(0, 0).is_err());
        assert!(bessel_zero(0, 201).is_err());
    }

    #[test]
    fn first_zeros_match_references() {
        assert_relative_eq!(bessel_zero(0, 1).unwrap(), 2.404825557695773, epsilon = 1e-11);
        assert_relative_eq!(bessel_zero(0, 2).unwrap(), 5.520078110286311, epsilon = 1e-11);
        assert_relative_eq!(bessel_zero(1, 1).unwrap(), 3.831705970207512, epsilon = 1e-11);
        assert_relative_eq!(bessel_zero(2, 1).unwrap(), 5.135622301840683, epsilon = 1e-11);
        assert_relative_eq!(bessel_zero(5, 3).unwrap(), 15.700174079711671, epsilon = 1e-10);
    }

    #[test]
    fn zeros_agree_with_scan_oracle() {
        for (m, n) in [
            (0u32, 1u32),
            (0, 7),
            (1, 4),
            (3, 2),
            (10, 1),
            (17, 3),
            (40, 1),
            (60, 1),
            (60, 4),
            (5, 60),
            (0, 150),
        ] {
            let newton = bessel_zero(m, n).unwrap();
            let scan = bessel_zero_scan(m, n).unwrap();
            assert!(
                (newton - scan).abs() < 1e-9 * scan.max(1.0),
                "m = {m}, n = {n}: newton {newton} vs scan {scan}"
            );
        }
    }

    #[test]
    fn zeros_interlace() {
        // j_{m,n} < j_{m+1,n} < j_{m,n+1}
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for m in 0..=20u32 {
            rows.push((1..=20).map(|n| bessel_zero(m, n).unwrap()).collect());
        }
        for m in 0..20 {
            for n in 0..19 {
                assert!(rows[m][n] < rows[m + 1][n]);
                assert!(rows[m + 1][n] < rows[m][n + 1]);
            }
        }
    }

    #[test]
    fn zeros_are_actual_roots() {
        for (m, n) in [(0u32, 10u32), (7, 7), (25, 2), (60, 200)] {
            let z = bessel_zero(m, n).unwrap();
            let v = bessel_j_raw(m, z);
            // derivative at a zero is O(z^{-1/2}), so the value bound
            // certifies the root to ~1e-11
            assert!(v.abs() < 1e-11, "m = {m}, n = {n}: J = {v}");
        }
    }

    #[test]
    fn prime_matches_difference_quotient() {
        for (m, x) in [(0u32, 1.3), (1, 4.0), (6, 19.0), (12, 33.0)] {
            let h = 1e-6;
            let fd = (bessel_j_raw(m, x + h) - bessel_j_raw(m, x - h)) / (2.0 * h);
            let an = bessel_j_prime(m, x).unwrap();
            assert_relative_eq!(an, fd, epsilon = 1e-9, max_relative = 1e-8);
        }
    }
}
