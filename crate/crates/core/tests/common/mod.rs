//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use liouville_core::matrix::InteractionMatrix;

/// Closed-form test for the 2×2 case: nonnegative entries,
/// `max(a11, a22) ≤ a12` and a nonzero determinant.
pub fn closed_form_n2(a11: f64, a12: f64, a22: f64) -> bool {
    let det = a11 * a22 - a12 * a12;
    a11 >= 0.0 && a12 >= 0.0 && a22 >= 0.0 && a11.max(a22) <= a12 && det != 0.0
}

/// Closed-form test for the zero-diagonal 3×3 pattern with off-diagonal
/// entries `a1 = a_12`, `a2 = a_13`, `a3 = a_23`.
pub fn closed_form_a1(a: [f64; 3]) -> bool {
    a.iter().all(|&x| x > 0.0) && a[0] + a[1] >= a[2] && a[0] + a[2] >= a[1] && a[1] + a[2] >= a[0]
}

pub fn a1_matrix(a: [f64; 3]) -> InteractionMatrix {
    InteractionMatrix::new(&[vec![0.0, a[0], a[1]], vec![a[0], 0.0, a[2]], vec![a[1], a[2], 0.0]]).unwrap()
}

/// All values `m + Σ_{l∈S} (1 + γ_l)` in `(0, cap]`, sorted, with values
/// closer than `merge_tol` to their predecessor dropped.
pub fn brute_spectrum(gammas: &[f64], cap: f64, merge_tol: f64) -> Vec<f64> {
    let n = gammas.len();
    let mut all = Vec::new();
    for m in 0..=(cap.ceil() as u32) {
        for subset in 0u32..(1 << n) {
            let mut v = m as f64;
            for (l, g) in gammas.iter().enumerate() {
                if subset & (1 << l) != 0 {
                    v += 1.0 + g;
                }
            }
            if v > 0.0 && v <= cap {
                all.push(v);
            }
        }
    }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::new();
    let mut anchor = f64::NEG_INFINITY;
    for v in all {
        if v - anchor > merge_tol {
            out.push(v);
            anchor = v;
        }
    }
    out
}

/// Truncated product of integer polynomials.
pub fn poly_mul(a: &[i64], b: &[i64], len: usize) -> Vec<i64> {
    let mut out = vec![0i64; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients `b_0..=b_cap` of `(1 + x + x² + …)^{−χ} Π_l (1 + x + … + x^{γ_l})`
/// for `χ ≤ 0` and integer `γ_l ≥ 0`.
pub fn brute_series(chi: i64, gammas: &[u32], cap: usize) -> Vec<i64> {
    assert!(chi <= 0);
    let len = cap + 1;
    let mut acc = vec![0i64; len];
    acc[0] = 1;
    let geometric = vec![1i64; len];
    for _ in 0..(-chi) {
        acc = poly_mul(&acc, &geometric, len);
    }
    for &g in gammas {
        acc = poly_mul(&acc, &vec![1i64; g as usize + 1], len);
    }
    acc
}

/// Same series by multiplying out `(1 − x)^{χ−N} Π (1 − x^{1+γ_l})` for any
/// integer `χ`, using the binomial series for the base.
pub fn brute_series_any_chi(chi: i64, gammas: &[u32], cap: usize) -> Vec<i64> {
    let len = cap + 1;
    let e = chi - gammas.len() as i64;
    let mut acc = vec![0i64; len];
    acc[0] = 1;
    if e >= 0 {
        let one_minus_x = [1i64, -1];
        for _ in 0..e {
            acc = poly_mul(&acc, &one_minus_x, len);
        }
    } else {
        for _ in 0..(-e) {
            acc = poly_mul(&acc, &vec![1i64; len], len);
        }
    }
    for &g in gammas {
        let mut f = vec![0i64; g as usize + 2];
        f[0] = 1;
        f[g as usize + 1] = -1;
        acc = poly_mul(&acc, &f, len);
    }
    acc
}

/// `Σ_{|k_1|,|k_2| ≤ M/2, k ≠ 0} w(k) cos(2π k·z) / (4π²|k|²)` with weight ½ on
/// each coordinate equal to `±M/2`.
pub fn brute_green(m: usize, z: [f64; 2]) -> f64 {
    let half = (m / 2) as i64;
    let pi = std::f64::consts::PI;
    let mut sum = 0.0;
    for k1 in -half..=half {
        for k2 in -half..=half {
            if k1 == 0 && k2 == 0 {
                continue;
            }
            let mut w = 1.0;
            if k1.abs() == half {
                w *= 0.5;
            }
            if k2.abs() == half {
                w *= 0.5;
            }
            let k2sq = (k1 * k1 + k2 * k2) as f64;
            sum += w * (2.0 * pi * (k1 as f64 * z[0] + k2 as f64 * z[1])).cos() / (4.0 * pi * pi * k2sq);
        }
    }
    sum
}

/// Sampled bisection for the positive root of `t ↦ t² dᵀAd − 4μ t Σd` on
/// `(0, hi]`.
pub fn bisect_hypersurface(a: &InteractionMatrix, mu: f64, d: &[f64]) -> f64 {
    let quad = a.quadratic_form(d);
    let lin = 4.0 * mu * d.iter().sum::<f64>();
    let f = |t: f64| t * t * quad - t * lin;
    let mut lo = 1e-300f64.max(lin / quad * 1e-6);
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
