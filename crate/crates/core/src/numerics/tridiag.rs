//! Symmetric tridiagonal eigenproblem: Sturm-sequence bisection for the
//! lowest eigenvalues plus inverse iteration for eigenvectors.

use crate::error::{ModelError, Result};

/// Smallest pivot magnitude admitted in the LDL / elimination recurrences.
const PIVMIN: f64 = 1e-300;

/// Number of eigenvalues of the symmetric tridiagonal matrix `(diag, off)`
/// strictly below `x`, by counting negative pivots of the shifted LDL
/// factorization.
fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0usize;
    let mut q = 1.0f64;
    for (i, d) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / q };
        q = d - x - coupling;
        if q < 0.0 {
            count += 1;
        }
        if q.abs() < PIVMIN {
            q = -PIVMIN;
        }
    }
    count
}

/// The `k` lowest eigenvalues, ascending, refined by bisection inside the
/// Gershgorin bound until the bracket reaches relative machine width.
pub(crate) fn lowest_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(ModelError::domain(
            "tridiagonal matrix needs n >= 1 and n - 1 off-diagonal entries",
        ));
    }
    if k > n {
        return Err(ModelError::domain(format!(
            "requested {k} eigenvalues of an {n}x{n} matrix"
        )));
    }

    let mut glo = f64::INFINITY;
    let mut ghi = f64::NEG_INFINITY;
    for i in 0..n {
        let reach = if i > 0 { off[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { off[i].abs() } else { 0.0 };
        glo = glo.min(diag[i] - reach);
        ghi = ghi.max(diag[i] + reach);
    }
    // Open the bracket slightly so boundary eigenvalues stay strictly inside.
    let pad = 1e-12 * (ghi - glo).abs().max(1.0);
    glo -= pad;
    ghi += pad;

    let mut out = Vec::with_capacity(k);
    for idx in 0..k {
        // Invariant: count(lo) <= idx < count(hi).
        let mut lo = out.last().copied().map_or(glo, |prev: f64| prev - pad);
        let mut hi = ghi;
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(1e-30) {
                break;
            }
            if count_below(diag, off, mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

/// Solves `(T - shift I) x = rhs` for tridiagonal symmetric `T` by Gaussian
/// elimination with partial pivoting (fill-in limited to one extra
/// superdiagonal). Near-singular pivots are floored, which is exactly what
/// inverse iteration wants.
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut sub = vec![0.0f64; n]; // sub[i] multiplies x[i-1] in row i
    let mut dia = vec![0.0f64; n];
    let mut sup = vec![0.0f64; n]; // sup[i] multiplies x[i+1]
    let mut sup2 = vec![0.0f64; n]; // fill-in: multiplies x[i+2]
    let mut r = rhs.to_vec();
    for i in 0..n {
        dia[i] = diag[i] - shift;
        if i > 0 {
            sub[i] = off[i - 1];
        }
        if i + 1 < n {
            sup[i] = off[i];
        }
    }

    for i in 0..n.saturating_sub(1) {
        if sub[i + 1].abs() > dia[i].abs() {
            // Swap rows i and i+1 over columns i, i+1, i+2.
            std::mem::swap(&mut dia[i], &mut sub[i + 1]);
            {
                let (a, b) = sup.split_at_mut(i + 1);
                std::mem::swap(&mut a[i], &mut dia[i + 1]);
                std::mem::swap(&mut sup2[i], &mut b[0]);
            }
            r.swap(i, i + 1);
        }
        let pivot = if dia[i].abs() < PIVMIN {
            PIVMIN.copysign(dia[i])
        } else {
            dia[i]
        };
        let m = sub[i + 1] / pivot;
        dia[i + 1] -= m * sup[i];
        sup[i + 1] -= m * sup2[i];
        r[i + 1] -= m * r[i];
        dia[i] = pivot;
    }
    if dia[n - 1].abs() < PIVMIN {
        dia[n - 1] = PIVMIN.copysign(dia[n - 1] + PIVMIN);
    }

    let mut x = vec![0.0f64; n];
    for i in (0..n).rev() {
        let mut acc = r[i];
        if i + 1 < n {
            acc -= sup[i] * x[i + 1];
        }
        if i + 2 < n {
            acc -= sup2[i] * x[i + 2];
        }
        x[i] = acc / dia[i];
    }
    x
}

/// Eigenvector for an eigenvalue estimate `lambda` by inverse iteration,
/// normalized to unit Euclidean length with its largest component positive.
pub(crate) fn eigenvector_for(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    // Deterministic quasi-random start vector avoids accidental orthogonality.
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let z = crate::numerics::rng::split_seed(0x5EED, i as u64);
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    normalize(&mut v);
    for _ in 0..4 {
        let mut next = solve_shifted(diag, off, lambda, &v);
        normalize(&mut next);
        v = next;
    }
    let (imax, _) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("finite"))
        .expect("nonempty");
    if v[imax] < 0.0 {
        for value in &mut v {
            *value = -*value;
        }
    }
    v
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for value in v.iter_mut() {
            *value /= norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Discrete Laplacian tridiag(-1, 2, -1): eigenvalues 4 sin^2(k pi / (2(n+1))).
    fn laplacian(n: usize) -> (Vec<f64>, Vec<f64>) {
        (vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn laplacian_spectrum() {
        let n = 50;
        let (d, e) = laplacian(n);
        let got = lowest_eigenvalues(&d, &e, 5).unwrap();
        for (k, value) in got.iter().enumerate() {
            let arg = (k + 1) as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64);
            let want = 4.0 * arg.sin().powi(2);
            assert!(
                (value - want).abs() < 1e-12,
                "eigenvalue {k}: got {value}, want {want}"
            );
        }
    }

    #[test]
    fn eigenvalues_are_sorted_and_counted() {
        let (d, e) = laplacian(30);
        let all = lowest_eigenvalues(&d, &e, 30).unwrap();
        assert!(all.windows(2).all(|w| w[0] <= w[1]));
        // Every eigenvalue of the Laplacian lies in (0, 4).
        assert!(all[0] > 0.0 && all[29] < 4.0);
    }

    #[test]
    fn eigenvector_residual() {
        let n = 80;
        let (d, e) = laplacian(n);
        let lambda = lowest_eigenvalues(&d, &e, 1).unwrap()[0];
        let v = eigenvector_for(&d, &e, lambda);
        let mut residual: f64 = 0.0;
        for i in 0..n {
            let mut tv = d[i] * v[i];
            if i > 0 {
                tv += e[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                tv += e[i] * v[i + 1];
            }
            residual = residual.max((tv - lambda * v[i]).abs());
        }
        assert!(residual < 1e-10, "residual {residual}");
        // Ground mode of the Laplacian is the positive half sine arch.
        assert!(v.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn random_matrix_residuals() {
        let n = 64;
        let mut state = 0x2468_ACE0u64;
        let mut draw = || {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let d: Vec<f64> = (0..n).map(|_| 3.0 * draw()).collect();
        let e: Vec<f64> = (0..n - 1).map(|_| draw()).collect();
        let lows = lowest_eigenvalues(&d, &e, 4).unwrap();
        for lambda in lows {
            let v = eigenvector_for(&d, &e, lambda);
            let mut residual: f64 = 0.0;
            for i in 0..n {
                let mut tv = d[i] * v[i];
                if i > 0 {
                    tv += e[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    tv += e[i] * v[i + 1];
                }
                residual = residual.max((tv - lambda * v[i]).abs());
            }
            assert!(residual < 1e-9, "lambda {lambda}: residual {residual}");
        }
    }

    #[test]
    fn single_element_matrix() {
        let got = lowest_eigenvalues(&[5.0], &[], 1).unwrap();
        assert!((got[0] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(lowest_eigenvalues(&[], &[], 0).is_err());
        assert!(lowest_eigenvalues(&[1.0, 2.0], &[], 1).is_err());
        assert!(lowest_eigenvalues(&[1.0], &[], 2).is_err());
    }
}
