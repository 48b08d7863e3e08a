//! Unrestarted GMRES with modified Gram-Schmidt and Givens rotations.

#[allow(dead_code)]
pub(crate) struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve `op(x) = b` from `x = 0` until `‖b − op(x)‖ ≤ rel_tol·‖b‖` or the
/// Krylov space reaches `max_iter`.
pub(crate) fn gmres<F>(op: F, b: &[f64], rel_tol: f64, max_iter: usize) -> GmresOutcome
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let len = b.len();
    let beta = norm(b);
    if beta == 0.0 {
        return GmresOutcome { x: vec![0.0; len], iterations: 0, relative_residual: 0.0 };
    }
    let mut basis: Vec<Vec<f64>> = vec![b.iter().map(|v| v / beta).collect()];
    // Hessenberg columns after rotation (upper triangular R).
    let mut r: Vec<Vec<f64>> = Vec::new();
    let mut rotations: Vec<(f64, f64)> = Vec::new();
    let mut g = vec![beta];
    let mut residual = beta;

    for j in 0..max_iter {
        let mut w = op(&basis[j]);
        let mut h = Vec::with_capacity(j + 2);
        for v in &basis {
            let hij = dot(&w, v);
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= hij * vi;
            }
            h.push(hij);
        }
        let h_next = norm(&w);
        h.push(h_next);

        for (i, &(c, s)) in rotations.iter().enumerate() {
            let (a, bb) = (h[i], h[i + 1]);
            h[i] = c * a + s * bb;
            h[i + 1] = -s * a + c * bb;
        }
        let (a, bb) = (h[j], h[j + 1]);
        let denom = a.hypot(bb);
        let (c, s) = if denom == 0.0 { (1.0, 0.0) } else { (a / denom, bb / denom) };
        h[j] = denom;
        h[j + 1] = 0.0;
        rotations.push((c, s));
        let gj = g[j];
        g[j] = c * gj;
        g.push(-s * gj);
        residual = g[j + 1].abs();
        h.truncate(j + 1);
        r.push(h);

        if residual <= rel_tol * beta || h_next == 0.0 {
            break;
        }
        basis.push(w.into_iter().map(|v| v / h_next).collect());
    }

    let k = r.len();
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for (jj, yj) in y.iter().enumerate().skip(i + 1) {
            s -= r[jj][i] * yj;
        }
        y[i] = s / r[i][i];
    }
    let mut x = vec![0.0; len];
    for (yi, v) in y.iter().zip(&basis) {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += yi * vi;
        }
    }
    GmresOutcome { x, iterations: k, relative_residual: residual / beta }
}
