//! Richardson extrapolation for sequences sampled on geometric abscissae.
//!
//! Samples `S_k = S(x_0 r^k)` with `S(x) = L + c_1 x^{-p} + c_2 x^{-2p} + ...`
//! are combined column by column in a Neville table. The estimate reported is
//! the table entry whose own difference estimate is smallest.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    pub error: f64,
    /// Table column that produced `value` (0 means the raw last sample).
    pub column: usize,
}

pub fn richardson(values: &[f64], ratio: f64, power: f64) -> Option<Extrapolated> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(Extrapolated {
            value: values[0],
            error: f64::INFINITY,
            column: 0,
        });
    }
    // table[m][k]: column m, row k (k >= m)
    let mut table: Vec<Vec<f64>> = vec![values.to_vec()];
    for m in 1..n {
        let factor = ratio.powf(m as f64 * power) - 1.0;
        let prev = &table[m - 1];
        let col: Vec<f64> = (m..n)
            .map(|k| {
                let hi = prev[k - (m - 1)];
                let lo = prev[k - 1 - (m - 1)];
                hi + (hi - lo) / factor
            })
            .collect();
        table.push(col);
    }
    let mut best: Option<Extrapolated> = None;
    for (m, col) in table.iter().enumerate() {
        if col.len() < 2 {
            break;
        }
        let last = col[col.len() - 1];
        let mut err = (last - col[col.len() - 2]).abs();
        if m > 0 {
            let left = table[m - 1].last().copied().unwrap();
            err = err.max((last - left).abs());
        }
        if best.is_none_or(|b| err < b.error) {
            best = Some(Extrapolated {
                value: last,
                error: err,
                column: m,
            });
        }
    }
    best
}

/// Successive differences of the last `window + 1` samples shrink
/// monotonically (or sit at the rounding floor).
pub fn differences_contract(values: &[f64], window: usize) -> bool {
    if values.len() < window + 2 {
        return false;
    }
    let tail = &values[values.len() - window - 2..];
    let scale = tail.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-13 * scale;
    let diffs: Vec<f64> = tail.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    diffs
        .windows(2)
        .all(|d| d[1] <= floor || d[1] < 0.95 * d[0])
}

/// Ordinary least-squares line `y ≈ intercept + slope·x` with standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub se_intercept: f64,
    pub se_slope: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let s2 = ssr / (nf - 2.0);
    let se_slope = (s2 / sxx).sqrt();
    let se_intercept = (s2 * (1.0 / nf + mx * mx / sxx)).sqrt();
    Some(LinearFit {
        intercept,
        slope,
        se_intercept,
        se_slope,
        rms: (ssr / nf).sqrt(),
    })
}

/// Least squares `y ≈ Σ_j coef_j · columns[j]` by modified Gram-Schmidt.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub rms: f64,
}

pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Option<LeastSquares> {
    let m = columns.len();
    let n = y.len();
    if m == 0 || n <= m || columns.iter().any(|col| col.len() != n) {
        return None;
    }
    let mut q: Vec<Vec<f64>> = columns.to_vec();
    let mut r = vec![vec![0.0; m]; m];
    for j in 0..m {
        for k in 0..j {
            let dot: f64 = q[k].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[k][j] = dot;
            let qk = q[k].clone();
            for (v, u) in q[j].iter_mut().zip(&qk) {
                *v -= dot * u;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = columns[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-13 * scale) {
            return None;
        }
        r[j][j] = norm;
        for v in q[j].iter_mut() {
            *v /= norm;
        }
    }
    let qty: Vec<f64> = q.iter().map(|col| col.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let mut coef = vec![0.0; m];
    for j in (0..m).rev() {
        let s: f64 = (j + 1..m).map(|k| r[j][k] * coef[k]).sum();
        coef[j] = (qty[j] - s) / r[j][j];
    }
    // rows of R^{-1} give the diagonal of (R^T R)^{-1}
    let mut rinv = vec![vec![0.0; m]; m];
    for j in 0..m {
        rinv[j][j] = 1.0 / r[j][j];
        for i in (0..j).rev() {
            let s: f64 = (i + 1..=j).map(|k| r[i][k] * rinv[k][j]).sum();
            rinv[i][j] = -s / r[i][i];
        }
    }
    let ssr: f64 = (0..n)
        .map(|i| {
            let fit: f64 = (0..m).map(|j| coef[j] * columns[j][i]).sum();
            (y[i] - fit).powi(2)
        })
        .sum();
    let s2 = ssr / (n - m) as f64;
    let standard_errors = (0..m)
        .map(|i| (s2 * rinv[i].iter().map(|v| v * v).sum::<f64>()).sqrt())
        .collect();
    Some(LeastSquares {
        coefficients: coef,
        standard_errors,
        rms: (ssr / n as f64).sqrt(),
    })
}
