use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Length of the correlation vector for `cols` columns.
pub const fn cc_len(cols: usize) -> usize {
    cols * (cols.saturating_sub(1)) / 2
}

/// Pearson correlations of all column pairs `(j, k)`, `j < k`, in row-major
/// upper-triangle order. Pairs involving a constant column are 0.
pub fn corr_cc(matrix: &Matrix) -> Result<Vec<f64>> {
    let (rows, cols) = (matrix.rows(), matrix.cols());
    if rows < 2 {
        return Err(Error::Degenerate(format!("correlation needs at least 2 rows, got {rows}")));
    }

    let mut centered = Matrix::zeros(cols, rows);
    let mut norms = vec![0.0; cols];
    let mut constant = vec![false; cols];
    for c in 0..cols {
        let first = matrix.get(0, c);
        constant[c] = matrix.column(c).all(|v| v == first);
        if constant[c] {
            continue;
        }
        let mean = matrix.column(c).sum::<f64>() / rows as f64;
        let out = centered.row_mut(c);
        for (r, slot) in out.iter_mut().enumerate() {
            *slot = matrix.get(r, c) - mean;
        }
        norms[c] = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    }

    let mut cc = Vec::with_capacity(cc_len(cols));
    for j in 0..cols {
        for k in j + 1..cols {
            if constant[j] || constant[k] || norms[j] == 0.0 || norms[k] == 0.0 {
                cc.push(0.0);
                continue;
            }
            let dot: f64 = centered.row(j).iter().zip(centered.row(k)).map(|(a, b)| a * b).sum();
            cc.push((dot / (norms[j] * norms[k])).clamp(-1.0, 1.0));
        }
    }
    Ok(cc)
}
