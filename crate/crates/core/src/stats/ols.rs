//! Least squares via Householder QR.

use super::StatsError;

/// Dense design matrix stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub names: Vec<String>,
    columns: Vec<Vec<f64>>,
    nrows: usize,
}

impl Design {
    pub fn new(nrows: usize) -> Self {
        Design {
            names: Vec::new(),
            columns: Vec::new(),
            nrows,
        }
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) {
        assert_eq!(values.len(), self.nrows, "column length must match row count");
        self.names.push(name.into());
        self.columns.push(values);
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i]
    }

    /// `X β`.
    pub fn apply(&self, beta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows];
        for (col, b) in self.columns.iter().zip(beta) {
            for (o, x) in out.iter_mut().zip(col) {
                *o += x * b;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// One per design column; `NaN` for aliased columns.
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub rank: usize,
    /// Columns dropped as linear combinations of earlier ones.
    pub aliased: Vec<usize>,
}

/// Relative threshold below which a column is treated as dependent.
const RANK_TOL: f64 = 1e-10;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn qr_least_squares(design: &Design, y: &[f64], weights: Option<&[f64]>, drop_aliased: bool) -> Result<OlsFit, StatsError> {
    let n = design.nrows();
    let p = design.ncols();
    if y.len() != n || weights.is_some_and(|w| w.len() != n) {
        return Err(StatsError::DimensionMismatch);
    }
    if n < p {
        return Err(StatsError::RankDeficient { column: design.names.get(n).cloned().unwrap_or_default() });
    }
    let sw: Vec<f64> = match weights {
        Some(w) => w.iter().map(|x| x.sqrt()).collect(),
        None => vec![1.0; n],
    };
    let mut a: Vec<Vec<f64>> = design
        .columns
        .iter()
        .map(|c| c.iter().zip(&sw).map(|(x, s)| x * s).collect())
        .collect();
    let mut b: Vec<f64> = y.iter().zip(&sw).map(|(v, s)| v * s).collect();
    let original_norms: Vec<f64> = a.iter().map(|c| norm(c)).collect();

    // Accepted pivot columns in order, with their R rows built in place.
    let mut pivots: Vec<usize> = Vec::new();
    let mut aliased = Vec::new();
    for j in 0..p {
        let r = pivots.len();
        let tail_norm = norm(&a[j][r..]);
        if r >= n || tail_norm <= RANK_TOL * original_norms[j].max(f64::MIN_POSITIVE) {
            if drop_aliased {
                aliased.push(j);
                continue;
            }
            return Err(StatsError::RankDeficient {
                column: design.names[j].clone(),
            });
        }
        let alpha = if a[j][r] > 0.0 { -tail_norm } else { tail_norm };
        let mut v: Vec<f64> = a[j][r..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(x, c)| x * c).sum();
            let scale = 2.0 * dot / vnorm2;
            for (c, x) in col.iter_mut().zip(&v) {
                *c -= scale * x;
            }
        };
        for col in a.iter_mut().skip(j + 1) {
            reflect(&mut col[r..]);
        }
        reflect(&mut b[r..]);
        a[j][r] = alpha;
        for x in a[j][r + 1..].iter_mut() {
            *x = 0.0;
        }
        pivots.push(j);
    }

    // Back substitution on the upper-triangular system over pivot columns.
    let rank = pivots.len();
    let mut beta_pivot = vec![0.0; rank];
    for k in (0..rank).rev() {
        let mut s = b[k];
        for (m, &col) in pivots.iter().enumerate().skip(k + 1) {
            s -= a[col][k] * beta_pivot[m];
        }
        beta_pivot[k] = s / a[pivots[k]][k];
    }
    let mut coefficients = vec![f64::NAN; p];
    let mut dense = vec![0.0; p];
    for (k, &col) in pivots.iter().enumerate() {
        coefficients[col] = beta_pivot[k];
        dense[col] = beta_pivot[k];
    }
    let fitted = design.apply(&dense);
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(v, f)| v - f).collect();
    let rss = residuals.iter().zip(&sw).map(|(r, s)| (r * s) * (r * s)).sum();
    Ok(OlsFit {
        coefficients,
        residuals,
        rss,
        rank,
        aliased,
    })
}

/// Ordinary least squares. Fails on a rank-deficient design.
pub fn ols_fit(design: &Design, response: &[f64]) -> Result<OlsFit, StatsError> {
    qr_least_squares(design, response, None, false)
}

/// Weighted least squares with non-negative row weights.
pub fn wls_fit(design: &Design, response: &[f64], weights: &[f64]) -> Result<OlsFit, StatsError> {
    qr_least_squares(design, response, Some(weights), false)
}

/// Least squares that drops columns aliased with earlier ones instead of failing.
pub fn ols_fit_dropping_aliased(design: &Design, response: &[f64], weights: Option<&[f64]>) -> Result<OlsFit, StatsError> {
    qr_least_squares(design, response, weights, true)
}
