//! Tri-factor solver coupling document reconstruction with word
//! co-occurrence reconstruction.
//!
//! Minimizes `0.5*||X - WH||_F^2 + 0.5*||M - W S W'||_F^2` over
//! non-negative `W` (d x r), `S` (r x r, symmetric), `H` (r x n), where
//! `M` is the shifted positive PMI matrix aligned to the rows of `X`.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cooccurrence::SppmiMatrix;
use crate::linalg::diff_frobenius_sq;
use crate::nmf::{
    mu_update, positive_uniform, relative_change, validate_nonneg, validate_nonzero, SolverOptions,
};
use crate::{Error, Result};

/// Result of the coupled solve. `objective_trace` records the full
/// objective (both halves) per iteration, starting at initialization.
#[derive(Debug, Clone)]
pub struct TriFactorization {
    pub w: Array2<f64>,
    pub s: Array2<f64>,
    pub h: Array2<f64>,
    pub objective_trace: Vec<f64>,
    pub iterations_run: usize,
}

impl TriFactorization {
    pub fn rank(&self) -> usize {
        self.w.ncols()
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace is never empty")
    }

    /// `W S W'`, the co-occurrence reconstruction.
    pub fn embedding_reconstruction(&self) -> Array2<f64> {
        self.w.dot(&self.s).dot(&self.w.t())
    }
}

fn objective(x: &Array2<f64>, m: &Array2<f64>, w: &Array2<f64>, s: &Array2<f64>, h: &Array2<f64>) -> f64 {
    0.5 * diff_frobenius_sq(x, &w.dot(h)) + 0.5 * diff_frobenius_sq(m, &w.dot(s).dot(&w.t()))
}

/// Solves the coupled objective from a seeded start.
///
/// `S` starts at `mean(M) * (I + small uniform noise)`, symmetrized, so
/// the embedding term is informative from the first iteration.
pub fn semantic_nmf(
    x: &Array2<f64>,
    m: &SppmiMatrix,
    opts: &SolverOptions,
) -> Result<TriFactorization> {
    opts.validate()?;
    validate_inputs(x, &m.values)?;
    let (d, n) = x.dim();
    let r = opts.rank;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    // Draw order (W, H, S) keeps W/H aligned with the classical solver's
    // stream for the same seed.
    let w0 = positive_uniform(&mut rng, d, r);
    let h0 = positive_uniform(&mut rng, r, n);
    let mean = m.values.mean().unwrap_or(0.0);
    let noise = positive_uniform(&mut rng, r, r);
    let mut s0 = Array2::<f64>::from_diag_elem(r, mean) + &(noise * (0.01 * mean));
    s0 = (&s0 + &s0.t()) / 2.0;
    solve(x, &m.values, w0, s0, h0, opts)
}

/// Solves from caller-supplied starting factors.
pub fn semantic_nmf_with_init(
    x: &Array2<f64>,
    m: &SppmiMatrix,
    w0: Array2<f64>,
    s0: Array2<f64>,
    h0: Array2<f64>,
    opts: &SolverOptions,
) -> Result<TriFactorization> {
    opts.validate()?;
    validate_inputs(x, &m.values)?;
    validate_nonneg(&w0, "W0")?;
    validate_nonneg(&s0, "S0")?;
    validate_nonneg(&h0, "H0")?;
    let (d, n) = x.dim();
    let r = w0.ncols();
    if w0.nrows() != d || h0.nrows() != r || h0.ncols() != n || s0.dim() != (r, r) {
        return Err(Error::ShapeMismatch(format!(
            "X is {d}x{n}; got W0 {}x{}, S0 {}x{}, H0 {}x{}",
            w0.nrows(),
            w0.ncols(),
            s0.nrows(),
            s0.ncols(),
            h0.nrows(),
            h0.ncols()
        )));
    }
    solve(x, &m.values, w0, s0, h0, opts)
}

fn validate_inputs(x: &Array2<f64>, m: &Array2<f64>) -> Result<()> {
    validate_nonneg(x, "X")?;
    validate_nonzero(x)?;
    validate_nonneg(m, "M")?;
    let d = x.nrows();
    if m.dim() != (d, d) {
        return Err(Error::ShapeMismatch(format!(
            "X has {d} rows but M is {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn solve(
    x: &Array2<f64>,
    m: &Array2<f64>,
    mut w: Array2<f64>,
    mut s: Array2<f64>,
    mut h: Array2<f64>,
    opts: &SolverOptions,
) -> Result<TriFactorization> {
    let eps = opts.epsilon;
    let mut trace = vec![objective(x, m, &w, &s, &h)];
    let mut iterations_run = 0;
    for _ in 0..opts.max_iters {
        // H step: identical to the classical update.
        let wt_x = w.t().dot(x);
        let wt_w_h = w.t().dot(&w).dot(&h);
        mu_update(&mut h, &wt_x, &wt_w_h, eps);

        // S step: quadratic in S, plain multiplicative ratio; re-symmetrize
        // to cancel floating-point drift.
        let wt_w = w.t().dot(&w);
        let wt_m_w = w.t().dot(m).dot(&w);
        let denom = wt_w.dot(&s).dot(&wt_w);
        mu_update(&mut s, &wt_m_w, &denom, eps);
        s = (&s + &s.t()) / 2.0;

        // W step: gradient split of the coupled objective. The data term
        // contributes XH' / WHH', the embedding term 2MWS / 2WSW'WS.
        let wt_w = w.t().dot(&w);
        let m_w_s = m.dot(&w).dot(&s);
        let numer = x.dot(&h.t()) + 2.0 * &m_w_s;
        let h_ht = h.dot(&h.t());
        let s_wtw_s = s.dot(&wt_w).dot(&s);
        let denom = w.dot(&h_ht) + 2.0 * w.dot(&s_wtw_s);
        mu_update(&mut w, &numer, &denom, eps);

        let obj = objective(x, m, &w, &s, &h);
        let prev = *trace.last().unwrap();
        trace.push(obj);
        iterations_run += 1;
        if relative_change(prev, obj) < opts.tol {
            break;
        }
    }
    Ok(TriFactorization {
        w,
        s,
        h,
        objective_trace: trace,
        iterations_run,
    })
}
