//! Classical non-negative matrix factorization by multiplicative updates,
//! plus the topic-inspection utilities shared by every variant.
//!
//! Given a non-negative `X` (d x n) and a rank `r`, the solver seeks
//! `W` (d x r) and `H` (r x n), both non-negative, minimizing
//! `||X - WH||_F^2` with the Lee-Seung update pair:
//!
//! ```text
//! H <- H .* (W'X)  ./ (W'WH  + eps)
//! W <- W .* (XH')  ./ (WHH'  + eps)
//! ```

use ndarray::{Array2, Zip};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::diff_frobenius_sq;
use crate::vectorizer::Vocabulary;
use crate::{Error, Result};

/// Options shared by all factorization solvers.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Number of topics (columns of W). May exceed min(d, n).
    pub rank: usize,
    pub max_iters: usize,
    /// Relative objective-change stopping threshold; 0 disables early stop.
    pub tol: f64,
    pub seed: u64,
    /// Division guard added to update denominators.
    pub epsilon: f64,
}

impl SolverOptions {
    pub fn new(rank: usize) -> Self {
        Self {
            rank,
            max_iters: 500,
            tol: 1e-5,
            seed: 0,
            epsilon: 1e-10,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.rank < 1 {
            return Err(Error::InvalidParameter("rank must be >= 1".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParameter("tol must be >= 0".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be > 0".into()));
        }
        Ok(())
    }
}

/// Result of a two-factor solve. `objective_trace[0]` is the objective at
/// initialization; entry `k` is the objective after the k-th iteration.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub w: Array2<f64>,
    pub h: Array2<f64>,
    pub objective_trace: Vec<f64>,
    pub iterations_run: usize,
}

impl Factorization {
    pub fn rank(&self) -> usize {
        self.w.ncols()
    }

    pub fn reconstruction(&self) -> Array2<f64> {
        self.w.dot(&self.h)
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace is never empty")
    }
}

pub(crate) fn validate_nonneg(x: &Array2<f64>, name: &str) -> Result<()> {
    if x.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be entrywise non-negative and finite"
        )));
    }
    Ok(())
}

pub(crate) fn validate_nonzero(x: &Array2<f64>) -> Result<()> {
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    Ok(())
}

/// Fills a matrix with uniform draws from (0, 1]; strictly positive so
/// multiplicative updates never lock entries at zero.
pub(crate) fn positive_uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| 1.0 - rng.random::<f64>())
}

/// Relative change between consecutive objective values.
pub(crate) fn relative_change(prev: f64, cur: f64) -> f64 {
    (prev - cur).abs() / prev.abs().max(f64::MIN_POSITIVE)
}

/// Multiplicative update `base .* numer ./ (denom + eps)`, in place.
pub(crate) fn mu_update(base: &mut Array2<f64>, numer: &Array2<f64>, denom: &Array2<f64>, eps: f64) {
    Zip::from(base).and(numer).and(denom).for_each(|b, &n, &d| {
        *b *= n / (d + eps);
    });
}

/// Factorizes `x` at `opts.rank` from a seeded uniform-positive start.
pub fn nmf(x: &Array2<f64>, opts: &SolverOptions) -> Result<Factorization> {
    opts.validate()?;
    validate_nonneg(x, "X")?;
    validate_nonzero(x)?;
    let (d, n) = x.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let w0 = positive_uniform(&mut rng, d, opts.rank);
    let h0 = positive_uniform(&mut rng, opts.rank, n);
    solve(x, w0, h0, opts)
}

/// Factorizes `x` from caller-supplied starting factors.
pub fn nmf_with_init(
    x: &Array2<f64>,
    w0: Array2<f64>,
    h0: Array2<f64>,
    opts: &SolverOptions,
) -> Result<Factorization> {
    opts.validate()?;
    validate_nonneg(x, "X")?;
    validate_nonzero(x)?;
    validate_nonneg(&w0, "W0")?;
    validate_nonneg(&h0, "H0")?;
    let (d, n) = x.dim();
    if w0.dim() != (d, w0.ncols()) || w0.nrows() != d || h0.ncols() != n || w0.ncols() != h0.nrows()
    {
        return Err(Error::ShapeMismatch(format!(
            "X is {d}x{n}, W0 is {}x{}, H0 is {}x{}",
            w0.nrows(),
            w0.ncols(),
            h0.nrows(),
            h0.ncols()
        )));
    }
    solve(x, w0, h0, opts)
}

fn solve(
    x: &Array2<f64>,
    mut w: Array2<f64>,
    mut h: Array2<f64>,
    opts: &SolverOptions,
) -> Result<Factorization> {
    let eps = opts.epsilon;
    let mut trace = vec![diff_frobenius_sq(x, &w.dot(&h))];
    let mut iterations_run = 0;
    for _ in 0..opts.max_iters {
        let wt_x = w.t().dot(x);
        let wt_w_h = w.t().dot(&w).dot(&h);
        mu_update(&mut h, &wt_x, &wt_w_h, eps);

        let x_ht = x.dot(&h.t());
        let w_h_ht = w.dot(&h.dot(&h.t()));
        mu_update(&mut w, &x_ht, &w_h_ht, eps);

        let objective = diff_frobenius_sq(x, &w.dot(&h));
        let prev = *trace.last().unwrap();
        trace.push(objective);
        iterations_run += 1;
        if relative_change(prev, objective) < opts.tol {
            break;
        }
    }
    Ok(Factorization {
        w,
        h,
        objective_trace: trace,
        iterations_run,
    })
}

/// Squared Frobenius residual `||X - WH||_F^2`.
pub fn residual(x: &Array2<f64>, factorization: &Factorization) -> Result<f64> {
    let (d, n) = x.dim();
    if factorization.w.nrows() != d || factorization.h.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "X is {d}x{n} but factors reconstruct {}x{}",
            factorization.w.nrows(),
            factorization.h.ncols()
        )));
    }
    Ok(diff_frobenius_sq(x, &factorization.reconstruction()))
}

/// For each topic (column of `w`), the `k` heaviest terms in descending
/// weight order, ties broken lexicographically.
pub fn topic_keywords(
    w: &Array2<f64>,
    vocab: &Vocabulary,
    k: usize,
) -> Result<Vec<Vec<String>>> {
    let d = w.nrows();
    if vocab.len() != d {
        return Err(Error::ShapeMismatch(format!(
            "W has {d} rows but vocabulary has {} terms",
            vocab.len()
        )));
    }
    if k > d {
        return Err(Error::InvalidParameter(format!(
            "top-k {k} exceeds vocabulary size {d}"
        )));
    }
    let mut topics = Vec::with_capacity(w.ncols());
    for col in w.columns() {
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| {
            col[b]
                .partial_cmp(&col[a])
                .unwrap()
                .then_with(|| vocab.term(a).cmp(vocab.term(b)))
        });
        topics.push(order[..k].iter().map(|&i| vocab.term(i).to_string()).collect());
    }
    Ok(topics)
}

/// Per-document topic assignments: column argmax of `h`, ties to the
/// lowest index. All-zero columns map to topic 0 and are listed in
/// `unassigned`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignments {
    pub topics: Vec<usize>,
    pub unassigned: Vec<usize>,
}

pub fn assign_documents(h: &Array2<f64>) -> Assignments {
    let mut topics = Vec::with_capacity(h.ncols());
    let mut unassigned = Vec::new();
    for (j, col) in h.columns().into_iter().enumerate() {
        let mut best = 0;
        for (i, &v) in col.iter().enumerate() {
            if v > col[best] {
                best = i;
            }
        }
        if col.iter().all(|&v| v == 0.0) {
            unassigned.push(j);
        }
        topics.push(best);
    }
    Assignments { topics, unassigned }
}
