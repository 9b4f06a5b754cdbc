//! Supervised and semi-supervised factorization with label
//! reconstruction, plus the labeling accuracy score.
//!
//! Both solvers minimize a data term plus a weighted label term:
//!
//! ```text
//! SNMF :  ||X - WH||_F^2 + lambda * ||Y - BH||_F^2          (train columns only)
//! SSNMF:  ||X - WH||_F^2 + lambda * ||L .* (Y - BH)||_F^2   (all columns, masked)
//! ```
//!
//! where `B` (p x r) is the dictionary for the label matrix and `L` masks
//! label columns as known (all-ones) or unknown (all-zeros).

use std::collections::BTreeSet;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::LabelSet;
use crate::linalg::{diff_frobenius_sq, lu_solve};
use crate::nmf::{
    mu_update, positive_uniform, relative_change, validate_nonneg, validate_nonzero, SolverOptions,
};
use crate::{Error, Result};

/// Binary p x n class-indicator matrix with its class names.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix {
    pub y: Array2<f64>,
    pub classes: Vec<String>,
}

impl LabelMatrix {
    /// Builds Y aligned to `doc_ids` column order from a label set.
    pub fn from_label_set(labels: &LabelSet, doc_ids: &[String]) -> Self {
        let p = labels.num_classes();
        let mut y = Array2::<f64>::zeros((p, doc_ids.len()));
        for (j, doc_id) in doc_ids.iter().enumerate() {
            for class in labels.labels_of(doc_id) {
                y[[class, j]] = 1.0;
            }
        }
        Self {
            y,
            classes: labels.classes().to_vec(),
        }
    }

    /// Reads the per-column class-index sets back out of Y.
    pub fn to_assignments(&self) -> Vec<BTreeSet<usize>> {
        self.y
            .columns()
            .into_iter()
            .map(|col| {
                col.iter()
                    .enumerate()
                    .filter(|(_, &v)| v == 1.0)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect()
    }

    /// True when every column carries exactly one label (decision-type
    /// style labeling).
    pub fn is_single_label(&self) -> bool {
        self.y
            .columns()
            .into_iter()
            .all(|col| col.iter().filter(|&&v| v == 1.0).count() == 1)
    }

    pub fn num_classes(&self) -> usize {
        self.y.nrows()
    }

    pub fn num_docs(&self) -> usize {
        self.y.ncols()
    }
}

/// Column mask for semi-supervision: each column is all-ones (label
/// known) or all-zeros (label unknown).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskMatrix {
    known: Vec<bool>,
    classes: usize,
}

impl MaskMatrix {
    pub fn new(known: Vec<bool>, classes: usize) -> Self {
        Self { known, classes }
    }

    pub fn known(&self) -> &[bool] {
        &self.known
    }

    pub fn num_known(&self) -> usize {
        self.known.iter().filter(|&&k| k).count()
    }

    pub fn num_docs(&self) -> usize {
        self.known.len()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut l = Array2::<f64>::zeros((self.classes, self.known.len()));
        for (j, &k) in self.known.iter().enumerate() {
            if k {
                l.column_mut(j).fill(1.0);
            }
        }
        l
    }
}

/// Fitted supervised model. The trace holds the full objective per
/// iteration, starting at initialization.
#[derive(Debug, Clone)]
pub struct SupervisedModel {
    pub w: Array2<f64>,
    pub h: Array2<f64>,
    pub b: Array2<f64>,
    pub lambda: f64,
    pub objective_trace: Vec<f64>,
    pub iterations_run: usize,
}

impl SupervisedModel {
    pub fn rank(&self) -> usize {
        self.w.ncols()
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace is never empty")
    }
}

fn objective(
    x: &Array2<f64>,
    y: &Array2<f64>,
    l: &Array2<f64>,
    w: &Array2<f64>,
    h: &Array2<f64>,
    b: &Array2<f64>,
    lambda: f64,
) -> f64 {
    let data = diff_frobenius_sq(x, &w.dot(h));
    let masked_diff = l * &(y - &b.dot(h));
    data + lambda * masked_diff.iter().map(|v| v * v).sum::<f64>()
}

fn fit(
    x: &Array2<f64>,
    y: &Array2<f64>,
    l: &Array2<f64>,
    lambda: f64,
    mut w: Array2<f64>,
    mut h: Array2<f64>,
    mut b: Array2<f64>,
    opts: &SolverOptions,
) -> SupervisedModel {
    let eps = opts.epsilon;
    let ly = l * y;
    let mut trace = vec![objective(x, y, l, &w, &h, &b, lambda)];
    let mut iterations_run = 0;
    for _ in 0..opts.max_iters {
        // H step uses both reconstruction targets.
        let masked_bh = l * &b.dot(&h);
        let numer = w.t().dot(x) + lambda * &b.t().dot(&ly);
        let denom = w.t().dot(&w).dot(&h) + lambda * &b.t().dot(&masked_bh);
        mu_update(&mut h, &numer, &denom, eps);

        // B step sees only masked columns.
        let masked_bh = l * &b.dot(&h);
        let numer = ly.dot(&h.t());
        let denom = masked_bh.dot(&h.t());
        mu_update(&mut b, &numer, &denom, eps);

        // W step is the classical update.
        let numer = x.dot(&h.t());
        let denom = w.dot(&h.dot(&h.t()));
        mu_update(&mut w, &numer, &denom, eps);

        let obj = objective(x, y, l, &w, &h, &b, lambda);
        let prev = *trace.last().unwrap();
        trace.push(obj);
        iterations_run += 1;
        if relative_change(prev, obj) < opts.tol {
            break;
        }
    }
    SupervisedModel {
        w,
        h,
        b,
        lambda,
        objective_trace: trace,
        iterations_run,
    }
}

fn validate_xy(x: &Array2<f64>, y: &Array2<f64>, lambda: f64) -> Result<()> {
    validate_nonneg(x, "X")?;
    validate_nonzero(x)?;
    validate_nonneg(y, "Y")?;
    if x.ncols() != y.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "X has {} columns but Y has {}",
            x.ncols(),
            y.ncols()
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be > 0, got {lambda}"
        )));
    }
    Ok(())
}

/// Trains supervised NMF on the training columns only.
pub fn snmf_train(
    x_train: &Array2<f64>,
    y_train: &Array2<f64>,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<SupervisedModel> {
    opts.validate()?;
    validate_xy(x_train, y_train, lambda)?;
    let (d, m) = x_train.dim();
    let p = y_train.nrows();
    let r = opts.rank;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let w0 = positive_uniform(&mut rng, d, r);
    let h0 = positive_uniform(&mut rng, r, m);
    let b0 = positive_uniform(&mut rng, p, r);
    let ones = Array2::<f64>::ones((p, m));
    Ok(fit(x_train, y_train, &ones, lambda, w0, h0, b0, opts))
}

/// Trains supervised NMF from caller-supplied starting factors.
pub fn snmf_train_with_init(
    x_train: &Array2<f64>,
    y_train: &Array2<f64>,
    lambda: f64,
    w0: Array2<f64>,
    h0: Array2<f64>,
    b0: Array2<f64>,
    opts: &SolverOptions,
) -> Result<SupervisedModel> {
    opts.validate()?;
    validate_xy(x_train, y_train, lambda)?;
    validate_nonneg(&w0, "W0")?;
    validate_nonneg(&h0, "H0")?;
    validate_nonneg(&b0, "B0")?;
    let (d, m) = x_train.dim();
    let p = y_train.nrows();
    let r = w0.ncols();
    if w0.nrows() != d || h0.dim() != (r, m) || b0.dim() != (p, r) {
        return Err(Error::ShapeMismatch(format!(
            "X is {d}x{m}, Y is {p}x{m}; got W0 {}x{}, H0 {}x{}, B0 {}x{}",
            w0.nrows(),
            w0.ncols(),
            h0.nrows(),
            h0.ncols(),
            b0.nrows(),
            b0.ncols()
        )));
    }
    let ones = Array2::<f64>::ones((p, m));
    Ok(fit(x_train, y_train, &ones, lambda, w0, h0, b0, opts))
}

/// Label scores for held-out columns with the trained model.
#[derive(Debug, Clone)]
pub struct Prediction {
    /// Raw p x k scores `B (W'W)^-1 W' X_test`; may contain negatives.
    pub scores: Array2<f64>,
    /// True when the Gram system was near-singular and a ridge
    /// `delta = 1e-10 * trace(W'W)/r` was added before solving.
    pub regularized: bool,
}

/// Computes `B (W'W)^-1 W' X_test`. Scores are returned unclipped;
/// downstream argmax decides the predicted class.
pub fn snmf_predict(model: &SupervisedModel, x_test: &Array2<f64>) -> Result<Prediction> {
    if x_test.nrows() != model.w.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "model expects {} rows, X_test has {}",
            model.w.nrows(),
            x_test.nrows()
        )));
    }
    let gram = model.w.t().dot(&model.w);
    let rhs = model.w.t().dot(x_test);
    let (solved, regularized) = match lu_solve(&gram, &rhs) {
        Some(z) => (z, false),
        None => {
            let r = gram.nrows();
            let delta = 1e-10 * gram.diag().sum() / r as f64;
            let ridged = &gram + &(Array2::<f64>::eye(r) * delta);
            let z = lu_solve(&ridged, &rhs).ok_or_else(|| {
                Error::InvalidParameter("W'W is singular even after regularization".into())
            })?;
            (z, true)
        }
    };
    Ok(Prediction {
        scores: model.b.dot(&solved),
        regularized,
    })
}

/// Trains semi-supervised NMF over the intact data matrix with a label
/// mask, and reconstructs the unknown label columns.
///
/// Returns the model and `Y' = (J - L) .* (BH)`: exact zeros on known
/// columns, the label reconstruction on unknown ones.
pub fn ssnmf(
    x: &Array2<f64>,
    y: &Array2<f64>,
    mask: &MaskMatrix,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<(SupervisedModel, Array2<f64>)> {
    opts.validate()?;
    validate_xy(x, y, lambda)?;
    if mask.num_docs() != x.ncols() || mask.classes != y.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "mask is {}x{} but Y is {}x{}",
            mask.classes,
            mask.num_docs(),
            y.nrows(),
            y.ncols()
        )));
    }
    if mask.num_known() == 0 {
        return Err(Error::NoSupervision);
    }
    let (d, n) = x.dim();
    let p = y.nrows();
    let r = opts.rank;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let w0 = positive_uniform(&mut rng, d, r);
    let h0 = positive_uniform(&mut rng, r, n);
    let b0 = positive_uniform(&mut rng, p, r);
    let l = mask.to_dense();
    let model = fit(x, y, &l, lambda, w0, h0, b0, opts);
    let complement = 1.0 - &l;
    let y_prime = complement * &model.b.dot(&model.h);
    Ok((model, y_prime))
}

/// Argmax binarization with flagged degenerate columns.
#[derive(Debug, Clone)]
pub struct Binarized {
    /// 0/1 matrix with exactly one 1 per column.
    pub matrix: Array2<f64>,
    /// Columns whose scores were all exactly zero (binarized to row 0).
    pub flagged: Vec<usize>,
}

/// Sets the largest entry of each column to 1 and all others to 0, ties
/// to the lowest row. All-zero columns map to row 0 and are flagged.
pub fn binarize_prediction(scores: &Array2<f64>) -> Binarized {
    let (p, k) = scores.dim();
    let mut matrix = Array2::<f64>::zeros((p, k));
    let mut flagged = Vec::new();
    for j in 0..k {
        let col = scores.column(j);
        let mut best = 0;
        for i in 0..p {
            if col[i] > col[best] {
                best = i;
            }
        }
        if col.iter().all(|&v| v == 0.0) {
            flagged.push(j);
        }
        matrix[[best, j]] = 1.0;
    }
    Binarized { matrix, flagged }
}

/// Labeling accuracy score: the fraction of columns whose predicted
/// class row holds a 1 in `y_true` (a prediction matching any one of a
/// document's labels counts as a success).
pub fn las(predicted: &Array2<f64>, y_true: &Array2<f64>) -> Result<f64> {
    if predicted.dim() != y_true.dim() {
        return Err(Error::ShapeMismatch(format!(
            "predicted is {:?} but truth is {:?}",
            predicted.dim(),
            y_true.dim()
        )));
    }
    let k = predicted.ncols();
    if k == 0 {
        return Err(Error::InvalidParameter("no columns to score".into()));
    }
    let mut successes = 0usize;
    for j in 0..k {
        let col = predicted.column(j);
        let ones: Vec<usize> = col
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1.0)
            .map(|(i, _)| i)
            .collect();
        if ones.len() != 1 || col.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::InvalidParameter(format!(
                "predicted column {j} is not one-hot"
            )));
        }
        if y_true[[ones[0], j]] == 1.0 {
            successes += 1;
        }
    }
    Ok(successes as f64 / k as f64)
}

/// A seed-deterministic uniformly random column split.
///
/// `train` holds `round(fraction * n)` ascending column indices; `test`
/// holds the rest. Use [`TrainTestSplit::mask`] for the semi-supervised
/// route and [`TrainTestSplit::select`] for physical splits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainTestSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl TrainTestSplit {
    /// Mask marking train columns known and test columns unknown.
    pub fn mask(&self, classes: usize) -> MaskMatrix {
        let n = self.train.len() + self.test.len();
        let mut known = vec![false; n];
        for &j in &self.train {
            known[j] = true;
        }
        MaskMatrix::new(known, classes)
    }

    /// Copies the given columns out of a matrix.
    pub fn select(matrix: &Array2<f64>, indices: &[usize]) -> Array2<f64> {
        matrix.select(Axis(1), indices)
    }
}

/// Splits `n` columns at `fraction` train share, uniformly at random and
/// deterministic for the seed.
pub fn split_train_test(n: usize, fraction: f64, seed: u64) -> Result<TrainTestSplit> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "split fraction must be in (0,1), got {fraction}"
        )));
    }
    let m = (fraction * n as f64).round() as usize;
    if m == 0 || m >= n {
        return Err(Error::EmptySplit(format!(
            "fraction {fraction} of {n} columns leaves an empty side"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let mut train: Vec<usize> = indices[..m].to_vec();
    let mut test: Vec<usize> = indices[m..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(TrainTestSplit { train, test })
}
