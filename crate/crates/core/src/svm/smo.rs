//! Sequential minimal optimization on the C-SVM dual.
//!
//! Minimizes `1/2 a'Qa - sum(a)` subject to `0 <= a_i <= C` and `y'a = 0`,
//! where `Q_ij = y_i y_j K(x_i, x_j)`. Each iteration picks the maximal
//! violating pair and solves the two-variable subproblem analytically.
//! Training stops once the violation gap `m(a) - M(a)` drops to `tol`,
//! which bounds every KKT residual `y_i f(x_i) - 1` by `tol`.

use super::{check_dims, standardize_fit, Kernel, LabeledSample, SvmModel};
use crate::error::{Error, Result};

/// Kernel matrices up to this many entries are precomputed.
const DENSE_LIMIT: usize = 40_000_000;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainParams {
    pub kernel: Kernel,
    pub c: f64,
    pub tol: f64,
    pub max_iterations: usize,
}

impl TrainParams {
    pub fn new(kernel: Kernel, c: f64) -> Self {
        Self {
            kernel,
            c,
            tol: 1e-3,
            max_iterations: 100_000,
        }
    }
}

/// A trained model plus solver diagnostics.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub model: SvmModel,
    /// Dual variables, one per training sample (unsigned).
    pub alphas: Vec<f64>,
    pub iterations: usize,
    /// Final violation gap `m(a) - M(a)`.
    pub gap: f64,
}

enum Gram {
    Dense { n: usize, k: Vec<f64> },
    OnDemand { kernel: Kernel, x: Vec<Vec<f64>> },
}

impl Gram {
    fn new(kernel: Kernel, x: Vec<Vec<f64>>) -> Self {
        let n = x.len();
        if n * n <= DENSE_LIMIT {
            let mut k = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = kernel.eval(&x[i], &x[j]);
                    k[i * n + j] = v;
                    k[j * n + i] = v;
                }
            }
            Gram::Dense { n, k }
        } else {
            Gram::OnDemand { kernel, x }
        }
    }

    fn row<'a>(&'a self, i: usize, scratch: &'a mut Vec<f64>) -> &'a [f64] {
        match self {
            Gram::Dense { n, k } => &k[i * n..(i + 1) * n],
            Gram::OnDemand { kernel, x } => {
                scratch.clear();
                scratch.extend(x.iter().map(|xj| kernel.eval(&x[i], xj)));
                scratch
            }
        }
    }

    fn diag(&self, i: usize) -> f64 {
        match self {
            Gram::Dense { n, k } => k[i * n + i],
            Gram::OnDemand { kernel, x } => kernel.eval(&x[i], &x[i]),
        }
    }
}

struct Violation {
    up: usize,
    low: usize,
    gap: f64,
    m_up: f64,
    m_low: f64,
}

fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

/// Maximal violating pair; ties resolve to the lowest index.
fn select_pair(y: &[f64], alpha: &[f64], grad: &[f64], c: f64) -> Violation {
    let mut up = usize::MAX;
    let mut low = usize::MAX;
    let mut m_up = f64::NEG_INFINITY;
    let mut m_low = f64::INFINITY;
    for t in 0..y.len() {
        let v = -y[t] * grad[t];
        if in_up(y[t], alpha[t], c) && v > m_up {
            m_up = v;
            up = t;
        }
        if in_low(y[t], alpha[t], c) && v < m_low {
            m_low = v;
            low = t;
        }
    }
    Violation {
        up,
        low,
        gap: m_up - m_low,
        m_up,
        m_low,
    }
}

/// Trains an SVM and returns the model alone.
pub fn train(samples: &[LabeledSample], kernel: Kernel, c: f64, tol: f64) -> Result<SvmModel> {
    let params = TrainParams {
        tol,
        ..TrainParams::new(kernel, c)
    };
    train_detailed(samples, &params).map(|r| r.model)
}

pub fn train_detailed(samples: &[LabeledSample], params: &TrainParams) -> Result<TrainReport> {
    let c = params.c;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidConfig(format!("C must be positive, got {c}")));
    }
    if !(params.tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be positive, got {}",
            params.tol
        )));
    }
    if let Kernel::Rbf { gamma } = params.kernel {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!("gamma must be positive, got {gamma}")));
        }
    }
    let dims = check_dims(samples)?;
    let positives = samples.iter().filter(|s| s.label.is_tv()).count();
    if positives == 0 || positives == samples.len() {
        return Err(Error::DegenerateTraining(
            "training set must contain both TV and non-TV samples".into(),
        ));
    }

    let standardization = standardize_fit(samples)?;
    let x: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| standardization.apply(&s.features))
        .collect();
    let y: Vec<f64> = samples.iter().map(|s| s.label.sign()).collect();
    let n = samples.len();
    let gram = Gram::new(params.kernel, x.clone());
    let diag: Vec<f64> = (0..n).map(|i| gram.diag(i)).collect();

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut scratch_i = Vec::new();
    let mut scratch_j = Vec::new();
    let mut iterations = 0;

    let violation = loop {
        let v = select_pair(&y, &alpha, &grad, c);
        if v.gap <= params.tol {
            break v;
        }
        if iterations >= params.max_iterations {
            return Err(Error::Convergence {
                iterations,
                violation: v.gap,
            });
        }
        iterations += 1;

        let (i, j) = (v.up, v.low);
        let k_i = gram.row(i, &mut scratch_i);
        let k_j = gram.row(j, &mut scratch_j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (yi, yj) = (y[i], y[j]);
        let quad = (diag[i] + diag[j] - 2.0 * k_i[j]).max(TAU);

        if yi != yj {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (yi * k_i[t] * di + yj * k_j[t] * dj);
        }
    };

    // Bias: mean over free vectors, else the middle of the feasible interval.
    let free: Vec<f64> = (0..n)
        .filter(|&t| alpha[t] > 0.0 && alpha[t] < c)
        .map(|t| -y[t] * grad[t])
        .collect();
    let bias = if free.is_empty() {
        (violation.m_up + violation.m_low) / 2.0
    } else {
        free.iter().sum::<f64>() / free.len() as f64
    };

    let (support_vectors, alphas): (Vec<_>, Vec<_>) = (0..n)
        .filter(|&t| alpha[t] > 0.0)
        .map(|t| (x[t].clone(), alpha[t] * y[t]))
        .unzip();

    Ok(TrainReport {
        model: SvmModel {
            kernel: params.kernel,
            c,
            support_vectors,
            alphas,
            bias,
            standardization,
            feature_columns: (0..dims).collect(),
        },
        alphas: alpha,
        iterations,
        gap: violation.gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svm::Label;

    fn sample(x: &[f64], tv: bool) -> LabeledSample {
        LabeledSample::new(x.to_vec(), Label::from_bool(tv))
    }

    #[test]
    fn symmetric_pair_splits_at_zero() {
        let data = [sample(&[-1.0], false), sample(&[1.0], true)];
        let report = train_detailed(&data, &TrainParams::new(Kernel::Linear, 1e3)).unwrap();
        let m = &report.model;
        assert_eq!(m.support_vectors.len(), 2);
        assert!((report.alphas[0] - report.alphas[1]).abs() < 1e-12);
        assert!(m.decision_value(&[0.0]).unwrap().abs() < 1e-9);
        assert!((m.decision_value(&[1.0]).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rbf_separates_xor() {
        let data = [
            sample(&[0.0, 0.0], false),
            sample(&[1.0, 1.0], false),
            sample(&[0.0, 1.0], true),
            sample(&[1.0, 0.0], true),
        ];
        let m = train(&data, Kernel::Rbf { gamma: 1.0 }, 10.0, 1e-3).unwrap();
        for s in &data {
            assert_eq!(m.predict(&s.features).unwrap(), s.label);
        }
    }

    #[test]
    fn training_errors() {
        let one_class = [sample(&[0.0], true), sample(&[1.0], true)];
        assert!(matches!(
            train(&one_class, Kernel::Linear, 1.0, 1e-3),
            Err(Error::DegenerateTraining(_))
        ));
        let ok = [sample(&[0.0], true), sample(&[1.0], false)];
        assert!(matches!(
            train(&ok, Kernel::Linear, 0.0, 1e-3),
            Err(Error::InvalidConfig(_))
        ));
        let ragged = [sample(&[0.0], true), sample(&[1.0, 2.0], false)];
        assert!(matches!(train(&ragged, Kernel::Linear, 1.0, 1e-3), Err(Error::Shape(_))));
    }

    #[test]
    fn iteration_cap_reports_violation() {
        let data: Vec<_> = (0..40)
            .map(|i| sample(&[(i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()], i % 3 == 0))
            .collect();
        let params = TrainParams {
            max_iterations: 1,
            ..TrainParams::new(Kernel::Rbf { gamma: 2.0 }, 100.0)
        };
        match train_detailed(&data, &params) {
            Err(Error::Convergence { iterations, violation }) => {
                assert_eq!(iterations, 1);
                assert!(violation > params.tol);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }
}
