//! Analytic cost models, one per complexity result.

use anyhow::{bail, Result};
use jacobi_core::cost::{
    predict_block_sweep, predict_recursive, predict_svd_sweep, predict_words, recursive_exponent, ModelDims, Omega,
    WordModel,
};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredictArgs {
    pub n: f64,
    pub m: f64,
    pub b: f64,
    pub f: f64,
    pub omega: f64,
    pub mem: f64,
}

/// Model values with constants absorbed; compare ratios, not magnitudes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub theorem: String,
    pub n: f64,
    pub m: f64,
    pub b: f64,
    pub f: f64,
    pub omega: f64,
    pub mem: f64,
    pub flops: Option<f64>,
    pub words: Option<f64>,
    /// Exponent of `n` in the arithmetic model, where it has one.
    pub exponent: Option<f64>,
    pub formula: &'static str,
}

pub const THEOREMS: [&str; 7] = ["2.2", "3.2", "4.3", "5.1", "5.2", "5.3", "5.4"];

pub fn predict(theorem: &str, a: PredictArgs) -> Result<Prediction> {
    let omega = Omega::new(a.omega)?;
    let dims = ModelDims { m: a.m, n: a.n, b: a.b, f: a.f };
    let words = |kind| predict_words(kind, dims, a.mem, omega);
    let (flops, words, exponent, formula) = match theorem {
        "2.2" => (None, Some(words(WordModel::Scalar)?), None, "W = n^4 / M"),
        "3.2" => (
            Some(predict_block_sweep(a.n, a.b, omega)),
            Some(words(WordModel::Block)?),
            None,
            "F = n^2 b + n^3 b^(w-3), W = n^3 / b",
        ),
        "4.3" => (
            Some(predict_recursive(a.n, a.f, omega)),
            Some(words(WordModel::Recursive)?),
            Some(recursive_exponent(a.f, omega)),
            "F = n^(3(1-f)+w f), W = F / M^(w/2-1)",
        ),
        "5.1" => (Some(predict_svd_sweep(a.m, a.n, a.b, omega)), None, None, "F = m n^2 b^(w-3) + ceil(n/b)^2 G(2b)"),
        "5.2" => (None, Some(words(WordModel::SvdScalar)?), None, "W = m^2 n^2 / M"),
        "5.3" => (None, Some(words(WordModel::SvdBlock)?), None, "W = m n^2 / b"),
        "5.4" => (None, Some(words(WordModel::SvdLarge)?), None, "W = m n^2 b^(w-3) / M^(w/2-1) + ceil(n/b)^2 U(2b)"),
        other => bail!("unknown theorem {other:?}; expected one of {}", THEOREMS.join(", ")),
    };
    Ok(Prediction {
        theorem: theorem.to_string(),
        n: a.n,
        m: a.m,
        b: a.b,
        f: a.f,
        omega: a.omega,
        mem: a.mem,
        flops,
        words,
        exponent,
        formula,
    })
}
