use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{evaluate, EvalReport, Selection};
use crate::dataset::{EvalSet, SplitDataset};
use crate::error::{Error, Result};
use crate::model::{train, TrainConfig};
use crate::recommend::StrategyConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    LearningRate,
    Dim,
    Epochs,
    SubsampleRho,
    Negatives,
    NegExponent,
    Regularization,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::LearningRate => "learning_rate",
            SweepParameter::Dim => "dim",
            SweepParameter::Epochs => "epochs",
            SweepParameter::SubsampleRho => "subsample_rho",
            SweepParameter::Negatives => "negatives",
            SweepParameter::NegExponent => "neg_exponent",
            SweepParameter::Regularization => "regularization",
        }
    }

    /// Value lists studied for each parameter in one-at-a-time sensitivity
    /// analyses of this model.
    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepParameter::LearningRate => vec![0.0025, 0.0075, 0.025, 0.075, 0.25, 0.75],
            SweepParameter::Dim => (1..=12).map(|k| 25.0 * k as f64).collect(),
            SweepParameter::Epochs => vec![5.0, 10.0, 25.0, 50.0, 100.0, 150.0, 200.0],
            SweepParameter::SubsampleRho => (1..=6).rev().map(|k| 10f64.powi(-k)).collect(),
            SweepParameter::Negatives => vec![3.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            SweepParameter::NegExponent => (0..=8).map(|k| -1.0 + 0.25 * k as f64).collect(),
            SweepParameter::Regularization => {
                let mut v: Vec<f64> = (1..=6).rev().map(|k| 10f64.powi(-k)).collect();
                v.push(0.0);
                v
            }
        }
    }

    pub fn apply(self, base: &TrainConfig, value: f64) -> Result<TrainConfig> {
        let integer = || {
            if value.fract() == 0.0 && value >= 0.0 && value.is_finite() {
                Ok(value as usize)
            } else {
                Err(Error::config(format!("{} takes non-negative integers, got {value}", self.name())))
            }
        };
        let mut cfg = base.clone();
        match self {
            SweepParameter::LearningRate => cfg.learning_rate = value,
            SweepParameter::Dim => cfg.dim = integer()?,
            SweepParameter::Epochs => cfg.epochs = integer()?,
            SweepParameter::SubsampleRho => cfg.subsample_rho = value,
            SweepParameter::Negatives => cfg.negatives = integer()?,
            SweepParameter::NegExponent => cfg.neg_exponent = value,
            SweepParameter::Regularization => cfg.regularization = value,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").to_ascii_lowercase().as_str() {
            "alpha" | "learning_rate" | "lr" => SweepParameter::LearningRate,
            "m" | "dim" => SweepParameter::Dim,
            "c" | "epochs" => SweepParameter::Epochs,
            "rho" | "subsample_rho" => SweepParameter::SubsampleRho,
            "g" | "negatives" => SweepParameter::Negatives,
            "gamma" | "neg_exponent" => SweepParameter::NegExponent,
            "lambda" | "regularization" => SweepParameter::Regularization,
            _ => return Err(Error::config(format!("unknown sweep parameter {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: std::result::Result<EvalReport, String>,
}

/// One train-and-evaluate per value, every other setting taken from `fixed`.
/// Failures are recorded per point.
pub fn sensitivity_sweep(
    split: &SplitDataset,
    parameter: SweepParameter,
    values: &[f64],
    fixed: &TrainConfig,
    strategy: &StrategyConfig,
    eval_set: EvalSet,
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::config("sweep needs at least one value"));
    }
    strategy.validate()?;
    Ok(values
        .iter()
        .map(|&value| {
            let outcome = parameter
                .apply(fixed, value)
                .and_then(|cfg| train(&split.train, &cfg))
                .and_then(|out| evaluate(split, &out.model, strategy, eval_set))
                .map_err(|e| e.to_string());
            SweepPoint { value, outcome }
        })
        .collect())
}

/// Two-column `value <tab> metric` curve; failed points carry an error column.
pub fn write_sweep_curve<W: Write>(
    parameter: SweepParameter,
    points: &[SweepPoint],
    selection: Selection,
    mut sink: W,
) -> Result<()> {
    writeln!(sink, "{parameter}\t{selection}\terror")?;
    for p in points {
        match &p.outcome {
            Ok(r) => writeln!(sink, "{}\t{:.6}\t", p.value, r.value(selection))?,
            Err(e) => writeln!(sink, "{}\t\t{}", p.value, e.replace(['\t', '\n'], " "))?,
        }
    }
    sink.flush()?;
    Ok(())
}
