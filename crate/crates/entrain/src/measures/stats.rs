//! Paired t-test, Pearson correlation, and strength banding.
//!
//! Sample (n−1) standard deviation throughout. Two-sided p-values come from
//! the Student's t distribution.

use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use super::{Direction, Label, Strength};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatResult {
    /// t statistic (or the t transform of r for correlations).
    pub statistic: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub df: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatError {
    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("degenerate pairs: all differences are equal")]
    DegeneratePairs,
    #[error("zero variance in input sequence")]
    ZeroVariance,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n−1 denominator).
pub fn sample_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() as f64 - 1.0)).sqrt()
}

fn two_sided_p(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    2.0 * dist.sf(t.abs())
}

/// Paired Student's t-test on equal-length sequences.
///
/// t = mean(d) / (sd(d)/√n) with d = a − b and sample sd; p is two-sided
/// with n−1 degrees of freedom. All-equal differences (including a constant
/// shift) are degenerate and rejected.
pub fn paired_ttest(a: &[f64], b: &[f64]) -> Result<StatResult, StatError> {
    if a.len() != b.len() {
        return Err(StatError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(StatError::TooFewSamples { needed: 2, got: a.len() });
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let sd = sample_sd(&d);
    if sd == 0.0 {
        return Err(StatError::DegeneratePairs);
    }
    let n = d.len() as f64;
    let t = mean(&d) / (sd / n.sqrt());
    Ok(StatResult { statistic: t, p: two_sided_p(t, n - 1.0), df: n - 1.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub r: f64,
    /// Two-sided p via t = r·√((n−2)/(1−r²)) on n−2 df.
    pub p: f64,
    pub n: usize,
}

/// Pearson correlation coefficient with a two-sided significance test.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation, StatError> {
    if x.len() != y.len() {
        return Err(StatError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatError::TooFewSamples { needed: 3, got: x.len() });
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatError::ZeroVariance);
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let n = x.len() as f64;
    let p = if (1.0 - r * r) <= 0.0 {
        0.0
    } else {
        let t = r * ((n - 2.0) / (1.0 - r * r)).sqrt();
        two_sided_p(t, n - 2.0)
    };
    Ok(Correlation { r, p, n: x.len() })
}

/// Bands a correlation-like statistic in [−1, 1] by magnitude:
/// |r| ≥ 0.7 strong, 0.5 ≤ |r| < 0.7 moderate, 0 < |r| < 0.5 weak, with the
/// sign giving the direction; exactly 0 has no magnitude to label.
pub fn strength_label(r: f64) -> Label {
    let direction = if r > 0.0 { Direction::Positive } else { Direction::Negative };
    let strength = match r.abs() {
        m if m >= 0.7 => Strength::Strong,
        m if m >= 0.5 => Strength::Moderate,
        m if m > 0.0 => Strength::Weak,
        _ => return Label::NotSignificant,
    };
    Label::Graded { strength, direction }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_differences_are_degenerate() {
        // d = [1,1,1,1]
        let a = [2.0, 3.0, 4.0, 5.0];
        let b = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(paired_ttest(&a, &b), Err(StatError::DegeneratePairs));
    }

    #[test]
    fn constant_shift_is_degenerate() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(paired_ttest(&a, &b), Err(StatError::DegeneratePairs));
    }

    #[test]
    fn zero_mean_differences_give_t_zero_p_one() {
        // d = [-2, 0, 2]: mean 0 -> t = 0, p = 1
        let a = [1.0, 2.0, 3.0];
        let b = [3.0, 2.0, 1.0];
        let r = paired_ttest(&a, &b).unwrap();
        assert_abs_diff_eq!(r.statistic, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p, 1.0, epsilon = 1e-12);
        assert_eq!(r.df, 2.0);
    }

    #[test]
    fn known_t_value() {
        // d = [1, 2, 3, 4]: mean 2.5, sd = 1.2909944487..., n = 4
        // t = 2.5 / (sd/2) = 3.872983346207417
        let a = [2.0, 4.0, 6.0, 8.0];
        let b = [1.0, 2.0, 3.0, 4.0];
        let r = paired_ttest(&a, &b).unwrap();
        assert_abs_diff_eq!(r.statistic, 3.872983346207417, epsilon = 1e-9);
    }

    #[test]
    fn perfect_linear_correlation() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let c = pearson(&x, &y).unwrap();
        assert_abs_diff_eq!(c.r, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.p, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn perfect_anticorrelation() {
        let x = [1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        let c = pearson(&x, &y).unwrap();
        assert_abs_diff_eq!(c.r, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn hand_computed_r_and_p() {
        // x = [1,2,3,4], y = [1,3,2,4]:
        //   Σ(x−x̄)(y−ȳ) = 4, Σ(x−x̄)² = Σ(y−ȳ)² = 5 → r = 0.8
        //   t = 0.8·√(2/0.36), df = 2 → two-sided p = 1 − t/√(t²+2) = 0.2
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 3.0, 2.0, 4.0];
        let c = pearson(&x, &y).unwrap();
        assert_abs_diff_eq!(c.r, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(c.p, 0.2, epsilon = 1e-9);
    }

    #[test]
    fn zero_variance_rejected() {
        let x = [1.0, 1.0, 1.0];
        let y = [1.0, 2.0, 3.0];
        assert_eq!(pearson(&x, &y), Err(StatError::ZeroVariance));
    }

    #[test]
    fn strength_bands_at_boundaries() {
        assert_eq!(
            strength_label(0.7),
            Label::Graded { strength: Strength::Strong, direction: Direction::Positive }
        );
        assert_eq!(
            strength_label(-0.5),
            Label::Graded { strength: Strength::Moderate, direction: Direction::Negative }
        );
        assert_eq!(
            strength_label(0.49999),
            Label::Graded { strength: Strength::Weak, direction: Direction::Positive }
        );
        assert_eq!(
            strength_label(-0.7),
            Label::Graded { strength: Strength::Strong, direction: Direction::Negative }
        );
        assert_eq!(strength_label(0.0), Label::NotSignificant);
    }
}
