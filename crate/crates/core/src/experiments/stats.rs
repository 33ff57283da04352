use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alternative {
    /// Mean difference is below zero.
    Less,
    /// Mean difference is above zero.
    Greater,
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Linearly interpolated percentile (`q` in `[0, 100]`) of unsorted data.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = (q / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// One-sided paired t-test of `mean(diffs) = 0`.
///
/// Returns `None` with fewer than two samples. When the differences have no
/// spread the statistic is undefined; the p-value is then 0 if the mean lies
/// strictly on the alternative's side and 1 otherwise.
pub fn paired_t_test(diffs: &[f64], alternative: Alternative) -> Option<f64> {
    let n = diffs.len();
    if n < 2 {
        return None;
    }
    let m = mean(diffs);
    let var = diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var <= 0.0 || !var.is_finite() {
        let favours = match alternative {
            Alternative::Less => m < 0.0,
            Alternative::Greater => m > 0.0,
        };
        return Some(if favours { 0.0 } else { 1.0 });
    }
    let t = m / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("dof >= 1");
    Some(match alternative {
        Alternative::Less => dist.cdf(t),
        Alternative::Greater => dist.sf(t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_interpolates() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 100.0), 4.0);
        assert_eq!(percentile(&v, 50.0), 2.5);
        assert_eq!(percentile(&v, 25.0), 1.75);
    }

    #[test]
    fn degenerate_t_test() {
        assert_eq!(paired_t_test(&[0.0, 0.0, 0.0], Alternative::Less), Some(1.0));
        assert_eq!(paired_t_test(&[-1.0, -1.0], Alternative::Less), Some(0.0));
        assert_eq!(paired_t_test(&[-1.0, -1.0], Alternative::Greater), Some(1.0));
        assert_eq!(paired_t_test(&[1.0], Alternative::Less), None);
    }

    #[test]
    fn t_test_sides_sum_to_one() {
        let d = [0.3, -0.1, 0.5, 0.2, -0.4, 0.9];
        let less = paired_t_test(&d, Alternative::Less).unwrap();
        let greater = paired_t_test(&d, Alternative::Greater).unwrap();
        assert!((less + greater - 1.0).abs() < 1e-12);
        assert!(greater < 0.5);
    }
}
