//! Frequency tables, percentage deltas and Welch's two-sample t-test.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::label::{Label, Level, Motive, LABEL_COUNT};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("need at least 2 values, got {0}")]
    TooFew(usize),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("percentage delta undefined for a zero baseline")]
    ZeroBaseline,
    #[error("both samples have zero variance and equal means")]
    Degenerate,
    #[error("frequency table over no observations")]
    Empty,
}

// ---------------------------------------------------------------------------
// Special functions

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Remainder of Stirling's series, `ln Γ(x) - [(x-½)ln x - x + ½ln 2π]`.
/// Accurate to double precision for `x >= 20`.
fn stirling_remainder(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        - r2 * (1.0 / 360.0
            - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 * (1.0 / 1188.0)))))
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x >= 20.0 {
        return (x - 0.5) * libm::log(x) - x + 0.5 * libm::log(2.0 * PI) + stirling_remainder(x);
    }
    if x < 0.5 {
        // reflection
        return libm::log(PI / libm::sin(PI * x).abs()) - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * libm::log(2.0 * PI) + (x + 0.5) * libm::log(t) - t + libm::log(sum)
}

/// `ln Γ(x + h) - ln Γ(x)` without cancellation for large `x`.
fn ln_gamma_ratio(x: f64, h: f64) -> f64 {
    if x < 20.0 {
        return ln_gamma(x + h) - ln_gamma(x);
    }
    (x - 0.5) * libm::log1p(h / x) + h * libm::log(x + h) - h + stirling_remainder(x + h)
        - stirling_remainder(x)
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    let (small, large) = if a < b { (a, b) } else { (b, a) };
    ln_gamma(small) - ln_gamma_ratio(large, small)
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 100_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// `I_x(a, b)` given both `x` and `y = 1 - x`, so callers can pass a
/// complement computed without cancellation.
fn inc_beta_xy(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * libm::log(x) + b * libm::log(y) - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        libm::exp(ln_front) * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - libm::exp(ln_front) * beta_continued_fraction(b, a, y) / b
    }
}

/// Regularized incomplete beta function `I_x(a, b)` for `a, b > 0` and
/// `x` in `[0, 1]`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    inc_beta_xy(a, b, x, 1.0 - x)
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom:
/// `I_{df/(df+t²)}(df/2, 1/2)`.
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() || df.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let t2 = t * t;
    let denom = df + t2;
    inc_beta_xy(0.5 * df, 0.5, df / denom, t2 / denom).clamp(0.0, 1.0)
}

/// CDF of Student's t distribution.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    let tail = 0.5 * student_t_two_sided_p(t, df);
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

// ---------------------------------------------------------------------------
// Summary statistics and the t-test

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub sd: f64,
    pub n: usize,
}

impl SummaryStats {
    pub fn new(mean: f64, sd: f64, n: usize) -> Result<Self, StatsError> {
        if n < 2 {
            return Err(StatsError::TooFew(n));
        }
        if !mean.is_finite() || !sd.is_finite() {
            return Err(StatsError::NonFinite);
        }
        Ok(SummaryStats {
            mean,
            sd: sd.abs(),
            n,
        })
    }

    /// Statistics of the values multiplied by `c`.
    pub fn scaled(self, c: f64) -> Self {
        SummaryStats {
            mean: self.mean * c,
            sd: self.sd * c.abs(),
            n: self.n,
        }
    }
}

/// Mean and sample standard deviation via Welford's update.
pub fn summarize(values: &[f64]) -> Result<SummaryStats, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFew(values.len()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = m2 / (values.len() - 1) as f64;
    Ok(SummaryStats {
        mean,
        sd: libm::sqrt(var.max(0.0)),
        n: values.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TTestResult {
    /// `(b.mean − a.mean) / se`.
    pub t: f64,
    pub df: f64,
    pub p_two_sided: f64,
    pub stars: &'static str,
    /// Both variances were zero with different means; `p` is 0 by
    /// convention and `t` is infinite.
    pub zero_variance: bool,
}

/// `"***"` for p < .01, `"*"` for .01 ≤ p < .05, empty otherwise.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// Welch's unequal-variance two-sample t-test, sample `b` against `a`.
pub fn welch_t_test(a: &SummaryStats, b: &SummaryStats) -> Result<TTestResult, StatsError> {
    let va = a.sd * a.sd / a.n as f64;
    let vb = b.sd * b.sd / b.n as f64;
    let diff = b.mean - a.mean;
    if va + vb == 0.0 {
        if diff == 0.0 {
            return Err(StatsError::Degenerate);
        }
        return Ok(TTestResult {
            t: f64::INFINITY.copysign(diff),
            df: (a.n + b.n - 2) as f64,
            p_two_sided: 0.0,
            stars: significance_stars(0.0),
            zero_variance: true,
        });
    }
    let t = diff / libm::sqrt(va + vb);
    let df = (va + vb) * (va + vb)
        / (va * va / (a.n - 1) as f64 + vb * vb / (b.n - 1) as f64);
    let p = student_t_two_sided_p(t, df);
    Ok(TTestResult {
        t,
        df,
        p_two_sided: p,
        stars: significance_stars(p),
        zero_variance: false,
    })
}

/// Relative change in percent, `100 · (after − before) / before`.
pub fn pct_delta(before: f64, after: f64) -> Result<f64, StatsError> {
    if before == 0.0 {
        return Err(StatsError::ZeroBaseline);
    }
    Ok(100.0 * (after - before) / before)
}

// ---------------------------------------------------------------------------
// Frequency tables

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Label,
    Motive,
    Level,
}

impl GroupBy {
    pub fn key_count(self) -> usize {
        match self {
            GroupBy::Label => LABEL_COUNT,
            GroupBy::Motive => Motive::COUNT,
            GroupBy::Level => Level::COUNT,
        }
    }

    pub fn key_of(self, label: Label) -> usize {
        match self {
            GroupBy::Label => label.index(),
            GroupBy::Motive => label.motive.index(),
            GroupBy::Level => usize::from(label.level.get()),
        }
    }

    pub fn key_name(self, key: usize) -> String {
        match self {
            GroupBy::Label => Label::from_index(key).map_or_else(String::new, |l| l.to_string()),
            GroupBy::Motive => Motive::from_index(key)
                .map_or_else(String::new, |m| m.code().to_string()),
            GroupBy::Level => key.to_string(),
        }
    }
}

/// Counts over every key of the grouping, including zero counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    pub group_by: GroupBy,
    pub counts: Vec<usize>,
    pub total: usize,
}

impl FrequencyTable {
    pub fn percentage(&self, key: usize) -> f64 {
        100.0 * self.counts[key] as f64 / self.total as f64
    }

    pub fn percentages(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|k| self.percentage(k)).collect()
    }

    /// `(key name, count, percentage)` in key order.
    pub fn entries(&self) -> impl Iterator<Item = (String, usize, f64)> + '_ {
        (0..self.counts.len()).map(|k| (self.group_by.key_name(k), self.counts[k], self.percentage(k)))
    }
}

pub fn frequency_table<I>(labels: I, group_by: GroupBy) -> Result<FrequencyTable, StatsError>
where
    I: IntoIterator<Item = Label>,
{
    let mut counts = vec![0usize; group_by.key_count()];
    let mut total = 0;
    for l in labels {
        counts[group_by.key_of(l)] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(StatsError::Empty);
    }
    Ok(FrequencyTable {
        group_by,
        counts,
        total,
    })
}
