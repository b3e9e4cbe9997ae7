//! Seeded synthetic labeled corpora with known class signatures, plus the
//! brute-force oracles used to cross-check the optimized code paths.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::embeddings::EmbeddingTable;
use crate::label::Label;
use crate::rng::SeededRng;
use crate::textprep::DEFAULT_MAX_LEN;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("label marginals sum to {0}, expected 1")]
    Marginals(f64),
    #[error("marker {0:?} belongs to more than one class or is also a distractor")]
    MarkerOverlap(String),
    #[error("class {0} has no marker tokens")]
    NoMarkers(Label),
    #[error("duplicate class {0}")]
    DuplicateClass(Label),
    #[error("invalid length range {0}..={1}")]
    Length(usize, usize),
    #[error("instance count must be positive")]
    Count,
    #[error("no classes")]
    NoClasses,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthClass {
    pub label: Label,
    pub markers: Vec<String>,
    /// Target share of instances.
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    classes: Vec<SynthClass>,
    distractors: Vec<String>,
    /// Inclusive token-count range per instance.
    length: (usize, usize),
    seed: u64,
    marker_owner: BTreeMap<String, Label>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthInstance {
    pub tokens: Vec<String>,
    pub label: Label,
}

impl SynthInstance {
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Lowercase ASCII word for `index` (bijective base 26) behind `prefix`.
/// The prefixes used here keep generated words clear of German stop words.
pub fn invented_word(prefix: &str, index: usize) -> String {
    let mut letters = Vec::new();
    let mut n = index + 1;
    while n > 0 {
        n -= 1;
        letters.push(b'a' + (n % 26) as u8);
        n /= 26;
    }
    letters.reverse();
    format!("{prefix}{}", String::from_utf8(letters).expect("ascii"))
}

impl SynthSpec {
    pub fn new(
        classes: Vec<SynthClass>,
        distractors: Vec<String>,
        length: (usize, usize),
        seed: u64,
    ) -> Result<Self, SynthError> {
        if classes.is_empty() {
            return Err(SynthError::NoClasses);
        }
        if length.0 == 0 || length.0 > length.1 {
            return Err(SynthError::Length(length.0, length.1));
        }
        let total: f64 = classes.iter().map(|c| c.share).sum();
        if (total - 1.0).abs() > 1e-9 || classes.iter().any(|c| c.share < 0.0) {
            return Err(SynthError::Marginals(total));
        }
        let mut marker_owner = BTreeMap::new();
        for c in &classes {
            if c.markers.is_empty() {
                return Err(SynthError::NoMarkers(c.label));
            }
            if classes.iter().filter(|o| o.label == c.label).count() > 1 {
                return Err(SynthError::DuplicateClass(c.label));
            }
            for m in &c.markers {
                if marker_owner.insert(m.clone(), c.label).is_some() {
                    return Err(SynthError::MarkerOverlap(m.clone()));
                }
            }
        }
        if let Some(d) = distractors.iter().find(|d| marker_owner.contains_key(*d)) {
            return Err(SynthError::MarkerOverlap(d.clone()));
        }
        Ok(SynthSpec {
            classes,
            distractors,
            length,
            seed,
            marker_owner,
        })
    }

    /// Uniform marginals over `labels`, `markers_per_class` invented markers
    /// each (prefix `zq`) and `distractor_count` invented distractors
    /// (prefix `xv`).
    pub fn uniform(
        labels: &[Label],
        markers_per_class: usize,
        distractor_count: usize,
        length: (usize, usize),
        seed: u64,
    ) -> Result<Self, SynthError> {
        let share = 1.0 / labels.len().max(1) as f64;
        let classes = labels
            .iter()
            .enumerate()
            .map(|(ci, &label)| SynthClass {
                label,
                markers: (0..markers_per_class)
                    .map(|j| invented_word("zq", ci * markers_per_class + j))
                    .collect(),
                share,
            })
            .collect();
        let distractors = (0..distractor_count).map(|i| invented_word("xv", i)).collect();
        Self::new(classes, distractors, length, seed)
    }

    pub fn classes(&self) -> &[SynthClass] {
        &self.classes
    }

    pub fn distractors(&self) -> &[String] {
        &self.distractors
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Class owning `token`, if it is a marker.
    pub fn marker_label(&self, token: &str) -> Option<Label> {
        self.marker_owner.get(token).copied()
    }

    /// Embedding table with one independent random vector per marker and
    /// distractor, components uniform in (−1, 1).
    pub fn embeddings(&self, dim: usize, seed: u64) -> EmbeddingTable {
        let mut rng = SeededRng::new(seed);
        let words = self
            .classes
            .iter()
            .flat_map(|c| c.markers.iter())
            .chain(&self.distractors);
        let entries: Vec<(String, Vec<f64>)> = words
            .map(|w| (w.clone(), (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect()))
            .collect();
        EmbeddingTable::from_entries(dim, entries).expect("spec has at least one marker")
    }
}

/// Draws `n` instances. Class counts follow the marginals exactly
/// (largest-remainder rounding) and appear in shuffled order. Each instance
/// holds exactly one marker of its class at a uniform position among
/// distractors.
pub fn generate(spec: &SynthSpec, n: usize) -> Result<Vec<SynthInstance>, SynthError> {
    if n == 0 {
        return Err(SynthError::Count);
    }
    let mut rng = SeededRng::new(spec.seed);
    let quotas: Vec<f64> = spec.classes.iter().map(|c| c.share * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| libm::floor(*q) as usize).collect();
    let mut remainder_order: Vec<usize> = (0..counts.len()).collect();
    remainder_order.sort_by(|&i, &j| {
        let ri = quotas[i] - counts[i] as f64;
        let rj = quotas[j] - counts[j] as f64;
        rj.partial_cmp(&ri).unwrap_or(core::cmp::Ordering::Equal).then(i.cmp(&j))
    });
    let assigned: usize = counts.iter().sum();
    for &i in remainder_order.iter().take(n - assigned) {
        counts[i] += 1;
    }
    let mut labels: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(ci, &k)| core::iter::repeat_n(ci, k))
        .collect();
    rng.shuffle(&mut labels);

    let (lo, hi) = spec.length;
    Ok(labels
        .into_iter()
        .map(|ci| {
            let class = &spec.classes[ci];
            let len = lo + rng.below(hi - lo + 1);
            let mut tokens: Vec<String> = (0..len - 1)
                .map(|_| {
                    if spec.distractors.is_empty() {
                        class.markers[rng.below(class.markers.len())].clone()
                    } else {
                        spec.distractors[rng.below(spec.distractors.len())].clone()
                    }
                })
                .collect();
            let marker = class.markers[rng.below(class.markers.len())].clone();
            tokens.insert(rng.below(len), marker);
            SynthInstance {
                tokens,
                label: class.label,
            }
        })
        .collect())
}

/// Label of the first marker among the first `max_len` tokens, or the zero
/// label when there is none.
pub fn oracle_classify<S: AsRef<str>>(tokens: &[S], spec: &SynthSpec, max_len: usize) -> Label {
    tokens
        .iter()
        .take(max_len)
        .find_map(|t| spec.marker_label(t.as_ref()))
        .unwrap_or(Label::ZERO)
}

/// [`oracle_classify`] with the default 20-token window.
pub fn oracle_label<S: AsRef<str>>(tokens: &[S], spec: &SynthSpec) -> Label {
    oracle_classify(tokens, spec, DEFAULT_MAX_LEN)
}

/// Straightforward reference implementations, kept separate from the code
/// they check.
pub mod oracles {
    use alloc::vec::Vec;
    use core::f64::consts::FRAC_PI_2;

    use crate::lexicon::{Lexicon, Pattern};
    use crate::model::ModelParams;

    /// Per-pattern scan: category indices the token matches.
    pub fn naive_matching_categories(token: &str, lexicon: &Lexicon) -> Vec<usize> {
        lexicon
            .categories()
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                c.patterns.iter().any(|p| match p {
                    Pattern::Literal(w) => token == w,
                    Pattern::Prefix(stem) => {
                        token.len() >= stem.len() && token.as_bytes()[..stem.len()] == *stem.as_bytes()
                    }
                })
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Nested-loop document score: matched counts per category.
    pub fn naive_category_counts<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> Vec<usize> {
        let mut counts = alloc::vec![0; lexicon.categories().len()];
        for t in tokens {
            for c in naive_matching_categories(t.as_ref(), lexicon) {
                counts[c] += 1;
            }
        }
        counts
    }

    /// Two-pass mean and sample standard deviation.
    pub fn two_pass_mean_sd(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (mean, libm::sqrt(ss / (n - 1.0)))
    }

    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    #[allow(clippy::too_many_arguments)]
    fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }

    /// Adaptive Simpson quadrature of `f` over `[a, b]`.
    pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        let fa = f(a);
        let fb = f(b);
        let fm = f(0.5 * (a + b));
        let whole = simpson(a, b, fa, fm, fb);
        adaptive(&f, a, b, fa, fm, fb, whole, tol, 60)
    }

    /// Student t CDF by quadrature, for `df >= 1`.
    ///
    /// With `t = sqrt(df)·tan θ` the density becomes proportional to
    /// `cos^(df−1) θ` on `(−π/2, π/2)`, so the CDF is a ratio of two smooth
    /// integrals and needs no gamma function.
    pub fn t_cdf_quadrature(t: f64, df: f64) -> f64 {
        let kernel = |theta: f64| libm::exp((df - 1.0) * libm::log(libm::cos(theta).max(1e-300)));
        let theta = libm::atan(t / libm::sqrt(df));
        // split at the peak width so the narrow kernel of large df is resolved
        let width = (4.0 / libm::sqrt(df)).min(FRAC_PI_2);
        let half = integrate(kernel, 0.0, width, 1e-15) + if width < FRAC_PI_2 {
            integrate(kernel, width, FRAC_PI_2, 1e-15)
        } else {
            0.0
        };
        let part = if theta.abs() <= width {
            integrate(kernel, 0.0, theta.abs(), 1e-15)
        } else {
            integrate(kernel, 0.0, width, 1e-15) + integrate(kernel, width, theta.abs(), 1e-15)
        };
        0.5 + (part / (2.0 * half)).copysign(t)
    }

    /// Central differences of `loss` over every parameter, in
    /// [`ModelParams::flatten`] order.
    pub fn finite_difference_gradient(
        params: &ModelParams,
        loss: impl Fn(&ModelParams) -> f64,
        eps: f64,
    ) -> Vec<f64> {
        let base = params.flatten();
        let mut probe = params.clone();
        let mut flat = base.clone();
        (0..base.len())
            .map(|i| {
                flat[i] = base[i] + eps;
                probe.set_flat(&flat);
                let up = loss(&probe);
                flat[i] = base[i] - eps;
                probe.set_flat(&flat);
                let down = loss(&probe);
                flat[i] = base[i];
                (up - down) / (2.0 * eps)
            })
            .collect()
    }
}
