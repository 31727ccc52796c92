use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::code::CodeParams;
use crate::error::{Error, Result};
use crate::geometry::{BoxplusMode, SubspaceIndex};

/// Default number of outer iterations per decoder invocation.
pub const DEFAULT_N_MAX: usize = 3;

/// Default exiting threshold when early stopping is switched on.
pub const DEFAULT_THETA: f64 = 0.05;

/// How the `np` kept projections are chosen out of the `n - 1` available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Selection {
    /// `i = t · ⌊(n-1)/np⌋ + 1` for `t = 0..np`.
    #[default]
    Stride,
    /// Uniformly random subsets, drawn from a generator seeded once per decode.
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyStop {
    pub theta: f64,
}

/// Everything that determines the behavior and complexity of the decoder.
///
/// The factor form keeps `⌈γ δ_itr^{j-1} δ_rec^{l-2} (n-1)⌉` projections at
/// iteration `j` of a decoder at recursion level (order) `l`. An explicit
/// schedule instead fixes the count per level and runs one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruningConfig {
    pub gamma: f64,
    pub delta_itr: f64,
    pub delta_rec: f64,
    pub n_max: usize,
    /// Projection counts for levels `r, r-1, ..., 2`.
    pub schedule: Option<Vec<usize>>,
    pub early_stop: Option<EarlyStop>,
    pub selection: Selection,
    pub boxplus: BoxplusMode,
}

impl Default for PruningConfig {
    fn default() -> Self {
        Self::factors(1.0, 1.0, 1.0)
    }
}

impl PruningConfig {
    pub fn factors(gamma: f64, delta_itr: f64, delta_rec: f64) -> Self {
        PruningConfig {
            gamma,
            delta_itr,
            delta_rec,
            n_max: DEFAULT_N_MAX,
            schedule: None,
            early_stop: None,
            selection: Selection::Stride,
            boxplus: BoxplusMode::Exact,
        }
    }

    /// Fixed projection counts for levels `r` down to `2`, single iteration.
    pub fn explicit(schedule: Vec<usize>) -> Self {
        PruningConfig {
            n_max: 1,
            schedule: Some(schedule),
            ..Self::default()
        }
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_early_stop(mut self, theta: f64) -> Self {
        self.early_stop = Some(EarlyStop { theta });
        self
    }

    pub fn with_selection(mut self, selection: Selection) -> Self {
        self.selection = selection;
        self
    }

    pub fn with_boxplus(mut self, mode: BoxplusMode) -> Self {
        self.boxplus = mode;
        self
    }

    /// Iterations actually run per invocation.
    pub fn iterations(&self) -> usize {
        if self.schedule.is_some() {
            1
        } else {
            self.n_max
        }
    }

    /// Checks the factor ranges and, if present, the schedule.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma", self.gamma),
            ("delta_itr", self.delta_itr),
            ("delta_rec", self.delta_rec),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::config(format!("{name} = {v} must lie in (0, 1]")));
            }
        }
        if self.n_max == 0 {
            return Err(Error::config("n_max must be at least 1"));
        }
        if let Some(schedule) = &self.schedule {
            if schedule.contains(&0) {
                return Err(Error::config("schedule entries must be positive"));
            }
        }
        if let Some(EarlyStop { theta }) = self.early_stop {
            if !(theta > 0.0 && theta.is_finite()) {
                return Err(Error::config(format!("theta = {theta} must be positive")));
            }
        }
        Ok(())
    }

    /// Validates against a particular code as well.
    pub fn validate_for(&self, params: CodeParams) -> Result<()> {
        self.validate()?;
        if params.r() == 0 {
            return Err(Error::config("RPA decoding needs order r ≥ 1"));
        }
        if let Some(schedule) = &self.schedule {
            let r = params.r() as usize;
            if schedule.len() != r - 1 {
                return Err(Error::config(format!(
                    "schedule has {} entries but {params} has {} projection levels",
                    schedule.len(),
                    r - 1
                )));
            }
            for (depth, &p) in schedule.iter().enumerate() {
                let available = (params.n() >> depth) - 1;
                if p > available {
                    return Err(Error::config(format!(
                        "schedule asks for {p} projections at level {} where only {available} exist",
                        r - depth
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `⌈x⌉` that ignores representation error just above an integer.
pub(crate) fn ceil_tolerant(x: f64) -> usize {
    (x - 1e-9 * x.abs().max(1.0)).ceil().max(0.0) as usize
}

/// Fraction of projections kept at iteration `j`, level `l`: `γ δ_itr^{j-1} δ_rec^{l-2}`.
pub fn delta(j: usize, l: u32, cfg: &PruningConfig) -> f64 {
    delta_with_gamma(j, l, cfg.gamma, cfg)
}

pub(crate) fn delta_with_gamma(j: usize, l: u32, gamma: f64, cfg: &PruningConfig) -> f64 {
    assert!(
        j >= 1 && l >= 2,
        "iteration starts at 1 and projection levels at 2"
    );
    gamma * cfg.delta_itr.powi(j as i32 - 1) * cfg.delta_rec.powi(l as i32 - 2)
}

/// Number of projections at iteration `j` of a level-`l` decoder on blocklength `n`.
pub fn num_projections(n: usize, j: usize, l: u32, cfg: &PruningConfig) -> usize {
    projections_with_gamma(n, j, l, cfg.gamma, cfg)
}

pub(crate) fn projections_with_gamma(
    n: usize,
    j: usize,
    l: u32,
    gamma: f64,
    cfg: &PruningConfig,
) -> usize {
    let available = n - 1;
    let np = match &cfg.schedule {
        Some(schedule) => schedule[schedule.len() + 1 - l as usize],
        None => ceil_tolerant(delta_with_gamma(j, l, gamma, cfg) * available as f64),
    };
    np.clamp(1, available)
}

/// Uniformly strided projection indices `t · ⌊(n-1)/np⌋ + 1`.
pub fn select_projection_indices(n: usize, np: usize) -> Result<Vec<SubspaceIndex>> {
    if n < 2 || np == 0 || np >= n {
        return Err(Error::param(format!(
            "cannot select {np} of the {} projections",
            n.saturating_sub(1)
        )));
    }
    let stride = (n - 1) / np;
    Ok((0..np)
        .map(|t| SubspaceIndex::new_unchecked(t * stride + 1))
        .collect())
}

/// FOD count of a decode without early stopping, by the same recursion the decoder runs.
pub fn analytic_fod_count(params: CodeParams, cfg: &PruningConfig) -> u64 {
    fn count(m: u32, r: u32, gamma: f64, cfg: &PruningConfig) -> u64 {
        if r <= 1 {
            return 1;
        }
        let n = 1usize << m;
        (1..=cfg.iterations())
            .map(|j| {
                let np = projections_with_gamma(n, j, r, gamma, cfg) as u64;
                let inner_gamma = gamma * cfg.delta_itr.powi(j as i32 - 1);
                np * count(m - 1, r - 1, inner_gamma, cfg)
            })
            .sum()
    }
    count(params.m(), params.r(), cfg.gamma, cfg)
}

/// The product formula `N_max^{r-1} Π_{i=1}^{r-1} (2^{m-i-1} - 1)` sometimes quoted
/// for unpruned RPA. It undercounts: the decoder actually runs
/// `2^{m-i+1} - 1` projections at the `i`-th level.
pub fn product_form_rpa_count(params: CodeParams, n_max: usize) -> u64 {
    let (m, r) = (params.m() as i64, params.r() as i64);
    let mut total = (n_max as u64).pow((r - 1).max(0) as u32);
    for i in 1..r {
        total *= ((1i64 << (m - i - 1).max(0)) - 1).max(0) as u64;
    }
    total
}

/// Single-sum product form of the pruned count, with the iteration decay
/// applied both to γ and inside Δ. Kept for comparison only; it undercounts
/// relative to [`analytic_fod_count`] as soon as `δ_itr < 1`.
pub fn product_form_mfp_count(params: CodeParams, cfg: &PruningConfig) -> u64 {
    let n = params.n() as f64;
    let r = params.r();
    (1..=cfg.n_max)
        .map(|j| {
            let gamma_j = cfg.gamma * cfg.delta_itr.powi(j as i32 - 1);
            (2..=r)
                .map(|l| {
                    let size = n / f64::from(1u32 << (r - l)) - 1.0;
                    ceil_tolerant(delta_with_gamma(j, l, gamma_j, cfg) * size) as u64
                })
                .product::<u64>()
        })
        .sum()
}

/// Parses `"a/b"` or a decimal number.
pub fn parse_factor(s: &str) -> Result<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| Error::param(format!("bad numerator in {s:?}")))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| Error::param(format!("bad denominator in {s:?}")))?;
            if den == 0.0 {
                return Err(Error::param(format!("zero denominator in {s:?}")));
            }
            num / den
        }
        None => s
            .parse()
            .map_err(|_| Error::param(format!("not a number: {s:?}")))?,
    };
    if !value.is_finite() {
        return Err(Error::param(format!("not finite: {s:?}")));
    }
    Ok(value)
}

/// Named decoder families expressible as pruning configurations.
#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    /// Every projection, every iteration: `(1, 1, 1)`.
    Rpa,
    /// A fixed fraction `q` of the projections: `(q, 1, 1)`.
    Srpa { q: f64 },
    /// Projections decay by `1/d` per iteration: `(1, 1/d, 1)`.
    RpaSch { d: f64 },
    Mfp {
        gamma: f64,
        delta_itr: f64,
        delta_rec: f64,
    },
}

impl Preset {
    pub fn config(&self) -> Result<PruningConfig> {
        let cfg = match *self {
            Preset::Rpa => PruningConfig::factors(1.0, 1.0, 1.0),
            Preset::Srpa { q } => {
                if !(q > 0.0 && q <= 1.0) {
                    return Err(Error::config(format!("srpa q = {q} must lie in (0, 1]")));
                }
                PruningConfig::factors(q, 1.0, 1.0)
            }
            Preset::RpaSch { d } => {
                if !(d >= 1.0 && d.is_finite()) {
                    return Err(Error::config(format!("rpa_sch d = {d} must be at least 1")));
                }
                PruningConfig::factors(1.0, 1.0 / d, 1.0)
            }
            Preset::Mfp {
                gamma,
                delta_itr,
                delta_rec,
            } => PruningConfig::factors(gamma, delta_itr, delta_rec),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Looks up a preset configuration; see [`Preset`] for the accepted forms.
pub fn preset(name: &str) -> Result<PruningConfig> {
    name.parse::<Preset>()?.config()
}

impl FromStr for Preset {
    type Err = Error;

    /// Accepts `rpa`, `srpa(q)`, `rpa_sch(d)` and `mfp(γ,δ_itr,δ_rec)`, with
    /// arguments as decimals or `a/b` fractions.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.split_once('(') {
            Some((name, rest)) => {
                let args = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::config(format!("unbalanced parentheses in {s:?}")))?;
                let args = args
                    .split(',')
                    .map(parse_factor)
                    .collect::<Result<Vec<_>>>()?;
                (name.trim(), args)
            }
            None => (s, Vec::new()),
        };
        let arity = |want: usize| {
            if args.len() == want {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "preset {name} takes {want} argument(s), got {}",
                    args.len()
                )))
            }
        };
        match name {
            "rpa" => arity(0).map(|_| Preset::Rpa),
            "srpa" => arity(1).map(|_| Preset::Srpa { q: args[0] }),
            "rpa_sch" => arity(1).map(|_| Preset::RpaSch { d: args[0] }),
            "mfp" => arity(3).map(|_| Preset::Mfp {
                gamma: args[0],
                delta_itr: args[1],
                delta_rec: args[2],
            }),
            other => Err(Error::config(format!("unknown preset {other:?}"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Rpa => write!(f, "rpa"),
            Preset::Srpa { q } => write!(f, "srpa({q})"),
            Preset::RpaSch { d } => write!(f, "rpa_sch({d})"),
            Preset::Mfp {
                gamma,
                delta_itr,
                delta_rec,
            } => {
                write!(f, "mfp({gamma},{delta_itr},{delta_rec})")
            }
        }
    }
}
