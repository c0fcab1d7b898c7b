use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gallager::{GallagerAlgorithm, DEFAULT_MAX_ITER};
use crate::ipmodel::Variant;
use crate::milp::SolveBudget;
use crate::windecode::{DecoderKind, Geometry};

/// Window height choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowChoice {
    /// `m + 1`
    Small,
    /// `⌊3m/2⌋ + 1`
    Large,
    Explicit(usize),
}

impl WindowChoice {
    pub fn resolve(self, g: &Geometry) -> usize {
        match self {
            WindowChoice::Small => g.small_window(),
            WindowChoice::Large => g.large_window(),
            WindowChoice::Explicit(w) => w,
        }
    }
}

impl FromStr for WindowChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "small" => Ok(WindowChoice::Small),
            "large" => Ok(WindowChoice::Large),
            other => other
                .parse()
                .map(WindowChoice::Explicit)
                .map_err(|_| Error::Parse(format!("window must be small, large or a row count, got {s:?}"))),
        }
    }
}

impl fmt::Display for WindowChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowChoice::Small => f.write_str("small"),
            WindowChoice::Large => f.write_str("large"),
            WindowChoice::Explicit(w) => write!(f, "{w}"),
        }
    }
}

/// Which decoding method a batch runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Ip(DecoderKind),
    /// Windowed bit flipping over FW windows.
    Gallager(GallagerAlgorithm),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecoderChoice {
    pub method: Method,
    pub variant: Variant,
}

impl DecoderChoice {
    pub fn ip(kind: DecoderKind, variant: Variant) -> Self {
        DecoderChoice { method: Method::Ip(kind), variant }
    }

    pub fn gallager(alg: GallagerAlgorithm) -> Self {
        DecoderChoice { method: Method::Gallager(alg), variant: Variant::AllBinary }
    }

    /// Name in the CSV `decoder` column: `FW`, `EMD`, `GA`...
    pub fn decoder_name(&self) -> String {
        match self.method {
            Method::Ip(k) => k.to_string(),
            Method::Gallager(a) => a.to_string(),
        }
    }

    /// Variant column; empty where the variant means nothing.
    pub fn variant_name(&self) -> &'static str {
        match self.method {
            Method::Ip(DecoderKind::EMD) | Method::Gallager(_) => "",
            Method::Ip(_) => self.variant.tag(),
        }
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.variant_name(), self.decoder_name())
    }
}

impl FromStr for DecoderChoice {
    type Err = Error;
    /// Accepts `EMD`, `GA`, `GB` and variant-prefixed window decoders such as `ABFW`.
    fn from_str(s: &str) -> Result<Self> {
        let u = s.trim().to_ascii_uppercase();
        match u.as_str() {
            "EMD" => return Ok(DecoderChoice::ip(DecoderKind::EMD, Variant::AllBinary)),
            "GA" | "GB" => return Ok(DecoderChoice::gallager(u.parse()?)),
            _ => {}
        }
        if u.len() != 4 || !u.is_ascii() {
            return Err(Error::Parse(format!("unknown decoder {s:?}")));
        }
        let variant: Variant = u[..2].parse()?;
        let kind: DecoderKind = u[2..].parse()?;
        Ok(DecoderChoice::ip(kind, variant))
    }
}

impl fmt::Display for DecoderChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A batch: one code, `instances` channel draws, several decoders.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub s: usize,
    pub j: usize,
    pub k: usize,
    /// Repetitions; `n = r·t·m`.
    pub t: usize,
    pub v_s: usize,
    pub p: f64,
    pub decoders: Vec<DecoderChoice>,
    pub w: WindowChoice,
    /// Master seed. The code uses it directly, instance `i` uses a derived seed.
    pub seed: u64,
    pub instances: usize,
    pub window_budget: SolveBudget,
    pub emd_budget: SolveBudget,
    /// Run EMD on every instance and measure gaps against its dual bound.
    pub emd_baseline: bool,
    pub gallager_max_iter: usize,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            s: 5,
            j: 5,
            k: 10,
            t: 24,
            v_s: 1,
            p: 0.02,
            decoders: vec![DecoderChoice::ip(DecoderKind::FW, Variant::AllBinary)],
            w: WindowChoice::Small,
            seed: 0,
            instances: 10,
            window_budget: SolveBudget::default(),
            emd_budget: SolveBudget::default(),
            emd_baseline: false,
            gallager_max_iter: DEFAULT_MAX_ITER,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn m(&self) -> usize {
        self.j * self.s
    }

    pub fn r(&self) -> usize {
        self.k / self.j
    }

    pub fn n(&self) -> usize {
        self.r() * self.t * self.m()
    }

    /// Sets `t` from a code length; `n` must be a multiple of `r·m`.
    pub fn set_n(&mut self, n: usize) -> Result<()> {
        let block = self.r() * self.m();
        if block == 0 || n == 0 || !n.is_multiple_of(block) {
            return Err(Error::InvalidParameter(format!("n = {n} is not a positive multiple of r·m = {block}")));
        }
        self.t = n / block;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.j == 0 || self.k == 0 || self.t == 0 || self.v_s == 0 {
            return Err(Error::InvalidParameter("s, J, K, t and v_s must be positive".into()));
        }
        if !self.k.is_multiple_of(self.j) {
            return Err(Error::InvalidParameter(format!("K = {} must be a multiple of J = {}", self.k, self.j)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!("p = {} is outside [0, 1]", self.p)));
        }
        if self.decoders.is_empty() {
            return Err(Error::InvalidParameter("no decoders configured".into()));
        }
        Ok(())
    }

    /// Parses the flat `key = value` format. Keys not given keep their defaults;
    /// `n` and `t` are alternatives, the later one wins.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut n = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
            let bad = |what: &str| Error::Parse(format!("line {}: bad {what} {value:?}", lineno + 1));
            match key.as_str() {
                "s" => cfg.s = value.parse().map_err(|_| bad("s"))?,
                "j" => cfg.j = value.parse().map_err(|_| bad("J"))?,
                "k" => cfg.k = value.parse().map_err(|_| bad("K"))?,
                "t" => {
                    cfg.t = value.parse().map_err(|_| bad("t"))?;
                    n = None;
                }
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad("n"))?),
                "v_s" => cfg.v_s = value.parse().map_err(|_| bad("v_s"))?,
                "p" => cfg.p = value.parse().map_err(|_| bad("p"))?,
                "w" => cfg.w = value.parse()?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "instances" => cfg.instances = value.parse().map_err(|_| bad("instance count"))?,
                "decoders" => {
                    cfg.decoders = value
                        .split(',')
                        .filter(|d| !d.trim().is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?
                }
                "window_time" => cfg.window_budget.time_limit = parse_secs(value).ok_or_else(|| bad("time"))?,
                "window_nodes" => cfg.window_budget.node_limit = Some(value.parse().map_err(|_| bad("node limit"))?),
                "emd_time" => cfg.emd_budget.time_limit = parse_secs(value).ok_or_else(|| bad("time"))?,
                "emd_nodes" => cfg.emd_budget.node_limit = Some(value.parse().map_err(|_| bad("node limit"))?),
                "emd_baseline" => cfg.emd_baseline = parse_bool(value).ok_or_else(|| bad("flag"))?,
                "gallager_max_iter" => cfg.gallager_max_iter = value.parse().map_err(|_| bad("iteration cap"))?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                other => return Err(Error::Parse(format!("line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        if let Some(n) = n {
            cfg.set_n(n)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_secs(s: &str) -> Option<std::time::Duration> {
    let v: f64 = s.parse().ok()?;
    (v.is_finite() && v >= 0.0).then(|| std::time::Duration::from_secs_f64(v))
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}
