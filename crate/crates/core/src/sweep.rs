//! Parameter sweeps driven by a flat `key=value` config, with CSV output.
//!
//! A config names one swept parameter with its `start`/`stop`/`step`, the
//! quantities to evaluate, and any fixed values that differ from the
//! defaults. Lines are `key=value`; `#` starts a comment. Keys carry their
//! unit in the name (`window_m`, `frequency_hz`, ...).
//!
//! CSV output starts with the resolved config echoed as `# key=value`
//! lines, so [`echoed_config`] on a CSV file gives back text that parses to
//! the same [`SweepSpec`]. Run metadata uses `#@` lines, which the echo
//! extraction skips.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::coverage::{self, FadingModel, LinkBudget};
use crate::diffraction::{fresnel_radius, total_path_loss_db};
use crate::geometry::SceneGeometry;
use crate::los::{self, GridSpec, DEFAULT_GRID_N};
use crate::{wavelength, Error, Result};

pub const TOOL_NAME: &str = "o2i-los";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Monte Carlo trials for `p_cov_mc` when `mc_trials` is not set.
pub const DEFAULT_MC_TRIALS: usize = 100_000;

macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $key:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn key(self) -> &'static str {
                match self {
                    $($name::$variant => $key),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.key())
            }
        }

        impl FromStr for $name {
            type Err = ();

            fn from_str(s: &str) -> std::result::Result<Self, ()> {
                match s {
                    $($key => Ok($name::$variant),)+
                    _ => Err(()),
                }
            }
        }
    };
}

keyword_enum! {
    /// Parameters that can be swept.
    SweptParam {
        ThetaDeg => "theta_deg",
        FrequencyHz => "frequency_hz",
        WindowM => "window_m",
        RoomM => "room_m",
        BsDistanceM => "bs_distance_m",
        DeltaOverRd => "delta_over_rd",
    }
}

keyword_enum! {
    /// Quantities a sweep can report.
    Output {
        PLosClosed => "p_los_closed",
        PLosGrid => "p_los_grid",
        PLosOptical => "p_los_optical",
        PathLossDb => "path_loss_db",
        PCov => "p_cov",
        PCovMc => "p_cov_mc",
        CriticalFrequencyHz => "critical_frequency_hz",
    }
}

/// Fixed values of every model input, in config units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub theta_deg: f64,
    pub frequency_hz: f64,
    pub window_m: f64,
    pub room_m: f64,
    pub bs_distance_m: f64,
    /// Edge intrusion for `path_loss_db`, in Fresnel radii.
    pub delta_over_rd: f64,
    /// BS–edge and edge–MS distances for `path_loss_db`.
    pub d1_m: f64,
    pub d2_m: f64,
    /// MS depth behind the window for the coverage outputs.
    pub ms_distance_m: f64,
    pub tx_power_dbm: f64,
    pub noise_floor_dbm: f64,
    pub snr_threshold_db: f64,
    pub m_los: f64,
    pub m_nlos: f64,
    pub n_los: f64,
    pub n_nlos: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        let fading = FadingModel::default();
        let budget = LinkBudget::default();
        Self {
            theta_deg: 0.0,
            frequency_hz: budget.frequency_hz,
            window_m: 2.0,
            room_m: 20.0,
            bs_distance_m: 5.0,
            delta_over_rd: 0.6,
            d1_m: 8.0,
            d2_m: 20.0,
            ms_distance_m: 20.0,
            tx_power_dbm: budget.tx_power_dbm,
            noise_floor_dbm: budget.noise_floor_dbm,
            snr_threshold_db: budget.snr_threshold_db,
            m_los: fading.m_los,
            m_nlos: fading.m_nlos,
            n_los: fading.n_los,
            n_nlos: fading.n_nlos,
        }
    }
}

/// Fixed-value keys in echo order.
const SCENARIO_KEYS: &[&str] = &[
    "theta_deg",
    "frequency_hz",
    "window_m",
    "room_m",
    "bs_distance_m",
    "delta_over_rd",
    "d1_m",
    "d2_m",
    "ms_distance_m",
    "tx_power_dbm",
    "noise_floor_dbm",
    "snr_threshold_db",
    "m_los",
    "m_nlos",
    "n_los",
    "n_nlos",
];

impl Scenario {
    fn field_mut(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "theta_deg" => &mut self.theta_deg,
            "frequency_hz" => &mut self.frequency_hz,
            "window_m" => &mut self.window_m,
            "room_m" => &mut self.room_m,
            "bs_distance_m" => &mut self.bs_distance_m,
            "delta_over_rd" => &mut self.delta_over_rd,
            "d1_m" => &mut self.d1_m,
            "d2_m" => &mut self.d2_m,
            "ms_distance_m" => &mut self.ms_distance_m,
            "tx_power_dbm" => &mut self.tx_power_dbm,
            "noise_floor_dbm" => &mut self.noise_floor_dbm,
            "snr_threshold_db" => &mut self.snr_threshold_db,
            "m_los" => &mut self.m_los,
            "m_nlos" => &mut self.m_nlos,
            "n_los" => &mut self.n_los,
            "n_nlos" => &mut self.n_nlos,
            _ => return None,
        })
    }

    fn field(&self, key: &str) -> f64 {
        let mut copy = *self;
        *copy.field_mut(key).expect("known scenario key")
    }

    pub fn get(&self, param: SweptParam) -> f64 {
        self.field(param.key())
    }

    pub fn with(&self, param: SweptParam, value: f64) -> Self {
        let mut s = *self;
        *s.field_mut(param.key()).expect("swept params are scenario keys") = value;
        s
    }

    pub fn scene(&self) -> Result<SceneGeometry> {
        SceneGeometry::from_degrees(self.room_m, self.window_m, self.bs_distance_m, self.theta_deg)
    }

    pub fn budget(&self) -> LinkBudget {
        LinkBudget {
            tx_power_dbm: self.tx_power_dbm,
            noise_floor_dbm: self.noise_floor_dbm,
            snr_threshold_db: self.snr_threshold_db,
            frequency_hz: self.frequency_hz,
        }
    }

    pub fn fading(&self) -> FadingModel {
        FadingModel {
            m_los: self.m_los,
            m_nlos: self.m_nlos,
            n_los: self.n_los,
            n_nlos: self.n_nlos,
        }
    }

    /// Checks every invariant that does not involve `skip`. A violated
    /// invariant is reported by name.
    fn check(&self, skip: Option<SweptParam>) -> Result<()> {
        let involves = |p: SweptParam| skip == Some(p);
        let invalid = |key: &str, reason: &str| Error::InvalidValue {
            key: key.to_string(),
            reason: reason.to_string(),
        };
        for (param, value) in [
            (SweptParam::RoomM, self.room_m),
            (SweptParam::WindowM, self.window_m),
            (SweptParam::BsDistanceM, self.bs_distance_m),
            (SweptParam::FrequencyHz, self.frequency_hz),
        ] {
            if !involves(param) && !(value.is_finite() && value > 0.0) {
                return Err(invalid(param.key(), "must be positive"));
            }
        }
        if !involves(SweptParam::WindowM)
            && !involves(SweptParam::RoomM)
            && self.window_m > self.room_m
        {
            return Err(Error::Config("window exceeds room".into()));
        }
        if !involves(SweptParam::ThetaDeg) && !(self.theta_deg.abs() < 90.0) {
            return Err(invalid("theta_deg", "must lie strictly inside (-90, 90)"));
        }
        if !involves(SweptParam::DeltaOverRd) && !self.delta_over_rd.is_finite() {
            return Err(invalid("delta_over_rd", "must be finite"));
        }
        for key in ["d1_m", "d2_m", "ms_distance_m"] {
            let v = self.field(key);
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(key, "must be positive"));
            }
        }
        if self.noise_floor_dbm >= self.tx_power_dbm {
            return Err(Error::Config("noise floor must lie below transmit power".into()));
        }
        for key in ["m_los", "m_nlos"] {
            if !(self.field(key) >= 0.5) {
                return Err(invalid(key, "Nakagami shape must be >= 0.5"));
            }
        }
        for key in ["n_los", "n_nlos"] {
            let n = self.field(key);
            if !(n > 0.5 && n < 6.0) {
                return Err(invalid(key, "path-loss exponent must lie in (0.5, 6)"));
            }
        }
        Ok(())
    }
}

/// A fully resolved sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub swept: SweptParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Fixed values. The field of the swept parameter is ignored.
    pub fixed: Scenario,
    pub outputs: Vec<Output>,
    pub oracle_n: usize,
    pub mc_trials: usize,
    pub seed: u64,
}

impl SweepSpec {
    pub fn new(swept: SweptParam, start: f64, stop: f64, step: f64) -> Result<Self> {
        let spec = Self {
            swept,
            start,
            stop,
            step,
            fixed: Scenario::default(),
            outputs: vec![Output::PLosClosed],
            oracle_n: DEFAULT_GRID_N,
            mc_trials: DEFAULT_MC_TRIALS,
            seed: 0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.fixed.check(Some(self.swept))?;
        check_range(self.start, self.stop, self.step)?;
        if self.oracle_n < 10 {
            return Err(Error::InvalidValue {
                key: "oracle_n".into(),
                reason: "must be at least 10".into(),
            });
        }
        if self.mc_trials < 10_000 {
            return Err(Error::InvalidValue {
                key: "mc_trials".into(),
                reason: "must be at least 10000".into(),
            });
        }
        Ok(())
    }

    /// Number of sweep points, `floor((stop − start)/step) + 1`. A relative
    /// slack of 1e-9 keeps decimal steps such as 0.1 from losing their
    /// last point to rounding.
    pub fn point_count(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.point_count()).map(move |i| self.start + i as f64 * self.step)
    }

    /// The config text for this spec. Parsing it yields an equal spec.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        line("sweep", self.swept.key().into());
        line("start", self.start.to_string());
        line("stop", self.stop.to_string());
        line("step", self.step.to_string());
        line(
            "outputs",
            self.outputs.iter().map(|o| o.key()).collect::<Vec<_>>().join(","),
        );
        for &key in SCENARIO_KEYS {
            if key != self.swept.key() {
                line(key, self.fixed.field(key).to_string());
            }
        }
        line("oracle_n", self.oracle_n.to_string());
        line("mc_trials", self.mc_trials.to_string());
        line("seed", self.seed.to_string());
        out
    }
}

fn check_range(start: f64, stop: f64, step: f64) -> Result<()> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Config("step must be positive".into()));
    }
    if !(start.is_finite() && stop.is_finite()) {
        return Err(Error::Config("start and stop must be finite".into()));
    }
    if !(start < stop) {
        return Err(Error::Config("start must be less than stop".into()));
    }
    Ok(())
}

fn parse_number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::InvalidValue {
        key: key.to_string(),
        reason: format!("cannot parse `{value}` as a number"),
    })
}

/// Parses a sweep config. Unknown keys, malformed values and violated
/// invariants are reported naming the key or constraint.
pub fn parse_config(text: &str) -> Result<SweepSpec> {
    let mut seen = BTreeSet::new();
    let mut swept = None;
    let (mut start, mut stop, mut step) = (None, None, None);
    let mut fixed = Scenario::default();
    let mut outputs = vec![Output::PLosClosed];
    let mut oracle_n = DEFAULT_GRID_N;
    let mut mc_trials = DEFAULT_MC_TRIALS;
    let mut seed = 0u64;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected key=value, got `{line}`", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(Error::InvalidValue {
                key: key.into(),
                reason: "given more than once".into(),
            });
        }
        match key {
            "sweep" => {
                swept = Some(value.parse::<SweptParam>().map_err(|_| Error::InvalidValue {
                    key: key.into(),
                    reason: format!(
                        "`{value}` is not sweepable; expected one of {}",
                        list(SweptParam::ALL)
                    ),
                })?)
            }
            "start" => start = Some(parse_number::<f64>(key, value)?),
            "stop" => stop = Some(parse_number::<f64>(key, value)?),
            "step" => step = Some(parse_number::<f64>(key, value)?),
            "outputs" => {
                outputs = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<Output>().map_err(|_| Error::InvalidValue {
                            key: key.into(),
                            reason: format!(
                                "unknown output `{s}`; expected one of {}",
                                list(Output::ALL)
                            ),
                        })
                    })
                    .collect::<Result<_>>()?
            }
            "oracle_n" => oracle_n = parse_number(key, value)?,
            "mc_trials" => mc_trials = parse_number(key, value)?,
            "seed" => seed = parse_number(key, value)?,
            _ => match fixed.field_mut(key) {
                Some(slot) => *slot = parse_number(key, value)?,
                None => return Err(Error::UnknownKey(key.to_string())),
            },
        }
    }

    if let Some(p) = swept {
        if seen.contains(p.key()) {
            return Err(Error::InvalidValue {
                key: p.key().into(),
                reason: "is swept and cannot also be fixed".into(),
            });
        }
    }
    fixed.check(swept)?;
    if let Some(step) = step {
        if !(step > 0.0) {
            return Err(Error::Config("step must be positive".into()));
        }
    }
    let swept = swept.ok_or_else(|| Error::Config("missing `sweep` key".into()))?;
    let start = start.ok_or_else(|| Error::Config("missing swept range: `start`".into()))?;
    let stop = stop.ok_or_else(|| Error::Config("missing swept range: `stop`".into()))?;
    let step = step.ok_or_else(|| Error::Config("missing swept range: `step`".into()))?;

    let spec = SweepSpec {
        swept,
        start,
        stop,
        step,
        fixed,
        outputs,
        oracle_n,
        mc_trials,
        seed,
    };
    spec.validate()?;
    Ok(spec)
}

fn list<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

/// Result of [`run_sweep`]: the inputs, one row per sweep point and run
/// metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub spec: SweepSpec,
    /// Swept parameter followed by the outputs in request order.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub tool_version: String,
    /// Written to the CSV only when set, so unset runs stay byte-identical.
    pub timestamp: Option<String>,
}

impl RunRecord {
    pub fn seed(&self) -> u64 {
        self.spec.seed
    }
}

fn evaluate(output: Output, s: &Scenario, spec: &SweepSpec) -> Result<f64> {
    match output {
        Output::PLosClosed => los::p_los_closed(&s.scene()?, s.frequency_hz),
        Output::PLosGrid => los::p_los_grid(
            &s.scene()?,
            s.frequency_hz,
            GridSpec {
                n: spec.oracle_n,
                seed: spec.seed,
            },
        ),
        Output::PLosOptical => Ok(los::p_los_optical(&s.scene()?)),
        Output::PathLossDb => {
            let lambda = wavelength(s.frequency_hz)?;
            let rd = fresnel_radius(s.d1_m, s.d2_m, lambda)?;
            total_path_loss_db(s.d1_m, s.d2_m, s.delta_over_rd * rd, lambda)
        }
        Output::PCov => coverage::coverage_probability(
            s.bs_distance_m,
            s.ms_distance_m,
            s.window_m,
            &s.fading(),
            &s.budget(),
        )
        .map(|r| r.p_cov),
        Output::PCovMc => coverage::coverage_mc_oracle(
            s.bs_distance_m,
            s.ms_distance_m,
            s.window_m,
            &s.fading(),
            &s.budget(),
            spec.mc_trials,
            spec.seed,
        ),
        Output::CriticalFrequencyHz => los::critical_frequency(s.window_m, s.bs_distance_m, s.room_m),
    }
}

/// Evaluates every requested output at every sweep point. The first failing
/// point aborts the run, reporting the swept value.
pub fn run_sweep(spec: &SweepSpec) -> Result<RunRecord> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.point_count());
    for x in spec.points() {
        let scenario = spec.fixed.with(spec.swept, x);
        let mut row = Vec::with_capacity(spec.outputs.len() + 1);
        row.push(x);
        for &output in &spec.outputs {
            let value = evaluate(output, &scenario, spec).map_err(|e| {
                Error::Domain(format!("{output} at {}={x}: {e}", spec.swept))
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    let columns = std::iter::once(spec.swept.key().to_string())
        .chain(spec.outputs.iter().map(|o| o.key().to_string()))
        .collect();
    Ok(RunRecord {
        spec: spec.clone(),
        columns,
        rows,
        tool_version: TOOL_VERSION.to_string(),
        timestamp: None,
    })
}

/// Writes the metadata block, the config echo, the column header and one
/// line per sweep point. Numbers use the shortest exact decimal form.
pub fn emit_csv<W: Write>(record: &RunRecord, mut out: W) -> io::Result<()> {
    writeln!(out, "#@ tool={TOOL_NAME} {}", record.tool_version)?;
    if let Some(ts) = &record.timestamp {
        writeln!(out, "#@ timestamp={ts}")?;
    }
    for line in record.spec.to_config().lines() {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "{}", record.columns.join(","))?;
    for row in &record.rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()
}

/// Recovers the config text echoed at the top of a CSV written by
/// [`emit_csv`].
pub fn echoed_config(csv: &str) -> String {
    csv.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .fold(String::new(), |mut acc, l| {
            acc.push_str(l);
            acc.push('\n');
            acc
        })
}
