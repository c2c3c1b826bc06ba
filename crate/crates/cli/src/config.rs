//! Flat `key = value` run configuration.

use invscat::forward::RESOLUTION_LIMIT;
use invscat::Error;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Forward,
    Reconstruct,
    Magnetic,
    Sweep,
    ProbeResolvent,
    Continuation,
    Selftest,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Forward,
        Command::Reconstruct,
        Command::Magnetic,
        Command::Sweep,
        Command::ProbeResolvent,
        Command::Continuation,
        Command::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Forward => "forward",
            Command::Reconstruct => "reconstruct",
            Command::Magnetic => "magnetic",
            Command::Sweep => "sweep",
            Command::ProbeResolvent => "probe-resolvent",
            Command::Continuation => "continuation",
            Command::Selftest => "selftest",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub dim: usize,
    pub n: usize,
    pub half_width: f64,
    pub radius: f64,
    pub smoothness: f64,
    pub class_bound: f64,
    pub k0: f64,
    pub k: f64,
    pub band_count: usize,
    pub ks: Vec<f64>,
    pub directions: String,
    pub incident_directions: usize,
    pub observation_directions: usize,
    pub data: String,
    pub measurement_radius: f64,
    pub eta: f64,
    pub seed: u64,
    pub trials: usize,
    pub potential: String,
    pub amplitude: f64,
    pub width: f64,
    pub potential_file: Option<PathBuf>,
    pub magnetic_amplitude: f64,
    pub magnetic_width: f64,
    pub dataset: Option<PathBuf>,
    pub model: String,
    pub min_coverage: f64,
    pub krylov_tol: f64,
    pub max_iterations: usize,
    pub restart: usize,
    pub torus_factor: usize,
    pub probe_radius: f64,
    pub probe_re: Vec<f64>,
    pub probe_re_count: usize,
    pub probe_im: Vec<f64>,
    pub probe_im_count: usize,
    pub slab_half_width: f64,
    pub bound_m: f64,
    pub epsilon: f64,
    pub z_max: f64,
    pub samples: usize,
    pub timings: bool,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Forward,
            dim: 2,
            n: 48,
            half_width: 1.0,
            radius: 0.6,
            smoothness: 1.0,
            class_bound: 1.0,
            k0: 2.0,
            k: 8.0,
            band_count: 3,
            ks: vec![4.0, 8.0, 16.0],
            directions: "lattice".into(),
            incident_directions: 8,
            observation_directions: 16,
            data: "far".into(),
            measurement_radius: 0.8,
            eta: 0.0,
            seed: 1,
            trials: 5,
            potential: "gaussian".into(),
            amplitude: 0.3,
            width: 0.25,
            potential_file: None,
            magnetic_amplitude: 0.05,
            magnetic_width: 0.45,
            dataset: None,
            model: "solver".into(),
            min_coverage: 0.9,
            krylov_tol: 1e-8,
            max_iterations: 500,
            restart: 50,
            torus_factor: 2,
            probe_radius: 0.8,
            probe_re: vec![10.0, 100.0],
            probe_re_count: 10,
            probe_im: vec![-0.2, 0.0],
            probe_im_count: 3,
            slab_half_width: 1.0,
            bound_m: 10.0,
            epsilon: 1e-6,
            z_max: 10.0,
            samples: 200,
            timings: true,
            out: PathBuf::from("out"),
        }
    }
}

/// (key, description) in dump order.
pub const KEYS: &[(&str, &str)] = &[
    ("command", "subcommand to run when none is given on the command line"),
    ("dim", "spatial dimension, 2 or 3"),
    ("n", "grid points per axis"),
    ("half_width", "half side of the computational box"),
    ("radius", "support radius R of the potential"),
    ("smoothness", "Sobolev index s of the potential class"),
    ("class_bound", "class bound Q"),
    ("k0", "lower end K0 of the frequency band"),
    ("k", "upper end K of the frequency band"),
    ("band_count", "wavenumbers sampled in [K0, K]"),
    ("ks", "band limits for sweep"),
    ("directions", "far-field direction set: lattice (one pair per node) or uniform"),
    ("incident_directions", "incident directions for uniform far-field or near-field data"),
    ("observation_directions", "observation directions for uniform far-field data"),
    ("data", "forward data kind: far or near"),
    ("measurement_radius", "radius of the near-field measurement circle or sphere"),
    ("eta", "relative noise level (0 for clean data)"),
    ("seed", "base random seed"),
    ("trials", "noise realizations per band limit in sweep"),
    ("potential", "gaussian, bump, two_bump, zero or file"),
    ("amplitude", "potential amplitude"),
    ("width", "Gaussian width or bump radius"),
    ("potential_file", "field file read when potential = file"),
    ("magnetic_amplitude", "peak |b| of the builtin magnetic potential"),
    ("magnetic_width", "radius of the bump vector potential whose curl is b"),
    ("dataset", "input dataset for reconstruct (default <out>/far_field.csv)"),
    ("model", "sweep data model: solver or born"),
    ("min_coverage", "smallest accepted fraction of covered lattice nodes"),
    ("krylov_tol", "GMRES relative residual target"),
    ("max_iterations", "GMRES iteration cap"),
    ("restart", "GMRES restart length"),
    ("torus_factor", "torus side over box side"),
    ("probe_radius", "radius of the resolvent cutoff bump"),
    ("probe_re", "real-part range of the probed frequencies"),
    ("probe_re_count", "real-part samples"),
    ("probe_im", "imaginary-part range of the probed frequencies"),
    ("probe_im_count", "imaginary-part samples"),
    ("slab_half_width", "half width d of the analytic slab"),
    ("bound_m", "slab bound M"),
    ("epsilon", "band smallness level for the continuation table"),
    ("z_max", "largest frequency in the continuation table"),
    ("samples", "frequencies in the continuation table"),
    ("timings", "write measured runtimes (false writes 0 for reproducible files)"),
    ("out", "output directory"),
];

fn list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn path(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

fn bad(key: &str, value: &str, what: &str) -> Error {
    Error::Parse(format!("key '{key}': cannot read '{value}' as {what}"))
}

fn real(key: &str, v: &str) -> Result<f64, Error> {
    v.parse().map_err(|_| bad(key, v, "a number"))
}

fn count(key: &str, v: &str) -> Result<usize, Error> {
    v.parse().map_err(|_| bad(key, v, "a non-negative integer"))
}

fn reals(key: &str, v: &str) -> Result<Vec<f64>, Error> {
    v.split(',').map(|t| real(key, t.trim())).collect()
}

fn opt_path(v: &str) -> Option<PathBuf> {
    (!v.is_empty()).then(|| PathBuf::from(v))
}

impl RunConfig {
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "command" => self.command.name().to_string(),
            "dim" => self.dim.to_string(),
            "n" => self.n.to_string(),
            "half_width" => self.half_width.to_string(),
            "radius" => self.radius.to_string(),
            "smoothness" => self.smoothness.to_string(),
            "class_bound" => self.class_bound.to_string(),
            "k0" => self.k0.to_string(),
            "k" => self.k.to_string(),
            "band_count" => self.band_count.to_string(),
            "ks" => list(&self.ks),
            "directions" => self.directions.clone(),
            "incident_directions" => self.incident_directions.to_string(),
            "observation_directions" => self.observation_directions.to_string(),
            "data" => self.data.clone(),
            "measurement_radius" => self.measurement_radius.to_string(),
            "eta" => self.eta.to_string(),
            "seed" => self.seed.to_string(),
            "trials" => self.trials.to_string(),
            "potential" => self.potential.clone(),
            "amplitude" => self.amplitude.to_string(),
            "width" => self.width.to_string(),
            "potential_file" => path(&self.potential_file),
            "magnetic_amplitude" => self.magnetic_amplitude.to_string(),
            "magnetic_width" => self.magnetic_width.to_string(),
            "dataset" => path(&self.dataset),
            "model" => self.model.clone(),
            "min_coverage" => self.min_coverage.to_string(),
            "krylov_tol" => self.krylov_tol.to_string(),
            "max_iterations" => self.max_iterations.to_string(),
            "restart" => self.restart.to_string(),
            "torus_factor" => self.torus_factor.to_string(),
            "probe_radius" => self.probe_radius.to_string(),
            "probe_re" => list(&self.probe_re),
            "probe_re_count" => self.probe_re_count.to_string(),
            "probe_im" => list(&self.probe_im),
            "probe_im_count" => self.probe_im_count.to_string(),
            "slab_half_width" => self.slab_half_width.to_string(),
            "bound_m" => self.bound_m.to_string(),
            "epsilon" => self.epsilon.to_string(),
            "z_max" => self.z_max.to_string(),
            "samples" => self.samples.to_string(),
            "timings" => self.timings.to_string(),
            "out" => self.out.display().to_string(),
            _ => return None,
        })
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), Error> {
        match key {
            "command" => self.command = Command::parse(v).ok_or_else(|| bad(key, v, "a subcommand name"))?,
            "dim" => self.dim = count(key, v)?,
            "n" => self.n = count(key, v)?,
            "half_width" => self.half_width = real(key, v)?,
            "radius" => self.radius = real(key, v)?,
            "smoothness" => self.smoothness = real(key, v)?,
            "class_bound" => self.class_bound = real(key, v)?,
            "k0" => self.k0 = real(key, v)?,
            "k" => self.k = real(key, v)?,
            "band_count" => self.band_count = count(key, v)?,
            "ks" => self.ks = reals(key, v)?,
            "directions" => self.directions = v.to_string(),
            "incident_directions" => self.incident_directions = count(key, v)?,
            "observation_directions" => self.observation_directions = count(key, v)?,
            "data" => self.data = v.to_string(),
            "measurement_radius" => self.measurement_radius = real(key, v)?,
            "eta" => self.eta = real(key, v)?,
            "seed" => self.seed = v.parse().map_err(|_| bad(key, v, "an unsigned integer"))?,
            "trials" => self.trials = count(key, v)?,
            "potential" => self.potential = v.to_string(),
            "amplitude" => self.amplitude = real(key, v)?,
            "width" => self.width = real(key, v)?,
            "potential_file" => self.potential_file = opt_path(v),
            "magnetic_amplitude" => self.magnetic_amplitude = real(key, v)?,
            "magnetic_width" => self.magnetic_width = real(key, v)?,
            "dataset" => self.dataset = opt_path(v),
            "model" => self.model = v.to_string(),
            "min_coverage" => self.min_coverage = real(key, v)?,
            "krylov_tol" => self.krylov_tol = real(key, v)?,
            "max_iterations" => self.max_iterations = count(key, v)?,
            "restart" => self.restart = count(key, v)?,
            "torus_factor" => self.torus_factor = count(key, v)?,
            "probe_radius" => self.probe_radius = real(key, v)?,
            "probe_re" => self.probe_re = reals(key, v)?,
            "probe_re_count" => self.probe_re_count = count(key, v)?,
            "probe_im" => self.probe_im = reals(key, v)?,
            "probe_im_count" => self.probe_im_count = count(key, v)?,
            "slab_half_width" => self.slab_half_width = real(key, v)?,
            "bound_m" => self.bound_m = real(key, v)?,
            "epsilon" => self.epsilon = real(key, v)?,
            "z_max" => self.z_max = real(key, v)?,
            "samples" => self.samples = count(key, v)?,
            "timings" => self.timings = v.parse().map_err(|_| bad(key, v, "true or false"))?,
            "out" => self.out = PathBuf::from(v),
            _ => return Err(Error::Parse(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines over the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<(), Error> {
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value, got '{line}'", lineno + 1)))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Parse(format!("line {}: key '{key}' given twice", lineno + 1)));
            }
            self.set(key, value.trim())?;
        }
        Ok(())
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (key, doc) in KEYS {
            let _ = writeln!(s, "# {doc}");
            let _ = writeln!(s, "{key} = {}", self.get(key).unwrap_or_default());
        }
        s
    }

    /// Largest scattering wavenumber any subcommand of this config solves at.
    pub fn kappa_max(&self) -> f64 {
        self.ks.iter().cloned().fold(self.k, f64::max)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn validate(&self) -> Result<(), Error> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("key '{key}' must be positive, got {v}")))
            }
        };
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::Domain(format!("key 'dim' must be 2 or 3, got {}", self.dim)));
        }
        for (key, v) in [
            ("n", self.n as f64),
            ("half_width", self.half_width),
            ("radius", self.radius),
            ("smoothness", self.smoothness),
            ("class_bound", self.class_bound),
            ("k0", self.k0),
            ("k", self.k),
            ("band_count", self.band_count as f64),
            ("incident_directions", self.incident_directions as f64),
            ("observation_directions", self.observation_directions as f64),
            ("measurement_radius", self.measurement_radius),
            ("trials", self.trials as f64),
            ("width", self.width),
            ("magnetic_amplitude", self.magnetic_amplitude),
            ("magnetic_width", self.magnetic_width),
            ("min_coverage", self.min_coverage),
            ("krylov_tol", self.krylov_tol),
            ("max_iterations", self.max_iterations as f64),
            ("restart", self.restart as f64),
            ("torus_factor", self.torus_factor as f64),
            ("probe_radius", self.probe_radius),
            ("probe_re_count", self.probe_re_count as f64),
            ("probe_im_count", self.probe_im_count as f64),
            ("slab_half_width", self.slab_half_width),
            ("bound_m", self.bound_m),
            ("epsilon", self.epsilon),
            ("z_max", self.z_max),
            ("samples", self.samples as f64),
        ] {
            positive(key, v)?;
        }
        for (key, v) in self.ks.iter().map(|v| ("ks", *v)) {
            positive(key, v)?;
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::Domain(format!("key 'eta' must be non-negative, got {}", self.eta)));
        }
        if self.k <= self.k0 {
            return Err(Error::Domain(format!("key 'k' must exceed k0 = {}, got {}", self.k0, self.k)));
        }
        if let Some(&low) = self.ks.iter().find(|&&v| v <= self.k0) {
            return Err(Error::Domain(format!("key 'ks' entries must exceed k0 = {}, got {low}", self.k0)));
        }
        if self.radius > self.half_width {
            return Err(Error::Domain(format!("key 'radius' = {} must not exceed half_width = {}", self.radius, self.half_width)));
        }
        if self.measurement_radius > self.half_width {
            return Err(Error::Domain(format!(
                "key 'measurement_radius' = {} must not exceed half_width = {}",
                self.measurement_radius, self.half_width
            )));
        }
        if self.min_coverage > 1.0 {
            return Err(Error::Domain(format!("key 'min_coverage' must lie in (0, 1], got {}", self.min_coverage)));
        }
        if self.torus_factor < 2 {
            return Err(Error::Domain(format!("key 'torus_factor' must be at least 2, got {}", self.torus_factor)));
        }
        if self.krylov_tol >= 1.0 {
            return Err(Error::Domain(format!("key 'krylov_tol' must lie in (0, 1), got {}", self.krylov_tol)));
        }
        if self.epsilon >= 1.0 {
            return Err(Error::Domain(format!("key 'epsilon' must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.z_max <= self.k {
            return Err(Error::Domain(format!("key 'z_max' must exceed k = {}, got {}", self.k, self.z_max)));
        }
        for (key, v) in [("probe_re", &self.probe_re), ("probe_im", &self.probe_im)] {
            if v.len() != 2 || v[0] > v[1] {
                return Err(Error::Domain(format!("key '{key}' must be an ascending pair 'low, high'")));
            }
        }
        let one_of = |key: &str, v: &str, allowed: &[&str]| {
            if allowed.contains(&v) {
                Ok(())
            } else {
                Err(Error::Domain(format!("key '{key}' must be one of {}, got '{v}'", allowed.join(", "))))
            }
        };
        one_of("potential", &self.potential, &["gaussian", "bump", "two_bump", "zero", "file"])?;
        one_of("directions", &self.directions, &["lattice", "uniform"])?;
        one_of("data", &self.data, &["far", "near"])?;
        one_of("model", &self.model, &["solver", "born"])?;
        if self.potential == "file" && self.potential_file.is_none() {
            return Err(Error::Domain("key 'potential_file' is required when potential = file".into()));
        }
        let kappa_h = self.kappa_max() * self.spacing();
        if kappa_h > RESOLUTION_LIMIT {
            return Err(Error::Resolution { kappa_h, limit: RESOLUTION_LIMIT });
        }
        Ok(())
    }

    /// Text for `--help`: every key with its default.
    pub fn help_text() -> String {
        let d = RunConfig::default();
        let mut s = String::from("Configuration keys (flat `key = value`, `#` comments, lists as comma lists) and defaults:\n");
        for (key, doc) in KEYS {
            let _ = writeln!(s, "  {key:<24} {:<16} {doc}", d.get(key).unwrap_or_default());
        }
        let _ = write!(s, "\nResolution rule: max(k, ks)·(2·half_width/n) must not exceed π/4.");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_key_round_trips() {
        let mut c = RunConfig::default();
        c.set("ks", "3.5, 7, 12.25").unwrap();
        c.set("dataset", "data/x.csv").unwrap();
        c.set("timings", "false").unwrap();
        let mut back = RunConfig::default();
        back.apply_text(&c.dump()).unwrap();
        assert_eq!(back, c);
        for (key, _) in KEYS {
            assert!(c.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected() {
        let mut c = RunConfig::default();
        assert!(matches!(c.apply_text("nope = 1"), Err(Error::Parse(m)) if m.contains("nope")));
        assert!(c.apply_text("n = 8\nn = 9").is_err());
        assert!(matches!(c.apply_text("k = fast"), Err(Error::Parse(m)) if m.contains("'k'")));
    }

    #[test]
    fn resolution_rule_names_both_values() {
        let mut c = RunConfig::default();
        c.apply_text("n = 16 # coarse\nk = 12\nks = 6, 12\nz_max = 20").unwrap();
        match c.validate() {
            Err(e @ Error::Resolution { .. }) => {
                let m = e.to_string();
                assert!(m.contains("1.5000") && m.contains("0.7854"), "{m}");
            }
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::default().validate().is_ok());
    }
}
