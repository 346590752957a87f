//! Run configuration files.
//!
//! Grammar, one item per line:
//!
//! ```text
//! file     = { line }
//! line     = blank | comment | section | entry
//! comment  = "#" text
//! section  = "[" name "]"            name: grid, hamiltonian, potential,
//!                                     initial, initial.<c>, run, output,
//!                                     converge
//! entry    = key "=" value [ comment ]
//! ```
//!
//! Lists are comma separated; matrix rows are separated by `;`. Every
//! section and key is checked, so a typo is an error with its line number
//! rather than a silently ignored setting.
//!
//! ```text
//! [grid]
//! points = 256
//! lengths = 20
//!
//! [hamiltonian]
//! kappa = 1
//! external = harmonic
//! omega = 1
//!
//! [potential]
//! family = cubic
//! g = 1
//!
//! [initial.0]
//! profile = gaussian
//! x0 = 1
//! sigma = 1.5
//!
//! [initial]
//! norm = 1
//!
//! [run]
//! scheme = strang
//! dt = 0.001
//! steps = 1000
//! observe_every = 10
//!
//! [output]
//! csv = trap.csv
//! snapshot = trap.nlsp
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use nlsprop::profiles::Profile;
use nlsprop::schemes::SCHEME_NAMES;
use nlsprop::CommutatorVariant;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    F32,
    #[default]
    F64,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExternalSpec {
    Zero,
    Constant(f64),
    Harmonic(f64),
    /// Real part of a one-component snapshot on the run grid.
    Table(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    Free,
    Cubic { g: f64 },
    Coupled { matrix: Vec<Vec<f64>> },
    FourWave { g: f64, phase_mod: [[f64; 4]; 4] },
    /// `g ρ / (1 + s ρ)`, one component.
    Saturable { g: f64, s: f64 },
}

impl PotentialSpec {
    pub fn family(&self) -> &'static str {
        match self {
            PotentialSpec::Free => "free",
            PotentialSpec::Cubic { .. } => "cubic",
            PotentialSpec::Coupled { .. } => "coupled",
            PotentialSpec::FourWave { .. } => "four-wave",
            PotentialSpec::Saturable { .. } => "saturable",
        }
    }

    /// Components implied by the family, if fixed.
    pub fn components(&self) -> Option<usize> {
        match self {
            PotentialSpec::Free => None,
            PotentialSpec::Cubic { .. } | PotentialSpec::Saturable { .. } => Some(1),
            PotentialSpec::Coupled { matrix } => Some(matrix.len()),
            PotentialSpec::FourWave { .. } => Some(4),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialSpec {
    Profiles(Vec<Profile>),
    Snapshot(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
    /// Periodic snapshots every this many steps; 0 disables them.
    pub snapshot_every: usize,
    pub snapshot_prefix: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergeSpec {
    pub t_final: f64,
    pub dts: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub points: Vec<usize>,
    pub lengths: Vec<f64>,
    pub kappa: f64,
    pub external: ExternalSpec,
    pub potential: PotentialSpec,
    pub initial: InitialSpec,
    /// Rescale the initial state to this norm.
    pub norm: Option<f64>,
    pub scheme: String,
    pub dt: f64,
    pub steps: usize,
    pub observe_every: usize,
    pub commutator_variant: CommutatorVariant,
    pub precision: Precision,
    pub energy: bool,
    pub output: OutputSpec,
    pub converge: Option<ConvergeSpec>,
}

#[derive(Debug)]
struct Entry {
    value: String,
    line: usize,
    used: bool,
}

/// Parsed but untyped file: section -> key -> entry.
struct Raw {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
    section_lines: BTreeMap<String, usize>,
}

const SECTIONS: [&str; 7] = ["grid", "hamiltonian", "potential", "initial", "run", "output", "converge"];

impl Raw {
    fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        let mut section_lines = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| anyhow!("line {line}: unterminated section header"))?
                    .trim();
                let known = SECTIONS.contains(&name)
                    || name
                        .strip_prefix("initial.")
                        .is_some_and(|c| c.parse::<usize>().is_ok());
                if !known {
                    bail!("line {line}: unknown section [{name}]; valid: {}, initial.<c>", SECTIONS.join(", "));
                }
                if section_lines.insert(name.to_string(), line).is_some() {
                    bail!("line {line}: section [{name}] appears twice");
                }
                sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| anyhow!("line {line}: expected 'key = value' or '[section]'"))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                bail!("line {line}: empty key");
            }
            let section = current
                .as_ref()
                .ok_or_else(|| anyhow!("line {line}: '{key}' appears before any section header"))?;
            let map = sections.get_mut(section).expect("section registered on header");
            if let Some(prev) = map.get(key) {
                bail!("line {line}: [{section}] {key} already set on line {}", prev.line);
            }
            map.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                    used: false,
                },
            );
        }
        Ok(Self { sections, section_lines })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        let e = self.sections.get_mut(section)?.get_mut(key)?;
        e.used = true;
        Some((e.value.clone(), e.line))
    }

    fn get<T>(&mut self, section: &str, key: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Option<T>> {
        match self.take(section, key) {
            None => Ok(None),
            Some((v, line)) => parse(&v)
                .map(Some)
                .with_context(|| format!("line {line}: [{section}] {key} = '{v}'")),
        }
    }

    fn require<T>(&mut self, section: &str, key: &str, parse: impl Fn(&str) -> Result<T>) -> Result<T> {
        self.get(section, key, parse)?
            .ok_or_else(|| anyhow!("[{section}] {key} is required"))
    }

    fn or<T>(&mut self, section: &str, key: &str, default: T, parse: impl Fn(&str) -> Result<T>) -> Result<T> {
        Ok(self.get(section, key, parse)?.unwrap_or(default))
    }

    fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn finish(self) -> Result<()> {
        for (section, map) in &self.sections {
            for (key, e) in map {
                if !e.used {
                    bail!("line {}: unknown or unused key '{key}' in [{section}]", e.line);
                }
            }
        }
        Ok(())
    }
}

fn real(s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| anyhow!("not a number"))?;
    if !v.is_finite() {
        bail!("must be finite");
    }
    Ok(v)
}

fn positive(s: &str) -> Result<f64> {
    let v = real(s)?;
    if v <= 0.0 {
        bail!("must be positive");
    }
    Ok(v)
}

fn count(s: &str) -> Result<usize> {
    let v: usize = s.parse().map_err(|_| anyhow!("not a non-negative integer"))?;
    Ok(v)
}

fn positive_count(s: &str) -> Result<usize> {
    match count(s)? {
        0 => bail!("must be at least 1"),
        v => Ok(v),
    }
}

fn flag(s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bail!("expected true or false"),
    }
}

fn list<T>(s: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(|x| item(x.trim())).collect()
}

fn matrix(s: &str) -> Result<Vec<Vec<f64>>> {
    let rows = s.split(';').map(|r| list(r, real)).collect::<Result<Vec<_>>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        bail!("matrix must be square ({n} rows)");
    }
    Ok(rows)
}

fn path(s: &str) -> Result<PathBuf> {
    if s.is_empty() {
        bail!("empty path");
    }
    Ok(PathBuf::from(s))
}

fn scheme(s: &str) -> Result<String> {
    if SCHEME_NAMES.contains(&s) {
        Ok(s.to_string())
    } else {
        bail!("unknown scheme; valid names: {}", SCHEME_NAMES.join(", "))
    }
}

fn precision(s: &str) -> Result<Precision> {
    match s {
        "f32" => Ok(Precision::F32),
        "f64" => Ok(Precision::F64),
        _ => bail!("expected f32 or f64"),
    }
}

fn variant(s: &str) -> Result<CommutatorVariant> {
    Ok(CommutatorVariant::parse(s)?)
}

fn profile(raw: &mut Raw, section: &str) -> Result<Profile> {
    let name = raw.require(section, "profile", |s| Ok(s.to_string()))?;
    let p = match name.as_str() {
        "gaussian" => Profile::Gaussian {
            x0: raw.or(section, "x0", 0.0, real)?,
            sigma: raw.or(section, "sigma", 1.0, positive)?,
            k0: raw.or(section, "k0", 0.0, real)?,
        },
        "sech" => Profile::Sech {
            x0: raw.or(section, "x0", 0.0, real)?,
            width: raw.or(section, "width", 1.0, positive)?,
            k0: raw.or(section, "k0", 0.0, real)?,
        },
        "oscillator-ground" => Profile::OscillatorGround {
            omega: raw.require(section, "omega", positive)?,
        },
        "uniform" => Profile::Uniform {
            amplitude: raw.or(section, "amplitude", 1.0, real)?,
        },
        "smooth-random" => Profile::SmoothRandom {
            seed: raw.or(section, "seed", 0, |s| Ok(s.parse::<u64>()?))?,
        },
        "zero" => Profile::Zero,
        other => bail!(
            "[{section}] unknown profile '{other}'; valid: gaussian, sech, oscillator-ground, uniform, smooth-random, zero"
        ),
    };
    Ok(p)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = Raw::parse(text)?;

        let points = raw.require("grid", "points", |s| list(s, positive_count))?;
        let lengths = raw.require("grid", "lengths", |s| list(s, positive))?;
        if points.is_empty() || points.len() > 3 || points.len() != lengths.len() {
            bail!("[grid] points and lengths need the same number of axes (1 to 3)");
        }

        let kappa = raw.or("hamiltonian", "kappa", 1.0, positive)?;
        let external = match raw.or("hamiltonian", "external", "zero".to_string(), |s| Ok(s.to_string()))?.as_str() {
            "zero" => ExternalSpec::Zero,
            "constant" => ExternalSpec::Constant(raw.require("hamiltonian", "value", real)?),
            "harmonic" => ExternalSpec::Harmonic(raw.require("hamiltonian", "omega", positive)?),
            "table" => ExternalSpec::Table(raw.require("hamiltonian", "table", path)?),
            other => bail!("[hamiltonian] unknown external '{other}'; valid: zero, constant, harmonic, table"),
        };

        let potential = match raw.or("potential", "family", "free".to_string(), |s| Ok(s.to_string()))?.as_str() {
            "free" => PotentialSpec::Free,
            "cubic" => PotentialSpec::Cubic {
                g: raw.require("potential", "g", real)?,
            },
            "coupled" => PotentialSpec::Coupled {
                matrix: raw.require("potential", "matrix", matrix)?,
            },
            "four-wave" => {
                let g = raw.require("potential", "g", real)?;
                let m = raw.or("potential", "phase_mod", vec![vec![0.0; 4]; 4], matrix)?;
                if m.len() != 4 {
                    bail!("[potential] phase_mod must be 4x4");
                }
                let mut phase_mod = [[0.0; 4]; 4];
                for (row, src) in phase_mod.iter_mut().zip(&m) {
                    row.copy_from_slice(src);
                }
                PotentialSpec::FourWave { g, phase_mod }
            }
            "saturable" => PotentialSpec::Saturable {
                g: raw.require("potential", "g", real)?,
                s: raw.or("potential", "s", 1.0, real)?,
            },
            other => bail!("[potential] unknown family '{other}'; valid: free, cubic, coupled, four-wave, saturable"),
        };

        let snapshot = raw.get("initial", "snapshot", path)?;
        let norm = raw.get("initial", "norm", positive)?;
        let mut component_sections: Vec<(usize, String)> = raw
            .sections
            .keys()
            .filter_map(|k| k.strip_prefix("initial.").map(|c| (c.parse().expect("checked on parse"), k.clone())))
            .collect();
        component_sections.sort();
        let initial = match snapshot {
            Some(p) => {
                if !component_sections.is_empty() {
                    bail!("[initial] snapshot cannot be combined with [initial.<c>] profiles");
                }
                InitialSpec::Snapshot(p)
            }
            None => {
                if component_sections.is_empty() {
                    bail!("no initial state: give [initial] snapshot or [initial.0], [initial.1], ...");
                }
                let mut profiles = Vec::new();
                for (i, (c, name)) in component_sections.iter().enumerate() {
                    if *c != i {
                        bail!(
                            "line {}: component sections must be numbered 0, 1, ... without gaps",
                            raw.section_lines[name]
                        );
                    }
                    profiles.push(profile(&mut raw, name)?);
                }
                InitialSpec::Profiles(profiles)
            }
        };
        if let (InitialSpec::Profiles(p), Some(c)) = (&initial, potential.components()) {
            if p.len() != c {
                bail!("potential '{}' needs {c} components but {} initial profiles are given", potential.family(), p.len());
            }
        }

        let scheme = raw.require("run", "scheme", scheme)?;
        let dt = raw.require("run", "dt", positive)?;
        let steps = raw.require("run", "steps", count)?;
        let observe_every = raw.or("run", "observe_every", steps.max(1), positive_count)?;
        let commutator_variant = raw.or("run", "commutator_variant", CommutatorVariant::Paper, variant)?;
        let precision = raw.or("run", "precision", Precision::F64, precision)?;
        let energy = raw.or("run", "energy", true, flag)?;

        let output = OutputSpec {
            csv: raw.get("output", "csv", path)?,
            snapshot: raw.get("output", "snapshot", path)?,
            snapshot_every: raw.or("output", "snapshot_every", 0, count)?,
            snapshot_prefix: raw.get("output", "snapshot_prefix", path)?,
        };
        if output.snapshot_every > 0 {
            if output.snapshot_prefix.is_none() {
                bail!("[output] snapshot_every needs snapshot_prefix");
            }
            if output.snapshot_every % observe_every != 0 {
                bail!("[output] snapshot_every must be a multiple of [run] observe_every ({observe_every})");
            }
        }

        let converge = if raw.has_section("converge") {
            Some(ConvergeSpec {
                t_final: raw.require("converge", "t_final", positive)?,
                dts: raw.require("converge", "dts", |s| list(s, positive))?,
            })
        } else {
            None
        };

        raw.finish()?;
        Ok(Self {
            points,
            lengths,
            kappa,
            external,
            potential,
            initial,
            norm,
            scheme,
            dt,
            steps,
            observe_every,
            commutator_variant,
            precision,
            energy,
            output,
            converge,
        })
    }

    pub fn components(&self) -> Option<usize> {
        match &self.initial {
            InitialSpec::Profiles(p) => Some(p.len()),
            InitialSpec::Snapshot(_) => self.potential.components(),
        }
    }

    /// Resolves relative paths against `base`.
    pub fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let ExternalSpec::Table(p) = &mut self.external {
            fix(p);
        }
        if let InitialSpec::Snapshot(p) = &mut self.initial {
            fix(p);
        }
        let out = &mut self.output;
        for p in [&mut out.csv, &mut out.snapshot, &mut out.snapshot_prefix].into_iter().flatten() {
            fix(p);
        }
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn rows(m: &[Vec<f64>]) -> String {
    m.iter().map(|r| join(r)).collect::<Vec<_>>().join("; ")
}

/// Canonical text form; parsing it gives back an equal config.
impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let _ = writeln!(s, "[grid]\npoints = {}\nlengths = {}\n", join(&self.points), join(&self.lengths));
        let _ = writeln!(s, "[hamiltonian]\nkappa = {}", self.kappa);
        let _ = match &self.external {
            ExternalSpec::Zero => writeln!(s, "external = zero"),
            ExternalSpec::Constant(v) => writeln!(s, "external = constant\nvalue = {v}"),
            ExternalSpec::Harmonic(w) => writeln!(s, "external = harmonic\nomega = {w}"),
            ExternalSpec::Table(p) => writeln!(s, "external = table\ntable = {}", p.display()),
        };
        let _ = writeln!(s, "\n[potential]\nfamily = {}", self.potential.family());
        let _ = match &self.potential {
            PotentialSpec::Free => Ok(()),
            PotentialSpec::Cubic { g } => writeln!(s, "g = {g}"),
            PotentialSpec::Coupled { matrix } => writeln!(s, "matrix = {}", rows(matrix)),
            PotentialSpec::FourWave { g, phase_mod } => {
                let m: Vec<Vec<f64>> = phase_mod.iter().map(|r| r.to_vec()).collect();
                writeln!(s, "g = {g}\nphase_mod = {}", rows(&m))
            }
            PotentialSpec::Saturable { g, s: sat } => writeln!(s, "g = {g}\ns = {sat}"),
        };
        let _ = writeln!(s, "\n[initial]");
        if let InitialSpec::Snapshot(p) = &self.initial {
            let _ = writeln!(s, "snapshot = {}", p.display());
        }
        if let Some(n) = self.norm {
            let _ = writeln!(s, "norm = {n}");
        }
        if let InitialSpec::Profiles(ps) = &self.initial {
            for (c, p) in ps.iter().enumerate() {
                let _ = writeln!(s, "\n[initial.{c}]\nprofile = {}", p.name());
                let _ = match *p {
                    Profile::Gaussian { x0, sigma, k0 } => writeln!(s, "x0 = {x0}\nsigma = {sigma}\nk0 = {k0}"),
                    Profile::Sech { x0, width, k0 } => writeln!(s, "x0 = {x0}\nwidth = {width}\nk0 = {k0}"),
                    Profile::OscillatorGround { omega } => writeln!(s, "omega = {omega}"),
                    Profile::Uniform { amplitude } => writeln!(s, "amplitude = {amplitude}"),
                    Profile::SmoothRandom { seed } => writeln!(s, "seed = {seed}"),
                    Profile::Zero => Ok(()),
                };
            }
        }
        let _ = writeln!(
            s,
            "\n[run]\nscheme = {}\ndt = {}\nsteps = {}\nobserve_every = {}\ncommutator_variant = {}\nprecision = {}\nenergy = {}",
            self.scheme,
            self.dt,
            self.steps,
            self.observe_every,
            self.commutator_variant.name(),
            self.precision.name(),
            self.energy
        );
        let out = &self.output;
        let _ = writeln!(s, "\n[output]");
        if let Some(p) = &out.csv {
            let _ = writeln!(s, "csv = {}", p.display());
        }
        if let Some(p) = &out.snapshot {
            let _ = writeln!(s, "snapshot = {}", p.display());
        }
        let _ = writeln!(s, "snapshot_every = {}", out.snapshot_every);
        if let Some(p) = &out.snapshot_prefix {
            let _ = writeln!(s, "snapshot_prefix = {}", p.display());
        }
        if let Some(c) = &self.converge {
            let _ = writeln!(s, "\n[converge]\nt_final = {}\ndts = {}", c.t_final, join(&c.dts));
        }
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRAP: &str = "
# trap run
[grid]
points = 128
lengths = 20

[hamiltonian]
external = harmonic
omega = 1

[potential]
family = cubic
g = 1

[initial.0]
profile = gaussian
x0 = 1
sigma = 1.5

[run]
scheme = forest-ruth
dt = 0.01   # inline comment
steps = 100
observe_every = 10
";

    #[test]
    fn parses_with_defaults() {
        let c = RunConfig::parse(TRAP).unwrap();
        assert_eq!(c.points, vec![128]);
        assert_eq!(c.external, ExternalSpec::Harmonic(1.0));
        assert_eq!(c.kappa, 1.0);
        assert_eq!(c.commutator_variant, CommutatorVariant::Paper);
        assert_eq!(c.precision, Precision::F64);
        assert_eq!(
            c.initial,
            InitialSpec::Profiles(vec![Profile::Gaussian {
                x0: 1.0,
                sigma: 1.5,
                k0: 0.0
            }])
        );
        assert!(c.converge.is_none());
    }

    #[test]
    fn round_trips_through_text() {
        let mut text = TRAP.replace("family = cubic\ng = 1", "family = four-wave\ng = 1.25\nphase_mod = 1,0.5,0.5,0.5;0.5,1,0.5,0.5;0.5,0.5,1,0.5;0.5,0.5,0.5,1");
        for c in 1..4 {
            text.push_str(&format!("\n[initial.{c}]\nprofile = sech\nx0 = {c}\nk0 = -0.1\n"));
        }
        text.push_str("\n[output]\ncsv = a.csv\nsnapshot_every = 20\nsnapshot_prefix = snap_\n\n[converge]\nt_final = 1\ndts = 0.1, 0.05, 0.025, 0.0125, 0.003125\n");
        let c = RunConfig::parse(&text).unwrap();
        let again = RunConfig::parse(&c.to_string()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.to_string(), again.to_string());
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let bad = TRAP.replace("dt = 0.01", "dt = fast");
        let e = format!("{:#}", RunConfig::parse(&bad).unwrap_err());
        assert!(e.contains("line 22") && e.contains("[run] dt"), "{e}");

        let bad = TRAP.replace("forest-ruth", "leapfrog");
        let e = format!("{:#}", RunConfig::parse(&bad).unwrap_err());
        assert!(e.contains("strang") && e.contains("chin"), "{e}");

        let bad = TRAP.replace("sigma = 1.5", "sigma = 1.5\nsigmaa = 2");
        let e = format!("{:#}", RunConfig::parse(&bad).unwrap_err());
        assert!(e.contains("sigmaa"), "{e}");

        let bad = TRAP.replace("[run]", "[runn]");
        assert!(RunConfig::parse(&bad).is_err());
        let bad = TRAP.replace("g = 1", "g = 1\ng = 2");
        assert!(RunConfig::parse(&bad).is_err());
    }

    #[test]
    fn component_count_must_match_family() {
        let bad = TRAP.replace("family = cubic\ng = 1", "family = coupled\nmatrix = 1, 0; 0, 1");
        assert!(RunConfig::parse(&bad).is_err());
        let gap = TRAP.replace("[initial.0]", "[initial.1]");
        assert!(RunConfig::parse(&gap).is_err());
    }
}
