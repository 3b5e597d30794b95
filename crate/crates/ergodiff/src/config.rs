//! TOML-backed run configuration.
//!
//! One document describes everything a run needs, split into sections:
//! `[grid]`, `[scenario]`, `[method]`, `[diffusion]`, `[control]`,
//! `[run]`, and `[compare]`. Every key has a default, so the empty
//! document is a valid config, and unknown keys are rejected with the
//! offending dotted path instead of being silently ignored.
//!
//! Scenario geometry is optional and scales with the domain: a ring
//! radius left out becomes a fixed fraction of the domain edge, so the
//! same file describes the same picture at any physical size.
//! [`FileConfig::resolved`] fills those blanks in with the concrete
//! values they resolve to; printing the resolved document and parsing it
//! back reproduces the same runs bit for bit, which is what the
//! `defaults` subcommand relies on.
//!
//! Command-line overrides use dotted paths (`control.v_m=2.0`) applied
//! to the parsed document before validation, so an override is checked
//! exactly like a key typed into the file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agents::ControlParams;
use crate::density::{Covariance, StripeAxis, TargetDensity};
use crate::diffusion::{DiffusionParams, Method};
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::sim::{ExperimentConfig, InitialPositions, SimConfig};
use crate::vec2::Vec2;

/// `[grid]`: cell counts and physical extent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Default for GridSection {
    /// 64 x 64 cells over a 48 x 48 domain. The extent is chosen so that
    /// at the default smoothing step every Fourier mode of the
    /// semi-implicit solve decays monotonically (the explicit flux half
    /// of the scheme needs `dt (pi/h)^2 <= 4`), with margin.
    fn default() -> Self {
        GridSection { nx: 64, ny: 64, lx: 48.0, ly: 48.0 }
    }
}

/// `[scenario]`: a named target-density builder, tagged by `name`.
///
/// Geometry fields are optional; anything omitted resolves against the
/// domain size (see each variant). `file` loads a grid dump instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Scenario {
    /// Uniform block of half-width 0.1 lx plus a concentric ring with
    /// radii 0.3 lx and 0.35 lx, centered in the domain.
    CircleSquare {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        square_half_width: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ring_inner_radius: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ring_outer_radius: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 2]>,
    },
    /// Centered isotropic Gaussian of sigma 0.15 lx with a zero stripe
    /// of half-width 0.05 ly cut along the x axis.
    GaussianStripe {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mean: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stripe_axis: Option<StripeAxis>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stripe_half_width: Option<f64>,
    },
    /// Equal mixture of two isotropic Gaussians of sigma 0.15 lx at
    /// (0.3 lx, 0.3 ly) and (0.7 lx, 0.7 ly).
    BimodalGaussian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        means: Option<[[f64; 2]; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma: Option<f64>,
    },
    /// Field dump to load and renormalize; its grid must match `[grid]`.
    File { path: PathBuf },
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario::CircleSquare {
            square_half_width: None,
            ring_inner_radius: None,
            ring_outer_radius: None,
            center: None,
        }
    }
}

fn vec2_of(p: [f64; 2]) -> Vec2 {
    Vec2::new(p[0], p[1])
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::CircleSquare { .. } => "circle_square",
            Scenario::GaussianStripe { .. } => "gaussian_stripe",
            Scenario::BimodalGaussian { .. } => "bimodal_gaussian",
            Scenario::File { .. } => "file",
        }
    }

    fn checked_sigma(sigma: Option<f64>, grid: Grid2D) -> Result<f64> {
        let sigma = sigma.unwrap_or(0.15 * grid.lx());
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::config("scenario.sigma", format!("must be positive, got {sigma}")));
        }
        Ok(sigma)
    }

    /// Build the target density on `grid`, resolving omitted geometry.
    pub fn build(&self, grid: Grid2D) -> Result<TargetDensity> {
        let mid = Vec2::new(0.5 * grid.lx(), 0.5 * grid.ly());
        match self {
            Scenario::CircleSquare {
                square_half_width,
                ring_inner_radius,
                ring_outer_radius,
                center,
            } => TargetDensity::circle_square(
                grid,
                square_half_width.unwrap_or(0.1 * grid.lx()),
                ring_inner_radius.unwrap_or(0.3 * grid.lx()),
                ring_outer_radius.unwrap_or(0.35 * grid.lx()),
                center.map_or(mid, vec2_of),
            ),
            Scenario::GaussianStripe { mean, sigma, stripe_axis, stripe_half_width } => {
                TargetDensity::gaussian_stripe(
                    grid,
                    mean.map_or(mid, vec2_of),
                    Covariance::isotropic(Self::checked_sigma(*sigma, grid)?),
                    stripe_axis.unwrap_or(StripeAxis::X),
                    stripe_half_width.unwrap_or(0.05 * grid.ly()),
                )
            }
            Scenario::BimodalGaussian { means, sigma } => {
                let [a, b] = means.unwrap_or([
                    [0.3 * grid.lx(), 0.3 * grid.ly()],
                    [0.7 * grid.lx(), 0.7 * grid.ly()],
                ]);
                let cov = Covariance::isotropic(Self::checked_sigma(*sigma, grid)?);
                TargetDensity::bimodal_gaussian(grid, [vec2_of(a), vec2_of(b)], [cov; 2])
            }
            Scenario::File { path } => {
                let density = TargetDensity::load(path)?;
                if *density.grid() != grid {
                    return Err(Error::config(
                        "scenario.path",
                        format!(
                            "field grid {}x{} over {} x {} does not match the [grid] section",
                            density.grid().nx(),
                            density.grid().ny(),
                            density.grid().lx(),
                            density.grid().ly()
                        ),
                    ));
                }
                Ok(density)
            }
        }
    }

    /// Copy with every omitted field replaced by its resolved value.
    fn resolved(&self, grid: Grid2D) -> Scenario {
        let mid = [0.5 * grid.lx(), 0.5 * grid.ly()];
        match self.clone() {
            Scenario::CircleSquare {
                square_half_width,
                ring_inner_radius,
                ring_outer_radius,
                center,
            } => Scenario::CircleSquare {
                square_half_width: square_half_width.or(Some(0.1 * grid.lx())),
                ring_inner_radius: ring_inner_radius.or(Some(0.3 * grid.lx())),
                ring_outer_radius: ring_outer_radius.or(Some(0.35 * grid.lx())),
                center: center.or(Some(mid)),
            },
            Scenario::GaussianStripe { mean, sigma, stripe_axis, stripe_half_width } => {
                Scenario::GaussianStripe {
                    mean: mean.or(Some(mid)),
                    sigma: sigma.or(Some(0.15 * grid.lx())),
                    stripe_axis: stripe_axis.or(Some(StripeAxis::X)),
                    stripe_half_width: stripe_half_width.or(Some(0.05 * grid.ly())),
                }
            }
            Scenario::BimodalGaussian { means, sigma } => Scenario::BimodalGaussian {
                means: means.or(Some([
                    [0.3 * grid.lx(), 0.3 * grid.ly()],
                    [0.7 * grid.lx(), 0.7 * grid.ly()],
                ])),
                sigma: sigma.or(Some(0.15 * grid.lx())),
            },
            file => file,
        }
    }
}

/// `[run.initial_positions]`: where agents start, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialPositionsFile {
    /// Uniform over the whole domain.
    Random,
    /// Uniform over a staging disk; defaults to the domain center with
    /// radius 5% of the shorter edge.
    Disk {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    /// One `[x, y]` entry per agent.
    Explicit { points: Vec<[f64; 2]> },
}

impl InitialPositionsFile {
    fn resolve(&self, grid: Grid2D) -> InitialPositions {
        match self {
            InitialPositionsFile::Random => InitialPositions::Random,
            InitialPositionsFile::Disk { center, radius } => InitialPositions::Disk {
                center: center
                    .map_or(Vec2::new(0.5 * grid.lx(), 0.5 * grid.ly()), vec2_of),
                radius: radius.unwrap_or(0.05 * grid.lx().min(grid.ly())),
            },
            InitialPositionsFile::Explicit { points } => {
                InitialPositions::Explicit(points.iter().copied().map(vec2_of).collect())
            }
        }
    }

    fn resolved(&self, grid: Grid2D) -> InitialPositionsFile {
        match self.clone() {
            InitialPositionsFile::Disk { center, radius } => InitialPositionsFile::Disk {
                center: center.or(Some([0.5 * grid.lx(), 0.5 * grid.ly()])),
                radius: radius.or(Some(0.05 * grid.lx().min(grid.ly()))),
            },
            other => other,
        }
    }
}

/// `[run]`: team size, length, seeding, and output decimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub n_agents: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub trajectory_stride: usize,
    // last field: tables must serialize after plain values
    pub initial_positions: InitialPositionsFile,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            n_agents: 10,
            n_steps: 1000,
            seed: 0,
            trajectory_stride: 1,
            initial_positions: InitialPositionsFile::Disk { center: None, radius: None },
        }
    }
}

/// `[compare]`: the method-comparison experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    /// Method names; an entry matching the `[method]` section's name
    /// uses that section's parameters, anything else uses defaults.
    pub methods: Vec<String>,
    pub n_runs: usize,
    /// Give run `r` of every method the same starting positions, so
    /// per-run differences are down to the method alone.
    pub shared_initial_positions: bool,
}

impl Default for CompareSection {
    fn default() -> Self {
        CompareSection {
            methods: vec!["pm".into(), "hedac".into(), "smc".into()],
            n_runs: 5,
            shared_initial_positions: true,
        }
    }
}

/// A full configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub grid: GridSection,
    pub scenario: Scenario,
    pub method: Method,
    pub diffusion: DiffusionParams,
    pub control: ControlParams,
    pub run: RunSection,
    pub compare: CompareSection,
}

impl Default for FileConfig {
    fn default() -> Self {
        FileConfig {
            grid: GridSection::default(),
            scenario: Scenario::default(),
            method: Method::PeronaMalik,
            diffusion: DiffusionParams::default(),
            control: ControlParams::default(),
            run: RunSection::default(),
            compare: CompareSection::default(),
        }
    }
}

impl FileConfig {
    /// Parse a TOML document, rejecting unknown keys.
    pub fn parse(text: &str) -> Result<FileConfig> {
        Self::from_table(text.parse().map_err(toml_error)?)
    }

    pub fn load(path: &Path) -> Result<FileConfig> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Parse `text` (the built-in defaults when `None`), then apply
    /// dotted-path overrides in order.
    pub fn from_sources(text: Option<&str>, overrides: &[String]) -> Result<FileConfig> {
        let mut table: toml::Table = match text {
            Some(text) => text.parse().map_err(toml_error)?,
            None => toml::Table::try_from(FileConfig::default())
                .map_err(|e| Error::invalid(format!("serialize defaults: {e}")))?,
        };
        for spec in overrides {
            apply_override(&mut table, spec)?;
        }
        Self::from_table(table)
    }

    fn from_table(table: toml::Table) -> Result<FileConfig> {
        check_keys(&table)?;
        table.try_into().map_err(toml_error)
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.grid.nx, self.grid.ny, self.grid.lx, self.grid.ly)
    }

    pub fn target_density(&self) -> Result<TargetDensity> {
        self.scenario.build(self.grid()?)
    }

    /// The single-run view of this document, validated.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let grid = self.grid()?;
        let config = SimConfig {
            grid,
            method: self.method,
            diffusion: self.diffusion,
            control: self.control,
            n_agents: self.run.n_agents,
            n_steps: self.run.n_steps,
            seed: self.run.seed,
            initial_positions: self.run.initial_positions.resolve(grid),
            trajectory_stride: self.run.trajectory_stride,
        };
        config.validate()?;
        Ok(config)
    }

    /// The `[compare]` method list as concrete methods.
    pub fn methods(&self) -> Result<Vec<Method>> {
        self.compare
            .methods
            .iter()
            .map(|name| {
                let method = Method::named(name).ok_or_else(|| {
                    Error::config("compare.methods", format!("unknown method `{name}`"))
                })?;
                Ok(if method.name() == self.method.name() { self.method } else { method })
            })
            .collect()
    }

    /// The experiment view of this document, validated.
    pub fn experiment_config(&self, workers: usize) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            base: self.sim_config()?,
            methods: self.methods()?,
            n_runs: self.compare.n_runs,
            shared_initial_positions: self.compare.shared_initial_positions,
            workers,
        })
    }

    /// Copy with every optional field filled in with the value it
    /// resolves to on this document's grid.
    pub fn resolved(&self) -> Result<FileConfig> {
        let grid = self.grid()?;
        let mut out = self.clone();
        out.scenario = self.scenario.resolved(grid);
        out.run.initial_positions = self.run.initial_positions.resolved(grid);
        Ok(out)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::invalid(format!("serialize config: {e}")))
    }

    /// First 8 hex digits of the SHA-256 of the resolved document; used
    /// to name output directories so different configs never collide.
    pub fn hash8(&self) -> Result<String> {
        let text = self.resolved()?.to_toml()?;
        let digest = Sha256::digest(text.as_bytes());
        Ok(digest[..4].iter().map(|b| format!("{b:02x}")).collect())
    }
}

fn toml_error(err: toml::de::Error) -> Error {
    Error::config("toml", err.message().to_string())
}

/// Apply one `dotted.path=value` override onto a parsed document. The
/// right-hand side is parsed as a TOML value (`2.0`, `true`, `[1, 2]`),
/// falling back to a plain string when that fails (`pm` needs no quotes).
pub fn apply_override(root: &mut toml::Table, spec: &str) -> Result<()> {
    let Some((path, rhs)) = spec.split_once('=') else {
        return Err(Error::config("override", format!("expected key=value, got `{spec}`")));
    };
    let path = path.trim();
    let segments: Vec<&str> = path.split('.').collect();
    if path.is_empty() || segments.iter().any(|s| s.is_empty()) {
        return Err(Error::config("override", format!("bad key path `{path}`")));
    }
    let non_table = || Error::config(path, "override path runs through a non-table value");
    let mut table = root;
    for segment in &segments[..segments.len() - 1] {
        table = table
            .entry(segment.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(non_table)?;
    }
    let rhs = rhs.trim();
    let leaf = format!("v = {rhs}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(rhs.to_string()));
    table.insert(segments[segments.len() - 1].into(), leaf);
    Ok(())
}

/// Reject unknown keys with their dotted path. Tagged tables (scenario,
/// method, initial positions) get per-variant key sets, which serde's
/// own unknown-field detection cannot provide for internally tagged
/// enums; plain sections are checked here too so every such error looks
/// the same.
fn check_keys(table: &toml::Table) -> Result<()> {
    for (key, sub) in table {
        match key.as_str() {
            "grid" => check_plain(sub, "grid", &["nx", "ny", "lx", "ly"])?,
            "scenario" => check_tagged(
                sub,
                "scenario",
                "name",
                &[
                    (
                        "circle_square",
                        &["square_half_width", "ring_inner_radius", "ring_outer_radius", "center"],
                    ),
                    ("gaussian_stripe", &["mean", "sigma", "stripe_axis", "stripe_half_width"]),
                    ("bimodal_gaussian", &["means", "sigma"]),
                    ("file", &["path"]),
                ],
            )?,
            "method" => check_tagged(
                sub,
                "method",
                "name",
                &[
                    ("pm", &[]),
                    ("perona_malik", &[]),
                    ("hedac", &["beta"]),
                    ("smc", &["modes", "weight_exponent"]),
                ],
            )?,
            "diffusion" => check_plain(sub, "diffusion", &["K", "alpha", "dt", "tau"])?,
            "control" => check_plain(sub, "control", &["v_m", "dt", "eps_grad"])?,
            "run" => {
                check_plain(
                    sub,
                    "run",
                    &["n_agents", "n_steps", "seed", "trajectory_stride", "initial_positions"],
                )?;
                if let Some(ip) = sub.as_table().and_then(|t| t.get("initial_positions")) {
                    check_tagged(
                        ip,
                        "run.initial_positions",
                        "kind",
                        &[("random", &[]), ("disk", &["center", "radius"]), ("explicit", &["points"])],
                    )?;
                }
            }
            "compare" => {
                check_plain(sub, "compare", &["methods", "n_runs", "shared_initial_positions"])?
            }
            other => return Err(Error::config(other, "unknown section")),
        }
    }
    Ok(())
}

fn check_plain(value: &toml::Value, path: &str, allowed: &[&str]) -> Result<()> {
    let Some(table) = value.as_table() else {
        return Err(Error::config(path, "expected a table"));
    };
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::config(format!("{path}.{key}"), "unknown key"));
        }
    }
    Ok(())
}

fn check_tagged(
    value: &toml::Value,
    path: &str,
    tag: &str,
    variants: &[(&str, &[&str])],
) -> Result<()> {
    let Some(table) = value.as_table() else {
        return Err(Error::config(path, "expected a table"));
    };
    let Some(name) = table.get(tag).and_then(|v| v.as_str()) else {
        return Err(Error::config(
            format!("{path}.{tag}"),
            format!("missing `{tag}` string selecting a variant"),
        ));
    };
    let Some((_, allowed)) = variants.iter().find(|(n, _)| *n == name) else {
        let names: Vec<&str> = variants.iter().map(|(n, _)| *n).collect();
        return Err(Error::config(
            format!("{path}.{tag}"),
            format!("unknown name `{name}`, expected one of {}", names.join(", ")),
        ));
    };
    for key in table.keys() {
        if key != tag && !allowed.contains(&key.as_str()) {
            return Err(Error::config(format!("{path}.{key}"), "unknown key"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io;

    #[test]
    fn empty_document_is_the_default() {
        let cfg = FileConfig::parse("").unwrap();
        assert_eq!(cfg, FileConfig::default());
        assert_eq!(cfg.sim_config().unwrap(), SimConfig::new(cfg.grid().unwrap()));
    }

    #[test]
    fn resolved_defaults_round_trip_bit_exact() {
        let resolved = FileConfig::default().resolved().unwrap();
        let text = resolved.to_toml().unwrap();
        let back = FileConfig::parse(&text).unwrap();
        assert_eq!(back, resolved);
        assert_eq!(back.to_toml().unwrap(), text);
        // resolving changes no behavior
        assert_eq!(back.sim_config().unwrap(), FileConfig::default().sim_config().unwrap());
        assert_eq!(back.hash8().unwrap(), FileConfig::default().hash8().unwrap());
    }

    #[test]
    fn unknown_keys_name_their_dotted_path() {
        let key_of = |text: &str| match FileConfig::parse(text) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected a config error, got {other:?}"),
        };
        assert_eq!(key_of("[grid]\nnz = 3\n"), "grid.nz");
        assert_eq!(key_of("[typo]\n"), "typo");
        assert_eq!(key_of("[scenario]\nname = \"circle_square\"\nsigma = 1.0\n"), "scenario.sigma");
        assert_eq!(key_of("[method]\nname = \"pm\"\nbeta = 1.0\n"), "method.beta");
        assert_eq!(
            key_of("[run.initial_positions]\nkind = \"random\"\nradius = 1.0\n"),
            "run.initial_positions.radius"
        );
        assert_eq!(key_of("[scenario]\nname = \"donut\"\n"), "scenario.name");
    }

    #[test]
    fn method_aliases_parse() {
        let cfg = FileConfig::parse("[method]\nname = \"pm\"\n").unwrap();
        assert_eq!(cfg.method, Method::PeronaMalik);
        let cfg = FileConfig::parse("[method]\nname = \"perona_malik\"\n").unwrap();
        assert_eq!(cfg.method, Method::PeronaMalik);
        let cfg = FileConfig::parse("[method]\nname = \"hedac\"\nbeta = 0.7\n").unwrap();
        assert_eq!(cfg.method, Method::Hedac { beta: 0.7 });
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let cfg = FileConfig::from_sources(
            None,
            &[
                "control.v_m=2.0".into(),
                "method.name=hedac".into(),
                "method.beta=0.7".into(),
                "run.initial_positions.kind=random".into(),
                "compare.methods=[\"pm\", \"smc\"]".into(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.control.v_m, 2.0);
        assert_eq!(cfg.method, Method::Hedac { beta: 0.7 });
        assert_eq!(cfg.run.initial_positions, InitialPositionsFile::Random);
        assert_eq!(cfg.compare.methods, vec!["pm", "smc"]);
    }

    #[test]
    fn override_strings_need_no_quotes() {
        let cfg = FileConfig::from_sources(None, &["scenario.name=bimodal_gaussian".into()])
            .unwrap();
        assert_eq!(cfg.scenario.name(), "bimodal_gaussian");
    }

    #[test]
    fn malformed_overrides_are_rejected() {
        assert!(FileConfig::from_sources(None, &["control.v_m".into()]).is_err());
        assert!(FileConfig::from_sources(None, &["..=1".into()]).is_err());
        assert!(FileConfig::from_sources(None, &["grid.nx.deep=1".into()]).is_err());
        assert!(FileConfig::from_sources(None, &["no_such_section.x=1".into()]).is_err());
    }

    #[test]
    fn scenario_geometry_scales_with_the_domain() {
        let cfg = FileConfig::parse("[grid]\nlx = 48.0\nly = 48.0\n").unwrap();
        let grid = cfg.grid().unwrap();
        let built = cfg.target_density().unwrap();
        let direct = TargetDensity::circle_square(
            grid,
            4.8,
            14.4,
            48.0 * 0.35,
            Vec2::new(24.0, 24.0),
        )
        .unwrap();
        assert_eq!(built, direct);
    }

    #[test]
    fn method_section_parameters_flow_into_compare() {
        let cfg = FileConfig::parse("[method]\nname = \"hedac\"\nbeta = 9.0\n").unwrap();
        let methods = cfg.methods().unwrap();
        assert_eq!(methods[0], Method::PeronaMalik);
        assert_eq!(methods[1], Method::Hedac { beta: 9.0 });
        assert!(matches!(methods[2], Method::Smc { .. }));

        let bad = FileConfig::parse("[compare]\nmethods = [\"wat\"]\n").unwrap();
        assert!(bad.methods().is_err());
    }

    #[test]
    fn file_scenario_checks_the_grid() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mu.fld");
        let grid = Grid2D::new(16, 16, 48.0, 48.0).unwrap();
        let density = Scenario::default().build(grid).unwrap();
        io::write_field(&path, density.field()).unwrap();

        let text = format!(
            "[grid]\nnx = 16\nny = 16\n[scenario]\nname = \"file\"\npath = {:?}\n",
            path.display().to_string()
        );
        let cfg = FileConfig::parse(&text).unwrap();
        // the loaded density's descriptor is the path, so compare fields
        assert_eq!(cfg.target_density().unwrap().field(), density.field());

        let mismatched = text.replace("nx = 16", "nx = 32");
        let cfg = FileConfig::parse(&mismatched).unwrap();
        assert!(matches!(cfg.target_density(), Err(Error::Config { key, .. }) if key == "scenario.path"));
    }

    #[test]
    fn hash_tracks_content() {
        let base = FileConfig::default();
        let seeded = FileConfig::from_sources(None, &["run.seed=7".into()]).unwrap();
        assert_eq!(base.hash8().unwrap(), FileConfig::default().hash8().unwrap());
        assert_ne!(base.hash8().unwrap(), seeded.hash8().unwrap());
        assert_eq!(base.hash8().unwrap().len(), 8);
    }

    #[test]
    fn explicit_positions_parse_and_resolve() {
        let cfg = FileConfig::parse(
            "[run]\nn_agents = 2\n[run.initial_positions]\nkind = \"explicit\"\npoints = [[1.0, 2.0], [3.0, 4.0]]\n",
        )
        .unwrap();
        let sim = cfg.sim_config().unwrap();
        assert_eq!(
            sim.initial_positions,
            InitialPositions::Explicit(vec![Vec2::new(1.0, 2.0), Vec2::new(3.0, 4.0)])
        );
    }

    #[test]
    fn invalid_values_surface_their_key() {
        let cfg = FileConfig::parse("[diffusion]\nK = -1.0\n").unwrap();
        match cfg.sim_config() {
            Err(Error::Config { key, .. }) => assert_eq!(key, "diffusion.K"),
            other => panic!("expected a config error, got {other:?}"),
        }
    }
}
