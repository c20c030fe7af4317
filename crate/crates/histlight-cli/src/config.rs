use crate::args::{GradientArg, TuningFlags, UpdateFormArg};
use anyhow::{bail, Context, Result};
use histlight::{GammaParam, GradientKind, OptParams, UpdateForm};
use serde::Deserialize;
use std::path::Path;

/// Tuning values read from a TOML file. Unknown keys are rejected so a
/// typo cannot silently fall back to a default.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    levels: Option<usize>,
    epsilon: Option<f64>,
    max_iter: Option<usize>,
    update_form: Option<String>,
    gradient: Option<String>,
}

/// Fully resolved tuning values: flags take precedence over the config
/// file, which takes precedence over the built-in defaults.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: GammaParam,
    pub levels: usize,
    epsilon: Option<f64>,
    pub max_iter: usize,
    pub update_form: UpdateForm,
    pub gradient: GradientKind,
}

impl Resolved {
    /// Concrete optimizer parameters for an image with `n` pixels. The
    /// convergence threshold defaults to a pixel-count-relative value,
    /// so it is resolved here rather than at flag-parsing time.
    pub fn opt_params(&self, n: f64) -> OptParams {
        let mut p = OptParams::defaults(n);
        p.alpha = self.alpha;
        p.beta = self.beta;
        p.levels = self.levels;
        p.max_iter = self.max_iter;
        p.update_form = self.update_form;
        if let Some(e) = self.epsilon {
            p.epsilon = e;
        }
        p
    }
}

fn parse_update_form(s: &str) -> Result<UpdateForm> {
    match s {
        "gradient" => Ok(UpdateForm::GradientConsistent),
        "paper" => Ok(UpdateForm::PaperLiteral),
        other => bail!("unknown update_form {other:?} (expected \"gradient\" or \"paper\")"),
    }
}

fn parse_gradient(s: &str) -> Result<GradientKind> {
    match s {
        "forward" => Ok(GradientKind::ForwardDiff),
        "sobel" => Ok(GradientKind::Sobel),
        other => bail!("unknown gradient {other:?} (expected \"forward\" or \"sobel\")"),
    }
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("cannot parse config file {}", path.display()))
}

pub fn resolve(flags: &TuningFlags) -> Result<Resolved> {
    let file = match &flags.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };

    let update_form = match flags.update_form {
        Some(UpdateFormArg::Gradient) => UpdateForm::GradientConsistent,
        Some(UpdateFormArg::Paper) => UpdateForm::PaperLiteral,
        None => match &file.update_form {
            Some(s) => parse_update_form(s)?,
            None => UpdateForm::default(),
        },
    };
    let gradient = match flags.gradient {
        Some(GradientArg::Forward) => GradientKind::ForwardDiff,
        Some(GradientArg::Sobel) => GradientKind::Sobel,
        None => match &file.gradient {
            Some(s) => parse_gradient(s)?,
            None => GradientKind::default(),
        },
    };

    // The numeric defaults come from OptParams::defaults, evaluated
    // against a dummy pixel count; only epsilon depends on it, and that
    // one stays None here unless explicitly set.
    let template = OptParams::defaults(1.0);
    Ok(Resolved {
        alpha: flags.alpha.or(file.alpha).unwrap_or(template.alpha),
        beta: flags.beta.or(file.beta).unwrap_or(template.beta),
        gamma: GammaParam::new(flags.gamma.or(file.gamma).unwrap_or(GammaParam::default().gamma()))?,
        levels: flags.levels.or(file.levels).unwrap_or(template.levels),
        epsilon: flags.epsilon.or(file.epsilon),
        max_iter: flags.max_iter.or(file.max_iter).unwrap_or(template.max_iter),
        update_form,
        gradient,
    })
}
