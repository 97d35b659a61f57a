use crate::engine::{ConstantRule, Dynamics};
use crate::error::{Error, Result};
use crate::graph::ModelLaw;
use crate::influence::{ActivationProfile, DEFAULT_RHO_MAX};
use crate::registry::Registry;

use super::{
    block_critical, block_seed_bounds, critical_config, critical_config_numeric, critical_gnm,
    critical_gnp, CriticalPrediction,
};

pub trait Predictor: Send + Sync {
    fn name(&self) -> &'static str;
    fn predict(&self, law: &ModelLaw, dynamics: &Dynamics) -> Result<CriticalPrediction>;
}

/// Integer `r` for dynamics equivalent to `R = r`, `W = 1`.
pub(crate) fn constant_r(dynamics: &Dynamics) -> Option<u32> {
    match dynamics {
        Dynamics::DegreeRule(rule) => rule.constant(),
        Dynamics::Influence(spec) => {
            let r = spec.threshold.min();
            (spec.is_unit_weight() && spec.threshold.is_constant() && r.fract() == 0.0)
                .then_some(r as u32)
        }
    }
}

fn require_r(dynamics: &Dynamics, model: &'static str) -> Result<u32> {
    constant_r(dynamics).ok_or_else(|| {
        Error::invalid(
            model,
            format!("needs unit weights and a constant integer threshold, got {}", dynamics.describe()),
        )
    })
}

fn mismatch(name: &str, law: &ModelLaw) -> Error {
    Error::invalid("predictor", format!("{name} does not apply to {law:?}"))
}

struct Gnp {
    rho_max: usize,
}

impl Predictor for Gnp {
    fn name(&self) -> &'static str {
        "gnp"
    }

    fn predict(&self, law: &ModelLaw, dynamics: &Dynamics) -> Result<CriticalPrediction> {
        let &ModelLaw::Gnp { n, p } = law else {
            return Err(mismatch(self.name(), law));
        };
        let profile = match dynamics {
            Dynamics::Influence(spec) => spec.profile(self.rho_max)?,
            Dynamics::DegreeRule(_) => {
                ActivationProfile::basic(require_r(dynamics, "gnp")? as usize, self.rho_max)?
            }
        };
        critical_gnp(n, p, &profile)
    }
}

struct Gnm;

impl Predictor for Gnm {
    fn name(&self) -> &'static str {
        "gnm"
    }

    fn predict(&self, law: &ModelLaw, dynamics: &Dynamics) -> Result<CriticalPrediction> {
        let &ModelLaw::Gnm { n, m } = law else {
            return Err(mismatch(self.name(), law));
        };
        critical_gnm(n, m, require_r(dynamics, "gnm")?)
    }
}

struct Config;

impl Predictor for Config {
    fn name(&self) -> &'static str {
        "config"
    }

    fn predict(&self, law: &ModelLaw, dynamics: &Dynamics) -> Result<CriticalPrediction> {
        let ModelLaw::Degrees { n, law: degrees } = law else {
            return Err(mismatch(self.name(), law));
        };
        critical_config(*n, degrees, require_r(dynamics, "config")?)
    }
}

struct ConfigNumeric;

impl Predictor for ConfigNumeric {
    fn name(&self) -> &'static str {
        "config-numeric"
    }

    fn predict(&self, law: &ModelLaw, dynamics: &Dynamics) -> Result<CriticalPrediction> {
        let ModelLaw::Degrees { n, law: degrees } = law else {
            return Err(mismatch(self.name(), law));
        };
        match dynamics {
            Dynamics::DegreeRule(rule) => critical_config_numeric(*n, degrees, rule.as_ref()),
            Dynamics::Influence(_) => {
                let r = require_r(dynamics, "config-numeric")?;
                critical_config_numeric(*n, degrees, &ConstantRule(r))
            }
        }
    }
}

struct Block {
    epsilon: f64,
}

impl Predictor for Block {
    fn name(&self) -> &'static str {
        "block"
    }

    /// Reports the uniform-seeding bound as `a_c`, per-community `p_hat` alongside.
    fn predict(&self, law: &ModelLaw, dynamics: &Dynamics) -> Result<CriticalPrediction> {
        let ModelLaw::Block { sizes, probs } = law else {
            return Err(mismatch(self.name(), law));
        };
        let r = require_r(dynamics, "block")?;
        let per = block_critical(sizes, probs, r)?;
        let bounds = block_seed_bounds(sizes, probs, r, self.epsilon)?;
        let a_c = bounds.uniform_bound;
        Ok(CriticalPrediction {
            model: format!("block(K={})", sizes.len()),
            variant: "block-uniform",
            t_c: a_c / (1.0 - 1.0 / r as f64),
            a_c,
            rho_star: r as usize,
            q_rho_star: 1.0,
            d_star: None,
            mean_degree: None,
            p_hat: Some(per.iter().map(|c| c.p_hat).collect()),
        })
    }
}

/// Predictors by name. Parameters: `rho_max` (gnp), `epsilon` (block).
pub fn predictors() -> Registry<dyn Predictor> {
    let mut reg: Registry<dyn Predictor> = Registry::new("predictor");
    reg.register("gnp", "G(n,p) closed form, general influence laws: rho_max", |p| {
        Ok(Box::new(Gnp { rho_max: p.usize_or("rho_max", DEFAULT_RHO_MAX)? }))
    });
    reg.register("gnm", "G(n,M) closed form, constant r", |_| Ok(Box::new(Gnm)));
    reg.register("config", "configuration model closed form, constant r", |_| Ok(Box::new(Config)));
    reg.register(
        "config-numeric",
        "configuration model, numerical drift minimum, degree-dependent r",
        |_| Ok(Box::new(ConfigNumeric)),
    );
    reg.register("block", "block model uniform-seeding bound: epsilon", |p| {
        Ok(Box::new(Block { epsilon: p.f64_or("epsilon", 0.0)? }))
    });
    reg
}

/// Name of the predictor that fits a model law and dynamics.
pub fn default_predictor(law: &ModelLaw, dynamics: &Dynamics) -> &'static str {
    match law {
        ModelLaw::Gnp { .. } => "gnp",
        ModelLaw::Gnm { .. } => "gnm",
        ModelLaw::Degrees { .. } if constant_r(dynamics).is_some() => "config",
        ModelLaw::Degrees { .. } => "config-numeric",
        ModelLaw::Block { .. } => "block",
    }
}
