use std::fmt;

use crate::error::{Error, Result};
use crate::registry::{Params, Registry};

/// Degree-dependent integer threshold `r(d)`, used with unit weights.
pub trait ThresholdRule: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn threshold(&self, degree: u32) -> u32;

    /// `Some(r)` when the rule ignores the degree.
    fn constant(&self) -> Option<u32> {
        None
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantRule(pub u32);

impl ThresholdRule for ConstantRule {
    fn name(&self) -> String {
        format!("const:{}", self.0)
    }
    fn threshold(&self, _degree: u32) -> u32 {
        self.0
    }
    fn constant(&self) -> Option<u32> {
        Some(self.0)
    }
}

/// `max{2, ceil(log2 d)}`.
#[derive(Debug, Clone, Copy)]
pub struct Log2Rule;

impl ThresholdRule for Log2Rule {
    fn name(&self) -> String {
        "log2".into()
    }
    fn threshold(&self, degree: u32) -> u32 {
        if degree <= 4 {
            2
        } else {
            // ceil(log2 d) = bit length of d - 1
            32 - (degree - 1).leading_zeros()
        }
    }
}

/// `max{2, ceil(sqrt d)}`.
#[derive(Debug, Clone, Copy)]
pub struct SqrtRule;

impl ThresholdRule for SqrtRule {
    fn name(&self) -> String {
        "sqrt".into()
    }
    fn threshold(&self, degree: u32) -> u32 {
        let mut r = (degree as f64).sqrt().floor() as u32;
        while r * r < degree {
            r += 1;
        }
        r.max(2)
    }
}

pub fn threshold_rules() -> Registry<dyn ThresholdRule> {
    let mut reg: Registry<dyn ThresholdRule> = Registry::new("threshold rule");
    reg.register("const", "r(d) = r for every degree: r", |p| {
        let r = p.usize("r")?;
        if r < 2 {
            return Err(Error::invalid("threshold rule", "r must be at least 2"));
        }
        Ok(Box::new(ConstantRule(r as u32)))
    });
    reg.register("log2", "r(d) = max{2, ceil(log2 d)}", |_| Ok(Box::new(Log2Rule)));
    reg.register("sqrt", "r(d) = max{2, ceil(sqrt d)}", |_| Ok(Box::new(SqrtRule)));
    reg
}

/// Parses `name` or `name:r`, e.g. `log2`, `const:3`.
pub fn parse_threshold_rule(raw: &str) -> Result<Box<dyn ThresholdRule>> {
    let (name, params) = match raw.split_once(':') {
        Some((name, r)) => (name, Params::new().with("r", r)),
        None => (raw, Params::new()),
    };
    threshold_rules().create(name.trim(), &params)
}
