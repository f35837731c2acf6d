//! Resolution of command parameters from a `key = value` file and flags.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::path::Path;
use std::str::FromStr;

use nliso::config::KeyValues;
use nliso::energy::QuadratureSpec;
use nliso::optimize::AnnealConfig;
use nliso::{Error, Result};

/// Inputs of one run; every supplied key must be read exactly once.
pub struct Params {
    input: KeyValues,
    resolved: RefCell<KeyValues>,
    used: RefCell<BTreeSet<String>>,
}

impl Params {
    /// Config file entries overlaid by the flag entries.
    pub fn load(config: Option<&Path>, flags: Vec<(&str, Option<String>)>) -> Result<Self> {
        let mut input = match config {
            Some(p) => KeyValues::parse(&std::fs::read_to_string(p)?)?,
            None => KeyValues::default(),
        };
        for (k, v) in flags {
            if let Some(v) = v {
                input.insert(k, v);
            }
        }
        Ok(Params {
            input,
            resolved: RefCell::new(KeyValues::default()),
            used: RefCell::new(BTreeSet::new()),
        })
    }

    fn mark(&self, key: &str) {
        self.used.borrow_mut().insert(key.to_string());
    }

    pub fn opt<T: FromStr + ToString>(&self, key: &str) -> Result<Option<T>> {
        self.mark(key);
        let v = self.input.get::<T>(key)?;
        if let Some(v) = &v {
            self.resolved.borrow_mut().insert(key, v.to_string());
        }
        Ok(v)
    }

    pub fn or<T: FromStr + ToString>(&self, key: &str, default: T) -> Result<T> {
        let v = self.opt(key)?.unwrap_or(default);
        self.resolved.borrow_mut().insert(key, v.to_string());
        Ok(v)
    }

    pub fn req<T: FromStr + ToString>(&self, key: &str) -> Result<T> {
        self.opt(key)?
            .ok_or_else(|| Error::invalid(format!("missing required parameter {key}")))
    }

    pub fn list<T: FromStr + ToString>(&self, key: &str) -> Result<Vec<T>> {
        self.mark(key);
        let v = self
            .input
            .get_list::<T>(key)?
            .ok_or_else(|| Error::invalid(format!("missing required parameter {key}")))?;
        let text: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        self.resolved.borrow_mut().insert(key, text.join(", "));
        Ok(v)
    }

    /// Fails on the first supplied key no reader asked for.
    pub fn finish(&self) -> Result<KeyValues> {
        let used = self.used.borrow();
        if let Some((k, _)) = self.input.iter().find(|(k, _)| !used.contains(*k)) {
            return Err(Error::invalid(format!("unknown configuration key {k}")));
        }
        Ok(self.resolved.borrow().clone())
    }

    /// Values read so far, defaults included.
    pub fn resolved(&self) -> KeyValues {
        self.resolved.borrow().clone()
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        Ok(QuadratureSpec {
            near_field_radius: self.opt("near_field_radius")?,
            subsample: self.or("subsample", QuadratureSpec::default().subsample)?,
        })
    }

    pub fn anneal(&self) -> Result<AnnealConfig> {
        let d = AnnealConfig::default();
        let cfg = AnnealConfig {
            steps: self.or("steps", d.steps)?,
            t0: self.opt("t0")?,
            cooling: self.or("cooling", d.cooling)?,
            seed: self.or("seed", d.seed)?,
            move_radius: self.or("move_radius", d.move_radius)?,
            record_every: self.or("record_every", d.record_every)?,
            refresh_every: self.or("refresh_every", d.refresh_every)?,
            quad: self.quadrature()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
