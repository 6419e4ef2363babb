//! Declarative architecture description.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::nn::Normalizer;

/// How condition information modulates the base network. `None` means no
/// condition network at all (bare base network).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modulation {
    None,
    Gfm,
    Sfm,
}

impl Modulation {
    pub fn name(self) -> &'static str {
        match self {
            Modulation::None => "none",
            Modulation::Gfm => "gfm",
            Modulation::Sfm => "sfm",
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Modulation::None),
            "gfm" => Ok(Modulation::Gfm),
            "sfm" => Ok(Modulation::Sfm),
            other => Err(Error::InvalidArgument(format!(
                "unknown modulation '{other}' (expected none|gfm|sfm)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub base_layers: usize,
    pub base_kernel: usize,
    pub base_channels: usize,
    pub cond_channels: usize,
    pub cond_kernels: [usize; 3],
    pub cond_stride: usize,
    pub modulation: Modulation,
    pub normalizer: Normalizer,
    pub pooled: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self::csrnet()
    }
}

impl ModelConfig {
    /// Global retouching network: 1x1 base, pooled condition vector, GFM.
    pub fn csrnet() -> Self {
        Self {
            base_layers: 3,
            base_kernel: 1,
            base_channels: 64,
            cond_channels: 32,
            cond_kernels: [7, 3, 3],
            cond_stride: 2,
            modulation: Modulation::Gfm,
            normalizer: Normalizer::Un,
            pooled: true,
        }
    }

    /// Local-effect variant: 3x3 base, condition maps at full resolution, SFM.
    pub fn csrnet_local() -> Self {
        Self {
            base_kernel: 3,
            cond_stride: 1,
            modulation: Modulation::Sfm,
            pooled: false,
            ..Self::csrnet()
        }
    }

    /// Bare base network with no condition path.
    pub fn base_only(base_layers: usize, base_kernel: usize) -> Self {
        Self {
            base_layers,
            base_kernel,
            modulation: Modulation::None,
            ..Self::csrnet()
        }
    }

    /// Output channel count of base layer `i` (all layers emit
    /// `base_channels` except the last, which emits RGB).
    pub fn base_out_channels(&self, i: usize) -> usize {
        if i + 1 == self.base_layers {
            3
        } else {
            self.base_channels
        }
    }

    pub fn base_in_channels(&self, i: usize) -> usize {
        if i == 0 {
            3
        } else {
            self.base_channels
        }
    }

    pub fn has_condition(&self) -> bool {
        self.modulation != Modulation::None
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_layers < 2 {
            return Err(Error::Config(format!(
                "base_layers must be >= 2, got {}",
                self.base_layers
            )));
        }
        if self.base_kernel != 1 && self.base_kernel != 3 {
            return Err(Error::Config(format!(
                "base_kernel must be 1 or 3, got {}",
                self.base_kernel
            )));
        }
        if self.base_channels == 0 || self.cond_channels == 0 {
            return Err(Error::Config("channel counts must be positive".into()));
        }
        if self.cond_kernels.iter().any(|&k| k % 2 == 0 || k == 0) {
            return Err(Error::Config(format!(
                "cond_kernels must be odd and positive, got {:?}",
                self.cond_kernels
            )));
        }
        match self.modulation {
            Modulation::Gfm if !self.pooled => {
                return Err(Error::Config("gfm requires pooled=true".into()))
            }
            Modulation::Sfm if self.pooled => {
                return Err(Error::Config("sfm requires pooled=false".into()))
            }
            _ => {}
        }
        if (self.cond_stride == 1) != !self.pooled {
            return Err(Error::Config(format!(
                "cond_stride must be 1 iff pooled=false (stride {}, pooled {})",
                self.cond_stride, self.pooled
            )));
        }
        if self.cond_stride == 0 || self.cond_stride > 2 {
            return Err(Error::Config(format!(
                "cond_stride must be 1 or 2, got {}",
                self.cond_stride
            )));
        }
        Ok(())
    }

    /// Flat `key=value` serialization (checkpoint header, config echo).
    pub fn to_text(&self) -> String {
        format!(
            "base_layers={}\nbase_kernel={}\nbase_channels={}\ncond_channels={}\n\
             cond_kernels={},{},{}\ncond_stride={}\nmodulation={}\nnormalizer={}\npooled={}\n",
            self.base_layers,
            self.base_kernel,
            self.base_channels,
            self.cond_channels,
            self.cond_kernels[0],
            self.cond_kernels[1],
            self.cond_kernels[2],
            self.cond_stride,
            self.modulation,
            self.normalizer,
            self.pooled
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::csrnet();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got '{raw}'", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Set one field by key. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |e: String| Error::Config(format!("key '{key}': {e}"));
        match key {
            "base_layers" => self.base_layers = value.parse().map_err(|_| bad(value.into()))?,
            "base_kernel" => self.base_kernel = value.parse().map_err(|_| bad(value.into()))?,
            "base_channels" => {
                self.base_channels = value.parse().map_err(|_| bad(value.into()))?
            }
            "cond_channels" => {
                self.cond_channels = value.parse().map_err(|_| bad(value.into()))?
            }
            "cond_kernels" => {
                let parts: Vec<usize> = value
                    .split(',')
                    .map(|p| p.trim().parse())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad(value.into()))?;
                if parts.len() != 3 {
                    return Err(bad(format!("expected three kernels, got {value}")));
                }
                self.cond_kernels = [parts[0], parts[1], parts[2]];
            }
            "cond_stride" => self.cond_stride = value.parse().map_err(|_| bad(value.into()))?,
            "modulation" => self.modulation = value.parse()?,
            "normalizer" => self.normalizer = value.parse()?,
            "pooled" => self.pooled = value.parse().map_err(|_| bad(value.into()))?,
            other => {
                return Err(Error::Config(format!("unknown model config key '{other}'")));
            }
        }
        Ok(())
    }

    pub fn is_model_key(key: &str) -> bool {
        matches!(
            key,
            "base_layers"
                | "base_kernel"
                | "base_channels"
                | "cond_channels"
                | "cond_kernels"
                | "cond_stride"
                | "modulation"
                | "normalizer"
                | "pooled"
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        ModelConfig::csrnet().validate().unwrap();
        ModelConfig::csrnet_local().validate().unwrap();
        ModelConfig::base_only(3, 1).validate().unwrap();
        ModelConfig::base_only(7, 3).validate().unwrap();
    }

    #[test]
    fn invariants_are_enforced() {
        let mut cfg = ModelConfig::csrnet();
        cfg.base_layers = 1;
        assert!(cfg.validate().is_err());

        let mut cfg = ModelConfig::csrnet();
        cfg.pooled = false;
        assert!(cfg.validate().is_err()); // gfm requires pooled

        let mut cfg = ModelConfig::csrnet_local();
        cfg.cond_stride = 2;
        assert!(cfg.validate().is_err()); // stride 1 iff unpooled

        let mut cfg = ModelConfig::csrnet();
        cfg.base_kernel = 5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn text_round_trip() {
        for cfg in [
            ModelConfig::csrnet(),
            ModelConfig::csrnet_local(),
            ModelConfig::base_only(5, 3),
        ] {
            let text = cfg.to_text();
            let back = ModelConfig::from_text(&text).unwrap();
            assert_eq!(cfg, back);
        }
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(
            ModelConfig::from_text("base_layers=3\nwhatever=1\n"),
            Err(Error::Config(_))
        ));
    }
}
