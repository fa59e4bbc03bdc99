//! Plain-text key-value descriptor for a sketch family plus a seed.
//!
//! The format is one `key = value` pair per line, `#` comments, blank lines
//! ignored. Every descriptor carries `name`, `n`, `k`, and `seed` plus the
//! family-specific parameters:
//!
//! ```text
//! # 2x2 mixture that collapses a diagonal direction 30% of the time
//! name = identity_mix
//! n = 2
//! k = 2
//! rho = 0.3
//! seed = 42
//! ```
//!
//! Parsing validates shapes and parameter ranges, so a parsed descriptor is
//! always drawable. Serialization uses the shortest round-trip decimal form
//! for reals: parse(display(c)) == c.

use super::{RngSeed, SketchError, SketchFamily};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// A sketch family together with the seed to draw it from.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyConfig {
    pub family: SketchFamily,
    pub seed: RngSeed,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {0}: expected `key = value`")]
    MalformedLine(usize),
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("key `{key}` is not used by family `{family}`")]
    UnexpectedKey { key: String, family: &'static str },
    #[error("bad value for `{key}`: {value}")]
    BadValue { key: &'static str, value: String },
    #[error("family `{family}` has fixed shape {n}x{k}")]
    BadShape {
        family: &'static str,
        n: usize,
        k: usize,
    },
    #[error(transparent)]
    Family(#[from] SketchError),
}

struct Fields {
    map: BTreeMap<String, String>,
}

impl Fields {
    fn parse(s: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(ConfigError::MalformedLine(lineno + 1))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::MalformedLine(lineno + 1));
            }
            if map.insert(key.clone(), value).is_some() {
                return Err(ConfigError::DuplicateKey(key));
            }
        }
        Ok(Fields { map })
    }

    fn take_str(&mut self, key: &'static str) -> Result<String, ConfigError> {
        self.map.remove(key).ok_or(ConfigError::MissingKey(key))
    }

    fn take_usize(&mut self, key: &'static str) -> Result<usize, ConfigError> {
        let v = self.take_str(key)?;
        v.parse()
            .map_err(|_| ConfigError::BadValue { key, value: v })
    }

    fn take_u64(&mut self, key: &'static str) -> Result<u64, ConfigError> {
        let v = self.take_str(key)?;
        v.parse()
            .map_err(|_| ConfigError::BadValue { key, value: v })
    }

    fn take_f64(&mut self, key: &'static str) -> Result<f64, ConfigError> {
        let v = self.take_str(key)?;
        v.parse()
            .map_err(|_| ConfigError::BadValue { key, value: v })
    }

    fn finish(self, family: &'static str) -> Result<(), ConfigError> {
        match self.map.into_keys().next() {
            Some(key) => Err(ConfigError::UnexpectedKey { key, family }),
            None => Ok(()),
        }
    }
}

fn expect_shape(
    family: &'static str,
    n: usize,
    k: usize,
    want_n: usize,
    want_k: usize,
) -> Result<(), ConfigError> {
    if n != want_n || k != want_k {
        return Err(ConfigError::BadShape {
            family,
            n: want_n,
            k: want_k,
        });
    }
    Ok(())
}

impl FromStr for FamilyConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut f = Fields::parse(s)?;
        let name = f.take_str("name")?;
        let n = f.take_usize("n")?;
        let k = f.take_usize("k")?;
        let seed = RngSeed(f.take_u64("seed")?);
        let family = match name.as_str() {
            "gaussian" => SketchFamily::Gaussian { n, k },
            "identity_mix" => {
                expect_shape("identity_mix", n, k, 2, 2)?;
                SketchFamily::IdentityMix {
                    rho: f.take_f64("rho")?,
                }
            }
            "augmented_spike" => {
                expect_shape("augmented_spike", n, k, 2, 3)?;
                SketchFamily::AugmentedSpike {
                    epsilon: f.take_f64("epsilon")?,
                    loss: f.take_f64("L")?,
                }
            }
            "trace_spike" => {
                let s_dim = f.take_usize("s")?;
                if n != s_dim || k != s_dim {
                    return Err(ConfigError::BadShape {
                        family: "trace_spike",
                        n: s_dim,
                        k: s_dim,
                    });
                }
                SketchFamily::TraceSpike {
                    s: s_dim,
                    alpha: f.take_f64("alpha")?,
                    q: f.take_f64("q")?,
                }
            }
            "expo_rank_one" => {
                expect_shape("expo_rank_one", n, k, 2, 2)?;
                SketchFamily::ExpoRankOne {
                    alpha: f.take_f64("alpha")?,
                }
            }
            "sign_pair" => {
                expect_shape("sign_pair", n, k, 2, 1)?;
                SketchFamily::SignPair
            }
            "sparse_signed" => SketchFamily::SparseSigned { n, k },
            "lp_sampler" => SketchFamily::LpSampler {
                n,
                k,
                p: f.take_f64("p")?,
            },
            other => return Err(ConfigError::UnknownFamily(other.to_string())),
        };
        f.finish(family.name())?;
        family.validate()?;
        Ok(FamilyConfig { family, seed })
    }
}

impl fmt::Display for FamilyConfig {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = &self.family;
        writeln!(out, "name = {}", fam.name())?;
        writeln!(out, "n = {}", fam.n())?;
        writeln!(out, "k = {}", fam.k())?;
        match *fam {
            SketchFamily::Gaussian { .. }
            | SketchFamily::SignPair
            | SketchFamily::SparseSigned { .. } => {}
            SketchFamily::IdentityMix { rho } => writeln!(out, "rho = {rho}")?,
            SketchFamily::AugmentedSpike { epsilon, loss } => {
                writeln!(out, "epsilon = {epsilon}")?;
                writeln!(out, "L = {loss}")?;
            }
            SketchFamily::TraceSpike { s, alpha, q } => {
                writeln!(out, "s = {s}")?;
                writeln!(out, "alpha = {alpha}")?;
                writeln!(out, "q = {q}")?;
            }
            SketchFamily::ExpoRankOne { alpha } => writeln!(out, "alpha = {alpha}")?,
            SketchFamily::LpSampler { p, .. } => writeln!(out, "p = {p}")?,
        }
        write!(out, "seed = {}", self.seed.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(c: &FamilyConfig) {
        let text = c.to_string();
        let back: FamilyConfig = text.parse().unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(&back, c);
    }

    #[test]
    fn roundtrips_every_family() {
        let seeds = RngSeed(42);
        for family in [
            SketchFamily::Gaussian { n: 7, k: 3 },
            SketchFamily::IdentityMix { rho: 0.3 },
            SketchFamily::AugmentedSpike {
                epsilon: 0.1,
                loss: 2.0,
            },
            SketchFamily::TraceSpike {
                s: 4,
                alpha: 0.5,
                q: 0.25,
            },
            SketchFamily::ExpoRankOne { alpha: 0.5 },
            SketchFamily::SignPair,
            SketchFamily::SparseSigned { n: 30, k: 1 },
            SketchFamily::LpSampler { n: 6, k: 3, p: 1.5 },
        ] {
            roundtrip(&FamilyConfig {
                family,
                seed: seeds,
            });
        }
    }

    #[test]
    fn roundtrips_awkward_reals() {
        roundtrip(&FamilyConfig {
            family: SketchFamily::IdentityMix {
                rho: std::f64::consts::LN_2,
            },
            seed: RngSeed(u64::MAX),
        });
        roundtrip(&FamilyConfig {
            family: SketchFamily::LpSampler {
                n: 2,
                k: 9,
                p: 1.0 + 1e-12,
            },
            seed: RngSeed(0),
        });
    }

    #[test]
    fn parse_accepts_comments_and_whitespace() {
        let text = "# a comment\n\n  name = sign_pair \n n=2\nk = 1\n seed = 7 \n";
        let c: FamilyConfig = text.parse().unwrap();
        assert_eq!(c.family, SketchFamily::SignPair);
        assert_eq!(c.seed, RngSeed(7));
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(matches!(
            "name = gaussian\nn = 2\nk = 2\nseed = 1\nname = gaussian".parse::<FamilyConfig>(),
            Err(ConfigError::DuplicateKey(_))
        ));
        assert!(matches!(
            "name = gaussian\nn = 2\nseed = 1".parse::<FamilyConfig>(),
            Err(ConfigError::MissingKey("k"))
        ));
        assert!(matches!(
            "name = wat\nn = 2\nk = 2\nseed = 1".parse::<FamilyConfig>(),
            Err(ConfigError::UnknownFamily(_))
        ));
        assert!(matches!(
            "name = gaussian\nn = 2\nk = 2\nseed = 1\nrho = 0.5".parse::<FamilyConfig>(),
            Err(ConfigError::UnexpectedKey { .. })
        ));
        assert!(matches!(
            "name = identity_mix\nn = 2\nk = 2\nrho = nope\nseed = 1".parse::<FamilyConfig>(),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            "name = identity_mix\nn = 3\nk = 2\nrho = 0.5\nseed = 1".parse::<FamilyConfig>(),
            Err(ConfigError::BadShape { .. })
        ));
        // NaN parses as a float but fails family validation.
        assert!(matches!(
            "name = identity_mix\nn = 2\nk = 2\nrho = NaN\nseed = 1".parse::<FamilyConfig>(),
            Err(ConfigError::Family(_))
        ));
        assert!("no equals sign here".parse::<FamilyConfig>().is_err());
    }
}
