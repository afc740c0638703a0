//! Settings resolved from flags, `KLSM_` environment variables and an
//! optional `key=value` file, in that order of precedence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::output::Format;
use crate::CliError;

pub const KEYS: [&str; 5] = ["threads", "cache_dir", "format", "seed", "kind"];

/// Parsed `key=value` file. Blank lines and lines starting with `#` are skipped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    pub values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
            let k = k.trim().replace('-', "_");
            if !KEYS.contains(&k.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key '{k}'", i + 1)));
            }
            values.insert(k, v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Values that flags and environment left unset, filled from the file.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

/// Flag-or-env values as clap delivered them.
#[derive(Clone, Debug, Default)]
pub struct Layered {
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Usage(format!("config: bad value '{v}' for {key}")))
}

impl Settings {
    pub fn resolve(layered: Layered, file: &ConfigFile) -> Result<Self, CliError> {
        let threads = match layered.threads {
            Some(t) => Some(t),
            None => file.get("threads").map(|v| parse_value("threads", v)).transpose()?,
        };
        if threads == Some(0) {
            return Err(CliError::Usage("threads must be at least 1".into()));
        }
        let cache_dir = layered.cache_dir.or_else(|| file.get("cache_dir").map(PathBuf::from));
        let format = match layered.format {
            Some(f) => f,
            None => file.get("format").map(|v| parse_value("format", v)).transpose()?.unwrap_or(Format::Csv),
        };
        let seed = match layered.seed {
            Some(s) => s,
            None => file
                .get("seed")
                .map(|v| parse_value("seed", v))
                .transpose()?
                .unwrap_or(klsm::verify::DEFAULT_SEED),
        };
        Ok(Settings { threads, cache_dir, format, seed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_file() {
        let f = ConfigFile::parse("# c\n\nthreads = 3\ncache-dir=/tmp/x\n").unwrap();
        assert_eq!(f.get("threads"), Some("3"));
        assert_eq!(f.get("cache_dir"), Some("/tmp/x"));
        assert!(ConfigFile::parse("bogus=1").is_err());
        assert!(ConfigFile::parse("threads").is_err());
    }

    #[test]
    fn precedence() {
        let f = ConfigFile::parse("threads=3\nformat=json\nseed=5").unwrap();
        let s = Settings::resolve(Layered::default(), &f).unwrap();
        assert_eq!((s.threads, s.format, s.seed), (Some(3), Format::Json, 5));
        let l = Layered { threads: Some(2), seed: Some(7), ..Layered::default() };
        let s = Settings::resolve(l, &f).unwrap();
        assert_eq!((s.threads, s.format, s.seed), (Some(2), Format::Json, 7));
        let s = Settings::resolve(Layered::default(), &ConfigFile::default()).unwrap();
        assert_eq!((s.threads, s.format, s.seed), (None, Format::Csv, 20821));
        assert!(Settings::resolve(Layered::default(), &ConfigFile::parse("threads=zero").unwrap()).is_err());
    }
}
