//! Flat `key = value` configuration text with `[section]` headers.
//!
//! Lines starting with `#` or `;` are comments. Keys before the first
//! header belong to the unnamed section `""`. Duplicate keys or sections
//! are rejected, and consumers reject unknown keys with
//! [`Section::check_keys`].

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    entries: Vec<(String, String)>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            entries: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    fn qualified(&self, key: &str) -> String {
        if self.name.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.name)
        }
    }

    pub fn err(&self, key: &str, message: impl Into<String>) -> Error {
        Error::config(self.qualified(key), message)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| self.err(key, "required key is missing"))
    }

    /// Errors on the first key not in `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self
            .entries
            .iter()
            .find(|(k, _)| !allowed.contains(&k.as_str()))
        {
            Some((k, _)) => {
                Err(self.err(k, format!("unknown key (allowed: {})", allowed.join(", "))))
            }
            None => Ok(()),
        }
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| self.err(key, format!("cannot parse `{v}`")))
            })
            .transpose()
    }

    pub fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn parse_required<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.parse(key)?
            .ok_or_else(|| self.err(key, "required key is missing"))
    }

    /// Comma-separated list.
    pub fn parse_list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<T>()
                            .map_err(|_| self.err(key, format!("cannot parse list item `{s}`")))
                    })
                    .collect()
            })
            .transpose()
    }
}

#[derive(Debug, Clone)]
pub struct ConfigFile {
    pub path: PathBuf,
    pub sections: Vec<Section>,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let perr = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut sections = vec![Section::new("")];
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| perr(lineno, format!("malformed section header `{line}`")))?
                    .trim();
                if name.is_empty() {
                    return Err(perr(lineno, "empty section name".into()));
                }
                if sections.iter().any(|s| s.name == name) {
                    return Err(perr(lineno, format!("duplicate section [{name}]")));
                }
                sections.push(Section::new(name));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| perr(lineno, format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(perr(lineno, "empty key".into()));
            }
            let section = sections.last_mut().expect("unnamed section exists");
            if section.get(key).is_some() {
                return Err(perr(lineno, format!("duplicate key `{key}`")));
            }
            section.entries.push((key.to_string(), value.to_string()));
        }
        Ok(Self {
            path: path.to_path_buf(),
            sections,
        })
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// Directory that relative paths inside the file are resolved against.
    pub fn base_dir(&self) -> PathBuf {
        self.path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default()
    }
}

impl std::fmt::Display for Section {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if !self.name.is_empty() {
            writeln!(f, "[{}]", self.name)?;
        }
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ConfigFile> {
        ConfigFile::parse(text, Path::new("test.cfg"))
    }

    #[test]
    fn sections_and_comments() {
        let cfg =
            parse("# c\ntop = 1\n[model]\nkind = ar1\n; x\nrho = 0.5\n\n[mc]\nn_list = 1, 2,3\n")
                .unwrap();
        assert_eq!(cfg.section("").unwrap().get("top"), Some("1"));
        let model = cfg.section("model").unwrap();
        assert_eq!(model.get("kind"), Some("ar1"));
        assert_eq!(model.parse::<f64>("rho").unwrap(), Some(0.5));
        let mc = cfg.section("mc").unwrap();
        assert_eq!(
            mc.parse_list::<usize>("n_list").unwrap(),
            Some(vec![1, 2, 3])
        );
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(parse("[model\nkind = x").is_err());
        assert!(parse("just text").is_err());
        assert!(parse("a = 1\na = 2").is_err());
        assert!(parse("[m]\n[m]").is_err());
    }

    #[test]
    fn errors_name_the_key() {
        let cfg = parse("[mc]\nalpha = abc\nbogus = 1").unwrap();
        let mc = cfg.section("mc").unwrap();
        let e = mc.parse::<f64>("alpha").unwrap_err().to_string();
        assert!(e.contains("mc.alpha"), "{e}");
        let e = mc.check_keys(&["alpha"]).unwrap_err().to_string();
        assert!(e.contains("mc.bogus"), "{e}");
    }
}
