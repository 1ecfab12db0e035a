//! Minimal scenario-file parser: named `[sections]` holding `key = value`
//! entries, `#` comments, tuple values in parentheses.

use std::fmt;

/// A configuration error, carrying the offending line when known.
#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            message: message.into(),
        }
    }

    pub fn new(message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone)]
pub struct RawEntry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct RawSection {
    pub name: String,
    pub line: usize,
    pub entries: Vec<RawEntry>,
}

#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub sections: Vec<RawSection>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig, ConfigError> {
        let mut sections: Vec<RawSection> = Vec::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') || line.len() < 3 {
                    return Err(ConfigError::at(line_no, "malformed section header"));
                }
                let name = line[1..line.len() - 1].trim().to_string();
                if sections.iter().any(|s| s.name == name) {
                    return Err(ConfigError::at(
                        line_no,
                        format!("duplicate section [{name}]"),
                    ));
                }
                sections.push(RawSection {
                    name,
                    line: line_no,
                    entries: Vec::new(),
                });
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(ConfigError::at(
                    line_no,
                    "expected `key = value` or `[section]`",
                ));
            };
            let key = line[..eq].trim().to_string();
            let value = line[eq + 1..].trim().to_string();
            if key.is_empty() {
                return Err(ConfigError::at(line_no, "empty key"));
            }
            let Some(section) = sections.last_mut() else {
                return Err(ConfigError::at(line_no, "entry before any [section]"));
            };
            if section.entries.iter().any(|e| e.key == key) {
                return Err(ConfigError::at(
                    line_no,
                    format!("duplicate key `{key}` in [{}]", section.name),
                ));
            }
            section.entries.push(RawEntry {
                key,
                value,
                line: line_no,
            });
        }
        if sections.is_empty() {
            return Err(ConfigError::new("empty scenario file"));
        }
        Ok(RawConfig { sections })
    }

    pub fn section(&self, name: &str) -> Option<&RawSection> {
        self.sections.iter().find(|s| s.name == name)
    }
}

/// Typed access to one section with unknown-key detection: every key must
/// be consumed by a getter, and `finish` lists the valid keys otherwise.
pub struct SectionReader<'a> {
    section: &'a RawSection,
    known: Vec<&'static str>,
    consumed: Vec<String>,
}

impl<'a> SectionReader<'a> {
    pub fn new(section: &'a RawSection) -> Self {
        SectionReader {
            section,
            known: Vec::new(),
            consumed: Vec::new(),
        }
    }

    fn entry(&mut self, key: &'static str) -> Option<&'a RawEntry> {
        if !self.known.contains(&key) {
            self.known.push(key);
        }
        let found = self.section.entries.iter().find(|e| e.key == key);
        if found.is_some() {
            self.consumed.push(key.to_string());
        }
        found
    }

    pub fn require_str(&mut self, key: &'static str) -> Result<&'a str, ConfigError> {
        match self.entry(key) {
            Some(e) => Ok(&e.value),
            None => Err(ConfigError::at(
                self.section.line,
                format!("[{}] is missing required key `{key}`", self.section.name),
            )),
        }
    }

    pub fn opt_str(&mut self, key: &'static str) -> Option<&'a str> {
        self.entry(key).map(|e| e.value.as_str())
    }

    pub fn require_f64(&mut self, key: &'static str) -> Result<f64, ConfigError> {
        let e = self.entry(key).ok_or_else(|| {
            ConfigError::at(
                self.section.line,
                format!("[{}] is missing required key `{key}`", self.section.name),
            )
        })?;
        parse_f64(&e.value, e.line)
    }

    pub fn opt_f64(&mut self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        match self.entry(key) {
            Some(e) => parse_f64(&e.value, e.line).map(Some),
            None => Ok(None),
        }
    }

    pub fn require_usize(&mut self, key: &'static str) -> Result<usize, ConfigError> {
        let e = self.entry(key).ok_or_else(|| {
            ConfigError::at(
                self.section.line,
                format!("[{}] is missing required key `{key}`", self.section.name),
            )
        })?;
        e.value
            .parse::<usize>()
            .map_err(|_| ConfigError::at(e.line, format!("`{key}` must be a nonnegative integer")))
    }

    pub fn opt_usize(&mut self, key: &'static str) -> Result<Option<usize>, ConfigError> {
        match self.entry(key) {
            Some(e) => e.value.parse::<usize>().map(Some).map_err(|_| {
                ConfigError::at(e.line, format!("`{key}` must be a nonnegative integer"))
            }),
            None => Ok(None),
        }
    }

    pub fn opt_u64(&mut self, key: &'static str) -> Result<Option<u64>, ConfigError> {
        match self.entry(key) {
            Some(e) => e.value.parse::<u64>().map(Some).map_err(|_| {
                ConfigError::at(e.line, format!("`{key}` must be an unsigned integer"))
            }),
            None => Ok(None),
        }
    }

    pub fn opt_bool(&mut self, key: &'static str) -> Result<Option<bool>, ConfigError> {
        match self.entry(key) {
            Some(e) => match e.value.as_str() {
                "true" => Ok(Some(true)),
                "false" => Ok(Some(false)),
                _ => Err(ConfigError::at(
                    e.line,
                    format!("`{key}` must be true or false"),
                )),
            },
            None => Ok(None),
        }
    }

    pub fn opt_tuple(&mut self, key: &'static str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.entry(key) {
            Some(e) => parse_tuple(&e.value, e.line).map(Some),
            None => Ok(None),
        }
    }

    pub fn require_tuple(&mut self, key: &'static str) -> Result<Vec<f64>, ConfigError> {
        let e = self.entry(key).ok_or_else(|| {
            ConfigError::at(
                self.section.line,
                format!("[{}] is missing required key `{key}`", self.section.name),
            )
        })?;
        parse_tuple(&e.value, e.line)
    }

    /// Error on unconsumed keys, listing the valid ones.
    pub fn finish(self) -> Result<(), ConfigError> {
        for e in &self.section.entries {
            if !self.consumed.iter().any(|k| k == &e.key) {
                return Err(ConfigError::at(
                    e.line,
                    format!(
                        "unknown key `{}` in [{}]; valid keys: {}",
                        e.key,
                        self.section.name,
                        self.known.join(", ")
                    ),
                ));
            }
        }
        Ok(())
    }
}

fn parse_f64(value: &str, line: usize) -> Result<f64, ConfigError> {
    let v = match value {
        "pi" => std::f64::consts::PI,
        "pi/2" => std::f64::consts::FRAC_PI_2,
        "2pi" => std::f64::consts::TAU,
        other => other
            .parse::<f64>()
            .map_err(|_| ConfigError::at(line, format!("expected a number, got `{other}`")))?,
    };
    if !v.is_finite() {
        return Err(ConfigError::at(line, "number must be finite"));
    }
    Ok(v)
}

fn parse_tuple(value: &str, line: usize) -> Result<Vec<f64>, ConfigError> {
    let inner = value
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| ConfigError::at(line, "expected a tuple like (a, b, ...)"))?;
    let trimmed = inner.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|part| parse_f64(part.trim(), line))
        .collect()
}
