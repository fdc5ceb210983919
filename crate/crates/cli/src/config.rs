//! Run configurations and their flat `key=value` file format.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use unitri::walk::WalkKind;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    TvCurve,
    BoundCurve,
    Spectrum,
    Superclasses,
    Words,
    Compare,
    Verify,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::TvCurve,
        Command::BoundCurve,
        Command::Spectrum,
        Command::Superclasses,
        Command::Words,
        Command::Compare,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::TvCurve => "tv-curve",
            Command::BoundCurve => "bound-curve",
            Command::Spectrum => "spectrum",
            Command::Superclasses => "superclasses",
            Command::Words => "words",
            Command::Compare => "compare",
            Command::Verify => "verify",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown command {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format {s:?}; expected csv or json"))),
        }
    }
}

/// Everything one invocation needs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub p: u32,
    pub walk: WalkKind,
    /// A single time; when set, curves report only this row.
    pub t: Option<u64>,
    pub t_max: u64,
    pub eps: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub exact: bool,
    pub jobs: Option<usize>,
    pub budget_states: Option<u64>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            n: 3,
            p: 3,
            walk: WalkKind::P,
            t: None,
            t_max: 20,
            eps: None,
            format: Format::Csv,
            out: None,
            exact: false,
            jobs: None,
            budget_states: None,
        }
    }

    /// Times a curve covers.
    pub fn times(&self) -> Vec<u64> {
        match self.t {
            Some(t) => vec![t],
            None => (0..=self.t_max).collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut lines = vec![
            format!("command={}", self.command),
            format!("n={}", self.n),
            format!("p={}", self.p),
            format!("walk={}", self.walk),
        ];
        if let Some(t) = self.t {
            lines.push(format!("t={t}"));
        }
        lines.push(format!("t_max={}", self.t_max));
        if let Some(eps) = self.eps {
            lines.push(format!("eps={eps:?}"));
        }
        lines.push(format!("format={}", self.format));
        if let Some(out) = &self.out {
            lines.push(format!("out={}", out.display()));
        }
        lines.push(format!("exact={}", self.exact));
        if let Some(j) = self.jobs {
            lines.push(format!("jobs={j}"));
        }
        if let Some(b) = self.budget_states {
            lines.push(format!("budget_states={b}"));
        }
        let mut s = lines.join("\n");
        s.push('\n');
        s
    }

    /// Parses a config file. Blank lines and `#` comments are skipped;
    /// `command` may be left out when `fallback` supplies it.
    pub fn from_text(text: &str, fallback: Option<Command>) -> Result<Self, CliError> {
        let mut pairs = Vec::new();
        let mut command = fallback;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", k + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "command" {
                command = Some(value.parse()?);
            } else {
                pairs.push((key.to_string(), value.to_string()));
            }
        }
        let command = command.ok_or_else(|| CliError::Usage("config names no command".into()))?;
        let mut cfg = RunConfig::new(command);
        for (key, value) in pairs {
            cfg.set(&key, &value)?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
            value
                .parse()
                .map_err(|_| CliError::Usage(format!("{key}={value:?} is not a valid number")))
        }
        match key {
            "n" => self.n = num(key, value)?,
            "p" => self.p = num(key, value)?,
            "walk" => self.walk = value.parse().map_err(CliError::from)?,
            "t" => self.t = Some(num(key, value)?),
            "t_max" | "t-max" => self.t_max = num(key, value)?,
            "eps" => self.eps = Some(num(key, value)?),
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "exact" => {
                self.exact = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(CliError::Usage(format!("exact={value:?} is not a boolean"))),
                }
            }
            "jobs" => self.jobs = Some(num(key, value)?),
            "budget_states" => self.budget_states = Some(num(key, value)?),
            _ => return Err(CliError::Usage(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_full() {
        let mut c = RunConfig::new(Command::BoundCurve);
        c.n = 4;
        c.p = 7;
        c.walk = WalkKind::ProductQ;
        c.t = Some(9);
        c.t_max = 200;
        c.eps = Some(0.1 + 0.2);
        c.format = Format::Json;
        c.out = Some("runs/out.json".into());
        c.exact = true;
        c.jobs = Some(3);
        c.budget_states = Some(123);
        assert_eq!(RunConfig::from_text(&c.to_text(), None).unwrap(), c);
    }

    #[test]
    fn round_trip_defaults() {
        for cmd in Command::ALL {
            let c = RunConfig::new(cmd);
            assert_eq!(RunConfig::from_text(&c.to_text(), None).unwrap(), c);
        }
    }

    #[test]
    fn comments_and_fallback() {
        let c = RunConfig::from_text("# x\n\nn = 2\np=5\n", Some(Command::TvCurve)).unwrap();
        assert_eq!((c.command, c.n, c.p), (Command::TvCurve, 2, 5));
    }

    #[test]
    fn bad_lines() {
        assert!(RunConfig::from_text("n=2", None).is_err());
        assert!(RunConfig::from_text("command=verify\nsize=2", None).is_err());
        assert!(RunConfig::from_text("command=verify\nn", None).is_err());
        assert!(RunConfig::from_text("command=verify\nexact=maybe", None).is_err());
        assert!(RunConfig::from_text("command=nope", None).is_err());
    }
}
