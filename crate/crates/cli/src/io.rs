use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use valuelearn::{Hypothesis, ItemSet, SetFunction, Valuation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Inline JSON, or `@path` to read it from a file.
pub fn parse_params<T: DeserializeOwned>(raw: Option<&str>, what: &str) -> Result<T> {
    let text = match raw {
        None => "{}".to_string(),
        Some(r) => match r.strip_prefix('@') {
            Some(path) => read_text(Path::new(path))?,
            None => r.to_string(),
        },
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {what}"))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_valuation(path: &Path) -> Result<Valuation> {
    Valuation::from_json(&read_text(path)?)
        .with_context(|| format!("loading valuation {}", path.display()))
}

/// Anything evaluable: a valuation or a learned hypothesis.
pub enum Evaluable {
    Valuation(Valuation),
    Hypothesis(Hypothesis),
}

impl Evaluable {
    pub fn load(path: &Path) -> Result<Evaluable> {
        let text = read_text(path)?;
        match Valuation::from_json(&text) {
            Ok(v) => Ok(Evaluable::Valuation(v)),
            Err(ve) => match Hypothesis::from_json(&text) {
                Ok(h) => Ok(Evaluable::Hypothesis(h)),
                Err(he) => bail!(
                    "{} is neither a valuation ({ve}) nor a hypothesis ({he})",
                    path.display()
                ),
            },
        }
    }

    pub fn as_fn(&self) -> &dyn SetFunction {
        match self {
            Evaluable::Valuation(v) => v,
            Evaluable::Hypothesis(h) => h,
        }
    }
}

/// One JSON value per nonblank line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    read_text(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1))
        })
        .collect()
}

/// A set line is either `{"n": .., "items": [..]}` or a bare item array.
#[derive(serde::Deserialize)]
#[serde(untagged)]
pub enum SetLine {
    Full(ItemSet),
    Items(Vec<usize>),
}

impl SetLine {
    pub fn into_set(self, n: usize) -> Result<ItemSet> {
        Ok(match self {
            SetLine::Full(s) => {
                if s.n() != n {
                    bail!("set over {} items given for a ground set of {n}", s.n());
                }
                s
            }
            SetLine::Items(items) => ItemSet::from_indices(n, items)?,
        })
    }
}

pub fn items_text(s: &ItemSet) -> String {
    s.to_vec()
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl Output {
    pub fn write(&self, text: &str) -> Result<()> {
        match &self.path {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    pub fn json<T: Serialize>(&self, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(&text)
    }

    /// Writes JSON or, in CSV mode, the rows produced by `rows`.
    pub fn emit<T: Serialize>(
        &self,
        value: &T,
        rows: impl FnOnce() -> Result<String>,
    ) -> Result<()> {
        match self.format {
            Format::Json => self.json(value),
            Format::Csv => self.write(&rows()?),
        }
    }
}

pub fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
