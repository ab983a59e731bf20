//! Line-oriented run configuration.
//!
//! ```text
//! # comment
//! preset = example1
//! order = 0.9
//! dim = 2
//! x0 = [-10, 10]
//! rhs1 = "-x1 - x2/(1+t)"
//! rhs2 = "x1 - x2"
//! t_end = 50
//! h = 0.01
//! ```
//!
//! Values are numbers, bracketed comma-separated lists, double-quoted
//! strings, or bare words. Unknown and repeated keys are errors.

use std::collections::BTreeMap;
use std::path::PathBuf;

use fracstab_core::presets::{self, Preset};
use fracstab_core::{Expr, FracOrder, SystemDef};

use crate::CliError;

/// Instances per check when the config gives only a suite name.
pub const DEFAULT_CHECK_COUNT: usize = 200;

const KEYS: &[&str] = &[
    "preset", "label", "order", "dim", "x0", "t0", "t_end", "h", "h_list", "checks", "output",
    "seed",
];

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Number(f64),
    Text(String),
    Word(String),
    List(Vec<String>),
}

impl Value {
    fn describe(&self) -> &'static str {
        match self {
            Value::Number(_) => "a number",
            Value::Text(_) => "a quoted string",
            Value::Word(_) => "a bare word",
            Value::List(_) => "a list",
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSpec {
    pub name: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub system: Option<SystemDef>,
    pub t0: f64,
    pub t_end: Option<f64>,
    pub h: Option<f64>,
    pub h_list: Option<Vec<f64>>,
    pub checks: Vec<CheckSpec>,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    /// The system, or an error naming the first missing key.
    pub fn require_system(&self) -> Result<&SystemDef, CliError> {
        self.system
            .as_ref()
            .ok_or_else(|| CliError::config(None, "config defines no system: missing key 'order'"))
    }

    pub fn require_grid(&self) -> Result<(f64, f64), CliError> {
        let t_end = self
            .t_end
            .ok_or_else(|| CliError::config(None, "missing key 't_end'"))?;
        let h = self.h.ok_or_else(|| CliError::config(None, "missing key 'h'"))?;
        Ok((t_end, h))
    }
}

fn parse_value(raw: &str, line: usize) -> Result<Value, CliError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(CliError::config(Some(line), "missing value after '='"));
    }
    if let Some(rest) = raw.strip_prefix('"') {
        let Some(body) = rest.strip_suffix('"') else {
            return Err(CliError::config(Some(line), "unterminated string"));
        };
        if body.contains('"') {
            return Err(CliError::config(Some(line), "stray '\"' inside string"));
        }
        return Ok(Value::Text(body.to_string()));
    }
    if let Some(rest) = raw.strip_prefix('[') {
        let Some(body) = rest.strip_suffix(']') else {
            return Err(CliError::config(Some(line), "unterminated list: missing ']'"));
        };
        let body = body.trim();
        if body.is_empty() {
            return Ok(Value::List(Vec::new()));
        }
        let items: Vec<String> = body.split(',').map(|s| s.trim().to_string()).collect();
        if items.iter().any(String::is_empty) {
            return Err(CliError::config(Some(line), "empty list item"));
        }
        return Ok(Value::List(items));
    }
    if let Ok(v) = raw.parse::<f64>() {
        return Ok(Value::Number(v));
    }
    if raw.contains(char::is_whitespace) && !raw.contains(',') {
        return Err(CliError::config(
            Some(line),
            format!("unquoted value '{raw}' contains spaces; quote expressions"),
        ));
    }
    Ok(Value::Word(raw.to_string()))
}

fn is_rhs_key(key: &str) -> Option<usize> {
    let digits = key.strip_prefix("rhs")?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Entry {
                value: Value::Number(v),
                line,
            }) => {
                if v.is_finite() {
                    Ok(Some(*v))
                } else {
                    Err(CliError::config(Some(*line), format!("'{key}' must be finite")))
                }
            }
            Some(e) => Err(CliError::config(
                Some(e.line),
                format!("'{key}' expects a number, got {}", e.value.describe()),
            )),
        }
    }

    fn numbers(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Entry {
                value: Value::List(items),
                line,
            }) => items
                .iter()
                .map(|s| {
                    s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                        CliError::config(Some(*line), format!("'{key}': '{s}' is not a number"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(Entry {
                value: Value::Number(v),
                ..
            }) => Ok(Some(vec![*v])),
            Some(e) => Err(CliError::config(
                Some(e.line),
                format!("'{key}' expects a list of numbers, got {}", e.value.describe()),
            )),
        }
    }

    fn word(&self, key: &str) -> Result<Option<(String, usize)>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Entry {
                value: Value::Word(s) | Value::Text(s),
                line,
            }) => Ok(Some((s.clone(), *line))),
            Some(e) => Err(CliError::config(
                Some(e.line),
                format!("'{key}' expects a name, got {}", e.value.describe()),
            )),
        }
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.0.get(key).map(|e| e.line)
    }
}

fn parse_checks(entry: &Entry) -> Result<Vec<CheckSpec>, CliError> {
    let items: Vec<String> = match &entry.value {
        Value::List(items) => items.clone(),
        Value::Word(s) | Value::Text(s) => s.split(',').map(|p| p.trim().to_string()).collect(),
        Value::Number(_) => {
            return Err(CliError::config(Some(entry.line), "'checks' expects check names"))
        }
    };
    items
        .iter()
        .map(|item| {
            let (name, count) = match item.split_once(':') {
                Some((n, c)) => {
                    let count = c.trim().parse::<usize>().map_err(|_| {
                        CliError::config(Some(entry.line), format!("bad instance count in '{item}'"))
                    })?;
                    (n.trim(), count)
                }
                None => (item.as_str(), DEFAULT_CHECK_COUNT),
            };
            if name.is_empty() {
                return Err(CliError::config(Some(entry.line), "empty check name"));
            }
            Ok(CheckSpec {
                name: name.to_string(),
                count,
            })
        })
        .collect()
}

/// Parse and resolve a configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let mut map: BTreeMap<String, Entry> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw_line).trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(CliError::config(Some(line), format!("expected 'key = value', got '{content}'")));
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(CliError::config(Some(line), "missing key before '='"));
        }
        if !KEYS.contains(&key) && is_rhs_key(key).is_none() {
            return Err(CliError::config(Some(line), format!("unknown key '{key}'")));
        }
        if let Some(prev) = map.get(key) {
            return Err(CliError::config(
                Some(line),
                format!("duplicate key '{key}' (first set on line {})", prev.line),
            ));
        }
        let value = parse_value(value, line)?;
        map.insert(key.to_string(), Entry { line, value });
    }
    resolve(Entries(map))
}

/// `#` starts a comment unless it sits inside a quoted string.
fn strip_comment(line: &str) -> &str {
    let mut in_string = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_string = !in_string,
            '#' if !in_string => return &line[..i],
            _ => {}
        }
    }
    line
}

fn resolve(e: Entries) -> Result<RunConfig, CliError> {
    let preset: Option<Preset> = match e.word("preset")? {
        Some((name, line)) => Some(
            presets::by_name(&name)
                .map_err(|err| CliError::config(Some(line), err.to_string()))?,
        ),
        None => None,
    };

    let mut rhs_keys: Vec<(usize, String, usize)> = Vec::new();
    for (key, entry) in &e.0 {
        if let Some(i) = is_rhs_key(key) {
            match &entry.value {
                Value::Text(s) => rhs_keys.push((i, s.clone(), entry.line)),
                other => {
                    return Err(CliError::config(
                        Some(entry.line),
                        format!("'{key}' expects a quoted expression, got {}", other.describe()),
                    ))
                }
            }
        }
    }
    rhs_keys.sort_by_key(|k| k.0);

    let dim = match e.number("dim")? {
        Some(d) if d >= 1.0 && d.fract() == 0.0 => Some(d as usize),
        Some(d) => {
            return Err(CliError::config(e.line("dim"), format!("'dim' must be a positive integer, got {d}")))
        }
        None => None,
    };
    let x0 = e.numbers("x0")?;
    let order = e.number("order")?;

    let defines_system = preset.is_some() || order.is_some() || x0.is_some() || dim.is_some() || !rhs_keys.is_empty();
    let system = if defines_system {
        Some(build_system(&e, preset.as_ref(), order, dim, x0, &rhs_keys)?)
    } else {
        None
    };

    let t0 = e.number("t0")?.unwrap_or(0.0);
    let t_end = e.number("t_end")?.or(preset.as_ref().map(|p| p.t_end));
    let h = e.number("h")?.or(preset.as_ref().map(|p| p.h));
    if let Some(h) = h {
        if h <= 0.0 {
            return Err(CliError::config(e.line("h"), format!("'h' must be positive, got {h}")));
        }
    }
    if let Some(te) = t_end {
        if te <= t0 {
            return Err(CliError::config(
                e.line("t_end"),
                format!("'t_end' = {te} must exceed t0 = {t0}"),
            ));
        }
    }
    let h_list = e.numbers("h_list")?;
    if let Some(list) = &h_list {
        if list.len() < 2 || list.iter().any(|&v| v <= 0.0) {
            return Err(CliError::config(
                e.line("h_list"),
                "'h_list' needs at least two positive step sizes",
            ));
        }
    }
    let checks = match e.0.get("checks") {
        Some(entry) => parse_checks(entry)?,
        None => Vec::new(),
    };
    let output = e.word("output")?.map(|(s, _)| PathBuf::from(s));
    let seed = match e.number("seed")? {
        Some(s) if s >= 0.0 && s.fract() == 0.0 && s <= u64::MAX as f64 => s as u64,
        Some(s) => {
            return Err(CliError::config(e.line("seed"), format!("'seed' must be a non-negative integer, got {s}")))
        }
        None => 0,
    };

    Ok(RunConfig {
        preset: preset.map(|p| p.name.to_string()),
        system,
        t0,
        t_end,
        h,
        h_list,
        checks,
        output,
        seed,
    })
}

fn build_system(
    e: &Entries,
    preset: Option<&Preset>,
    order: Option<f64>,
    dim: Option<usize>,
    x0: Option<Vec<f64>>,
    rhs_keys: &[(usize, String, usize)],
) -> Result<SystemDef, CliError> {
    let base = preset.map(|p| &p.system);
    let alpha = match (order, base) {
        (Some(a), _) => a,
        (None, Some(s)) => s.order().alpha(),
        (None, None) => return Err(CliError::config(None, "missing key 'order'")),
    };
    let order = FracOrder::new(alpha).map_err(|err| CliError::config(e.line("order"), err.to_string()))?;

    let x0 = match (x0, base) {
        (Some(v), _) => v,
        (None, Some(s)) => s.x0().to_vec(),
        (None, None) => return Err(CliError::config(None, "missing key 'x0'")),
    };
    let n = dim.unwrap_or(x0.len());
    if x0.len() != n {
        return Err(CliError::config(
            e.line("x0"),
            format!("dimension mismatch: dim = {n} but x0 has {} entries", x0.len()),
        ));
    }

    let rhs: Vec<Expr> = if rhs_keys.is_empty() {
        match base {
            Some(s) => s.rhs().to_vec(),
            None => return Err(CliError::config(None, "missing key 'rhs1'")),
        }
    } else {
        for (pos, (i, _, line)) in rhs_keys.iter().enumerate() {
            if *i > n {
                return Err(CliError::config(
                    Some(*line),
                    format!("dimension mismatch: rhs{i} given but dim = {n}"),
                ));
            }
            if *i != pos + 1 {
                return Err(CliError::config(Some(*line), format!("missing key 'rhs{}'", pos + 1)));
            }
        }
        if rhs_keys.len() != n {
            return Err(CliError::config(
                None,
                format!("dimension mismatch: dim = {n} but only {} rhs lines", rhs_keys.len()),
            ));
        }
        rhs_keys
            .iter()
            .map(|(i, s, line)| {
                Expr::parse(s).map_err(|err| CliError::config(Some(*line), format!("rhs{i}: {err}")))
            })
            .collect::<Result<_, _>>()?
    };

    let label = match e.word("label")? {
        Some((l, _)) => l,
        None => base.map_or_else(|| "system".to_string(), |s| s.label().to_string()),
    };
    SystemDef::new(label, order, x0, rhs).map_err(|err| CliError::config(None, err.to_string()))
}
