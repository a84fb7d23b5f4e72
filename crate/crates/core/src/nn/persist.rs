//! Text parameter files.
//!
//! ```text
//! freeway-qnet 1
//! architecture plain|dueling
//! <group> <in>:<out>:<activation> ...      one line per layer group
//! <group>.<layer>.<weight|bias> <rows> <cols> <v> <v> ...
//! end
//! ```
//!
//! Plain networks have the single group `plain`; dueling networks have
//! `trunk`, `value` and `advantage`, in that order. Values are written with
//! 17 significant digits so every `f64` survives a round trip bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::{Activation, LayerSpec, Matrix, NetworkSpec, QNetwork};

pub const FORMAT_NAME: &str = "freeway-qnet";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: unsupported format version {found} (expected {FORMAT_NAME} {FORMAT_VERSION})")]
    Version { line: usize, found: String },
    #[error("line {line}: malformed parameter file: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: architecture mismatch: file has {found}, expected {expected}")]
    ArchitectureMismatch { line: usize, expected: String, found: String },
}

fn groups(spec: &NetworkSpec) -> Vec<(&'static str, &[LayerSpec])> {
    match spec {
        NetworkSpec::Plain(l) => vec![("plain", l.as_slice())],
        NetworkSpec::Dueling { trunk, value, advantage } => vec![
            ("trunk", trunk.as_slice()),
            ("value", value.as_slice()),
            ("advantage", advantage.as_slice()),
        ],
    }
}

fn arch_name(spec: &NetworkSpec) -> &'static str {
    if spec.is_dueling() {
        "dueling"
    } else {
        "plain"
    }
}

fn layer_list(layers: &[LayerSpec]) -> String {
    layers
        .iter()
        .map(|l| format!("{}:{}:{}", l.in_dim, l.out_dim, l.activation.name()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Human-readable architecture descriptor, e.g. `plain[30:128:relu 128:5:linear]`.
pub fn describe(spec: &NetworkSpec) -> String {
    let parts: Vec<String> = groups(spec)
        .into_iter()
        .map(|(name, layers)| format!("{name}[{}]", layer_list(layers)))
        .collect();
    format!("{} {}", arch_name(spec), parts.join(" "))
}

fn matrix_names(spec: &NetworkSpec) -> Vec<String> {
    let mut names = Vec::new();
    for (group, layers) in groups(spec) {
        for i in 0..layers.len() {
            names.push(format!("{group}.{i}.weight"));
            names.push(format!("{group}.{i}.bias"));
        }
    }
    names
}

pub fn write_params(net: &QNetwork) -> String {
    let spec = net.spec();
    let mut out = String::new();
    writeln!(out, "{FORMAT_NAME} {FORMAT_VERSION}").unwrap();
    writeln!(out, "architecture {}", arch_name(&spec)).unwrap();
    for (group, layers) in groups(&spec) {
        writeln!(out, "{group} {}", layer_list(layers)).unwrap();
    }
    for (name, m) in matrix_names(&spec).iter().zip(net.matrices()) {
        write!(out, "{name} {} {}", m.rows(), m.cols()).unwrap();
        for v in m.values() {
            write!(out, " {v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

fn malformed(line: usize, reason: impl Into<String>) -> PersistError {
    PersistError::Malformed { line, reason: reason.into() }
}

fn parse_layer(line: usize, token: &str) -> Result<LayerSpec, PersistError> {
    let parts: Vec<&str> = token.split(':').collect();
    if parts.len() != 3 {
        return Err(malformed(line, format!("bad layer descriptor `{token}`")));
    }
    let dim = |s: &str| s.parse::<usize>().map_err(|_| malformed(line, format!("bad dimension `{s}`")));
    let activation =
        Activation::parse(parts[2]).ok_or_else(|| malformed(line, format!("unknown activation `{}`", parts[2])))?;
    Ok(LayerSpec::new(dim(parts[0])?, dim(parts[1])?, activation))
}

/// Parses a parameter file. When `expected` is given, the stored
/// architecture must match it exactly.
pub fn read_params(text: &str, expected: Option<&NetworkSpec>) -> Result<QNetwork, PersistError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| lines.next().ok_or_else(|| malformed(0, format!("file ends before {what}")));

    let (n, header) = next("header")?;
    let mut head = header.split_whitespace();
    if head.next() != Some(FORMAT_NAME) {
        return Err(malformed(n, format!("expected `{FORMAT_NAME}` header")));
    }
    let version = head.next().unwrap_or("");
    if version != FORMAT_VERSION.to_string() {
        return Err(PersistError::Version { line: n, found: version.to_string() });
    }

    let (n, arch_line) = next("architecture line")?;
    let arch = match arch_line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["architecture", a @ ("plain" | "dueling")] => *a,
        _ => return Err(malformed(n, format!("bad architecture line `{arch_line}`"))),
    };
    if let Some(exp) = expected {
        if arch_name(exp) != arch {
            return Err(PersistError::ArchitectureMismatch {
                line: n,
                expected: describe(exp),
                found: arch.to_string(),
            });
        }
    }

    let group_names: &[&str] = if arch == "plain" { &["plain"] } else { &["trunk", "value", "advantage"] };
    let mut group_layers = Vec::new();
    for &g in group_names {
        let (n, line) = next("layer list")?;
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some(g) {
            return Err(malformed(n, format!("expected `{g}` layer list")));
        }
        let layers = tokens.map(|t| parse_layer(n, t)).collect::<Result<Vec<_>, _>>()?;
        group_layers.push(layers);
    }
    let spec = if arch == "plain" {
        NetworkSpec::Plain(group_layers.remove(0))
    } else {
        let advantage = group_layers.pop().unwrap();
        let value = group_layers.pop().unwrap();
        let trunk = group_layers.pop().unwrap();
        NetworkSpec::Dueling { trunk, value, advantage }
    };
    spec.validate().map_err(|e| malformed(3, e.to_string()))?;
    if let Some(exp) = expected {
        if *exp != spec {
            return Err(PersistError::ArchitectureMismatch {
                line: 3,
                expected: describe(exp),
                found: describe(&spec),
            });
        }
    }

    let mut net = QNetwork::zeros(&spec);
    let names = matrix_names(&spec);
    for (name, slot) in names.iter().zip(net.matrices_mut()) {
        let (n, line) = next("parameter matrix")?;
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some(name.as_str()) {
            return Err(malformed(n, format!("expected matrix `{name}`")));
        }
        let dim = |t: Option<&str>| {
            t.and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| malformed(n, "missing matrix dimensions"))
        };
        let (rows, cols) = (dim(tokens.next())?, dim(tokens.next())?);
        if (rows, cols) != slot.shape() {
            return Err(malformed(
                n,
                format!("`{name}` is {rows}x{cols}, expected {}x{}", slot.rows(), slot.cols()),
            ));
        }
        let values = tokens
            .map(|t| t.parse::<f64>().map_err(|_| malformed(n, format!("bad number `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != rows * cols {
            return Err(malformed(n, format!("`{name}` has {} values, expected {}", values.len(), rows * cols)));
        }
        *slot = Matrix::from_vec(rows, cols, values).map_err(|e| malformed(n, e.to_string()))?;
    }
    let (n, end) = next("end marker")?;
    if end.trim() != "end" {
        return Err(malformed(n, "expected `end`"));
    }
    Ok(net)
}

pub fn save_params(path: &Path, net: &QNetwork) -> Result<(), PersistError> {
    std::fs::write(path, write_params(net))
        .map_err(|source| PersistError::Io { path: path.display().to_string(), source })
}

pub fn load_params(path: &Path, expected: Option<&NetworkSpec>) -> Result<QNetwork, PersistError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| PersistError::Io { path: path.display().to_string(), source })?;
    read_params(&text, expected)
}
