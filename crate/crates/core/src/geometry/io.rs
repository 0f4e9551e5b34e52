//! Profile serialization: a JSON document `{n, tau, family, params, s, f, phi}` with
//! every float written as `{:.16e}` (17 significant digits, exact round trip).

use super::RadialProfile;
use crate::{Error, Result};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    n: usize,
    tau: f64,
    family: String,
    params: BTreeMap<String, f64>,
    s: Vec<f64>,
    f: Vec<f64>,
    phi: Vec<f64>,
}

/// Fixed float formatting shared by every text output.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn json_array(out: &mut String, v: &[f64]) {
    out.push('[');
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_f64(*x));
    }
    out.push(']');
}

pub fn profile_to_json(p: &RadialProfile) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"n\": {},", p.n());
    let _ = writeln!(out, "  \"tau\": {},", fmt_f64(p.tau()));
    let _ = writeln!(
        out,
        "  \"family\": {},",
        serde_json::to_string(p.family()).unwrap_or_else(|_| "\"custom\"".into())
    );
    out.push_str("  \"params\": {");
    for (i, (k, v)) in p.params().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let key = serde_json::to_string(k).unwrap_or_default();
        let _ = write!(out, "{key}: {}", fmt_f64(*v));
    }
    out.push_str("},\n");
    for (name, v, last) in [("s", p.s(), false), ("f", p.f(), false), ("phi", p.phi(), true)] {
        let _ = write!(out, "  \"{name}\": ");
        json_array(&mut out, v);
        out.push_str(if last { "\n" } else { ",\n" });
    }
    out.push_str("}\n");
    out
}

pub fn profile_from_json(text: &str) -> Result<RadialProfile> {
    let doc: ProfileDoc = serde_json::from_str(text)?;
    let p = RadialProfile::new(doc.n, doc.s, doc.f, doc.phi, doc.tau)?;
    Ok(p.with_family(&doc.family, doc.params))
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    if let Some(d) = dir {
        std::fs::create_dir_all(d)?;
    }
    let name = path
        .file_name()
        .ok_or_else(|| Error::Format(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_profile(path: &Path, p: &RadialProfile) -> Result<()> {
    write_atomic(path, profile_to_json(p).as_bytes())
}

pub fn read_profile(path: &Path) -> Result<RadialProfile> {
    profile_from_json(&std::fs::read_to_string(path)?)
}
