//! Plain-text model file.
//!
//! ```text
//! gaussian gamma=0.3333333333333333 bias=0.41 n_sv=2 dim=3
//! 0.25 0.1 0.2 0.3
//! -0.25 0.4 0.5 0.6
//! ```
//!
//! The header names the kernel and its parameters, the bias, the number of
//! support vectors and the feature dimension. Each following line holds a
//! dual coefficient and then the support vector. Reals are written in
//! shortest round-trip form, so a reloaded model predicts bit-identically.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use epochcast_core::svr::{KernelSpec, SvrModel};

use crate::error::{Error, Result};

pub fn model_to_string(model: &SvrModel) -> String {
    let mut out = String::new();
    let kernel = match model.kernel() {
        KernelSpec::Linear => "linear".to_string(),
        KernelSpec::Polynomial { degree, coef0 } => format!("polynomial degree={degree} coef0={coef0:?}"),
        KernelSpec::Gaussian { gamma } => format!("gaussian gamma={gamma:?}"),
    };
    out.push_str(&format!(
        "{kernel} bias={:?} n_sv={} dim={}\n",
        model.bias(),
        model.n_sv(),
        model.dim()
    ));
    for (c, sv) in model.dual_coeffs().iter().zip(model.support_vectors()) {
        out.push_str(&format!("{c:?}"));
        for v in sv {
            out.push_str(&format!(" {v:?}"));
        }
        out.push('\n');
    }
    out
}

fn parse_num<T: std::str::FromStr>(text: &str, line: u64, field: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    text.parse()
        .map_err(|e: T::Err| Error::format(line, field, format!("cannot parse {text:?}: {e}")))
}

pub fn model_from_str(text: &str) -> Result<SvrModel> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i as u64 + 1, l.trim()));
    let (_, head) = lines.next().ok_or_else(|| Error::format(1, "kernel", "empty model file"))?;
    let mut words = head.split_whitespace();
    let kind = words.next().ok_or_else(|| Error::format(1, "kernel", "missing kernel name"))?;
    let mut fields = BTreeMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| Error::format(1, w, "expected key=value"))?;
        if fields.insert(k, v).is_some() {
            return Err(Error::format(1, k, "repeated key"));
        }
    }
    let mut take = |key: &str| -> Result<&str> {
        fields
            .remove(key)
            .ok_or_else(|| Error::format(1, key, "missing"))
    };
    let kernel = match kind {
        "linear" => KernelSpec::Linear,
        "polynomial" => KernelSpec::Polynomial {
            degree: parse_num(take("degree")?, 1, "degree")?,
            coef0: parse_num(take("coef0")?, 1, "coef0")?,
        },
        "gaussian" => KernelSpec::Gaussian {
            gamma: parse_num(take("gamma")?, 1, "gamma")?,
        },
        other => return Err(Error::format(1, "kernel", format!("unknown kernel {other:?}"))),
    };
    let bias: f64 = parse_num(take("bias")?, 1, "bias")?;
    let n_sv: usize = parse_num(take("n_sv")?, 1, "n_sv")?;
    let dim: usize = parse_num(take("dim")?, 1, "dim")?;
    if let Some(extra) = fields.keys().next() {
        return Err(Error::format(1, *extra, "unknown key"));
    }

    let mut coeffs = Vec::with_capacity(n_sv);
    let mut svs = Vec::with_capacity(n_sv);
    for (line, l) in lines.filter(|(_, l)| !l.is_empty()) {
        let values: Vec<&str> = l.split_whitespace().collect();
        if values.len() != dim + 1 {
            return Err(Error::format(
                line,
                "support_vector",
                format!("expected {} numbers, found {}", dim + 1, values.len()),
            ));
        }
        coeffs.push(parse_num(values[0], line, "coefficient")?);
        let sv = values[1..]
            .iter()
            .enumerate()
            .map(|(j, v)| parse_num(v, line, &format!("x_{}", j + 1)))
            .collect::<Result<Vec<f64>>>()?;
        svs.push(sv);
    }
    if svs.len() != n_sv {
        return Err(Error::format(
            1,
            "n_sv",
            format!("header declares {n_sv} support vectors, file has {}", svs.len()),
        ));
    }
    Ok(SvrModel::new(svs, coeffs, bias, kernel, dim)?)
}

pub fn save_model(model: &SvrModel, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(model_to_string(model).as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<SvrModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}
