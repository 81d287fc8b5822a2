//! On-disk formats: profile JSON (optionally with a `meta` block), radial
//! CSV, Cartesian grid payloads and the exported CSV tables.
//!
//! Floats are written with Rust's shortest round-trip formatting.

use decay_core::besov::DyadicSpectrum;
use decay_core::examples::ExampleMeta;
use decay_core::numerics::LogScalar;
use decay_core::profiles::{CartesianGrid, Component, RadialProfile, SampledRadial};
use decay_core::semigroup::EvolutionTrace;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub fn to_json<T: Serialize>(x: &T) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_vec_pretty(x).map_err(|e| CliError::Internal(format!("serialize: {e}")))?;
    s.push(b'\n');
    Ok(s)
}

pub fn parse_profile(text: &str) -> Result<(RadialProfile, Option<ExampleMeta>), CliError> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("profile JSON: {e}")))?;
    let meta = match v.as_object_mut().and_then(|o| o.remove("meta")) {
        Some(m) => Some(serde_json::from_value(m).map_err(|e| CliError::Usage(format!("profile meta: {e}")))?),
        None => None,
    };
    let p = serde_json::from_value(v).map_err(|e| CliError::Usage(format!("profile JSON: {e}")))?;
    Ok((p, meta))
}

pub fn profile_json(p: &RadialProfile, meta: Option<&ExampleMeta>) -> Result<Vec<u8>, CliError> {
    let mut v = serde_json::to_value(p).map_err(|e| CliError::Internal(format!("serialize: {e}")))?;
    if let (Some(m), Some(o)) = (meta, v.as_object_mut()) {
        o.insert("meta".into(), serde_json::to_value(m).map_err(|e| CliError::Internal(format!("serialize: {e}")))?);
    }
    to_json(&v)
}

fn num(field: &str, row: usize, s: &str) -> Result<f64, CliError> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("row {row}: {field} {s:?} is not a number")))
}

/// Header `log2_lambda,magnitude`, rows sorted by `log2_lambda`.
pub fn ingest_radial_csv(text: &str, n: u32, label: &str) -> Result<RadialProfile, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| CliError::Usage(format!("radial CSV: {e}")))?;
    if header.iter().collect::<Vec<_>>() != ["log2_lambda", "magnitude"] {
        return Err(CliError::Usage(format!("radial CSV header must be log2_lambda,magnitude, got {header:?}")));
    }
    let (mut nodes, mut mags) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Usage(format!("radial CSV: {e}")))?;
        nodes.push(num("log2_lambda", i + 1, &rec[0])?);
        let m = num("magnitude", i + 1, &rec[1])?;
        if !m.is_finite() {
            return Err(CliError::Usage(format!("row {}: magnitude must be finite", i + 1)));
        }
        mags.push(LogScalar::from_f64(m));
    }
    let sampled = SampledRadial::new(nodes, mags)?;
    let comp = Component { segments: Vec::new(), sampled: Some(sampled) };
    Ok(RadialProfile::new(n, vec![comp], label)?)
}

/// Sampled nodes of the first component that carries them.
pub fn export_radial_csv(p: &RadialProfile) -> Result<Vec<u8>, CliError> {
    let s = p
        .components()
        .iter()
        .find_map(|c| c.sampled.as_ref())
        .ok_or_else(|| CliError::Usage("profile has no sampled part to export".into()))?;
    let mut out = String::from("log2_lambda,magnitude\n");
    for (u, m) in s.log2_nodes.iter().zip(&s.magnitudes) {
        out.push_str(&format!("{u},{}\n", m.to_f64()));
    }
    Ok(out.into_bytes())
}

/// Row-major little-endian `f64` payload described by a JSON sidecar.
pub fn read_grid(header: &str, payload: &[u8]) -> Result<(CartesianGrid, Vec<f64>), CliError> {
    let grid: CartesianGrid = serde_json::from_str(header).map_err(|e| CliError::Usage(format!("grid header: {e}")))?;
    if !payload.len().is_multiple_of(8) {
        return Err(CliError::Usage(format!("grid payload length {} is not a multiple of 8", payload.len())));
    }
    let samples = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((grid, samples))
}

pub fn phi_csv(rows: &[(f64, LogScalar)]) -> Vec<u8> {
    let mut out = String::from("log2_rho,log2_phi\n");
    for (u, v) in rows {
        out.push_str(&format!("{u},{}\n", v.log2_mag()));
    }
    out.into_bytes()
}

pub fn spectrum_csv(sp: &DyadicSpectrum) -> Vec<u8> {
    let mut out = String::from("j,log2_e_j\n");
    for j in sp.js() {
        out.push_str(&format!("{j},{}\n", sp.get(j).log2_mag()));
    }
    out.into_bytes()
}

pub fn trace_csv(tr: &EvolutionTrace) -> Vec<u8> {
    let mut out = String::from("t,log2_norm\n");
    for (t, v) in tr.times.iter().zip(&tr.norms) {
        out.push_str(&format!("{t},{}\n", v.log2_mag()));
    }
    out.into_bytes()
}

/// `lo:hi` with optional `:step`.
pub fn parse_range(s: &str, parts: usize) -> Result<Vec<f64>, CliError> {
    let xs: Result<Vec<f64>, _> = s.split(':').map(|t| t.trim().parse::<f64>()).collect();
    match xs {
        Ok(v) if v.len() == parts && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(CliError::Usage(format!("expected {parts} colon-separated numbers, got {s:?}"))),
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{t:?} is not a number"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use decay_core::examples::example_v0;

    #[test]
    fn meta_block_survives() {
        let (p, m) = example_v0(3, 0.0, 32).unwrap();
        let bytes = profile_json(&p, Some(&m)).unwrap();
        let (q, back) = parse_profile(std::str::from_utf8(&bytes).unwrap()).unwrap();
        assert_eq!(q, p);
        assert_eq!(back.unwrap(), m);
    }

    #[test]
    fn radial_csv_round_trip() {
        let text = "log2_lambda,magnitude\n-3,0.5\n-1.25,2\n0,1e-300\n";
        let p = ingest_radial_csv(text, 3, "s").unwrap();
        let again = export_radial_csv(&p).unwrap();
        let q = ingest_radial_csv(std::str::from_utf8(&again).unwrap(), 3, "s").unwrap();
        assert_eq!(p, q);
        assert_eq!(export_radial_csv(&q).unwrap(), again);
    }

    #[test]
    fn bad_header_is_usage() {
        assert!(matches!(ingest_radial_csv("x,y\n1,2\n", 3, "s"), Err(CliError::Usage(_))));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-60:4", 2).unwrap(), vec![-60.0, 4.0]);
        assert!(parse_range("1:2:3", 2).is_err());
        assert_eq!(parse_list("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
    }
}
