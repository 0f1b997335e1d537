//! Deterministic file output: one directory per run holding CSV series,
//! snapshot maps, Wigner grids, and a manifest with checksums.
//!
//! Reruns with identical configs produce byte-identical CSV files; the only
//! nondeterministic value (a timestamp) lives in the manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::scenarios::ScenarioResult;

/// Writes a result bundle under `out_dir/<scenario>`, replacing any previous
/// bundle atomically (stage, then rename); partial outputs never survive.
pub fn write_bundle(result: &ScenarioResult, out_dir: &Path) -> Result<PathBuf> {
    let final_dir = out_dir.join(result.scenario);
    let staging = out_dir.join(format!(".staging-{}", result.scenario));
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir_all(&staging)?;

    let outcome = (|| -> Result<()> {
        let mut files: Vec<(String, String)> = Vec::new();

        // main time series
        let mut csv = String::new();
        csv.push_str("t_ns");
        for (name, _) in &result.series {
            write!(csv, ",{name}").unwrap();
        }
        csv.push('\n');
        for (k, &t) in result.times_ns.iter().enumerate() {
            write!(csv, "{t}").unwrap();
            for (_, v) in &result.series {
                write!(csv, ",{}", v[k]).unwrap();
            }
            csv.push('\n');
        }
        files.push(("series.csv".to_string(), csv));

        // snapshots
        for snap in &result.snapshots {
            if let Some(map) = &snap.lattice {
                let mut csv = String::from("s,n1,n2,n3,x,y,population\n");
                for site in &map.sites {
                    writeln!(
                        csv,
                        "{},{},{},{},{},{},{}",
                        site.spin.label(),
                        site.occ[0],
                        site.occ[1],
                        site.occ[2],
                        site.x,
                        site.y,
                        site.population
                    )
                    .unwrap();
                }
                files.push((format!("lattice_t{}.csv", snap.t_ns), csv));
            }
            for (label, field) in &snap.wigner {
                let mut csv = String::from("x1,x2,w\n");
                for (i, &x1) in field.axis1.iter().enumerate() {
                    for (j, &x2) in field.axis2.iter().enumerate() {
                        writeln!(csv, "{x1},{x2},{}", field.values[[i, j]]).unwrap();
                    }
                }
                files.push((format!("wigner_{label}_t{}.csv", snap.t_ns), csv));
            }
        }

        // auxiliary tables
        for table in &result.tables {
            let mut csv = String::new();
            csv.push_str(&table.headers.join(","));
            csv.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                csv.push_str(&cells.join(","));
                csv.push('\n');
            }
            files.push((format!("{}.csv", table.name), csv));
        }

        // metrics as a two-column CSV for scripting convenience
        let mut csv = String::from("metric,value\n");
        for (name, v) in &result.metrics {
            writeln!(csv, "{name},{v}").unwrap();
        }
        files.push(("metrics.csv".to_string(), csv));

        let mut checksums = serde_json::Map::new();
        for (name, content) in &files {
            fs::write(staging.join(name), content)?;
            let mut hasher = Sha256::new();
            hasher.update(content.as_bytes());
            checksums.insert(
                name.clone(),
                Value::String(format!("{:x}", hasher.finalize())),
            );
        }

        let config: Value = serde_json::from_str(&result.config_echo)?;
        let manifest = serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "scenario": result.scenario,
            "config": config,
            "files": Value::Object(checksums),
            "warnings": result.warnings,
            "generated_at_unix": std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        });
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(staging.join("manifest.json"), text)?;
        Ok(())
    })();

    match outcome {
        Ok(()) => {
            if final_dir.exists() {
                fs::remove_dir_all(&final_dir)?;
            }
            fs::rename(&staging, &final_dir)?;
            Ok(final_dir)
        }
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            Err(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{ScenarioResult, Table};

    fn tiny_result() -> ScenarioResult {
        ScenarioResult {
            scenario: "landau",
            config_echo: "{\n  \"scenario\": \"landau\"\n}\n".to_string(),
            times_ns: vec![0.0, 1.0],
            series: vec![("p_up".to_string(), vec![0.0, 0.5])],
            snapshots: Vec::new(),
            tables: vec![Table {
                name: "demo".to_string(),
                headers: vec!["a".into(), "b".into()],
                rows: vec![vec![1.0, 2.5]],
            }],
            metrics: vec![("max_p_up".to_string(), 0.5)],
            warnings: Vec::new(),
        }
    }

    #[test]
    fn bundle_roundtrip_and_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = write_bundle(&tiny_result(), dir.path()).unwrap();
        let series1 = fs::read(p1.join("series.csv")).unwrap();
        let demo1 = fs::read(p1.join("demo.csv")).unwrap();
        let p2 = write_bundle(&tiny_result(), dir.path()).unwrap();
        assert_eq!(series1, fs::read(p2.join("series.csv")).unwrap());
        assert_eq!(demo1, fs::read(p2.join("demo.csv")).unwrap());
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(p2.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["scenario"], "landau");
        assert!(manifest["files"]["series.csv"].is_string());
    }
}
