//! Aggregation of run directories into plot-ready CSV files.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use nliso::optimize::fit_line;
use nliso::{Error, Result};

use crate::manifest::{RunDir, MANIFEST};

fn read_json(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn read_lines(path: &Path) -> Result<Vec<Value>> {
    fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

fn num(v: &Value, key: &str) -> String {
    match &v[key] {
        Value::Null => String::new(),
        x => x.to_string(),
    }
}

/// Directories holding a manifest: the root and its immediate children, sorted.
fn runs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    if root.join(MANIFEST).is_file() {
        found.push(root.to_path_buf());
    }
    if root.is_dir() {
        let mut kids: Vec<PathBuf> = fs::read_dir(root)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join(MANIFEST).is_file())
            .collect();
        kids.sort();
        found.extend(kids);
    }
    Ok(found)
}

fn trace_csv(run: &Path, name: &str) -> Result<String> {
    let mut csv = String::from("step,energy,best_energy,temperature,acceptance\n");
    for r in read_lines(&run.join(name))? {
        let cols = ["step", "energy", "best_energy", "temperature", "acceptance"].map(|k| num(&r, k));
        csv.push_str(&cols.join(","));
        csv.push('\n');
    }
    Ok(csv)
}

fn widthscan_csv(run: &Path) -> Result<(String, String)> {
    let scan = read_json(&run.join("widthscan.json"))?;
    let mut pts = Vec::new();
    let mut csv = String::from("alpha,inscribed_radius\n");
    for row in scan["rows"].as_array().into_iter().flatten() {
        let ok = &row["Ok"];
        if let (Some(a), Some(r)) = (ok["alpha"].as_f64(), ok["inscribed_radius"].as_f64()) {
            csv.push_str(&format!("{a:e},{r:e}\n"));
            if r > 0.0 {
                pts.push((a.ln(), r.ln()));
            }
        }
    }
    let (slope, intercept) = fit_line(&pts);
    Ok((csv, format!("slope,intercept,points\n{slope:e},{intercept:e},{}\n", pts.len())))
}

fn ratio_csv(run: &Path) -> Result<String> {
    let mut csv = String::from("epoch,spacing,ratio,best,perimeter\n");
    for r in read_lines(&run.join("epochs.jsonl"))? {
        let cols = ["epoch", "spacing", "ratio", "best", "perimeter"].map(|k| num(&r, k));
        csv.push_str(&cols.join(","));
        csv.push('\n');
    }
    Ok(csv)
}

fn stability_csv(run: &Path) -> Result<String> {
    let t = read_json(&run.join("stability.json"))?;
    let mut modes: Vec<&Value> = t["modes"].as_array().into_iter().flatten().collect();
    modes.sort_by_key(|m| m["k"].as_u64().unwrap_or(0));
    let mut csv = String::from("k,a_k,crossing_beta\n");
    for m in modes {
        csv.push_str(&format!("{},{},{}\n", num(m, "k"), num(m, "a_k"), num(m, "crossing_beta")));
    }
    Ok(csv)
}

/// Writes one CSV bundle per recognised run into `out`.
pub fn report(root: &Path, out: &mut RunDir) -> Result<usize> {
    let found = runs(root)?;
    if found.is_empty() {
        return Err(Error::invalid(format!("no {MANIFEST} under {}", root.display())));
    }
    let mut written = 0;
    for run in found {
        let manifest = read_json(&run.join(MANIFEST))?;
        if manifest["status"] != "ok" {
            continue;
        }
        let tag = match run.strip_prefix(root) {
            Ok(rel) if !rel.as_os_str().is_empty() => format!("{}_", rel.to_string_lossy()),
            _ => String::new(),
        };
        match manifest["command"].as_str().unwrap_or("") {
            "anneal" => out.write(&format!("{tag}energy_vs_step.csv"), trace_csv(&run, "trace.jsonl")?)?,
            "gnsearch" => {
                out.write(&format!("{tag}ratio_vs_epoch.csv"), ratio_csv(&run)?)?;
                out.write(&format!("{tag}energy_vs_step.csv"), trace_csv(&run, "trace.jsonl")?)?;
            }
            "widthscan" => {
                let (csv, fit) = widthscan_csv(&run)?;
                out.write(&format!("{tag}radius_vs_alpha.csv"), csv)?;
                out.write(&format!("{tag}radius_fit.csv"), fit)?;
            }
            "stability" => out.write(&format!("{tag}stability_by_k.csv"), stability_csv(&run)?)?,
            "split" => out.write(
                &format!("{tag}split_energies.csv"),
                fs::read_to_string(run.join("split_energies.csv"))?,
            )?,
            _ => continue,
        }
        written += 1;
    }
    Ok(written)
}
