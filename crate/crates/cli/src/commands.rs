//! Subcommand bodies. Each reads its parameters, rejects unknown keys, then
//! runs and writes its artifacts.

use std::f64::consts::PI;
use std::path::Path;

use serde_json::json;

use nliso::energy::j_alpha;
use nliso::kernels::{
    build_bessel_table, default_bessel_grid, log_grid, verify_kernel_bounds, KernelSpec, RadialTable,
};
use nliso::optimize::{
    anneal, ball_interpolation_ratio, gn_search, optimal_split, speckle_start, width_scan, SplitFamily,
};
use nliso::energy::gn_constant;
use nliso::shapes::io::read_mask;
use nliso::shapes::{
    ball_asymmetry, components, inscribed_radius, perimeter, rasterize_ball, volume, GridSet, GridSpec, Point,
};
use nliso::spectral::StabilityTable;
use nliso::{Error, Result};

use crate::manifest::RunDir;
use crate::params::Params;

fn kernel(p: &Params) -> Result<KernelSpec> {
    let kind: String = p.or("kernel", "powerlaw".to_string())?;
    match kind.as_str() {
        "powerlaw" => KernelSpec::power_law(2, p.req("s")?),
        "truncated" => KernelSpec::truncated(2, p.req("s")?, p.req("rho0")?),
        "table" => {
            let path: String = p.req("kernel_file")?;
            KernelSpec::tabulated(RadialTable::load(Path::new(&path))?)
        }
        other => Err(Error::invalid(format!("unknown kernel {other}; expected powerlaw, truncated or table"))),
    }
}

fn mask(p: &Params) -> Result<GridSet> {
    let path: String = p.req("mask")?;
    read_mask(Path::new(&path))
}

pub fn energy(p: &Params, dir: &mut RunDir) -> Result<()> {
    let set = mask(p)?;
    let k = kernel(p)?;
    let alpha = p.or("alpha", 0.0)?;
    let conf = p.opt::<f64>("confinement")?;
    let quad = p.quadrature()?;
    p.finish()?;
    let e = j_alpha(&set, alpha, &k, conf, &quad)?;
    println!("{}", serde_json::to_string_pretty(&e)?);
    dir.write_json("energy.json", &e)
}

pub fn kernel_build(p: &Params, dir: &mut RunDir) -> Result<()> {
    let n = p.or("n", 2usize)?;
    let s: f64 = p.req("s")?;
    let per_decade = p.opt::<usize>("per_decade")?;
    p.finish()?;
    let grid = match per_decade {
        Some(d) => {
            let hi = default_bessel_grid(s).last().map_or(3.0, |r| r.log10());
            log_grid(-4.0, hi, d)
        }
        None => default_bessel_grid(s),
    };
    let table = build_bessel_table(n, s, &grid)?;
    table.save(&dir.path("kernel.csv"))?;
    dir.adopt("kernel.csv");
    dir.adopt("kernel.json");
    let h = table.header();
    let spec = KernelSpec::tabulated(table.clone())?;
    let want = -(n as f64 + s);
    let report = json!({
        "mass": table.mass(),
        "tail_exponent": h.tail_exponent,
        "expected_tail_exponent": want,
        "tail_relative_error": (h.tail_exponent / want - 1.0).abs(),
        "k0": h.k0,
        "bounds": verify_kernel_bounds(&spec),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    dir.write_json("kernel_report.json", &report)
}

pub fn stability(p: &Params, dir: &mut RunDir) -> Result<()> {
    let n = p.or("n", 2usize)?;
    let s: f64 = p.req("s")?;
    let kmax = p.or("kmax", 200usize)?;
    p.finish()?;
    let t = StabilityTable::build(n, s, kmax)?;
    println!("{}", serde_json::to_string_pretty(&t)?);
    dir.write_json("stability.json", &t)?;
    dir.write("stability.csv", t.to_csv())
}

fn start_set(p: &Params) -> Result<GridSet> {
    if p.opt::<String>("mask")?.is_some() {
        return mask(p);
    }
    let how: String = p.or("start", "disk".to_string())?;
    let m = p.or("m", 1.0)?;
    let h = p.or("spacing", 1.0 / 48.0)?;
    match how.as_str() {
        "disk" => {
            let r = (m / PI).sqrt();
            let cells = p.or("cells", (3.0 * r / h).ceil() as usize + 8)?;
            rasterize_ball(Point::new(0.0, 0.0), r, GridSpec::centered(cells, h)?)
        }
        "speckle" => speckle_start(m, h, p.or("seed", 1u64)?),
        other => Err(Error::invalid(format!("unknown start {other}; expected disk or speckle"))),
    }
}

pub fn anneal_cmd(p: &Params, dir: &mut RunDir) -> Result<()> {
    let start = start_set(p)?;
    let k = kernel(p)?;
    let alpha: f64 = p.req("alpha")?;
    let cfg = p.anneal()?;
    p.finish()?;
    let out = anneal(&start, alpha, &k, &cfg)?;
    dir.write_lines("trace.jsonl", &out.trace)?;
    dir.write_mask("best.pbm", &out.best)?;
    let summary = json!({
        "volume": volume(&out.best),
        "best_energy": out.best_energy,
        "final_energy": out.final_energy,
        "perimeter": perimeter(&out.best),
        "asymmetry": ball_asymmetry(&out.best)?,
        "inscribed_radius": inscribed_radius(&out.best),
        "components": components(&out.best).len(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    dir.write_json("summary.json", &summary)
}

pub fn split(p: &Params, dir: &mut RunDir) -> Result<()> {
    let m: f64 = p.req("m")?;
    let alpha: f64 = p.req("alpha")?;
    let s: f64 = p.req("s")?;
    let kmax = p.or("kmax", 64usize)?;
    let family: String = p.or("family", "ball".to_string())?;
    let fam = match family.as_str() {
        "ball" => SplitFamily::Ball { n: p.or("n", 2usize)? },
        "template" => {
            let set = mask(p)?;
            SplitFamily::from_template(&set, s, &p.quadrature()?)?
        }
        other => return Err(Error::invalid(format!("unknown family {other}; expected ball or template"))),
    };
    p.finish()?;
    let plan = optimal_split(m, alpha, s, &fam, kmax)?;
    println!("{}", serde_json::to_string_pretty(&plan)?);
    let mut csv = String::from("k,energy\n");
    for (i, e) in plan.energies.iter().enumerate() {
        csv.push_str(&format!("{},{:e}\n", i + 1, e));
    }
    dir.write_json("split.json", &plan)?;
    dir.write("split_energies.csv", csv)
}

/// Scan parallelism from `NLISO_THREADS`, else the available cores.
pub fn threads() -> Result<usize> {
    match std::env::var("NLISO_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Error::invalid(format!("NLISO_THREADS must be a positive integer, got {v:?}"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn widthscan(p: &Params, dir: &mut RunDir) -> Result<()> {
    let alphas: Vec<f64> = p.list("alphas")?;
    let m = p.or("m", 1.0)?;
    let s: f64 = p.req("s")?;
    let spacing = p.or("spacing", 1.0 / 64.0)?;
    let cfg = p.anneal()?;
    p.finish()?;
    let scan = width_scan(&alphas, m, s, spacing, &cfg, threads()?)?;
    let mut csv = String::from("alpha,gamma,inscribed_radius,components,best_energy,status\n");
    for (i, row) in scan.rows.iter().enumerate() {
        match row {
            Ok(r) => {
                csv.push_str(&format!(
                    "{:e},{:e},{:e},{},{:e},ok\n",
                    r.alpha, r.gamma, r.inscribed_radius, r.components, r.best_energy
                ));
                dir.write_lines(&format!("trace_{i:02}.jsonl"), &r.trace)?;
                dir.write_mask(&format!("best_{i:02}.pbm"), &r.best)?;
            }
            Err(e) => csv.push_str(&format!("{:e},,,,,failed: {}\n", alphas[i], e.replace(',', ";"))),
        }
    }
    println!("slope {:.4} intercept {:.4} monotone {}", scan.slope, scan.intercept, scan.monotone);
    dir.write("widthscan.csv", csv)?;
    dir.write_json("widthscan.json", &scan)
}

pub fn gnsearch(p: &Params, dir: &mut RunDir) -> Result<()> {
    let s: f64 = p.req("s")?;
    let budget = p.or("budget", 4usize)?;
    let cfg = p.anneal()?;
    p.finish()?;
    let out = gn_search(s, budget, &cfg)?;
    dir.write_lines("epochs.jsonl", &out.epochs)?;
    dir.write_lines("trace.jsonl", &out.trace)?;
    dir.write_mask("incumbent.pbm", &out.incumbent)?;
    let summary = json!({
        "s": s,
        "best_ratio_inverse": out.best_ratio_inverse,
        "perimeter_trace": out.perimeter_trace,
        "ball_ratio": ball_interpolation_ratio(2, s)?,
        "bound": gn_constant(s),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    dir.write_json("gnsearch.json", &summary)
}
