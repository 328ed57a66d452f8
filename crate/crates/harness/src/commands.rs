//! The four subcommands: `topology`, `run`, `merge`, `report`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;

use swapsim_core::{
    build_overlay, fairness_report, merge_results, run_experiment, run_shard, save_topology,
    F1Variant, FairnessReport, Overlay, OverlayParams, RunResult,
};

use crate::config::ExperimentConfig;
use crate::diag;
use crate::resultfile::{provenance_line, read_result, tool_version, write_result};
use crate::svg;

/// Builds the overlay for `params` and writes the canonical topology file;
/// prints a summary including the neighborhood depth distribution.
pub fn cmd_topology(params: OverlayParams, out_dir: &Path) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let overlay = build_overlay(params).context("building overlay")?;
    let path = out_dir.join("topology.json");
    save_topology(&overlay, &path)
        .with_context(|| format!("writing topology {}", path.display()))?;

    let mut depth_counts: BTreeMap<u32, usize> = BTreeMap::new();
    for table in overlay.tables() {
        *depth_counts
            .entry(table.neighborhood_depth(params.k))
            .or_insert(0) += 1;
    }
    let mut depths = String::new();
    for (depth, count) in &depth_counts {
        let _ = write!(depths, " {depth}:{count}");
    }
    println!(
        "topology: {} nodes, {} bits, k={}, seed={} -> {}",
        params.n,
        params.bits,
        params.k,
        params.seed,
        path.display()
    );
    println!("neighborhood depth distribution (depth:nodes):{depths}");
    Ok(path)
}

fn shard_file_name(shard: Option<(u64, u64)>) -> String {
    match shard {
        None => "result.json".to_string(),
        Some((start, end)) => format!("result_{start}-{end}.json"),
    }
}

/// Executes the configured run (optionally one shard of it) and writes the
/// result file.
pub fn cmd_run(config: &ExperimentConfig) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(&config.out)
        .with_context(|| format!("creating output directory {}", config.out.display()))?;
    let overlay: Overlay = config.overlay.realize()?;
    diag::info(|| {
        format!(
            "running {} files on {} nodes (k={}, pricing {})",
            config.workload.files,
            overlay.len(),
            overlay.params().k,
            config.pricing
        )
    });
    let result = match config.shard {
        None => run_experiment(&overlay, &config.workload, config.pricing)?,
        Some((start, end)) => run_shard(&overlay, &config.workload, config.pricing, start, end)?,
    };
    let path = config.out.join(shard_file_name(config.shard));
    write_result(&path, &result, config.overlay.label())?;
    println!(
        "run: {} steps, {} chunks, {} hops; mean forwarded {:.1}; income total {} -> {}",
        result.meta.total_steps,
        result.meta.total_chunks,
        result.meta.total_hops,
        swapsim_core::average_forwarded(&result),
        result.total_income(),
        path.display()
    );
    Ok(path)
}

/// Merges result files from disjoint shards of one run configuration.
pub fn cmd_merge(inputs: &[PathBuf], out_dir: &Path) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let mut runs: Vec<RunResult> = Vec::with_capacity(inputs.len());
    let mut sources: Vec<String> = Vec::with_capacity(inputs.len());
    for path in inputs {
        let (run, source) = read_result(path)?;
        runs.push(run);
        sources.push(source);
    }
    let merged = merge_results(&runs).context("merging results")?;
    let source = if sources.windows(2).all(|w| w[0] == w[1]) {
        sources.pop().unwrap_or_else(|| "params".to_string())
    } else {
        "mixed".to_string()
    };
    let path = out_dir.join("result.json");
    write_result(&path, &merged, &source)?;
    println!(
        "merge: {} inputs, {} steps over ranges {:?} -> {}",
        inputs.len(),
        merged.meta.total_steps,
        merged.meta.step_ranges,
        path.display()
    );
    Ok(path)
}

#[derive(serde::Serialize)]
struct ReportFile<'a> {
    version: u32,
    tool: String,
    report: &'a FairnessReport,
}

fn lorenz_csv(
    points: &[swapsim_core::LorenzPoint],
    gini: Option<f64>,
    provenance: &str,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {provenance}");
    match gini {
        Some(g) => {
            let _ = writeln!(out, "# gini = {g:.6}");
        }
        None => {
            let _ = writeln!(out, "# gini = undefined");
        }
    }
    out.push_str("population_share,value_share\n");
    for p in points {
        let _ = writeln!(out, "{:.6},{:.6}", p.population_share, p.value_share);
    }
    out
}

/// Emits the fairness report for a result file: report.json, one CSV per
/// Lorenz curve, the forwarded histogram CSV, and the three SVG plots.
pub fn cmd_report(
    input: &Path,
    variant: F1Variant,
    bin_width: Option<u64>,
    out_dir: &Path,
) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let (result, _source) = read_result(input)?;
    let report = fairness_report(&result, variant, bin_width)?;
    let provenance = provenance_line(&result.meta);

    let mut written = Vec::new();
    let mut emit = |name: &str, contents: String| -> anyhow::Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        Ok(())
    };

    let json = {
        let file = ReportFile {
            version: 1,
            tool: tool_version(),
            report: &report,
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        text
    };
    emit("report.json", json)?;
    emit(
        "lorenz_f1.csv",
        lorenz_csv(&report.lorenz_f1, report.gini_f1, &provenance),
    )?;
    emit(
        "lorenz_f2.csv",
        lorenz_csv(&report.lorenz_f2, report.gini_f2, &provenance),
    )?;
    let hist_csv = {
        let mut out = String::new();
        let _ = writeln!(out, "# {provenance}");
        let _ = writeln!(out, "# bin_width = {}", report.histogram.bin_width);
        out.push_str("bin_low,count\n");
        for bin in &report.histogram.bins {
            let _ = writeln!(out, "{},{}", bin.low, bin.count);
        }
        out
    };
    emit("forwarded_hist.csv", hist_csv)?;
    emit(
        "lorenz_f1.svg",
        svg::lorenz_svg(
            &format!("F1 Lorenz curve ({variant})"),
            &report.lorenz_f1,
            report.gini_f1,
            &provenance,
        ),
    )?;
    emit(
        "lorenz_f2.svg",
        svg::lorenz_svg(
            "F2 Lorenz curve (income)",
            &report.lorenz_f2,
            report.gini_f2,
            &provenance,
        ),
    )?;
    emit(
        "forwarded_hist.svg",
        svg::histogram_svg("Forwarded chunks per node", &report.histogram, &provenance),
    )?;

    let fmt_gini = |g: Option<f64>| match g {
        Some(g) => format!("{g:.4}"),
        None => "undefined".to_string(),
    };
    println!(
        "report: gini_f2 {}, gini_f1 {} ({}), mean forwarded {:.1}, {} rewarded nodes -> {}",
        fmt_gini(report.gini_f2),
        fmt_gini(report.gini_f1),
        variant,
        report.average_forwarded,
        report.rewarded_nodes,
        out_dir.display()
    );
    Ok(written)
}
