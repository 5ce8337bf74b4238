//! Ladder orchestration: one job per (m, seed), run in parallel, written in
//! ladder order.

use super::config::{Experiment, ExperimentConfig};
use super::svg::{render, Plot};
use crate::error::{Error, Result};
use crate::fourier::{decay_exponent_fit, frostman_measure_from_set};
use crate::grid::{Axis, Scale};
use crate::incidence::{
    bush_construction, bush_heavy_fit, full_shading, layered_sharpness_family, verify_main_theorem, BoundParameters,
    IncidenceReport,
};
use crate::parabola::{
    build_incidence_instance, random_triple, standard_triple, verify_rect_theorem, verify_trilinear_energy, EnergyReport,
};
use crate::sets::{cantor_set, quasi_product_family, DiscreteSet1D, DiscreteSet2D, Mode, TubeFamily};
use crate::sumprod::{
    few_sums_pipeline, growth_exponent_check, projection_survey, GrowthReport, SurveyParams, DEFAULT_SLACK,
    GROWTH_EXPONENT,
};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Files written, in write order.
    pub files: Vec<PathBuf>,
    /// Ladder points dropped by the resource cap.
    pub truncated: Vec<u32>,
}

/// Axis labels and reference slope of a sheet's plot.
#[derive(Debug, Clone)]
struct Axes {
    x: &'static str,
    y: String,
    theory: f64,
}

/// One row for an aggregated CSV file.
#[derive(Debug, Clone)]
struct SheetRow {
    file: String,
    header: String,
    row: String,
    point: Option<(f64, f64)>,
    axes: Option<Axes>,
}

#[derive(Debug, Default)]
struct JobOutput {
    rows: Vec<SheetRow>,
    /// Complete files with their plots.
    files: Vec<(String, String, Option<Plot>)>,
}

/// Builds the rayon global pool with FROSTLAB_THREADS workers when set.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("FROSTLAB_THREADS") {
        let k: usize = v
            .parse()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| Error::Precondition(format!("FROSTLAB_THREADS=`{v}` is not a positive integer")))?;
        // a second call finds the pool built already; keep the first setting
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    Ok(())
}

fn seeded(c: &ExperimentConfig) -> bool {
    matches!(c.constructor.as_str(), "cantor" | "random")
}

fn suffix(c: &ExperimentConfig, seed: u64) -> String {
    if seeded(c) {
        format!("_s{seed}")
    } else {
        String::new()
    }
}

fn theory(c: &ExperimentConfig, default: f64) -> f64 {
    c.theory_exponent.unwrap_or(default)
}

fn incidence_family(c: &ExperimentConfig, m: u32, seed: u64) -> Result<TubeFamily> {
    match c.constructor.as_str() {
        "bush" => Ok(bush_construction(c.s, m)?.0),
        "layered" => layered_sharpness_family(c.s, c.k1, c.k2, m),
        _ => {
            let d = c.d.unwrap_or(1.0 - c.s);
            let dirs = cantor_set(m, c.s, seed, Mode::Random)?;
            let offsets = (0..dirs.len() as u64)
                .map(|i| cantor_set(m, d, seed.wrapping_add(1 + i), Mode::Random))
                .collect::<Result<Vec<_>>>()?;
            quasi_product_family(Axis::X, &dirs, &offsets, c.s, d)
        }
    }
}

/// The report `incidence` writes for one scale.
pub fn incidence_report(c: &ExperimentConfig, m: u32, seed: u64) -> Result<IncidenceReport> {
    let family = incidence_family(c, m, seed)?;
    let shading = full_shading(&family);
    verify_main_theorem(&family, &shading, &BoundParameters::from_certificates(&family, &shading)?)
}

fn ratio_axes(c: &ExperimentConfig) -> Option<Axes> {
    Some(Axes {
        x: "log2(1/delta)",
        y: "log2 ratio".into(),
        theory: theory(c, 0.0),
    })
}

fn incidence_job(c: &ExperimentConfig, m: u32, seed: u64) -> Result<JobOutput> {
    let r = incidence_report(c, m, seed)?;
    Ok(JobOutput {
        rows: vec![SheetRow {
            file: format!("incidence{}", suffix(c, seed)),
            header: IncidenceReport::CSV_HEADER.into(),
            row: r.csv_row(),
            point: Some((m as f64, r.ratio.log2())),
            axes: ratio_axes(c),
        }],
        files: vec![],
    })
}

fn heavy_job(c: &ExperimentConfig, m: u32) -> Result<JobOutput> {
    let f = bush_heavy_fit(c.s, m)?;
    let mut out = JobOutput::default();
    let mut points = Vec::new();
    for b in &f.buckets {
        let used = f.used.contains(&b.r);
        out.rows.push(SheetRow {
            file: "heavy".into(),
            header: "m,r,count,median_distance,used".into(),
            row: format!("{m},{},{},{},{}", b.r, b.count, b.median_distance, used),
            point: None,
            axes: None,
        });
        if used {
            points.push(((b.r as f64).log2(), (b.count as f64).log2()));
        }
    }
    out.rows.push(SheetRow {
        file: "heavy_fit".into(),
        header: "m,s,slope,intercept,r2,buckets".into(),
        row: format!("{m},{},{},{},{},{}", c.s, f.fit.slope, f.fit.intercept, f.fit.r2, f.used.len()),
        point: None,
        axes: None,
    });
    let plot = Plot {
        title: format!("heavy squares, m={m}, s={}", c.s),
        x_label: "log2 r".into(),
        y_label: "log2 #squares met by ~r tubes".into(),
        points,
        theory: Some(theory(c, -(c.s + 1.0) / c.s)),
    };
    out.files.push((format!("heavy_m{m}"), String::new(), Some(plot)));
    Ok(out)
}

fn energy_job(c: &ExperimentConfig, m: u32, seed: u64) -> Result<JobOutput> {
    let sets = match c.constructor.as_str() {
        "random" => random_triple(m, c.count, seed)?,
        _ => standard_triple(m, c.s, seed, Mode::Random)?,
    };
    let e = verify_trilinear_energy(&sets, c.s, c.c_tol)?;
    let inst = build_incidence_instance(&sets, c.s, 8.0, c.c_tol)?;
    let rect = verify_rect_theorem(&inst.tubes, &inst.squares, c.s)?;
    let sfx = suffix(c, seed);
    let reform = inst.square_sum as f64 / e.result.count as f64;
    Ok(JobOutput {
        rows: vec![
            SheetRow {
                file: format!("energy{sfx}"),
                header: EnergyReport::CSV_HEADER.into(),
                row: e.csv_row(),
                point: Some((m as f64, e.ratio.log2())),
                axes: ratio_axes(c),
            },
            SheetRow {
                file: format!("rect{sfx}"),
                header: IncidenceReport::CSV_HEADER.into(),
                row: rect.csv_row(),
                point: Some((m as f64, rect.ratio.log2())),
                axes: ratio_axes(c),
            },
            SheetRow {
                file: format!("reform{sfx}"),
                header: "m,energy,square_sum,ratio".into(),
                row: format!("{m},{},{},{reform}", e.result.count, inst.square_sum),
                point: None,
                axes: None,
            },
        ],
        files: vec![],
    })
}

fn fourier_job(c: &ExperimentConfig, m: u32, seed: u64) -> Result<JobOutput> {
    let scale = Scale::new(m)?;
    let a = match c.constructor.as_str() {
        "atom" => DiscreteSet1D::new(scale, vec![scale.n() / 2], "atom"),
        _ => cantor_set(m, c.s, seed, Mode::Random)?,
    };
    let mu = frostman_measure_from_set(&a, c.s)?;
    let ladder = decay_exponent_fit(&mu, &c.radii, c.step)?;
    let name = format!("fourier_m{m}_s{seed}");
    let plot = Plot {
        title: format!("L6 mass on B_R, m={m}, s={}, seed={seed}", c.s),
        x_label: "log2 R".into(),
        y_label: "log2 integral".into(),
        points: ladder.fit.points.clone(),
        theory: Some(theory(c, ladder.predicted)),
    };
    Ok(JobOutput {
        rows: vec![SheetRow {
            file: "fourier".into(),
            header: "m,seed,slope,predicted,max_residual".into(),
            row: format!("{m},{seed},{},{},{}", ladder.fit.slope, ladder.predicted, ladder.fit.max_residual),
            point: None,
            axes: None,
        }],
        files: vec![(name, ladder.csv(), Some(plot))],
    })
}

fn sumprod_set(c: &ExperimentConfig, m: u32, seed: u64) -> Result<DiscreteSet1D> {
    if m < 2 {
        return Err(Error::InvalidScale(m));
    }
    let scale = Scale::new(m)?;
    let half = scale.n() / 2;
    let terms = ((((m - 1) as f64) * c.s).exp2().round() as i64).max(1);
    match c.constructor.as_str() {
        "progression" => {
            let step = (half / terms).max(1);
            Ok(DiscreteSet1D::new(scale, (0..terms).map(|j| half + j * step).collect(), "progression"))
        }
        "geometric" => {
            let n = scale.n() as f64;
            let vals = (0..=terms).map(|j| (n * (-(j as f64) / terms as f64).exp2()).round() as i64).collect();
            Ok(DiscreteSet1D::new(scale, vals, "geometric"))
        }
        _ => cantor_set(m - 1, c.s, seed, Mode::Random)?.into_upper_half(),
    }
}

fn sumprod_job(c: &ExperimentConfig, m: u32, seed: u64) -> Result<JobOutput> {
    let a = sumprod_set(c, m, seed)?;
    let v = growth_exponent_check(&a, c.s, DEFAULT_SLACK)?;
    let f = few_sums_pipeline(&a, c.s, c.eps)?;
    let sfx = suffix(c, seed);
    let top = v.report.naa.max(v.report.na_over_a) as f64;
    Ok(JobOutput {
        rows: vec![
            SheetRow {
                file: format!("sumprod{sfx}"),
                header: GrowthReport::CSV_HEADER.into(),
                row: v.report.csv_row(),
                point: Some((m as f64, top.log2())),
                axes: Some(Axes {
                    x: "log2(1/delta)",
                    y: "log2 max(N(A+A), N(A/A))".into(),
                    theory: theory(c, GROWTH_EXPONENT * c.s),
                }),
            },
            SheetRow {
                file: format!("fewsums{sfx}"),
                header: "m,NA,sums_grow,ratios_grow,pigeonhole_constant,g_constant,coverage,l_over_ck,triples_found,triples_upper,identities_hold,ratio"
                    .into(),
                row: format!(
                    "{m},{},{},{},{},{},{},{},{},{},{},{}",
                    a.len(),
                    v.sums_grow,
                    v.ratios_grow,
                    f.pigeonhole_constant,
                    f.g_constant,
                    f.coverage,
                    f.l_over_ck,
                    f.triples_found,
                    f.triples_upper,
                    f.identities_hold,
                    f.ratio
                ),
                point: None,
                axes: None,
            },
        ],
        files: vec![],
    })
}

fn projection_job(c: &ExperimentConfig, m: u32, seed: u64) -> Result<JobOutput> {
    let d = c.d.unwrap_or(c.s);
    let t = c.t.unwrap_or(c.s);
    let a = cantor_set(m, c.s, seed, Mode::Random)?;
    let b = cantor_set(m, d, seed.wrapping_add(1), Mode::Random)?;
    let e = cantor_set(m, t, seed.wrapping_add(2), Mode::Random)?;
    let p = DiscreteSet2D::product(&a, &b)?;
    let r = projection_survey(
        &p,
        &e,
        &SurveyParams {
            s1: c.s,
            s2: d,
            t,
            eps: c.eps,
            seed,
        },
    )?;
    let mut out = JobOutput::default();
    for row in &r.rows {
        out.rows.push(SheetRow {
            file: format!("projection_s{seed}"),
            header: "m,t,full,min_ratio,passes,content".into(),
            row: format!("{m},{},{},{},{},{}", row.t, row.full, row.min_ratio, row.passes, row.content),
            point: None,
            axes: None,
        });
    }
    let min_full = r.rows.iter().map(|x| x.full).min().unwrap_or(0);
    out.rows.push(SheetRow {
        file: "projection".into(),
        header: "m,seed,K1,K2,K3,rate,subset_size,min_full,fraction_passing".into(),
        row: format!(
            "{m},{seed},{},{},{},{},{},{min_full},{}",
            r.k1, r.k2, r.k3, r.rate, r.subset_size, r.fraction_passing
        ),
        point: Some((m as f64, (min_full as f64).log2())),
        axes: Some(Axes {
            x: "log2(1/delta)",
            y: "log2 min_x N(proj_x P)".into(),
            theory: theory(c, (c.s + d + t) / 2.0),
        }),
    });
    Ok(out)
}

fn job(c: &ExperimentConfig, m: u32, seed: u64) -> Result<JobOutput> {
    match c.experiment {
        Experiment::Incidence => incidence_job(c, m, seed),
        Experiment::Heavy => heavy_job(c, m),
        Experiment::Energy => energy_job(c, m, seed),
        Experiment::Fourier => fourier_job(c, m, seed),
        Experiment::Sumprod => sumprod_job(c, m, seed),
        Experiment::Projection => projection_job(c, m, seed),
    }
}

struct Sheet {
    header: String,
    rows: Vec<String>,
    points: Vec<(f64, f64)>,
    axes: Option<Axes>,
}

/// Runs every (m, seed) of the ladder and writes CSV and SVG files into
/// `out`. `seed` replaces the configured seed list. Deterministic
/// constructors run once per scale.
pub fn run(config: &ExperimentConfig, seed: Option<u64>, out: &Path) -> anyhow::Result<RunOutcome> {
    let seeds: Vec<u64> = match seed {
        Some(s) => vec![s],
        None if seeded(config) => config.seeds.clone(),
        None => vec![config.seeds[0]],
    };
    let jobs: Vec<(u32, u64)> = config
        .ladder
        .iter()
        .flat_map(|&m| seeds.iter().map(move |&s| (m, s)))
        .collect();
    let results: Vec<JobOutput> = jobs
        .par_iter()
        .map(|&(m, s)| job(config, m, s).map_err(|e| anyhow::anyhow!("m={m} seed={s}: {e}")))
        .collect::<anyhow::Result<_>>()?;

    std::fs::create_dir_all(out)?;
    let mut order: Vec<String> = Vec::new();
    let mut sheets: BTreeMap<String, Sheet> = BTreeMap::new();
    let mut written = Vec::new();
    let mut write = |name: String, body: &str| -> anyhow::Result<()> {
        let path = out.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    for r in &results {
        for (name, body, plot) in &r.files {
            if !body.is_empty() {
                write(format!("{name}.csv"), body)?;
            }
            if let Some(p) = plot {
                write(format!("{name}.svg"), &render(p))?;
            }
        }
        for row in &r.rows {
            let sheet = sheets.entry(row.file.clone()).or_insert_with(|| {
                order.push(row.file.clone());
                Sheet {
                    header: row.header.clone(),
                    rows: Vec::new(),
                    points: Vec::new(),
                    axes: row.axes.clone(),
                }
            });
            sheet.rows.push(row.row.clone());
            sheet.points.extend(row.point);
        }
    }
    for name in &order {
        let sheet = &sheets[name];
        let mut body = sheet.header.clone();
        body.push('\n');
        for row in &sheet.rows {
            body.push_str(row);
            body.push('\n');
        }
        write(format!("{name}.csv"), &body)?;
        if let Some(ax) = &sheet.axes {
            let plot = Plot {
                title: format!("{name}: {}, s={}", config.experiment, config.s),
                x_label: ax.x.into(),
                y_label: ax.y.clone(),
                points: sheet.points.clone(),
                theory: Some(ax.theory),
            };
            write(format!("{name}.svg"), &render(&plot))?;
        }
    }
    let ladder: Vec<String> = config.ladder.iter().map(u32::to_string).collect();
    let cut: Vec<String> = config.truncated.iter().map(u32::to_string).collect();
    let seeds: Vec<String> = seeds.iter().map(u64::to_string).collect();
    let manifest = format!(
        "experiment={}\nconstructor={}\nladder={}\nseeds={}\ntruncated={}\n",
        config.experiment,
        config.constructor,
        ladder.join(","),
        seeds.join(","),
        cut.join(",")
    );
    write("manifest.txt".into(), &manifest)?;
    Ok(RunOutcome {
        files: written,
        truncated: config.truncated.clone(),
    })
}
