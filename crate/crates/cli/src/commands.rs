//! The three subcommands. Each writes its effective configuration next to
//! its outputs.

use serde::Serialize;

use taperlith_core::analysis::{chain_at, tilt_gap_sweep, wavelength_sweep, SweepResult};
use taperlith_core::lithosim::{crest_line, simulate_print, TaperAxis};

use crate::csv::{num, text, Table};
use crate::dump::FieldDump;
use crate::{CliError, OutputDir, RunConfig};

pub const EFFECTIVE_CONFIG: &str = "effective_config.toml";
pub const SUMMARY: &str = "summary.toml";

fn write_config(config: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    out.write(EFFECTIVE_CONFIG, config.to_toml().as_bytes())?;
    Ok(())
}

fn write_summary<T: Serialize>(summary: &T, out: &mut OutputDir) -> Result<(), CliError> {
    let text = toml::to_string(summary).map_err(|e| CliError::Runtime(e.to_string()))?;
    out.write(SUMMARY, text.as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct LithoSummary {
    class: String,
    taper_angle_deg: f64,
    max_height_um: f64,
    ridge_start_um: f64,
    ridge_end_um: f64,
    config_hash: String,
}

/// Height map, crest line and regime of one print.
pub fn litho(config: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let mask = config.mask()?;
    let setup = config.exposure()?;
    let opts = config.print_options()?;
    write_config(config, out)?;
    let outcome = simulate_print(&mask, &setup, &opts)?;
    let p = &outcome.profile;
    let g = p.grid();
    let stride = config.litho.map_stride;

    let mut map = Table::new(&["y_um", "x_um", "height_um"]);
    for j in (0..g.ny).step_by(stride) {
        for i in (0..g.nx).step_by(stride) {
            map.numbers(&[g.y(j), g.x(i), p.heights()[[j, i]]]);
        }
    }
    out.write("height_map.csv", map.finish().as_bytes())?;

    let line = crest_line(p, TaperAxis::Y, 0.05);
    let floor = 0.01 * p.thickness();
    let on: Vec<usize> = (0..line.crest.len()).filter(|&k| line.crest[k] > floor).collect();
    let mut crest = Table::new(&["y_um", "crest_um", "edge_width_um", "plateau_um"]);
    for &k in &on {
        crest.numbers(&[line.position[k], line.crest[k], line.edge_width[k], line.plateau[k]]);
    }
    out.write("crest_line.csv", crest.finish().as_bytes())?;

    write_summary(
        &LithoSummary {
            class: outcome.class.to_string(),
            taper_angle_deg: outcome.angle_deg,
            max_height_um: p.max_height(),
            ridge_start_um: on.first().map_or(f64::NAN, |&k| line.position[k]),
            ridge_end_um: on.last().map_or(f64::NAN, |&k| line.position[k]),
            config_hash: config.hash(),
        },
        out,
    )
}

#[derive(Serialize)]
struct BpmSummary {
    facet_db: f64,
    propagation_db: f64,
    exit_db: f64,
    total_db: f64,
    n_ref: f64,
    facet_n_eff: f64,
    exit_n_eff: f64,
    z_end_um: f64,
    snapshots: Vec<String>,
    config_hash: String,
}

pub fn snapshot_name(z: f64) -> String {
    format!("field_z{z:09.3}um.tfd")
}

/// Taper propagation with its loss budget and field snapshots.
pub fn bpm(config: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let geometry = config.frustum()?;
    let settings = config.bpm_settings()?;
    let grid = config.bpm_grid()?;
    let source = config.source()?;
    let fiber = config.fiber()?;
    let opts = config.chain_options()?;
    write_config(config, out)?;

    let b = chain_at(&geometry, &grid, &source, &fiber, &settings, &opts)?;
    out.write("source.tfd", &FieldDump::new(0.0, b.source.clone()).to_bytes())?;
    let fiber_mode = fiber.mode(&grid, &settings)?;
    out.write("fiber_mode.tfd", &FieldDump::new(opts.z_end.unwrap_or(geometry.length), fiber_mode.field).to_bytes())?;

    let mut power = Table::new(&["z_um", "guided_power"]);
    for &(z, p) in &b.propagation.power_vs_z {
        power.numbers(&[z, p]);
    }
    out.write("power_vs_z.csv", power.finish().as_bytes())?;

    let mut loss = Table::new(&["facet_db", "propagation_db", "exit_db", "total_db"]);
    loss.numbers(&[b.facet_db, b.propagation_db, b.exit_db, b.total_db]);
    out.write("loss_breakdown.csv", loss.finish().as_bytes())?;

    let mut names = Vec::new();
    for (z, f) in &b.propagation.snapshots {
        let name = snapshot_name(*z);
        out.write(&name, &FieldDump::new(*z, f.clone()).to_bytes())?;
        names.push(name);
    }
    write_summary(
        &BpmSummary {
            facet_db: b.facet_db,
            propagation_db: b.propagation_db,
            exit_db: b.exit_db,
            total_db: b.total_db,
            n_ref: b.n_ref,
            facet_n_eff: b.facet_n_eff,
            exit_n_eff: b.exit_n_eff,
            z_end_um: config.z_end()?,
            snapshots: names,
            config_hash: config.hash(),
        },
        out,
    )
}

fn sweep_table(r: &SweepResult) -> String {
    let param = format!("{}_{}", r.parameter, r.unit);
    let mut header: Vec<String> = vec![param, r.metric.clone()];
    header.extend(r.components.iter().cloned());
    header.push("error".into());
    let refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut t = Table::new(&refs);
    let mut cells: Vec<(f64, Vec<String>)> = r
        .rows
        .iter()
        .map(|row| {
            let mut c = vec![num(row.value), num(row.metric)];
            c.extend(row.components.iter().map(|&v| num(v)));
            c.push(String::new());
            (row.value, c)
        })
        .collect();
    cells.extend(r.failures.iter().map(|f| {
        let mut c = vec![num(f.value), String::new()];
        c.extend(r.components.iter().map(|_| String::new()));
        c.push(text(&f.error));
        (f.value, c)
    }));
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, c) in cells {
        t.row(c);
    }
    t.finish()
}

#[derive(Serialize, Default)]
struct SweepSummary {
    wavelength_points: usize,
    wavelength_failures: usize,
    tilt_gap_points: usize,
    tilt_gap_failures: usize,
    config_hash: String,
}

/// Wavelength and tilt/gap sweeps. Succeeds when any point succeeds.
pub fn sweep(config: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let s = &config.sweep;
    let jobs: Vec<&str> = s.run.iter().map(|r| r.as_str()).collect();
    if jobs.is_empty() {
        return Err(CliError::Config("sweep.run selects no sweep".into()));
    }
    let geometry = config.frustum()?;
    let settings = config.bpm_settings()?;
    let grid = config.bpm_grid()?;
    let source = config.source()?;
    let fiber = config.fiber()?;
    let opts = config.chain_options()?;
    let mask = config.mask()?;
    let setup = config.exposure()?;
    let print = config.print_options()?;
    write_config(config, out)?;

    let mut summary = SweepSummary {
        config_hash: config.hash(),
        ..SweepSummary::default()
    };
    if jobs.contains(&"wavelength") {
        let r = wavelength_sweep(&s.wavelengths_um, &geometry, &grid, &source, &fiber, &settings, &opts)?;
        summary.wavelength_points = r.rows.len();
        summary.wavelength_failures = r.failures.len();
        out.write("wavelength_sweep.csv", sweep_table(&r).as_bytes())?;
    }
    if jobs.contains(&"tilt_gap") {
        let r = tilt_gap_sweep(&s.tilts_deg, &s.gaps_um, &mask, &setup, &print)?;
        let mut t = Table::new(&["tilt_deg", "gap0_um", "taper_angle_deg", "class", "error"]);
        for c in r.cells.iter() {
            match &c.outcome {
                Ok((class, angle)) => {
                    summary.tilt_gap_points += 1;
                    t.row(vec![num(c.tilt_deg), num(c.gap0), num(*angle), class.to_string(), String::new()]);
                }
                Err(e) => {
                    summary.tilt_gap_failures += 1;
                    t.row(vec![num(c.tilt_deg), num(c.gap0), String::new(), String::new(), text(e)]);
                }
            }
        }
        out.write("tilt_gap_sweep.csv", t.finish().as_bytes())?;
    }
    if summary.wavelength_points + summary.tilt_gap_points == 0 {
        return Err(CliError::Runtime("every sweep point failed".into()));
    }
    write_summary(&summary, out)
}
