use ndarray::{Array2, Zip};

use crate::error::{invalid, Error, Result};
use crate::field::FieldSlice;
use crate::geometry::IndexProvider;
use crate::modes::ModeProfile;

use super::step::{check_field, Stepper, SweepOrder};
use super::BpmSettings;

/// Where field snapshots are taken. Positions are snapped to the nearest
/// step boundary.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum SnapshotPlan {
    /// Source and final field only.
    #[default]
    Ends,
    /// Every `interval` um, plus both ends.
    Every(f64),
    /// Explicit positions (um).
    At(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub snapshots: Vec<(f64, FieldSlice)>,
    /// Guided power fraction after each step, starting at `z = 0`.
    pub power_vs_z: Vec<(f64, f64)>,
    pub final_field: FieldSlice,
}

impl PropagationResult {
    /// Last monitored power fraction.
    pub fn final_power(&self) -> f64 {
        self.power_vs_z.last().map_or(1.0, |p| p.1)
    }
}

fn snapshot_steps(plan: &SnapshotPlan, steps: usize, dz: f64, z_end: f64) -> Result<Vec<usize>> {
    let snap = |z: f64| -> Result<usize> {
        if !(z.is_finite() && (-1e-9..=z_end + 1e-9).contains(&z)) {
            return Err(invalid("snapshot_z", format!("{z} um is outside [0, {z_end}] um")));
        }
        if steps == 0 {
            return Ok(0);
        }
        Ok(((z / dz).round() as usize).min(steps))
    };
    let mut out = match plan {
        SnapshotPlan::Ends => vec![0, steps],
        SnapshotPlan::Every(interval) => {
            if !(interval.is_finite() && *interval > 0.0) {
                return Err(invalid("snapshot_interval", format!("must be > 0, got {interval}")));
            }
            let count = (z_end / interval).floor() as usize;
            let mut v = (0..=count)
                .map(|k| snap(k as f64 * interval))
                .collect::<Result<Vec<_>>>()?;
            v.push(steps);
            v
        }
        SnapshotPlan::At(zs) => zs.iter().map(|&z| snap(z)).collect::<Result<Vec<_>>>()?,
    };
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Propagates `source` to `z_end` with snapshots at both ends.
pub fn propagate(
    source: &FieldSlice,
    geometry: &dyn IndexProvider,
    settings: &BpmSettings,
    z_end: f64,
    monitor: Option<&ModeProfile>,
) -> Result<PropagationResult> {
    propagate_with(source, geometry, settings, z_end, monitor, &SnapshotPlan::Ends)
}

/// Marches `source` from `z = 0` to `z_end` through `geometry`.
///
/// The step count is `ceil(z_end / dz)` with the step shortened to land on
/// `z_end`. The index is sampled at each step midpoint and the sweep order
/// alternates between steps. With a monitor the recorded power is
/// `|<E, m>|^2 / (|E0|^2 |m|^2)`, otherwise the fraction of the source power
/// outside the absorbing layer.
pub fn propagate_with(
    source: &FieldSlice,
    geometry: &dyn IndexProvider,
    settings: &BpmSettings,
    z_end: f64,
    monitor: Option<&ModeProfile>,
    plan: &SnapshotPlan,
) -> Result<PropagationResult> {
    settings.validate()?;
    check_field(source, settings)?;
    if !(z_end.is_finite() && z_end >= 0.0) {
        return Err(invalid("z_end", format!("must be >= 0, got {z_end}")));
    }
    let grid = *geometry.grid();
    if !source.grid().matches(&grid) {
        return Err(Error::GridMismatch(format!(
            "source grid {:?} vs geometry grid {grid:?}",
            source.grid()
        )));
    }
    if let Some(m) = monitor {
        source.check_compatible(&m.field)?;
    }
    let p0 = source.power();
    if !(p0 > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let pm = monitor.map_or(1.0, |m| m.field.power());

    let steps = if z_end > 0.0 { (z_end / settings.dz).ceil() as usize } else { 0 };
    let dz = if steps > 0 { z_end / steps as f64 } else { settings.dz };
    let snaps = snapshot_steps(plan, steps, dz, z_end)?;

    let mut stepper = Stepper::new(grid, *settings)?;
    let pml = stepper.pml();
    let open = Array2::from_shape_fn(grid.shape(), |(j, i)| !pml.absorbs(j, i));
    let interior = |f: &FieldSlice| -> f64 {
        let s: f64 = Zip::from(f.values())
            .and(&open)
            .fold(0.0, |acc, v, &o| if o { acc + v.norm_sqr() } else { acc });
        s * grid.cell_area() / p0
    };
    let guided = |f: &FieldSlice, inside: f64| -> Result<f64> {
        match monitor {
            Some(m) => Ok(f.inner(&m.field)?.norm_sqr() / (p0 * pm)),
            None => Ok(inside),
        }
    };

    let mut field = source.clone();
    let mut values = field.values().as_standard_layout().into_owned();
    let mut snapshots = Vec::with_capacity(snaps.len());
    let mut power_vs_z = Vec::with_capacity(steps + 1);
    let mut next = snaps.iter().peekable();
    let inside0 = interior(&field);
    power_vs_z.push((0.0, guided(&field, inside0)?));
    if next.peek() == Some(&&0) {
        snapshots.push((0.0, field.clone()));
        next.next();
    }

    for k in 0..steps {
        let z_mid = (k as f64 + 0.5) * dz;
        let index = geometry.index_at(z_mid)?;
        let order = if k % 2 == 0 { SweepOrder::XThenY } else { SweepOrder::YThenX };
        stepper.step(&mut values, &index, dz, order)?;
        let z = if k + 1 == steps { z_end } else { (k + 1) as f64 * dz };
        field = FieldSlice::new(grid, values.clone(), source.lambda(), source.polarization())?;
        let inside = interior(&field);
        if z <= 0.5 * z_end && inside < 0.5 {
            return Err(Error::ExcessiveAbsorption {
                percent: 100.0 * (1.0 - inside),
                z,
            });
        }
        power_vs_z.push((z, guided(&field, inside)?));
        if next.peek() == Some(&&(k + 1)) {
            snapshots.push((z, field.clone()));
            next.next();
        }
    }
    Ok(PropagationResult {
        snapshots,
        power_vs_z,
        final_field: field,
    })
}
