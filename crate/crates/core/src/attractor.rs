//! Long-run sampling of computed attractors and thin-slab diagnostics.
//!
//! A long run is streamed to disk as it is computed; slicing, hole counts,
//! occupancy areas and density grids are second-pass functions over the
//! recorded samples.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::integrators::{integrate_with, BlowUp, MethodId, StepSpec};
use crate::io::{fmt_f64, SampleWriter};
use crate::systems::{LorenzParams, State3, SystemId};

pub const DEFAULT_HALF_THICKNESS: f64 = 0.25;
/// Transient excluded from statistics, in time units.
pub const DEFAULT_DISCARD: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleProvenance {
    pub system: SystemId,
    pub params: Option<LorenzParams>,
    pub method: MethodId,
    pub dt: f64,
    pub stride: u64,
    pub initial: State3,
    /// Steps actually taken (fewer than requested after a blow-up).
    pub total_steps: u64,
    pub blow_up: Option<BlowUp>,
}

/// Recorded long-run samples; the first `discard_prefix` are transient.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub provenance: SampleProvenance,
    pub points: Vec<State3>,
    pub discard_prefix: usize,
}

impl SampleSet {
    /// Samples used for statistics.
    pub fn retained(&self) -> &[State3] {
        &self.points[self.discard_prefix.min(self.points.len())..]
    }

    /// Reads a `t,x,y,z` sample file written by [`long_run_to_csv`].
    pub fn from_csv(path: &Path, provenance: SampleProvenance, discard: f64) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| LabError::csv(path, e))?;
        let mut points = Vec::new();
        let mut discard_prefix = 0;
        for record in reader.deserialize::<(f64, f64, f64, f64)>() {
            let (t, x, y, z) = record.map_err(|e| LabError::csv(path, e))?;
            if t < discard {
                discard_prefix += 1;
            }
            points.push(State3::new(x, y, z));
        }
        Ok(SampleSet {
            provenance,
            points,
            discard_prefix,
        })
    }
}

fn provenance(
    system: SystemId,
    params: &LorenzParams,
    initial: State3,
    spec: &StepSpec,
) -> SampleProvenance {
    SampleProvenance {
        system,
        params: (system == SystemId::Standard).then_some(*params),
        method: spec.method,
        dt: spec.dt,
        stride: spec.stride,
        initial,
        total_steps: 0,
        blow_up: None,
    }
}

fn check_discard(discard: f64) -> Result<()> {
    if discard.is_finite() && discard >= 0.0 {
        Ok(())
    } else {
        Err(LabError::Domain {
            what: "discard",
            value: discard,
            domain: "[0, inf)",
        })
    }
}

/// Long run kept in memory. Samples with t < `discard` are marked transient.
pub fn long_run(
    system: SystemId,
    params: &LorenzParams,
    initial: State3,
    spec: &StepSpec,
    discard: f64,
) -> Result<SampleSet> {
    check_discard(discard)?;
    let mut points = Vec::with_capacity(spec.sample_count().min(1 << 24) as usize);
    let mut discard_prefix = 0;
    let outcome = integrate_with(system, params, initial, spec, |t, s| {
        if t < discard {
            discard_prefix += 1;
        }
        points.push(s);
        Ok(())
    })?;
    let mut prov = provenance(system, params, initial, spec);
    prov.total_steps = outcome.steps_taken;
    prov.blow_up = outcome.blow_up;
    Ok(SampleSet {
        provenance: prov,
        points,
        discard_prefix,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongRunSummary {
    pub provenance: SampleProvenance,
    pub samples: u64,
    pub discard_prefix: u64,
}

/// Long run streamed to a `t,x,y,z` CSV file; memory use does not grow with
/// the number of steps.
pub fn long_run_to_csv(
    system: SystemId,
    params: &LorenzParams,
    initial: State3,
    spec: &StepSpec,
    discard: f64,
    path: &Path,
) -> Result<LongRunSummary> {
    check_discard(discard)?;
    let mut writer = SampleWriter::create(path)?;
    let mut discard_prefix = 0;
    let outcome = integrate_with(system, params, initial, spec, |t, s| {
        if t < discard {
            discard_prefix += 1;
        }
        writer.write(t, s)
    })?;
    writer.finish()?;
    let mut prov = provenance(system, params, initial, spec);
    prov.total_steps = outcome.steps_taken;
    prov.blow_up = outcome.blow_up;
    Ok(LongRunSummary {
        provenance: prov,
        samples: outcome.samples_emitted,
        discard_prefix,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Z,
}

impl Axis {
    /// Names of the two coordinates kept after projection.
    pub fn free_coordinates(&self) -> [&'static str; 2] {
        match self {
            Axis::X => ["y", "z"],
            Axis::Z => ["x", "y"],
        }
    }

    fn split(&self, s: State3) -> (f64, [f64; 2]) {
        match self {
            Axis::X => (s.x, [s.y, s.z]),
            Axis::Z => (s.z, [s.x, s.y]),
        }
    }
}

/// A slab normal to a coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlicePlane {
    pub axis: Axis,
    pub center: f64,
    #[serde(default = "default_half_thickness")]
    pub half_thickness: f64,
}

fn default_half_thickness() -> f64 {
    DEFAULT_HALF_THICKNESS
}

impl SlicePlane {
    pub fn new(axis: Axis, center: f64, half_thickness: f64) -> Result<Self> {
        let p = SlicePlane {
            axis,
            center,
            half_thickness,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() {
            return Err(LabError::InvalidInput("slice center must be finite".into()));
        }
        if !(self.half_thickness.is_finite() && self.half_thickness > 0.0) {
            return Err(LabError::Domain {
                what: "half_thickness",
                value: self.half_thickness,
                domain: "(0, inf)",
            });
        }
        Ok(())
    }

    pub fn contains(&self, s: State3) -> bool {
        let (c, _) = self.axis.split(s);
        c >= self.center - self.half_thickness && c <= self.center + self.half_thickness
    }

    /// File-name friendly label, e.g. `z17.9`.
    pub fn label(&self) -> String {
        let axis = match self.axis {
            Axis::X => "x",
            Axis::Z => "z",
        };
        format!("{axis}{}", self.center)
    }
}

/// Retained samples inside a slab, projected onto the two free coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSet {
    pub plane: SlicePlane,
    pub points: Vec<[f64; 2]>,
    pub count: usize,
}

impl SliceSet {
    pub fn from_points(plane: SlicePlane, points: Vec<[f64; 2]>) -> Self {
        let count = points.len();
        SliceSet {
            plane,
            points,
            count,
        }
    }
}

pub fn slice(set: &SampleSet, plane: &SlicePlane) -> Result<SliceSet> {
    plane.validate()?;
    let retained = set.retained();
    if retained.is_empty() {
        return Err(LabError::InvalidInput(
            "no samples remain after discarding the transient".into(),
        ));
    }
    let points = retained
        .iter()
        .filter(|s| plane.contains(**s))
        .map(|s| plane.axis.split(*s).1)
        .collect();
    Ok(SliceSet::from_points(*plane, points))
}

/// Number of slice points within `radius` of each center (free coordinates).
pub fn hole_check(slice: &SliceSet, centers: &[[f64; 2]], radius: f64) -> Vec<usize> {
    let r2 = radius * radius;
    centers
        .iter()
        .map(|c| {
            slice
                .points
                .iter()
                .filter(|p| {
                    let (du, dv) = (p[0] - c[0], p[1] - c[1]);
                    du * du + dv * dv <= r2
                })
                .count()
        })
        .collect()
}

fn check_cell(cell: f64) -> Result<()> {
    if cell.is_finite() && cell > 0.0 {
        Ok(())
    } else {
        Err(LabError::Domain {
            what: "cell",
            value: cell,
            domain: "(0, inf)",
        })
    }
}

/// Origin-anchored half-open cell index.
fn cell_of(p: [f64; 2], cell: f64) -> (i64, i64) {
    ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64)
}

fn occupied_cells<'a>(points: impl Iterator<Item = &'a [f64; 2]>, cell: f64) -> BTreeSet<(i64, i64)> {
    points.map(|p| cell_of(*p, cell)).collect()
}

/// cell^2 times the number of distinct occupied cells.
pub fn occupancy_area(slice: &SliceSet, cell: f64) -> Result<f64> {
    check_cell(cell)?;
    let n = occupied_cells(slice.points.iter(), cell).len();
    Ok(cell * cell * n as f64)
}

/// Ratio of the occupancy area of the half with positive first coordinate to
/// that of the mirror image of the other half. Exactly symmetric data gives 1.
/// Only meaningful for slabs normal to z.
pub fn symmetry_ratio(slice: &SliceSet, cell: f64) -> Result<Option<f64>> {
    check_cell(cell)?;
    if slice.plane.axis != Axis::Z {
        return Err(LabError::InvalidInput(
            "the (x, y) -> (-x, -y) symmetry maps a z-slab to itself only".into(),
        ));
    }
    let pos = occupied_cells(slice.points.iter().filter(|p| p[0] > 0.0), cell).len();
    let neg_mirrored: Vec<[f64; 2]> = slice
        .points
        .iter()
        .filter(|p| p[0] < 0.0)
        .map(|p| [-p[0], -p[1]])
        .collect();
    let neg = occupied_cells(neg_mirrored.iter(), cell).len();
    Ok((neg > 0).then(|| pos as f64 / neg as f64))
}

/// Two-dimensional histogram over the bounding box of a slice.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub cell: f64,
    /// Index of the lower-left cell on the origin-anchored lattice.
    pub origin: (i64, i64),
    pub nx: usize,
    pub ny: usize,
    /// Row-major by the second coordinate: `counts[j * nx + i]`.
    pub counts: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeProfile {
    pub boundary_cells: usize,
    pub interior_cells: usize,
    pub boundary_mean: f64,
    pub interior_mean: f64,
}

impl DensityGrid {
    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.counts[j * self.nx + i]
    }

    fn occupied(&self, i: i64, j: i64) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.nx
            && (j as usize) < self.ny
            && self.get(i as usize, j as usize) > 0
    }

    /// Mean counts of occupied boundary cells (at least one empty 4-neighbour,
    /// cells outside the grid count as empty) and of occupied interior cells.
    /// `None` when either class is empty.
    pub fn edge_profile(&self) -> Option<EdgeProfile> {
        let (mut nb, mut ni, mut sb, mut si) = (0usize, 0usize, 0u64, 0u64);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let c = self.get(i, j);
                if c == 0 {
                    continue;
                }
                let (ii, jj) = (i as i64, j as i64);
                let interior = self.occupied(ii - 1, jj)
                    && self.occupied(ii + 1, jj)
                    && self.occupied(ii, jj - 1)
                    && self.occupied(ii, jj + 1);
                if interior {
                    ni += 1;
                    si += c as u64;
                } else {
                    nb += 1;
                    sb += c as u64;
                }
            }
        }
        (nb > 0 && ni > 0).then(|| EdgeProfile {
            boundary_cells: nb,
            interior_cells: ni,
            boundary_mean: sb as f64 / nb as f64,
            interior_mean: si as f64 / ni as f64,
        })
    }

    /// Writes `u_lo,v_lo,count` rows for occupied cells.
    pub fn write_csv(&self, path: &Path, header: [&str; 2]) -> Result<u64> {
        let file = File::create(path).map_err(|e| LabError::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| LabError::io(path, e);
        writeln!(w, "{}_lo,{}_lo,count", header[0], header[1]).map_err(io)?;
        let mut rows = 0;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let c = self.get(i, j);
                if c == 0 {
                    continue;
                }
                let u = (self.origin.0 + i as i64) as f64 * self.cell;
                let v = (self.origin.1 + j as i64) as f64 * self.cell;
                writeln!(w, "{},{},{}", fmt_f64(u), fmt_f64(v), c).map_err(io)?;
                rows += 1;
            }
        }
        w.flush().map_err(io)?;
        Ok(rows)
    }
}

pub fn density_grid(slice: &SliceSet, cell: f64) -> Result<DensityGrid> {
    check_cell(cell)?;
    if slice.points.is_empty() {
        return Ok(DensityGrid {
            cell,
            origin: (0, 0),
            nx: 0,
            ny: 0,
            counts: Vec::new(),
        });
    }
    let keys: Vec<(i64, i64)> = slice.points.iter().map(|p| cell_of(*p, cell)).collect();
    let (mut i0, mut j0, mut i1, mut j1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
    for &(i, j) in &keys {
        i0 = i0.min(i);
        j0 = j0.min(j);
        i1 = i1.max(i);
        j1 = j1.max(j);
    }
    let nx = (i1 - i0 + 1) as usize;
    let ny = (j1 - j0 + 1) as usize;
    let mut counts = vec![0u32; nx * ny];
    for (i, j) in keys {
        counts[(j - j0) as usize * nx + (i - i0) as usize] += 1;
    }
    Ok(DensityGrid {
        cell,
        origin: (i0, j0),
        nx,
        ny,
        counts,
    })
}
