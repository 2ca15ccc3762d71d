//! Zero sets of `Re F` and `Im F` over a window of the complex `z` plane.
//!
//! Resonances sit where the two families of curves cross. The grid is
//! contoured with marching squares (saddles resolved by the field value at
//! the cell centre), crossings are found cell by cell and each one is
//! polished by a single Newton step.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{compare_curves, TransitionalComparison, WidthApproximation, WidthCurve};
use crate::error::{Error, Result};
use crate::model::{residual, residual_derivative, resonances, ModelParams, Resonance};

pub const DEFAULT_NX: usize = 1600;
pub const DEFAULT_NY: usize = 800;
pub const CURVE_SAMPLES: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    /// Grid points along `Re z`.
    pub nx: usize,
    /// Grid points along `Im z`.
    pub ny: usize,
}

impl Window {
    pub fn new(
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        let w = Self {
            re_min,
            re_max,
            im_min,
            im_max,
            nx,
            ny,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return Err(Error::InvalidWindow(format!(
                "need re_min < re_max and im_min < im_max, got [{}, {}] x [{}, {}]",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidWindow(format!(
                "grid needs at least 2 x 2 points, got {} x {}",
                self.nx, self.ny
            )));
        }
        Ok(())
    }

    pub fn with_grid(self, nx: usize, ny: usize) -> Result<Self> {
        Self::new(self.re_min, self.re_max, self.im_min, self.im_max, nx, ny)
    }

    pub fn dx(&self) -> f64 {
        (self.re_max - self.re_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.im_max - self.im_min) / (self.ny - 1) as f64
    }

    pub fn cell_diagonal(&self) -> f64 {
        self.dx().hypot(self.dy())
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(
            self.re_min + self.dx() * i as f64,
            self.im_min + self.dy() * j as f64,
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.re_min <= z.re && z.re <= self.re_max && self.im_min <= z.im && z.im <= self.im_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Re,
    Im,
}

impl Field {
    pub fn as_str(&self) -> &'static str {
        match self {
            Field::Re => "re",
            Field::Im => "im",
        }
    }

    fn pick(&self, v: Complex64) -> f64 {
        match self {
            Field::Re => v.re,
            Field::Im => v.im,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourSet {
    pub window: Window,
    pub real_part_curves: Vec<Vec<Complex64>>,
    pub imag_part_curves: Vec<Vec<Complex64>>,
    /// Crossings of the two families after one Newton step, sorted by `Re z`.
    pub intersections: Vec<Complex64>,
}

impl ContourSet {
    pub fn curves(&self, field: Field) -> &[Vec<Complex64>] {
        match field {
            Field::Re => &self.real_part_curves,
            Field::Im => &self.imag_part_curves,
        }
    }
}

type EdgeKey = u64;

struct Segment {
    a: EdgeKey,
    b: EdgeKey,
    pa: Complex64,
    pb: Complex64,
    cell: usize,
}

struct Grid<'a> {
    window: &'a Window,
    values: Vec<Complex64>,
}

impl Grid<'_> {
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.window.nx + i]
    }

    fn horizontal(&self, i: usize, j: usize) -> EdgeKey {
        2 * (j * self.window.nx + i) as u64
    }

    fn vertical(&self, i: usize, j: usize) -> EdgeKey {
        2 * (j * self.window.nx + i) as u64 + 1
    }
}

fn crossing(p0: Complex64, p1: Complex64, f0: f64, f1: f64) -> Complex64 {
    let t = f0 / (f0 - f1);
    p0 + (p1 - p0) * t
}

fn march(grid: &Grid, params: &ModelParams, field: Field) -> Result<Vec<Segment>> {
    let w = grid.window;
    let mut segments = Vec::new();
    for j in 0..w.ny - 1 {
        for i in 0..w.nx - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let vals = corners.map(|(a, b)| field.pick(grid.at(a, b)));
            let pos = vals.map(|v| v >= 0.0);
            // edges: bottom, right, top, left; each joins corners (c, c + 1 mod 4)
            let keys = [
                grid.horizontal(i, j),
                grid.vertical(i + 1, j),
                grid.horizontal(i, j + 1),
                grid.vertical(i, j),
            ];
            let mut crossed = [None; 4];
            let mut count = 0;
            for e in 0..4 {
                let (c0, c1) = (e, (e + 1) % 4);
                if pos[c0] != pos[c1] {
                    let (a0, b0) = corners[c0];
                    let (a1, b1) = corners[c1];
                    crossed[e] = Some(crossing(
                        w.point(a0, b0),
                        w.point(a1, b1),
                        vals[c0],
                        vals[c1],
                    ));
                    count += 1;
                }
            }
            let cell = j * (w.nx - 1) + i;
            let mut push = |e0: usize, e1: usize| {
                if let (Some(pa), Some(pb)) = (crossed[e0], crossed[e1]) {
                    segments.push(Segment {
                        a: keys[e0],
                        b: keys[e1],
                        pa,
                        pb,
                        cell,
                    });
                }
            };
            match count {
                2 => {
                    let mut it = (0..4).filter(|&e| crossed[e].is_some());
                    let e0 = it.next().unwrap();
                    let e1 = it.next().unwrap();
                    push(e0, e1);
                }
                4 => {
                    let centre = w.point(i, j) + Complex64::new(0.5 * w.dx(), 0.5 * w.dy());
                    let c = field.pick(residual(params, centre)?) >= 0.0;
                    if c == pos[0] {
                        // corner 0 joins corner 2 through the centre: cut off corners 1 and 3
                        push(0, 1);
                        push(2, 3);
                    } else {
                        push(3, 0);
                        push(1, 2);
                    }
                }
                _ => {}
            }
        }
    }
    Ok(segments)
}

fn chain(segments: &[Segment]) -> Vec<Vec<Complex64>> {
    let mut by_edge: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (idx, s) in segments.iter().enumerate() {
        by_edge.entry(s.a).or_default().push(idx);
        by_edge.entry(s.b).or_default().push(idx);
    }
    let mut used = vec![false; segments.len()];
    let mut curves = Vec::new();

    // walk from `edge` away from segment `from`, returning the points visited
    let walk = |start_edge: EdgeKey, from: usize, used: &mut Vec<bool>| {
        let mut points = Vec::new();
        let mut edge = start_edge;
        let mut prev = from;
        loop {
            let next = by_edge[&edge]
                .iter()
                .copied()
                .find(|&s| s != prev && !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let seg = &segments[s];
            let (far_edge, far_point) = if seg.a == edge {
                (seg.b, seg.pb)
            } else {
                (seg.a, seg.pa)
            };
            points.push(far_point);
            edge = far_edge;
            prev = s;
        }
        points
    };

    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let seg = &segments[start];
        let forward = walk(seg.b, start, &mut used);
        let backward = walk(seg.a, start, &mut used);
        let mut curve: Vec<Complex64> = backward.into_iter().rev().collect();
        curve.push(seg.pa);
        curve.push(seg.pb);
        curve.extend(forward);
        curves.push(curve);
    }
    curves
}

fn segment_crossing(
    p0: Complex64,
    p1: Complex64,
    q0: Complex64,
    q1: Complex64,
) -> Option<Complex64> {
    let r = p1 - p0;
    let s = q1 - q0;
    let cross = |a: Complex64, b: Complex64| a.re * b.im - a.im * b.re;
    let denom = cross(r, s);
    if denom == 0.0 {
        return None;
    }
    let d = q0 - p0;
    let t = cross(d, s) / denom;
    let u = cross(d, r) / denom;
    let tol = 1e-9;
    if (-tol..=1.0 + tol).contains(&t) && (-tol..=1.0 + tol).contains(&u) {
        Some(p0 + r * t)
    } else {
        None
    }
}

/// Contours of `Re F = 0` and `Im F = 0` and their crossings.
pub fn contour_scan(params: &ModelParams, window: &Window) -> Result<ContourSet> {
    window.validate()?;
    let rows: Vec<Vec<Complex64>> = (0..window.ny)
        .into_par_iter()
        .map(|j| {
            (0..window.nx)
                .map(|i| residual(params, window.point(i, j)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let grid = Grid {
        window,
        values: rows.into_iter().flatten().collect(),
    };

    let re_segments = march(&grid, params, Field::Re)?;
    let im_segments = march(&grid, params, Field::Im)?;

    let mut im_by_cell: HashMap<usize, Vec<usize>> = HashMap::new();
    for (idx, s) in im_segments.iter().enumerate() {
        im_by_cell.entry(s.cell).or_default().push(idx);
    }
    let mut raw = Vec::new();
    for rs in &re_segments {
        if let Some(list) = im_by_cell.get(&rs.cell) {
            for &idx in list {
                let is = &im_segments[idx];
                if let Some(p) = segment_crossing(rs.pa, rs.pb, is.pa, is.pb) {
                    raw.push(p);
                }
            }
        }
    }

    let merge = 0.5 * window.cell_diagonal();
    let mut intersections: Vec<Complex64> = Vec::new();
    for p in raw {
        let f = residual(params, p)?;
        let d = residual_derivative(params, p)?;
        let polished = if d.norm() > 0.0 { p - f / d } else { p };
        if intersections.iter().all(|q| (q - polished).norm() > merge) {
            intersections.push(polished);
        }
    }
    intersections.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    Ok(ContourSet {
        window: *window,
        real_part_curves: chain(&re_segments),
        imag_part_curves: chain(&im_segments),
        intersections,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FigureId {
    One = 1,
    Two = 2,
    Three = 3,
}

impl FigureId {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(FigureId::One),
            2 => Some(FigureId::Two),
            3 => Some(FigureId::Three),
            _ => None,
        }
    }

    pub fn number(&self) -> u8 {
        *self as u8
    }

    /// `h = 0.1`, `α` = 0.7, 2, 1 for figures 1, 2, 3; `ε = 0.3`.
    pub fn default_params(&self) -> ModelParams {
        let alpha = match self {
            FigureId::One => 0.7,
            FigureId::Two => 2.0,
            FigureId::Three => 1.0,
        };
        ModelParams {
            h: 0.1,
            alpha,
            eps: 0.3,
        }
    }

    pub fn default_window(&self) -> Window {
        let im_min = match self {
            FigureId::One | FigureId::Three => -0.25,
            FigureId::Two => -0.05,
        };
        Window {
            re_min: 0.2,
            re_max: 2.0,
            im_min,
            im_max: 0.0,
            nx: DEFAULT_NX,
            ny: DEFAULT_NY,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FigureOverrides {
    pub params: Option<ModelParams>,
    pub window: Option<Window>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxCurve {
    pub curve: WidthCurve,
    /// `(Re z, -Im z)` samples.
    pub points: Vec<(f64, f64)>,
}

/// Samples the width law(s) of the regime across the window.
pub fn approximation_curves(
    params: &ModelParams,
    window: &Window,
    samples: usize,
) -> Vec<ApproxCurve> {
    let samples = samples.max(2);
    WidthApproximation::new(params)
        .curves()
        .iter()
        .map(|&curve| {
            let points = (0..samples)
                .map(|i| {
                    window.re_min
                        + (window.re_max - window.re_min) * i as f64 / (samples - 1) as f64
                })
                .filter_map(|re| curve.predict(params, re).ok().map(|w| (re, w)))
                .collect();
            ApproxCurve { curve, points }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchSummary {
    pub tolerance: f64,
    /// `(intersection, resonance, distance)`.
    pub pairs: Vec<(Complex64, Complex64, f64)>,
    pub unmatched_intersections: Vec<Complex64>,
    pub unmatched_resonances: Vec<Complex64>,
}

impl MatchSummary {
    pub fn is_complete(&self) -> bool {
        self.unmatched_intersections.is_empty() && self.unmatched_resonances.is_empty()
    }
}

/// Greedy nearest-neighbour pairing within `tolerance`.
pub fn match_points(
    intersections: &[Complex64],
    resonances: &[Complex64],
    tolerance: f64,
) -> MatchSummary {
    let mut taken = vec![false; resonances.len()];
    let mut pairs = Vec::new();
    let mut unmatched_intersections = Vec::new();
    for &p in intersections {
        let best = resonances
            .iter()
            .enumerate()
            .filter(|(i, _)| !taken[*i])
            .map(|(i, &z)| (i, (z - p).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, d)) if d <= tolerance => {
                taken[i] = true;
                pairs.push((p, resonances[i], d));
            }
            _ => unmatched_intersections.push(p),
        }
    }
    let unmatched_resonances = resonances
        .iter()
        .zip(&taken)
        .filter(|(_, t)| !**t)
        .map(|(z, _)| *z)
        .collect();
    MatchSummary {
        tolerance,
        pairs,
        unmatched_intersections,
        unmatched_resonances,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureData {
    pub figure: FigureId,
    pub params: ModelParams,
    pub contours: ContourSet,
    /// Branch-formula resonances inside the window, ordered by `k`.
    pub resonances: Vec<Resonance>,
    pub curves: Vec<ApproxCurve>,
    pub matching: MatchSummary,
    /// Present for the transitional regime.
    pub comparison: Option<TransitionalComparison>,
}

pub fn figure_data(figure: FigureId, overrides: FigureOverrides) -> Result<FigureData> {
    let params = overrides.params.unwrap_or_else(|| figure.default_params());
    params.validate()?;
    let window = overrides.window.unwrap_or_else(|| figure.default_window());
    window.validate()?;

    let contours = contour_scan(&params, &window)?;
    let in_window: Vec<Resonance> = resonances(&params)?
        .into_iter()
        .filter(|r| window.contains(r.z_refined))
        .collect();
    let points: Vec<Complex64> = in_window.iter().map(|r| r.z_refined).collect();
    let matching = match_points(&contours.intersections, &points, window.cell_diagonal());
    let curves = approximation_curves(&params, &window, CURVE_SAMPLES);
    let comparison = if WidthApproximation::new(&params).curves().len() == 2 {
        compare_curves(&params, &in_window)?
    } else {
        None
    };
    Ok(FigureData {
        figure,
        params,
        contours,
        resonances: in_window,
        curves,
        matching,
        comparison,
    })
}
