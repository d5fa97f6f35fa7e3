//! Line-of-sight probability for a uniformly placed MS.
//!
//! Three estimates are provided:
//!
//! * [`p_los_closed`]: the arc-area closed form, built from the LoS half
//!   angle [`phi`] and the central-ray distances `d1`, `d2`.
//! * [`p_los_optical`]: the frequency-independent limit at normal incidence.
//! * [`p_los_grid`]: an exact count of LoS cells on an `N×N` grid, with the
//!   Fresnel clearance re-derived for every MS position. This is the
//!   reference the other two are judged against.
//!
//! A path is LoS when it passes through the window and both window edges
//! keep at least [`CLEARANCE_RATIO`] of the first Fresnel radius clear.

use rayon::prelude::*;

use crate::diffraction::fresnel_radius;
use crate::geometry::{self, Point2D, SceneGeometry};
use crate::{wavelength, Error, Result, SPEED_OF_LIGHT};

/// Fraction of the first Fresnel radius an edge must clear for LoS.
pub const CLEARANCE_RATIO: f64 = 0.6;

/// Grid resolution used when none is given.
pub const DEFAULT_GRID_N: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    /// Points per axis.
    pub n: usize,
    /// Carried through to run records. The grid itself is deterministic.
    pub seed: u64,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 10 {
            return Err(Error::Domain(format!("grid needs n >= 10, got {n}")));
        }
        Ok(Self { n, seed: 0 })
    }
}

/// All LoS estimates for one scene and frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosEvaluation {
    pub p_closed: f64,
    pub p_grid: Option<f64>,
    pub p_optical: f64,
    /// The frequency is at or below the critical frequency of the scene.
    pub below_critical: bool,
    /// The closed form exceeded one and was clamped.
    pub clamped: bool,
}

/// Half-angle at the BS of the LoS region, floored at zero.
///
/// `(L_w cos²θ − 2·0.6·r_d cosθ) / (2 d_a)` with `r_d` taken on the central
/// ray at `d1(scene)`, `d2(scene)`.
pub fn phi(scene: &SceneGeometry, wavelength: f64) -> Result<f64> {
    Ok(raw_phi(scene, wavelength)?.max(0.0))
}

fn raw_phi(scene: &SceneGeometry, wavelength: f64) -> Result<f64> {
    scene.validate()?;
    let rd = fresnel_radius(geometry::d1(scene), geometry::d2(scene), wavelength)?;
    let cos = scene.bs_angle.cos();
    Ok(
        (scene.window_width * cos * cos - 2.0 * CLEARANCE_RATIO * rd * cos)
            / (2.0 * scene.bs_distance),
    )
}

// Annular sector of half-angle φ between radii d1 and d1 + d2, as a fraction
// of the room area. Not clamped.
fn closed_form_unclamped(scene: &SceneGeometry, frequency: f64) -> Result<f64> {
    let phi = phi(scene, wavelength(frequency)?)?;
    let d1 = geometry::d1(scene);
    let d2 = geometry::d2(scene);
    Ok(phi * (d2 * d2 + 2.0 * d1 * d2) / (scene.room_side * scene.room_side))
}

/// Closed-form LoS probability. Back-wall branch for `|θ| < arctan(1/2)`,
/// side-wall branch otherwise (selected through [`geometry::d2`]). Zero when
/// the Fresnel clearance consumes the window, clamped to `[0, 1]`.
pub fn p_los_closed(scene: &SceneGeometry, frequency: f64) -> Result<f64> {
    Ok(closed_form_unclamped(scene, frequency)?.clamp(0.0, 1.0))
}

/// Optical (infinite-frequency) LoS probability at normal incidence,
/// `L_w (1/L_r + 1/(2 d_a))`, clamped to `[0, 1]`.
pub fn p_los_optical(scene: &SceneGeometry) -> f64 {
    (scene.window_width * (1.0 / scene.room_side + 1.0 / (2.0 * scene.bs_distance))).clamp(0.0, 1.0)
}

/// Frequency at which the clearance requirement exactly fills the window at
/// normal incidence:
/// `f_c = 1.44 · c · d_a · L_r / (L_w² · (d_a + L_r))`.
pub fn critical_frequency(window_width: f64, bs_distance: f64, room_side: f64) -> Result<f64> {
    for (name, v) in [
        ("window width", window_width),
        ("BS distance", bs_distance),
        ("room side", room_side),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidGeometry(format!("{name} must be positive, got {v}")));
        }
    }
    let k = 2.0 * CLEARANCE_RATIO / window_width;
    let critical_wavelength = (1.0 / bs_distance + 1.0 / room_side) / (k * k);
    Ok(SPEED_OF_LIGHT / critical_wavelength)
}

/// Per-path breakdown of the LoS test for one MS position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosDiagnostics {
    pub bs: Point2D,
    pub ms: Point2D,
    pub crossing: Point2D,
    pub d1: f64,
    pub d2: f64,
    pub fresnel_radius: f64,
    /// Intrusion distance of the lower and upper window edge.
    pub edge_clearance: [f64; 2],
    pub through_window: bool,
    pub is_los: bool,
}

/// Evaluates the LoS condition for an MS strictly inside the wall plane.
fn diagnose(scene: &SceneGeometry, bs: &Point2D, ms: &Point2D, wavelength: f64) -> Result<LosDiagnostics> {
    let path = geometry::path_decomposition(bs, ms)?;
    let rd = fresnel_radius(path.d1, path.d2, wavelength)?;
    let [lower, upper] = scene.window_edges();
    let edge_clearance = [
        geometry::intrusion_distance(bs, ms, &lower)?,
        geometry::intrusion_distance(bs, ms, &upper)?,
    ];
    let through_window = path.crossing.y.abs() < scene.window_width / 2.0;
    let required = CLEARANCE_RATIO * rd;
    let is_los = through_window && edge_clearance.iter().all(|&delta| delta >= required);
    Ok(LosDiagnostics {
        bs: *bs,
        ms: *ms,
        crossing: path.crossing,
        d1: path.d1,
        d2: path.d2,
        fresnel_radius: rd,
        edge_clearance,
        through_window,
        is_los,
    })
}

pub fn los_diagnostics(scene: &SceneGeometry, ms: &Point2D, frequency: f64) -> Result<LosDiagnostics> {
    scene.validate()?;
    if !(ms.x.is_finite() && ms.y.is_finite()) || !scene.contains(ms) {
        return Err(Error::OutsideRoom);
    }
    let bs = geometry::bs_position(scene);
    let lambda = wavelength(frequency)?;
    if ms.x == 0.0 {
        // On the wall plane: only the opening itself is visible.
        let inside = ms.y.abs() < scene.window_width / 2.0;
        let [lower, upper] = scene.window_edges();
        return Ok(LosDiagnostics {
            bs,
            ms: *ms,
            crossing: *ms,
            d1: bs.distance(ms),
            d2: 0.0,
            fresnel_radius: 0.0,
            edge_clearance: [
                geometry::intrusion_distance(&bs, ms, &lower)?,
                geometry::intrusion_distance(&bs, ms, &upper)?,
            ],
            through_window: inside,
            is_los: inside,
        });
    }
    diagnose(scene, &bs, ms, lambda)
}

/// Whether the BS→MS link satisfies the Fresnel-clearance LoS condition.
pub fn is_los(scene: &SceneGeometry, ms: &Point2D, frequency: f64) -> Result<bool> {
    los_diagnostics(scene, ms, frequency).map(|d| d.is_los)
}

/// Fraction of `N×N` cell-center MS positions that are LoS.
///
/// Rows are counted in parallel; the integer reduction makes the result
/// independent of the thread count.
pub fn p_los_grid(scene: &SceneGeometry, frequency: f64, grid: GridSpec) -> Result<f64> {
    scene.validate()?;
    if grid.n < 10 {
        return Err(Error::Domain(format!("grid needs n >= 10, got {}", grid.n)));
    }
    let lambda = wavelength(frequency)?;
    let bs = geometry::bs_position(scene);
    let n = grid.n;
    let cell = scene.room_side / n as f64;
    let half = scene.room_side / 2.0;
    let count = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = (i as f64 + 0.5) * cell;
            let mut row = 0u64;
            for j in 0..n {
                let ms = Point2D::new(x, -half + (j as f64 + 0.5) * cell);
                if diagnose(scene, &bs, &ms, lambda)?.is_los {
                    row += 1;
                }
            }
            Ok(row)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(count as f64 / (n * n) as f64)
}

pub fn evaluate(scene: &SceneGeometry, frequency: f64, grid: Option<GridSpec>) -> Result<LosEvaluation> {
    let raw = closed_form_unclamped(scene, frequency)?;
    let f_c = critical_frequency(scene.window_width, scene.bs_distance, scene.room_side)?;
    Ok(LosEvaluation {
        p_closed: raw.clamp(0.0, 1.0),
        p_grid: grid.map(|g| p_los_grid(scene, frequency, g)).transpose()?,
        p_optical: p_los_optical(scene),
        below_critical: frequency <= f_c,
        clamped: raw > 1.0,
    })
}
