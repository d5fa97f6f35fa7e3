//! Planar (top view) frame for the room, window, BS and MS.
//!
//! The window wall is the line `x = 0` with the window centered on the
//! origin. The room occupies `x ∈ [0, L_r]`, `y ∈ [-L_r/2, L_r/2]` and the
//! window opening is `x = 0`, `y ∈ [-L_w/2, L_w/2]`. The BS sits outside at
//! `(-d_a, -d_a·tanθ)`, so its distance to the window center is `d_a/cosθ`.
//! UAV altitude is absorbed into `d_a`.

use std::f64::consts::FRAC_PI_2;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }
}

/// Room, window and BS placement. Lengths in meters, angle in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneGeometry {
    /// Side of the square room, `L_r`.
    pub room_side: f64,
    /// Width of the window centered in the front wall, `L_w`.
    pub window_width: f64,
    /// Perpendicular standoff of the BS from the window wall, `d_a`.
    pub bs_distance: f64,
    /// Aspect angle of the BS from the window-center normal, `θ`.
    pub bs_angle: f64,
}

impl SceneGeometry {
    pub fn new(room_side: f64, window_width: f64, bs_distance: f64, bs_angle: f64) -> Result<Self> {
        let scene = Self {
            room_side,
            window_width,
            bs_distance,
            bs_angle,
        };
        scene.validate()?;
        Ok(scene)
    }

    /// Same as [`SceneGeometry::new`] with the aspect angle in degrees.
    pub fn from_degrees(
        room_side: f64,
        window_width: f64,
        bs_distance: f64,
        bs_angle_deg: f64,
    ) -> Result<Self> {
        Self::new(room_side, window_width, bs_distance, bs_angle_deg.to_radians())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.room_side) {
            return Err(Error::InvalidGeometry("room side must be positive".into()));
        }
        if !positive(self.window_width) {
            return Err(Error::InvalidGeometry("window width must be positive".into()));
        }
        if !positive(self.bs_distance) {
            return Err(Error::InvalidGeometry("BS distance must be positive".into()));
        }
        if self.window_width > self.room_side {
            return Err(Error::InvalidGeometry("window exceeds room".into()));
        }
        if !(self.bs_angle.is_finite() && self.bs_angle.abs() < FRAC_PI_2) {
            return Err(Error::InvalidGeometry(
                "BS angle must lie strictly inside (-90°, 90°)".into(),
            ));
        }
        Ok(())
    }

    pub fn with_angle(&self, bs_angle: f64) -> Self {
        Self { bs_angle, ..*self }
    }

    /// The two window edges, lower (`-L_w/2`) first.
    pub fn window_edges(&self) -> [Point2D; 2] {
        let half = self.window_width / 2.0;
        [Point2D::new(0.0, -half), Point2D::new(0.0, half)]
    }

    /// Whether `p` lies in the closed room rectangle.
    pub fn contains(&self, p: &Point2D) -> bool {
        let half = self.room_side / 2.0;
        p.x >= 0.0 && p.x <= self.room_side && p.y >= -half && p.y <= half
    }
}

/// Two-segment split of a BS→MS path at the window-wall plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathDecomposition {
    /// BS to the wall crossing.
    pub d1: f64,
    /// Wall crossing to MS.
    pub d2: f64,
    pub crossing: Point2D,
}

/// Angle of the ray from the window center to a back corner of the square
/// room, `arctan(1/2)`. Rays steeper than this hit a side wall.
pub fn corner_angle() -> f64 {
    0.5f64.atan()
}

pub fn bs_position(scene: &SceneGeometry) -> Point2D {
    Point2D::new(-scene.bs_distance, -scene.bs_distance * scene.bs_angle.tan())
}

/// Distance from the BS to the window center, `d_a / cosθ`.
pub fn d1(scene: &SceneGeometry) -> f64 {
    scene.bs_distance / scene.bs_angle.cos()
}

/// Distance from the window center to the wall hit by the central ray:
/// the back wall for `|θ| < arctan(1/2)`, a side wall otherwise.
pub fn d2(scene: &SceneGeometry) -> f64 {
    let theta = scene.bs_angle;
    if theta.abs() < corner_angle() {
        scene.room_side / theta.cos()
    } else {
        scene.room_side / (2.0 * theta.sin().abs())
    }
}

/// Signed perpendicular distance from a window `edge` to the line through
/// `bs` and `ms`.
///
/// Positive when the line passes on the window-center side of the edge (the
/// edge clears the path), negative when it passes beyond the edge (the wall
/// next to the edge blocks it). The window center is the frame origin, so an
/// edge at `y > 0` faces `+y` and one at `y < 0` faces `-y`; an edge at
/// `y = 0` is treated as facing `+y`. The value is unchanged when `bs` and
/// `ms` are swapped.
pub fn intrusion_distance(bs: &Point2D, ms: &Point2D, edge: &Point2D) -> Result<f64> {
    let (dx, dy) = (ms.x - bs.x, ms.y - bs.y);
    let len = dx.hypot(dy);
    if len == 0.0 {
        return Err(Error::CoincidentEndpoints);
    }
    // Unit normal of the line, flipped to point the way the edge faces.
    let (mut nx, mut ny) = (-dy / len, dx / len);
    let facing = if edge.y < 0.0 { -1.0 } else { 1.0 };
    if ny * facing < 0.0 {
        nx = -nx;
        ny = -ny;
    }
    Ok(nx * (edge.x - bs.x) + ny * (edge.y - bs.y))
}

/// Splits the BS→MS segment where it crosses the window wall `x = 0`.
pub fn path_decomposition(bs: &Point2D, ms: &Point2D) -> Result<PathDecomposition> {
    if bs.x == ms.x {
        return Err(Error::NoWallCrossing);
    }
    if !(bs.x < 0.0 && ms.x > 0.0) {
        return Err(Error::InvalidGeometry(
            "path must run from outside (x < 0) to inside (x > 0)".into(),
        ));
    }
    let t = -bs.x / (ms.x - bs.x);
    let crossing = Point2D::new(0.0, bs.y + t * (ms.y - bs.y));
    Ok(PathDecomposition {
        d1: bs.distance(&crossing),
        d2: crossing.distance(ms),
        crossing,
    })
}
