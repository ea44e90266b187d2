//! Node placement on a square area and distance-based path loss.

use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Result};

/// Position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// Square deployment area, optionally wrapped around at the edges (torus).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Area {
    side_length: f64,
    wrap: bool,
}

impl Default for Area {
    fn default() -> Self {
        Area {
            side_length: 1000.0,
            wrap: true,
        }
    }
}

impl Area {
    pub fn new(side_length: f64, wrap: bool) -> Result<Self> {
        if !side_length.is_finite() || side_length <= 0.0 {
            return Err(Error::InvalidArea(side_length));
        }
        Ok(Area { side_length, wrap })
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn wraps(&self) -> bool {
        self.wrap
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..self.side_length).contains(&p.x) && (0.0..self.side_length).contains(&p.y)
    }
}

/// Draws `count` points i.i.d. uniform on `[0, side)²`.
pub fn place_uniform<R: Rng + ?Sized>(count: usize, area: &Area, rng: &mut R) -> Vec<Point> {
    let side = area.side_length;
    (0..count)
        .map(|_| {
            let x = rng.random_range(0.0..side);
            let y = rng.random_range(0.0..side);
            Point::new(x, y)
        })
        .collect()
}

/// Distance between two points; on a wrapped area each axis offset is
/// replaced by the shorter way around.
pub fn wrap_distance(p: Point, q: Point, area: &Area) -> f64 {
    let axis = |a: f64, b: f64| {
        let d = libm::fabs(a - b);
        if area.wrap {
            d.min(area.side_length - d)
        } else {
            d
        }
    };
    libm::hypot(axis(p.x, q.x), axis(p.y, q.y))
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// `−30.5 − 36.7·log10(d / 1 m)` in dB, without clamping.
pub fn path_loss_db(distance: f64) -> Result<f64> {
    PathLossModel::default().loss_db_unclamped(distance)
}

/// Log-distance path loss with a near-field clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    /// Gain at the 1 m reference distance, dB.
    pub intercept_db: f64,
    /// dB lost per decade of distance.
    pub slope_db: f64,
    /// Distances below this are evaluated at this value instead.
    pub min_distance: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        PathLossModel {
            intercept_db: -30.5,
            slope_db: 36.7,
            min_distance: 1.0,
        }
    }
}

impl PathLossModel {
    pub fn with_min_distance(min_distance: f64) -> Self {
        PathLossModel {
            min_distance,
            ..Self::default()
        }
    }

    fn loss_db_unclamped(&self, distance: f64) -> Result<f64> {
        if !distance.is_finite() || distance <= 0.0 {
            return Err(Error::NonPositiveDistance(distance));
        }
        Ok(self.intercept_db - self.slope_db * libm::log10(distance))
    }

    /// Path gain in dB after applying the clamp floor.
    pub fn gain_db(&self, distance: f64) -> Result<f64> {
        let d = if distance < self.min_distance {
            self.min_distance
        } else {
            distance
        };
        self.loss_db_unclamped(d)
    }

    pub fn gain(&self, distance: f64) -> Result<f64> {
        self.gain_db(distance).map(db_to_linear)
    }
}

/// AP and user positions plus the antenna count per AP.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    aps: Vec<Point>,
    users: Vec<Point>,
    antennas_per_ap: usize,
    area: Area,
}

impl Layout {
    pub fn new(
        aps: Vec<Point>,
        users: Vec<Point>,
        antennas_per_ap: usize,
        area: Area,
    ) -> Result<Self> {
        if aps.is_empty() || users.is_empty() || antennas_per_ap == 0 {
            return Err(Error::EmptyLayout);
        }
        if let Some(p) = aps.iter().chain(&users).find(|p| !area.contains(**p)) {
            return Err(Error::OutOfArea { x: p.x, y: p.y });
        }
        Ok(Layout {
            aps,
            users,
            antennas_per_ap,
            area,
        })
    }

    /// Users first, then APs, both uniform on the area.
    pub fn random<R: Rng + ?Sized>(
        num_aps: usize,
        antennas_per_ap: usize,
        num_users: usize,
        area: Area,
        rng: &mut R,
    ) -> Result<Self> {
        let users = place_uniform(num_users, &area, rng);
        let aps = place_uniform(num_aps, &area, rng);
        Layout::new(aps, users, antennas_per_ap, area)
    }

    pub fn aps(&self) -> &[Point] {
        &self.aps
    }

    pub fn users(&self) -> &[Point] {
        &self.users
    }

    pub fn num_aps(&self) -> usize {
        self.aps.len()
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn antennas_per_ap(&self) -> usize {
        self.antennas_per_ap
    }

    /// Total receive antennas `L·N`.
    pub fn total_antennas(&self) -> usize {
        self.aps.len() * self.antennas_per_ap
    }

    pub fn area(&self) -> &Area {
        &self.area
    }

    pub fn distance(&self, user: usize, ap: usize) -> f64 {
        wrap_distance(self.users[user], self.aps[ap], &self.area)
    }
}

/// Real `K × L` matrix of linear large-scale gains, row per user.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeScaleMatrix {
    users: usize,
    aps: usize,
    values: Vec<f64>,
}

impl LargeScaleMatrix {
    pub fn from_rows(users: usize, aps: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != users * aps {
            return Err(Error::ShapeMismatch {
                expected: users * aps,
                actual: values.len(),
            });
        }
        Ok(LargeScaleMatrix {
            users,
            aps,
            values,
        })
    }

    pub fn filled(users: usize, aps: usize, value: f64) -> Self {
        LargeScaleMatrix {
            users,
            aps,
            values: alloc::vec![value; users * aps],
        }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn aps(&self) -> usize {
        self.aps
    }

    pub fn get(&self, user: usize, ap: usize) -> f64 {
        self.values[user * self.aps + ap]
    }

    pub fn row(&self, user: usize) -> &[f64] {
        &self.values[user * self.aps..(user + 1) * self.aps]
    }
}

pub fn large_scale_matrix(layout: &Layout, model: &PathLossModel) -> Result<LargeScaleMatrix> {
    let (k, l) = (layout.num_users(), layout.num_aps());
    let mut values = Vec::with_capacity(k * l);
    for user in 0..k {
        for ap in 0..l {
            values.push(model.gain(layout.distance(user, ap))?);
        }
    }
    LargeScaleMatrix::from_rows(k, l, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn area() -> Area {
        Area::default()
    }

    #[test]
    fn place_uniform_empty_and_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(place_uniform(0, &area(), &mut rng).is_empty());
        let p = place_uniform(1, &area(), &mut rng)[0];
        assert!(area().contains(p));
    }

    #[test]
    fn place_uniform_mean_is_centered() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts = place_uniform(10_000, &area(), &mut rng);
        let mx = pts.iter().map(|p| p.x).sum::<f64>() / 1e4;
        let my = pts.iter().map(|p| p.y).sum::<f64>() / 1e4;
        assert!((mx - 500.0).abs() < 20.0, "{mx}");
        assert!((my - 500.0).abs() < 20.0, "{my}");
    }

    #[test]
    fn place_uniform_is_deterministic() {
        let a = place_uniform(5, &area(), &mut ChaCha8Rng::seed_from_u64(3));
        let b = place_uniform(5, &area(), &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn wrap_distance_examples() {
        let a = area();
        let o = Point::new(0.0, 0.0);
        assert_eq!(wrap_distance(o, o, &a), 0.0);
        assert!((wrap_distance(o, Point::new(999.0, 0.0), &a) - 1.0).abs() < 1e-12);
        let d = wrap_distance(Point::new(100.0, 100.0), Point::new(900.0, 900.0), &a);
        assert!((d - 282.842_712_474_619).abs() < 1e-9);
        let flat = Area::new(1000.0, false).unwrap();
        let d = wrap_distance(Point::new(100.0, 100.0), Point::new(900.0, 900.0), &flat);
        assert!((d - 800.0 * core::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn path_loss_examples() {
        assert!((path_loss_db(1.0).unwrap() + 30.5).abs() < 1e-12);
        assert!((path_loss_db(10.0).unwrap() + 67.2).abs() < 1e-12);
        assert!((path_loss_db(100.0).unwrap() + 103.9).abs() < 1e-12);
        assert_eq!(path_loss_db(0.0), Err(Error::NonPositiveDistance(0.0)));
        assert!(path_loss_db(-3.0).is_err());
    }

    #[test]
    fn clamp_floor_caps_gain() {
        let m = PathLossModel::default();
        assert_eq!(m.gain_db(0.0).unwrap(), -30.5);
        assert_eq!(m.gain_db(0.3).unwrap(), -30.5);
        assert!(PathLossModel::with_min_distance(0.0).gain_db(0.0).is_err());
    }

    #[test]
    fn large_scale_matrix_examples() {
        let p = Point::new(10.0, 10.0);
        let layout = Layout::new(vec![p], vec![p], 1, area()).unwrap();
        let beta = large_scale_matrix(&layout, &PathLossModel::default()).unwrap();
        assert!((beta.get(0, 0) - 10f64.powf(-3.05)).abs() < 1e-18);

        let user = Point::new(500.0, 500.0);
        let aps = vec![Point::new(400.0, 500.0), Point::new(500.0, 600.0), Point::new(10.0, 10.0)];
        let layout = Layout::new(aps, vec![user], 2, area()).unwrap();
        let beta = large_scale_matrix(&layout, &PathLossModel::default()).unwrap();
        assert_eq!((beta.users(), beta.aps()), (1, 3));
        assert_eq!(beta.get(0, 0), beta.get(0, 1));
        assert!(beta.row(0).iter().all(|&b| b > 0.0));
    }

    #[test]
    fn layout_validation() {
        let p = Point::new(1.0, 1.0);
        assert_eq!(Layout::new(vec![], vec![p], 1, area()), Err(Error::EmptyLayout));
        assert_eq!(Layout::new(vec![p], vec![p], 0, area()), Err(Error::EmptyLayout));
        assert!(matches!(
            Layout::new(vec![Point::new(1000.0, 0.0)], vec![p], 1, area()),
            Err(Error::OutOfArea { .. })
        ));
        assert!(Area::new(0.0, true).is_err());
    }

    fn point() -> impl Strategy<Value = Point> {
        (0.0..1000.0f64, 0.0..1000.0f64).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #[test]
        fn torus_metric(p in point(), q in point(), r in point()) {
            let a = area();
            let dpq = wrap_distance(p, q, &a);
            prop_assert_eq!(dpq, wrap_distance(q, p, &a));
            prop_assert!(dpq <= wrap_distance(p, r, &a) + wrap_distance(r, q, &a) + 1e-9);
            prop_assert!(dpq <= libm::hypot(p.x - q.x, p.y - q.y) + 1e-12);
            prop_assert!(dpq <= 1000.0 * core::f64::consts::SQRT_2 / 2.0 + 1e-9);
            prop_assert_eq!(dpq == 0.0, p == q);
        }

        #[test]
        fn path_loss_strictly_decreasing(d in 1e-3..1e5f64, step in 1e-3..1e3f64) {
            prop_assert!(path_loss_db(d + step).unwrap() < path_loss_db(d).unwrap());
            let m = PathLossModel::default();
            let (a, b) = (d.max(1.0), d.max(1.0) + step);
            prop_assert!(m.gain(b).unwrap() < m.gain(a).unwrap());
        }
    }
}
