//! Seeded 2-D point-cloud generators.
//!
//! Every generator is a pure function of its spec and seed. Default geometries
//! are fixed here so that experiment results stay comparable across versions.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{LabeledDataset, Provenance};
use crate::error::{Error, Result};
use crate::nn::Matrix;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn build<S: Serialize>(
    generator: &str,
    seed: u64,
    spec: &S,
    points: Vec<[f64; 2]>,
    labels: Vec<usize>,
) -> LabeledDataset {
    let n = points.len();
    let data = points.into_iter().flatten().collect();
    let features = Matrix::new(n, 2, data).expect("finite generated points");
    let provenance = Provenance {
        generator: generator.to_string(),
        seed: Some(seed),
        params: serde_json::to_value(spec).expect("spec serializes"),
    };
    LabeledDataset::new(features, labels, 2, provenance).expect("labels in range")
}

/// Two isotropic Gaussian blobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub centers: [[f64; 2]; 2],
    pub sigma: f64,
}

impl Default for GaussianSpec {
    fn default() -> Self {
        Self {
            centers: [[-1.5, -1.5], [1.5, 1.5]],
            sigma: 0.5,
        }
    }
}

pub fn gen_gaussian(n_per_class: usize, seed: u64) -> LabeledDataset {
    gen_gaussian_with(&GaussianSpec::default(), n_per_class, seed)
}

pub fn gen_gaussian_with(spec: &GaussianSpec, n_per_class: usize, seed: u64) -> LabeledDataset {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, spec.sigma).expect("sigma is finite and non-negative");
    let mut points = Vec::with_capacity(2 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for (class, c) in spec.centers.iter().enumerate() {
        for _ in 0..n_per_class {
            points.push([c[0] + normal.sample(&mut r), c[1] + normal.sample(&mut r)]);
            labels.push(class);
        }
    }
    build("gaussian", seed, spec, points, labels)
}

/// Class 0 fills a disk, class 1 an annulus around it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleSpec {
    pub inner_radius: f64,
    pub outer_min: f64,
    pub outer_max: f64,
}

impl Default for CircleSpec {
    fn default() -> Self {
        Self {
            inner_radius: 1.0,
            outer_min: 1.5,
            outer_max: 2.0,
        }
    }
}

pub fn gen_circle(n_per_class: usize, seed: u64) -> LabeledDataset {
    gen_circle_with(&CircleSpec::default(), n_per_class, seed)
}

/// Points are uniform by area within each ring.
pub fn gen_circle_with(spec: &CircleSpec, n_per_class: usize, seed: u64) -> LabeledDataset {
    let mut r = rng(seed);
    let mut points = Vec::with_capacity(2 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    let rings = [(0.0, spec.inner_radius), (spec.outer_min, spec.outer_max)];
    for (class, &(lo, hi)) in rings.iter().enumerate() {
        for _ in 0..n_per_class {
            let u: f64 = r.random();
            let radius = (lo * lo + u * (hi * hi - lo * lo)).sqrt();
            let theta = r.random::<f64>() * TAU;
            points.push([radius * theta.cos(), radius * theta.sin()]);
            labels.push(class);
        }
    }
    build("circle", seed, spec, points, labels)
}

/// Two Archimedean arms `r = max_radius * t`, `theta = 2 pi turns t + k pi`,
/// `t` uniform in `[min_t, 1]`, plus isotropic Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpiralSpec {
    pub turns: f64,
    pub noise: f64,
    pub max_radius: f64,
    pub min_t: f64,
}

impl Default for SpiralSpec {
    fn default() -> Self {
        Self {
            turns: 0.75,
            noise: 0.1,
            max_radius: 4.0,
            min_t: 0.1,
        }
    }
}

impl SpiralSpec {
    fn validate(&self) -> Result<()> {
        if !(self.turns > 0.0) || !(self.noise >= 0.0) || !(self.max_radius > 0.0) {
            return Err(Error::InvalidParameter(
                "spiral needs turns > 0, noise >= 0 and max_radius > 0".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.min_t) {
            return Err(Error::InvalidParameter("spiral min_t must lie in [0, 1)".into()));
        }
        Ok(())
    }

    fn arm_point(&self, arm: usize, t: f64) -> [f64; 2] {
        let radius = self.max_radius * t;
        let theta = TAU * self.turns * t + arm as f64 * PI;
        [radius * theta.cos(), radius * theta.sin()]
    }
}

pub fn gen_spiral(n_per_class: usize, turns: f64, noise: f64, seed: u64) -> Result<LabeledDataset> {
    gen_spiral_with(
        &SpiralSpec {
            turns,
            noise,
            ..SpiralSpec::default()
        },
        n_per_class,
        seed,
    )
}

pub fn gen_spiral_with(spec: &SpiralSpec, n_per_class: usize, seed: u64) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut r = rng(seed);
    let normal = Normal::new(0.0, spec.noise).expect("validated noise");
    let mut points = Vec::with_capacity(2 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for arm in 0..2 {
        for _ in 0..n_per_class {
            let t = spec.min_t + (1.0 - spec.min_t) * r.random::<f64>();
            let [x, y] = spec.arm_point(arm, t);
            let (dx, dy) = if spec.noise > 0.0 {
                (normal.sample(&mut r), normal.sample(&mut r))
            } else {
                (0.0, 0.0)
            };
            points.push([x + dx, y + dy]);
            labels.push(arm);
        }
    }
    Ok(build("spiral", seed, spec, points, labels))
}

/// Euclidean distance from `p` to spiral arm `arm` (0 or 1).
///
/// Candidates are the parameters whose arm angle matches the angle of `p`
/// (one per winding) and the two end points.
pub fn spiral_arm_distance(spec: &SpiralSpec, arm: usize, p: [f64; 2]) -> f64 {
    let phase = p[1].atan2(p[0]) - arm as f64 * PI;
    let per_turn = 1.0 / spec.turns;
    let base = phase / (TAU * spec.turns);
    let mut candidates = vec![spec.min_t, 1.0];
    let lo = ((spec.min_t - base) / per_turn).floor() as i64 - 1;
    let hi = ((1.0 - base) / per_turn).ceil() as i64 + 1;
    for j in lo..=hi {
        let t = base + j as f64 * per_turn;
        if (spec.min_t..=1.0).contains(&t) {
            candidates.push(t);
        }
    }
    let dist = |t: f64| {
        let q = spec.arm_point(arm, t);
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
    };
    // the angle-matched parameter is close to, not at, the foot point;
    // polish each candidate with a golden-section search
    let window = 0.25 * per_turn;
    candidates
        .into_iter()
        .map(|t| {
            let (mut a, mut b) = ((t - window).max(spec.min_t), (t + window).min(1.0));
            let g = (5f64.sqrt() - 1.0) / 2.0;
            for _ in 0..80 {
                let (c, d) = (b - g * (b - a), a + g * (b - a));
                if dist(c) < dist(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            dist(t).min(dist(0.5 * (a + b)))
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    /// `b y >= m x + c`
    Ge,
    /// `b y <= m x + c`
    Le,
}

/// The half-plane `b y (>= | <=) m x + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSpec {
    pub m: f64,
    pub b: f64,
    pub c: f64,
    pub sense: Sense,
}

impl LineSpec {
    pub fn new(m: f64, b: f64, c: f64, sense: Sense) -> Result<Self> {
        if m == 0.0 && b == 0.0 {
            return Err(Error::InvalidParameter("line needs m or b nonzero".into()));
        }
        if !(m.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidParameter("line coefficients must be finite".into()));
        }
        Ok(Self { m, b, c, sense })
    }

    pub fn holds(&self, x: f64, y: f64) -> bool {
        let (lhs, rhs) = (self.b * y, self.m * x + self.c);
        match self.sense {
            Sense::Ge => lhs >= rhs,
            Sense::Le => lhs <= rhs,
        }
    }

    /// Coefficients `(w_x, w_y, bias)` of the equivalent form
    /// `w_x x + w_y y + bias >= 0`.
    pub fn normal_form(&self) -> (f64, f64, f64) {
        match self.sense {
            Sense::Ge => (-self.m, self.b, -self.c),
            Sense::Le => (self.m, -self.b, self.c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for BoundingBox {
    fn default() -> Self {
        Self {
            x_min: -2.0,
            x_max: 2.0,
            y_min: -2.0,
            y_max: 2.0,
        }
    }
}

/// Conjunction of half-planes inside a sampling box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub lines: Vec<LineSpec>,
    #[serde(default)]
    pub bounds: BoundingBox,
}

impl RegionSpec {
    /// An open wedge reaching the right edge of the box.
    pub fn two_line() -> Self {
        Self {
            lines: vec![
                LineSpec { m: 0.5, b: 1.0, c: -0.5, sense: Sense::Ge },
                LineSpec { m: 2.0, b: 1.0, c: -0.5, sense: Sense::Le },
            ],
            bounds: BoundingBox::default(),
        }
    }

    /// A trapezoid in the middle of the box.
    pub fn four_line() -> Self {
        Self {
            lines: vec![
                LineSpec { m: 0.0, b: 1.0, c: -1.0, sense: Sense::Ge },
                LineSpec { m: 0.0, b: 1.0, c: 1.0, sense: Sense::Le },
                LineSpec { m: 2.0, b: 1.0, c: 2.5, sense: Sense::Le },
                LineSpec { m: -2.0, b: 1.0, c: 2.5, sense: Sense::Le },
            ],
            bounds: BoundingBox::default(),
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.lines.iter().all(|l| l.holds(x, y))
    }
}

/// `n` uniform points in `bounds`, labeled 1 where every inequality holds.
pub fn gen_halfplane_region(
    lines: &[LineSpec],
    n: usize,
    bounds: BoundingBox,
    seed: u64,
) -> Result<LabeledDataset> {
    if lines.is_empty() {
        return Err(Error::InvalidParameter("region needs at least one line".into()));
    }
    for l in lines {
        LineSpec::new(l.m, l.b, l.c, l.sense)?;
    }
    if !(bounds.x_max > bounds.x_min && bounds.y_max > bounds.y_min) {
        return Err(Error::InvalidParameter("empty sampling box".into()));
    }
    let spec = RegionSpec {
        lines: lines.to_vec(),
        bounds,
    };
    let mut r = rng(seed);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x = bounds.x_min + (bounds.x_max - bounds.x_min) * r.random::<f64>();
        let y = bounds.y_min + (bounds.y_max - bounds.y_min) * r.random::<f64>();
        labels.push(usize::from(spec.contains(x, y)));
        points.push([x, y]);
    }
    if !labels.contains(&1) {
        return Err(Error::EmptyRegion { samples: n });
    }
    Ok(build("halfplane_region", seed, &spec, points, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist2(a: &[f64], b: [f64; 2]) -> f64 {
        (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
    }

    #[test]
    fn gaussian_is_balanced_and_deterministic() {
        let d = gen_gaussian(250, 1);
        assert_eq!(d.len(), 500);
        assert_eq!(d.class_counts(), vec![250, 250]);
        assert_eq!(d, gen_gaussian(250, 1));
        assert_ne!(d, gen_gaussian(250, 2));
    }

    #[test]
    fn gaussian_is_linearly_separable() {
        // reference perceptron; converges iff the classes are separable
        let d = gen_gaussian(250, 7);
        let mut w = [0.0f64; 3];
        let mut converged = false;
        for _ in 0..1000 {
            let mut errors = 0;
            for (row, &l) in d.features().row_iter().zip(d.labels()) {
                let y = if l == 1 { 1.0 } else { -1.0 };
                let s = w[0] * row[0] + w[1] * row[1] + w[2];
                if y * s <= 0.0 {
                    w[0] += y * row[0];
                    w[1] += y * row[1];
                    w[2] += y;
                    errors += 1;
                }
            }
            if errors == 0 {
                converged = true;
                break;
            }
        }
        assert!(converged);
    }

    #[test]
    fn circle_rings_are_separated_by_radius() {
        let spec = CircleSpec::default();
        assert!(spec.outer_min - spec.inner_radius >= 0.3);
        let d = gen_circle(250, 3);
        assert_eq!(d.class_counts(), vec![250, 250]);
        let radius = |r: &[f64]| r[0].hypot(r[1]);
        let inner_max = d
            .features()
            .row_iter()
            .zip(d.labels())
            .filter(|(_, &l)| l == 0)
            .map(|(r, _)| radius(r))
            .fold(0.0, f64::max);
        let outer_min = d
            .features()
            .row_iter()
            .zip(d.labels())
            .filter(|(_, &l)| l == 1)
            .map(|(r, _)| radius(r))
            .fold(f64::INFINITY, f64::min);
        assert!(inner_max < outer_min);
        let threshold = (spec.inner_radius + spec.outer_min) / 2.0;
        for (row, &l) in d.features().row_iter().zip(d.labels()) {
            assert_eq!(usize::from(radius(row) > threshold), l);
        }
        assert_eq!(d, gen_circle(250, 3));
    }

    #[test]
    fn noiseless_spiral_matches_nearest_arm() {
        let spec = SpiralSpec {
            noise: 0.0,
            ..SpiralSpec::default()
        };
        let d = gen_spiral_with(&spec, 300, 11).unwrap();
        assert_eq!(d.class_counts(), vec![300, 300]);
        for (row, &l) in d.features().row_iter().zip(d.labels()) {
            let p = [row[0], row[1]];
            let (d0, d1) = (spiral_arm_distance(&spec, 0, p), spiral_arm_distance(&spec, 1, p));
            assert_eq!(usize::from(d1 < d0), l);
            assert!(d0.min(d1) < 1e-9);
        }
    }

    #[test]
    fn arm_distance_agrees_with_dense_sampling() {
        let spec = SpiralSpec::default();
        let dense: Vec<[f64; 2]> = (0..=200_000)
            .map(|i| spec.min_t + (1.0 - spec.min_t) * i as f64 / 200_000.0)
            .map(|t| spec.arm_point(1, t))
            .collect();
        for p in [[0.3, -1.2], [2.5, 2.5], [-3.9, 0.1], [0.0, 0.0]] {
            let brute = dense.iter().map(|q| dist2(&p, *q)).fold(f64::INFINITY, f64::min).sqrt();
            let fast = spiral_arm_distance(&spec, 1, p);
            assert!(fast <= brute + 1e-9, "{p:?}: {fast} vs {brute}");
            assert!(brute - fast < 1e-3, "{p:?}: {fast} vs {brute}");
        }
    }

    #[test]
    fn spiral_rejects_bad_spec() {
        assert!(gen_spiral(10, 0.0, 0.1, 0).is_err());
        assert!(gen_spiral(10, 1.0, -0.1, 0).is_err());
        assert_eq!(gen_spiral(10, 1.5, 0.2, 3).unwrap(), gen_spiral(10, 1.5, 0.2, 3).unwrap());
    }

    #[test]
    fn region_labels_follow_inequalities() {
        let spec = RegionSpec::two_line();
        let d = gen_halfplane_region(&spec.lines, 2000, spec.bounds, 5).unwrap();
        for (row, &l) in d.features().row_iter().zip(d.labels()) {
            let want = spec.lines.iter().all(|s| s.holds(row[0], row[1]));
            assert_eq!(l == 1, want);
        }
    }

    #[test]
    fn single_line_is_half_plane() {
        let line = LineSpec::new(1.0, 1.0, 0.0, Sense::Ge).unwrap();
        let d = gen_halfplane_region(&[line], 1000, BoundingBox::default(), 2).unwrap();
        for (row, &l) in d.features().row_iter().zip(d.labels()) {
            assert_eq!(l == 1, row[1] >= row[0]);
        }
    }

    #[test]
    fn trapezoid_area_fraction() {
        let spec = RegionSpec::four_line();
        let d = gen_halfplane_region(&spec.lines, 20_000, spec.bounds, 1).unwrap();
        let frac = d.class_counts()[1] as f64 / d.len() as f64;
        // height 2, parallel sides 3.5 and 1.5 inside a 4x4 box: 5/16
        assert!((frac - 5.0 / 16.0).abs() < 0.02, "fraction {frac}");
    }

    #[test]
    fn empty_region_is_an_error() {
        let lines = [
            LineSpec::new(0.0, 1.0, 1.0, Sense::Ge).unwrap(),
            LineSpec::new(0.0, 1.0, -1.0, Sense::Le).unwrap(),
        ];
        assert!(matches!(
            gen_halfplane_region(&lines, 500, BoundingBox::default(), 0),
            Err(Error::EmptyRegion { samples: 500 })
        ));
        assert!(LineSpec::new(0.0, 0.0, 1.0, Sense::Ge).is_err());
        assert!(gen_halfplane_region(&[], 10, BoundingBox::default(), 0).is_err());
    }

    #[test]
    fn normal_form_agrees_with_holds() {
        for l in RegionSpec::four_line().lines.iter().chain(&RegionSpec::two_line().lines) {
            let (wx, wy, c) = l.normal_form();
            for &(x, y) in &[(0.3, -1.7), (1.9, 1.2), (-1.0, 0.4), (0.0, 0.0)] {
                assert_eq!(l.holds(x, y), wx * x + wy * y + c >= 0.0);
            }
        }
    }
}
