use super::region::Region;
use crate::error::{Error, Result};

/// Axis-aligned box with a sampling step per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactWindow {
    lo: Vec<f64>,
    hi: Vec<f64>,
    step: Vec<f64>,
}

impl CompactWindow {
    pub fn new(bounds: Vec<(f64, f64)>, step: Vec<f64>) -> Result<Self> {
        if bounds.is_empty() || bounds.len() != step.len() {
            return Err(Error::Shape(format!(
                "window has {} axes but {} steps",
                bounds.len(),
                step.len()
            )));
        }
        for (i, &(a, b)) in bounds.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::Config(format!("window axis {i}: need finite a <= b, got [{a}, {b}]")));
            }
        }
        if let Some(i) = step.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::Config(format!("window axis {i}: step must be positive")));
        }
        let (lo, hi) = bounds.into_iter().unzip();
        Ok(CompactWindow { lo, hi, step })
    }

    pub fn interval(a: f64, b: f64, step: f64) -> Result<Self> {
        Self::new(vec![(a, b)], vec![step])
    }

    /// The cube [a, b]^n.
    pub fn cube(n: usize, a: f64, b: f64, step: f64) -> Result<Self> {
        Self::new(vec![(a, b); n], vec![step; n])
    }

    /// Degenerate window {t}.
    pub fn point(t: &[f64]) -> Result<Self> {
        Self::new(t.iter().map(|&x| (x, x)).collect(), vec![1.0; t.len()])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn step(&self) -> &[f64] {
        &self.step
    }

    pub fn bounds(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.lo.iter().copied().zip(self.hi.iter().copied())
    }

    pub fn volume(&self) -> f64 {
        self.bounds().map(|(a, b)| b - a).product()
    }

    /// max_i max(|a_i|, |b_i|): the N for which the window sits inside [-N, N]^n.
    pub fn half_width(&self) -> f64 {
        self.bounds().map(|(a, b)| a.abs().max(b.abs())).fold(0.0, f64::max)
    }

    /// Euclidean length of the step vector; bounds the distance from any box
    /// point to the nearest grid node by half of it.
    pub fn step_diameter(&self) -> f64 {
        self.step.iter().map(|s| s * s).sum::<f64>().sqrt()
    }

    pub fn contains_window(&self, other: &CompactWindow) -> bool {
        self.dim() == other.dim()
            && self
                .bounds()
                .zip(other.bounds())
                .all(|((a, b), (c, d))| a <= c && d <= b)
    }

    /// Grows every axis by `margin` on both sides, keeping the steps.
    pub fn expanded(&self, margin: f64) -> CompactWindow {
        CompactWindow {
            lo: self.lo.iter().map(|a| a - margin).collect(),
            hi: self.hi.iter().map(|b| b + margin).collect(),
            step: self.step.clone(),
        }
    }

    pub fn with_step(&self, step: Vec<f64>) -> Result<CompactWindow> {
        CompactWindow::new(self.bounds().collect(), step)
    }
}

/// Product lattice over the clipped box; axis 0 varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Vec<f64>>,
}

/// Lattice a, a+h, a+2h, ... on [a, b] with b always included.
pub fn axis_points(a: f64, b: f64, h: f64) -> Vec<f64> {
    let n = ((b - a) / h * (1.0 + 1e-12)).floor() as usize;
    let mut pts: Vec<f64> = (0..=n).map(|k| a + k as f64 * h).collect();
    let last = *pts.last().expect("n >= 0");
    if last >= b - 1e-9 * h {
        *pts.last_mut().unwrap() = b;
    } else {
        pts.push(b);
    }
    pts
}

impl Grid {
    pub fn from_axes(axes: Vec<Vec<f64>>) -> Self {
        Grid { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    /// Writes point `i` into `out`.
    pub fn point_into(&self, mut i: usize, out: &mut [f64]) {
        for (k, axis) in self.axes.iter().enumerate().rev() {
            let m = axis.len();
            out[k] = axis[i % m];
            i /= m;
        }
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        self.point_into(i, &mut p);
        p
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Trapezoid weight of point `i` (product of per-axis weights).
    pub fn trapezoid_weight(&self, mut i: usize) -> f64 {
        let mut w = 1.0;
        for axis in self.axes.iter().rev() {
            let m = axis.len();
            let j = i % m;
            i /= m;
            if m == 1 {
                return 0.0;
            }
            let left = if j > 0 { axis[j] - axis[j - 1] } else { 0.0 };
            let right = if j + 1 < m { axis[j + 1] - axis[j] } else { 0.0 };
            w *= 0.5 * (left + right);
        }
        w
    }
}

/// Sampling grid of `w ∩ domain`.
pub fn make_grid(w: &CompactWindow, domain: &Region) -> Result<Grid> {
    if w.dim() != domain.dim() {
        return Err(Error::Shape(format!(
            "window dimension {} vs domain dimension {}",
            w.dim(),
            domain.dim()
        )));
    }
    let mut axes = Vec::with_capacity(w.dim());
    for ((a, b), (ax, &h)) in w.bounds().zip(domain.axes().iter().zip(w.step())) {
        let lo = a.max(ax.lo);
        let hi = b.min(ax.hi);
        if lo > hi {
            return Err(Error::EmptyWindow);
        }
        axes.push(axis_points(lo, hi, h));
    }
    Ok(Grid { axes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::region::Interval;
    use proptest::prelude::*;

    #[test]
    fn unit_interval_half_step() {
        let w = CompactWindow::interval(0.0, 1.0, 0.5).unwrap();
        let g = make_grid(&w, &Region::full(1)).unwrap();
        assert_eq!(g.points(), vec![vec![0.0], vec![0.5], vec![1.0]]);
    }

    #[test]
    fn half_line_clips_negatives() {
        let w = CompactWindow::interval(-1.0, 1.0, 1.0).unwrap();
        let g = make_grid(&w, &Region::half_line()).unwrap();
        assert_eq!(g.points(), vec![vec![0.0], vec![1.0]]);
    }

    #[test]
    fn square_corners() {
        let w = CompactWindow::cube(2, 0.0, 1.0, 1.0).unwrap();
        let g = make_grid(&w, &Region::full(2)).unwrap();
        assert_eq!(
            g.points(),
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]
        );
    }

    #[test]
    fn empty_intersection_is_an_error() {
        let w = CompactWindow::interval(-3.0, -1.0, 0.5).unwrap();
        assert_eq!(make_grid(&w, &Region::half_line()), Err(Error::EmptyWindow));
    }

    #[test]
    fn invalid_windows_rejected() {
        assert!(CompactWindow::interval(1.0, 0.0, 0.1).is_err());
        assert!(CompactWindow::interval(0.0, 1.0, -0.1).is_err());
        assert!(CompactWindow::new(vec![(0.0, 1.0)], vec![]).is_err());
    }

    #[test]
    fn point_window_has_one_node() {
        let w = CompactWindow::point(&[0.0]).unwrap();
        let g = make_grid(&w, &Region::half_line()).unwrap();
        assert_eq!(g.points(), vec![vec![0.0]]);
        assert_eq!(g.trapezoid_weight(0), 0.0);
    }

    #[test]
    fn trapezoid_weights_sum_to_volume() {
        let w = CompactWindow::new(vec![(0.0, 1.0), (-1.0, 2.0)], vec![0.3, 0.7]).unwrap();
        let g = make_grid(&w, &Region::full(2)).unwrap();
        let s: f64 = (0..g.len()).map(|i| g.trapezoid_weight(i)).sum();
        assert!((s - 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn grid_sorted_unique_and_inside(a in -5.0f64..5.0, len in 0.0f64..4.0, h in 0.05f64..1.0,
                                         c in -5.0f64..5.0, len2 in 0.0f64..3.0, lo_clip in -6.0f64..0.0) {
            let w = CompactWindow::new(vec![(a, a + len), (c, c + len2)], vec![h, h * 1.3]).unwrap();
            let dom = Region::product(vec![Interval::new(lo_clip, f64::INFINITY), Interval::REAL_LINE]);
            if let Ok(g) = make_grid(&w, &dom) {
                let pts = g.points();
                for p in &pts {
                    prop_assert!(dom.contains(p));
                    prop_assert!(p[0] >= a && p[0] <= a + len && p[1] >= c && p[1] <= c + len2);
                }
                for pair in pts.windows(2) {
                    prop_assert!(pair[0] < pair[1], "not strictly lexicographic: {:?}", pair);
                }
                for ax in g.axes() {
                    for d in ax.windows(2) {
                        prop_assert!(d[1] - d[0] <= h * 1.3 + 1e-12);
                    }
                }
            }
        }
    }
}
