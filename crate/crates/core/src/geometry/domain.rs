use serde::{Deserialize, Serialize};

/// Parameter domain of a chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ChartDomain {
    /// Axis-aligned box; a periodic axis identifies `lo` with `hi`.
    Rectangle {
        lo: Vec<f64>,
        hi: Vec<f64>,
        periodic: Vec<bool>,
    },
    Disk {
        center: Vec<f64>,
        radius: f64,
    },
}

impl ChartDomain {
    pub fn rectangle(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        let periodic = vec![false; lo.len()];
        Self::Rectangle { lo, hi, periodic }
    }

    /// Centered cube `[-h, h]ⁿ`.
    pub fn cube(n: usize, h: f64) -> Self {
        Self::rectangle(vec![-h; n], vec![h; n])
    }

    pub fn disk(center: Vec<f64>, radius: f64) -> Self {
        Self::Disk { center, radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Rectangle { lo, .. } => lo.len(),
            Self::Disk { center, .. } => center.len(),
        }
    }

    /// Bounding box of the domain.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Self::Rectangle { lo, hi, .. } => (lo.clone(), hi.clone()),
            Self::Disk { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        }
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        match self {
            Self::Rectangle { periodic, .. } => periodic.get(axis).copied().unwrap_or(false),
            Self::Disk { .. } => false,
        }
    }

    pub fn contains(&self, q: &[f64]) -> bool {
        const SLACK: f64 = 1e-12;
        match self {
            Self::Rectangle { lo, hi, periodic } => q.iter().enumerate().all(|(i, &x)| {
                periodic[i]
                    || (x >= lo[i] - SLACK * (1.0 + lo[i].abs())
                        && x <= hi[i] + SLACK * (1.0 + hi[i].abs()))
            }),
            Self::Disk { center, radius } => {
                let d2: f64 = q.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2.sqrt() <= radius * (1.0 + SLACK)
            }
        }
    }

    /// Maps periodic coordinates back into `[lo, hi)`.
    pub fn wrap(&self, q: &mut [f64]) {
        if let Self::Rectangle { lo, hi, periodic } = self {
            for (i, x) in q.iter_mut().enumerate() {
                if periodic[i] {
                    let w = hi[i] - lo[i];
                    *x = lo[i] + (*x - lo[i]).rem_euclid(w);
                }
            }
        }
    }

    /// Lebesgue measure of the parameter domain (`n ≤ 2` for disks).
    pub fn chart_volume(&self) -> f64 {
        match self {
            Self::Rectangle { lo, hi, .. } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
            Self::Disk { center, radius } => {
                super::unit_ball_volume(center.len()) * radius.powi(center.len() as i32)
            }
        }
    }
}
