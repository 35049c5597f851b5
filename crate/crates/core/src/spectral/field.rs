use std::io::{BufRead, Write};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::prm::point::{format_f64, parse_f64};

/// Coefficient vector `(c_1, …, c_N)` in the eigenbasis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpectralField(Vec<f64>);

impl SpectralField {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self(coeffs)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(Σ |c_i|^p)^{1/p}`.
    pub fn lp(&self, p: f64) -> f64 {
        if p == 2.0 {
            return self.0.iter().map(|c| c * c).sum::<f64>().sqrt();
        }
        self.0.iter().map(|c| c.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.iter().map(|c| c * s).collect())
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: f64, other: &SpectralField) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }
}

impl Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        SpectralField(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        SpectralField(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        self.axpy(-1.0, rhs);
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, s: f64) -> SpectralField {
        self.scale(s)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}

/// Càdlàg trajectory recorded at grid points and jump times.
///
/// `states[k]` is the right limit at `times[k]`; left limits that differ from it
/// are kept in `jumps`, keyed by the time index.
#[derive(Clone, Debug, PartialEq)]
pub struct PathRecord {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    jumps: Vec<(usize, SpectralField)>,
    pub cadlag: bool,
}

impl PathRecord {
    pub fn new() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            jumps: Vec::new(),
            cadlag: true,
        }
    }

    pub fn from_samples(times: Vec<f64>, states: Vec<SpectralField>) -> Result<Self> {
        let mut p = Self::new();
        if times.len() != states.len() {
            return Err(Error::GridMismatch(format!("{} times, {} states", times.len(), states.len())));
        }
        for (t, s) in times.into_iter().zip(states) {
            p.push(t, s)?;
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.states.first().map_or(0, |s| s.len())
    }

    pub fn horizon(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn jumps(&self) -> &[(usize, SpectralField)] {
        &self.jumps
    }

    /// Appends a continuity point.
    pub fn push(&mut self, t: f64, state: SpectralField) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::GridMismatch(format!("time {t} does not follow {last}")));
            }
        }
        self.times.push(t);
        self.states.push(state);
        Ok(())
    }

    /// Records a jump at `t`. When `t` coincides with the last recorded time the
    /// stored state there becomes the left limit.
    pub fn push_jump(&mut self, t: f64, left: SpectralField, right: SpectralField) -> Result<()> {
        if self.times.last() == Some(&t) {
            let k = self.times.len() - 1;
            self.states[k] = right;
            match self.jumps.last_mut() {
                Some((idx, _)) if *idx == k => {}
                _ => self.jumps.push((k, left)),
            }
            return Ok(());
        }
        self.push(t, right)?;
        self.jumps.push((self.times.len() - 1, left));
        Ok(())
    }

    /// `u(t_k-)`.
    pub fn left_limit(&self, k: usize) -> &SpectralField {
        match self.jumps.binary_search_by_key(&k, |(i, _)| *i) {
            Ok(j) => &self.jumps[j].1,
            Err(_) => &self.states[k],
        }
    }

    /// State at the last recorded time `≤ t`.
    pub fn state_at(&self, t: f64) -> &SpectralField {
        let k = self.times.partition_point(|&s| s <= t);
        &self.states[k.saturating_sub(1)]
    }

    /// Index of the recorded time equal to `t`, if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = self.times.partition_point(|&s| s < t);
        (k < self.times.len() && self.times[k] == t).then_some(k)
    }

    pub fn map_states<F: Fn(&SpectralField) -> SpectralField>(&self, f: F) -> Self {
        Self {
            times: self.times.clone(),
            states: self.states.iter().map(&f).collect(),
            jumps: self.jumps.iter().map(|(k, s)| (*k, f(s))).collect(),
            cadlag: self.cadlag,
        }
    }

    /// Pointwise combination of two paths recorded on the same times.
    pub fn zip_with<F: Fn(&SpectralField, &SpectralField) -> SpectralField>(
        &self,
        other: &PathRecord,
        f: F,
    ) -> Result<Self> {
        if self.times != other.times {
            return Err(Error::GridMismatch("paths are recorded on different times".into()));
        }
        let mut out = Self::new();
        for k in 0..self.len() {
            let right = f(&self.states[k], &other.states[k]);
            let left = f(self.left_limit(k), other.left_limit(k));
            if left != right {
                out.push_jump(self.times[k], left, right)?;
            } else {
                out.push(self.times[k], right)?;
            }
        }
        out.cadlag = self.cadlag && other.cadlag;
        Ok(out)
    }

    /// CSV with columns `t,c_1..c_N`; a jump is written as two rows with the
    /// same `t`, the left limit first.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.modes()).map(|i| format!("c_{i}")));
        out.write_record(&header)?;
        let row = |t: f64, s: &SpectralField| {
            std::iter::once(format_f64(t))
                .chain(s.coeffs().iter().map(|c| format_f64(*c)))
                .collect::<Vec<_>>()
        };
        let mut j = 0;
        for (k, (t, s)) in self.times.iter().zip(&self.states).enumerate() {
            if j < self.jumps.len() && self.jumps[j].0 == k {
                out.write_record(row(*t, &self.jumps[j].1))?;
                j += 1;
            }
            out.write_record(row(*t, s))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut path = Self::new();
        let mut pending: Option<(f64, SpectralField)> = None;
        for rec in rdr.records() {
            let rec = rec?;
            let t = parse_f64(&rec[0], "t")?;
            let coeffs = rec
                .iter()
                .skip(1)
                .map(|s| parse_f64(s, "c"))
                .collect::<Result<Vec<_>>>()?;
            let state = SpectralField::new(coeffs);
            match pending.take() {
                Some((pt, left)) if pt == t => path.push_jump(t, left, state)?,
                Some((pt, prev)) => {
                    path.push(pt, prev)?;
                    pending = Some((t, state));
                }
                None => pending = Some((t, state)),
            }
        }
        if let Some((t, s)) = pending {
            path.push(t, s)?;
        }
        Ok(path)
    }
}

impl Default for PathRecord {
    fn default() -> Self {
        Self::new()
    }
}
