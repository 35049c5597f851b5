//! Finite realisations of time-homogeneous Poisson random measures.

use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::measure::LevyMeasure;
use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, SimRng};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom<M> {
    pub t: f64,
    pub mark: M,
}

/// Atoms `(t_k, mark_k)` of a Poisson random measure on `(0, T]`, strictly ordered in time.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMeasure<M = f64> {
    pub horizon: f64,
    pub seed: Option<u64>,
    atoms: Vec<Atom<M>>,
}

impl<M> PointMeasure<M> {
    pub fn empty(horizon: f64) -> Self {
        Self {
            horizon,
            seed: None,
            atoms: Vec::new(),
        }
    }

    /// Builds a measure from explicit atoms, checking order and window.
    pub fn from_atoms(horizon: f64, atoms: Vec<Atom<M>>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid("horizon", format!("{horizon} must be positive")));
        }
        for (k, a) in atoms.iter().enumerate() {
            if !(a.t > 0.0 && a.t <= horizon) {
                return Err(Error::AtomOutsideWindow { t: a.t, horizon });
            }
            if k > 0 && atoms[k - 1].t >= a.t {
                return Err(invalid("atoms", format!("atom times must be strictly increasing (index {k})")));
            }
        }
        Ok(Self {
            horizon,
            seed: None,
            atoms,
        })
    }

    pub fn atoms(&self) -> &[Atom<M>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms with `t ∈ (a, b]`.
    pub fn window(&self, a: f64, b: f64) -> &[Atom<M>] {
        let lo = self.atoms.partition_point(|x| x.t <= a);
        let hi = self.atoms.partition_point(|x| x.t <= b);
        if lo >= hi {
            &[]
        } else {
            &self.atoms[lo..hi]
        }
    }

    /// `η(B × (a, b])` for the mark set `B = {m : pred(m)}`.
    pub fn count_where<P: Fn(&M) -> bool>(&self, a: f64, b: f64, pred: P) -> usize {
        self.window(a, b).iter().filter(|x| pred(&x.mark)).count()
    }

    /// Restriction to the marks satisfying `pred`.
    pub fn restrict<P: Fn(&M) -> bool>(&self, pred: P) -> Self
    where
        M: Clone,
    {
        Self {
            horizon: self.horizon,
            seed: self.seed,
            atoms: self.atoms.iter().filter(|a| pred(&a.mark)).cloned().collect(),
        }
    }

    pub fn map_marks<N, F: Fn(&M) -> N>(&self, f: F) -> PointMeasure<N> {
        PointMeasure {
            horizon: self.horizon,
            seed: self.seed,
            atoms: self.atoms.iter().map(|a| Atom { t: a.t, mark: f(&a.mark) }).collect(),
        }
    }
}

/// Samples a Poisson random measure with total intensity `rate · dt ⊗ law`,
/// drawing marks with `mark_fn` after the atom times have been fixed.
pub fn sample_marked<M, R, F>(rate: f64, horizon: f64, rng: &mut R, mut mark_fn: F) -> Result<PointMeasure<M>>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> M,
{
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(invalid("horizon", format!("{horizon} must be positive")));
    }
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(invalid("rate", format!("intensity {rate} must be finite and non-negative")));
    }
    if rate == 0.0 {
        return Ok(PointMeasure::empty(horizon));
    }
    let lambda = rate * horizon;
    let count = Poisson::new(lambda)
        .map_err(|e| invalid("rate", e.to_string()))?
        .sample(rng) as usize;
    let mut times = Vec::with_capacity(count);
    for _ in 0..count {
        times.push(horizon * (1.0 - rng.random::<f64>()));
    }
    times.sort_by(f64::total_cmp);
    // Coincident times have probability zero; redraw until all are distinct.
    while let Some(k) = (1..times.len()).find(|&k| times[k] == times[k - 1]) {
        times[k] = horizon * (1.0 - rng.random::<f64>());
        times.sort_by(f64::total_cmp);
    }
    let atoms = times
        .into_iter()
        .map(|t| Atom {
            t,
            mark: mark_fn(rng),
        })
        .collect();
    Ok(PointMeasure {
        horizon,
        seed: None,
        atoms,
    })
}

/// Samples the Poisson random measure with intensity `ν ⊗ dt` on `(0, T]`.
pub fn sample_prm(nu: &LevyMeasure, horizon: f64, seed: u64) -> Result<PointMeasure<f64>> {
    let mut rng = rng_from_seed(seed);
    let mut pm = sample_prm_with(nu, horizon, &mut rng)?;
    pm.seed = Some(seed);
    Ok(pm)
}

pub fn sample_prm_with(nu: &LevyMeasure, horizon: f64, rng: &mut SimRng) -> Result<PointMeasure<f64>> {
    nu.validate()?;
    let m = nu.total_mass();
    if !m.is_finite() {
        return Err(invalid("measure", "truncated mass is not finite"));
    }
    sample_marked(m, horizon, rng, |r| nu.sample_mark(r))
}

/// Column layout and text conversion for a mark type.
pub trait MarkRecord: Sized {
    const COLUMNS: &'static [&'static str];
    fn to_fields(&self) -> Vec<String>;
    fn from_fields(fields: &[&str]) -> Result<Self>;
}

impl MarkRecord for f64 {
    const COLUMNS: &'static [&'static str] = &["z"];
    fn to_fields(&self) -> Vec<String> {
        vec![format_f64(*self)]
    }
    fn from_fields(fields: &[&str]) -> Result<Self> {
        parse_f64(fields[0], "z")
    }
}

pub(crate) fn format_f64(x: f64) -> String {
    // Shortest representation that round-trips exactly.
    format!("{x:?}")
}

pub(crate) fn parse_f64(s: &str, column: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Format(format!("column {column}: cannot parse {s:?}: {e}")))
}

/// Metadata recovered from the comment header of a point-measure CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointMeasureHeader {
    pub descriptor: Option<String>,
    pub horizon: Option<f64>,
    pub seed: Option<u64>,
}

impl<M: MarkRecord> PointMeasure<M> {
    /// Writes `# levy_measure=…`, `# horizon=…`, `# seed=…`, then `t,<mark columns>` rows.
    pub fn write_csv<W: Write>(&self, mut w: W, descriptor: &str) -> Result<()> {
        writeln!(w, "# levy_measure={descriptor}")?;
        writeln!(w, "# horizon={}", format_f64(self.horizon))?;
        match self.seed {
            Some(s) => writeln!(w, "# seed={s}")?,
            None => writeln!(w, "# seed=none")?,
        }
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["t"];
        header.extend_from_slice(M::COLUMNS);
        out.write_record(&header)?;
        for a in &self.atoms {
            let mut row = vec![format_f64(a.t)];
            row.extend(a.mark.to_fields());
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut r: R) -> Result<(Self, PointMeasureHeader)> {
        let mut header = PointMeasureHeader::default();
        let mut body = String::new();
        let mut line = String::new();
        loop {
            line.clear();
            if r.read_line(&mut line)? == 0 {
                break;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("levy_measure=") {
                    header.descriptor = Some(v.to_string());
                } else if let Some(v) = rest.strip_prefix("horizon=") {
                    header.horizon = Some(parse_f64(v, "horizon")?);
                } else if let Some(v) = rest.strip_prefix("seed=") {
                    header.seed = v.parse().ok();
                }
            } else {
                body.push_str(&line);
            }
        }
        let horizon = header
            .horizon
            .ok_or_else(|| Error::Format("missing '# horizon=' header".into()))?;
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let cols = rdr.headers()?.clone();
        let expected: Vec<&str> = std::iter::once("t").chain(M::COLUMNS.iter().copied()).collect();
        if cols.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Format(format!("expected columns {expected:?}, found {cols:?}")));
        }
        let mut atoms = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let fields: Vec<&str> = rec.iter().collect();
            atoms.push(Atom {
                t: parse_f64(fields[0], "t")?,
                mark: M::from_fields(&fields[1..])?,
            });
        }
        let mut pm = Self::from_atoms(horizon, atoms)?;
        pm.seed = header.seed;
        Ok((pm, header))
    }
}
