use std::path::PathBuf;

use levyrd_core::diagnostics::{
    apriori_ensemble_check, cauchy_decay_fit, grid_summary, moment_estimate, write_summary_csv, EstimateReport,
};
use levyrd_core::noise::{sample_spacetime_noise, sample_spectral_noise};
use levyrd_core::prm::sample_prm;
use levyrd_core::rng::derive_seed;
use levyrd_core::solver::{simulate_mc_partial, Ensemble};
use levyrd_core::{McOptions, NoiseSpec};

use crate::config::{Format, RunConfig};
use crate::manifest::ArtifactWriter;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Ladder,
    Gate,
    Diagnose,
    NoiseSample,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Ladder => "ladder",
            Command::Gate => "gate",
            Command::Diagnose => "diagnose",
            Command::NoiseSample => "noise-sample",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub replicas: Option<usize>,
    /// Overrides `outputs.directory` without entering the resolved config.
    pub out: Option<PathBuf>,
    pub gate: bool,
    pub threads: Option<usize>,
}

impl Invocation {
    pub fn new(command: Command, config: impl Into<PathBuf>) -> Self {
        Self {
            command,
            config: config.into(),
            seed: None,
            replicas: None,
            out: None,
            gate: false,
            threads: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub manifest: PathBuf,
    pub summary: String,
}

/// Parses a `LEVYRD_THREADS` value.
pub fn parse_threads(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("LEVYRD_THREADS: expected a positive integer, got {v:?}"))),
        },
    }
}

struct Ctx {
    cfg: RunConfig,
    resolved: String,
    writer: ArtifactWriter,
    threads: Option<usize>,
}

impl Ctx {
    fn mc_options(&self) -> McOptions {
        let mut o = McOptions::new(self.cfg.mc.replicas, self.cfg.mc.seed);
        o.atom_budget = self.cfg.mc.atom_budget;
        o.threads = self.threads;
        o
    }

    fn replica_seeds(&self) -> Vec<u64> {
        (0..self.cfg.mc.replicas as u64)
            .map(|r| derive_seed(self.cfg.mc.seed, r))
            .collect()
    }

    fn finish(self, command: Command, seeds: Vec<u64>, status: &str) -> Result<PathBuf, CliError> {
        self.writer.finish(command.name(), &self.resolved, self.cfg.mc.seed, seeds, status)
    }
}

pub fn run(inv: &Invocation) -> Result<Outcome, CliError> {
    let mut cfg = RunConfig::load(&inv.config)?;
    if let Some(s) = inv.seed {
        cfg.mc.seed = s;
    }
    if let Some(r) = inv.replicas {
        cfg.mc.replicas = r;
    }
    let cfg = cfg.resolve()?;
    let resolved = cfg.to_toml()?;
    let dir = inv.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.outputs.directory));
    let mut writer = ArtifactWriter::new(&dir)?;
    writer.write("resolved.toml", resolved.as_bytes())?;
    let mut ctx = Ctx {
        cfg,
        resolved,
        writer,
        threads: inv.threads,
    };

    let gate_needed = inv.command == Command::Gate || (inv.gate && inv.command != Command::NoiseSample);
    if gate_needed {
        let gate = ctx
            .cfg
            .gate
            .clone()
            .ok_or_else(|| CliError::Config("gate: no [gate] block in the configuration".into()))?;
        let report = gate.evaluate();
        ctx.writer.write_json("gate.json", &report)?;
        if !report.passed {
            let failed: Vec<String> = report
                .clauses
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{} (slack {:.6e})", c.name, c.slack))
                .collect();
            let manifest = ctx.finish(inv.command, Vec::new(), "gate-failed")?;
            return Err(CliError::GateFailed {
                theorem: report.theorem,
                clauses: failed,
                manifest,
            });
        }
        if inv.command == Command::Gate {
            let summary = format!("gate {}: pass", report.theorem);
            let manifest = ctx.finish(inv.command, Vec::new(), "ok")?;
            return Ok(Outcome { manifest, summary });
        }
    }

    match inv.command {
        Command::Simulate => simulate(ctx, false),
        Command::Diagnose => simulate(ctx, true),
        Command::Ladder => ladder(ctx),
        Command::NoiseSample => noise_sample(ctx),
        Command::Gate => unreachable!(),
    }
}

fn csv_bytes<T: serde::Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(levyrd_core::Error::from)?;
    }
    w.into_inner().map_err(|e| CliError::Config(e.to_string()))
}

fn estimates(ctx: &Ctx, ens: &Ensemble, diagnose: bool) -> Result<Vec<EstimateReport>, CliError> {
    let (op, d, lambda) = (ctx.cfg.operator()?, &ctx.cfg.diagnostics, ctx.cfg.lambda());
    let named = |kind, label: &str| -> Result<EstimateReport, CliError> {
        let mut r = moment_estimate(&op, ens, d.p, lambda, kind)?;
        r.name = format!("{} ({label} norm)", r.name);
        Ok(r)
    };
    let mut reports = vec![named(d.e_norm(), "E")?];
    if diagnose {
        reports.push(named(d.b_norm(), "B")?);
        reports.push(apriori_ensemble_check(&op, ens, &ctx.cfg.drift, d.apriori_norm, d.apriori_tolerance)?);
        if let NoiseSpec::Spectral(s) = ctx.cfg.noise.build(op.modes())? {
            reports.push(EstimateReport {
                name: "discarded spectral p-moment".into(),
                value: s.discarded_tail(d.p)?,
                values: Vec::new(),
                bound: None,
                tolerance: 0.0,
                ci: None,
                passed: true,
                replicas: 0,
                seeds: Vec::new(),
            });
        }
    }
    Ok(reports)
}

fn simulate(mut ctx: Ctx, diagnose: bool) -> Result<Outcome, CliError> {
    let command = if diagnose { Command::Diagnose } else { Command::Simulate };
    let op = ctx.cfg.operator()?;
    let mut scheme = ctx.cfg.scheme(&op)?;
    scheme.record_components = diagnose;
    let (ens, failure) = simulate_mc_partial(&op, &scheme, &ctx.mc_options())?;
    let outputs = ctx.cfg.outputs.clone();
    let mut summary = format!("{}: {} of {} replicas", command.name(), ens.len(), ens.requested);
    if !ens.is_empty() {
        let d = &ctx.cfg.diagnostics;
        if outputs.wants(Format::Csv) && !diagnose {
            let rows = grid_summary(&op, &ens, d.b_norm(), d.e_norm(), d.p);
            ctx.writer.write("summary.csv", &csv_bytes(&rows)?)?;
        }
        let reports = estimates(&ctx, &ens, diagnose)?;
        summary.push_str(&format!(", {} = {:.6e}", reports[0].name, reports[0].value));
        let stem = if diagnose { "diagnostics" } else { "moment" };
        if outputs.wants(Format::Json) {
            if diagnose {
                ctx.writer.write_json(&format!("{stem}.json"), &reports)?;
            } else {
                ctx.writer.write_json(&format!("{stem}.json"), &reports[0])?;
            }
        }
        if outputs.wants(Format::Csv) {
            let mut buf = Vec::new();
            write_summary_csv(&reports, &mut buf)?;
            ctx.writer.write(&format!("{stem}.csv"), &buf)?;
        }
        for (r, s) in ens.paths.iter().take(outputs.paths).enumerate() {
            let mut buf = Vec::new();
            s.u.write_csv(&mut buf)?;
            ctx.writer.write(&format!("path_{r:04}.csv"), &buf)?;
        }
    }
    let seeds = ens.seeds.clone();
    match failure {
        None => {
            let manifest = ctx.finish(command, seeds, "ok")?;
            Ok(Outcome { manifest, summary })
        }
        Some(cause) => {
            let manifest = ctx.finish(command, seeds, "partial")?;
            Err(CliError::Partial {
                completed: ens.len(),
                requested: ens.requested,
                cause: cause.to_string(),
                manifest,
            })
        }
    }
}

#[derive(serde::Serialize)]
struct LadderRow {
    level: u32,
    distance: f64,
}

fn ladder(mut ctx: Ctx) -> Result<Outcome, CliError> {
    let op = ctx.cfg.operator()?;
    let scheme = ctx.cfg.scheme(&op)?;
    let seeds = ctx.replica_seeds();
    let p = ctx.cfg.diagnostics.p;
    let fit = cauchy_decay_fit(
        &op,
        &scheme,
        &ctx.cfg.scheme.levels,
        &seeds,
        p,
        ctx.cfg.lambda(),
        ctx.cfg.diagnostics.b_norm(),
    )?;
    if ctx.cfg.outputs.wants(Format::Json) {
        ctx.writer.write_json("ladder.json", &fit)?;
    }
    if ctx.cfg.outputs.wants(Format::Csv) {
        let rows: Vec<LadderRow> = fit
            .levels
            .iter()
            .zip(&fit.distances)
            .map(|(&level, &distance)| LadderRow { level, distance })
            .collect();
        ctx.writer.write("ladder.csv", &csv_bytes(&rows)?)?;
    }
    let summary = format!("ladder: theta = {:.4}, R^2 = {:.4}", fit.theta, fit.r_squared);
    let manifest = ctx.finish(Command::Ladder, seeds, "ok")?;
    Ok(Outcome { manifest, summary })
}

fn noise_sample(mut ctx: Ctx) -> Result<Outcome, CliError> {
    let op = ctx.cfg.operator()?;
    let (h, seed) = (ctx.cfg.scheme.horizon, ctx.cfg.mc.seed);
    let mut buf = Vec::new();
    let atoms = match ctx.cfg.noise.build(op.modes())? {
        NoiseSpec::None => return Err(CliError::Config("noise: kind = \"none\" has nothing to sample".into())),
        NoiseSpec::Scalar(s) => {
            let pm = sample_prm(&s.measure, h, seed)?;
            pm.write_csv(&mut buf, &s.measure.descriptor())?;
            pm.len()
        }
        NoiseSpec::Spectral(s) => {
            let pm = sample_spectral_noise(&s, h, seed)?;
            pm.write_csv(&mut buf, &format!("spectral(decay={},modes={},{})", s.decay, s.modes, s.base.descriptor()))?;
            pm.len()
        }
        NoiseSpec::SpaceTime(s) => {
            let pm = sample_spacetime_noise(&s, h, seed)?;
            let desc = format!("space-time(domain=[{},{}],{})", s.domain[0], s.domain[1], s.measure.descriptor());
            pm.write_csv(&mut buf, &desc)?;
            pm.len()
        }
    };
    ctx.writer.write("noise.csv", &buf)?;
    let manifest = ctx.finish(Command::NoiseSample, vec![seed], "ok")?;
    Ok(Outcome {
        manifest,
        summary: format!("noise-sample: {atoms} atoms on [0, {h}]"),
    })
}

