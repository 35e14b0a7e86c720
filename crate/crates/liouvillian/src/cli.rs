//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 analysis failure.

use crate::analysis::{power_law_fit, scan_params, sector_bifurcation, write_scan_csv, ScanOptions, ScanRecord};
use crate::config::{config_hash, InitialState, OutputFormat, RunConfig, SolverMode};
use crate::dynamics::trajectory;
use crate::error::{Error, Result};
use crate::liouville::build_liouvillian;
use crate::models::{pauli, tail_population, ModelSpec};
use crate::operator::{Operator, C64};
use crate::spectra::{
    full_spectrum_with_im_tol, gap_of, leading_spectrum_with, steady_state, LeadingOptions, Spectrum,
};
use crate::symmetry::{number_parity_symmetry, sector_decompose, symmetry_defect};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_ANALYSIS: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "liouvillian", version, about = "Spectral analysis of Lindblad Liouvillians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (overrides `output.path`); standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parameter scans (default: RAYON_NUM_THREADS or all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for iterative solvers and random initial states (overrides `solver.seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum Command {
    /// Leading eigenvalues: index, re, im, trace_abs, residual.
    Spectrum,
    /// Steady-state density matrix.
    Steady,
    /// Liouvillian gap and Im λ₁, at one point or over the scan grid.
    Gap,
    /// Parameter scan with fidelities and densities.
    Scan,
    /// Observable tracks of e^{Lt}ρ(0).
    Evolve,
    /// Bifurcation points over N and their power-law fit.
    FitBifurcation,
    /// Symmetry-sector decomposition summary.
    Sectors,
}

/// Maps an error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_ANALYSIS,
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return if code == 0 { EXIT_OK } else { EXIT_CONFIG };
        }
    };
    match run_cli(&cli) {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

struct Context {
    cfg: RunConfig,
    hash: String,
    seed: u64,
    out: Option<PathBuf>,
    warnings: Vec<String>,
}

impl Context {
    fn comment(&self) -> String {
        format!("config_sha256={} version={}", self.hash, env!("CARGO_PKG_VERSION"))
    }

    fn leading_options(&self) -> LeadingOptions {
        let s = &self.cfg.solver;
        let mut o = LeadingOptions {
            seed: self.seed,
            tol: s.tolerances.arnoldi,
            max_restarts: s.max_restarts,
            ..LeadingOptions::default()
        };
        match s.mode {
            SolverMode::Auto => {}
            SolverMode::Dense => o.dense_threshold = usize::MAX,
            SolverMode::ShiftInvert => o.force_iterative = true,
        }
        o
    }

    fn scan_options(&self) -> ScanOptions {
        let s = &self.cfg.solver;
        ScanOptions {
            k: s.k,
            symmetry_order: s.symmetry_order,
            im_tol: s.tolerances.im,
            zero_rel: s.tolerances.zero_rel,
            shift: s.shift,
            solver: self.leading_options(),
        }
    }

    fn emit(&self, bytes: &[u8]) -> Result<()> {
        let path = self.out.clone().or_else(|| self.cfg.output.path.clone());
        match path {
            Some(p) => std::fs::write(&p, bytes).map_err(|e| {
                Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))
            }),
            None => {
                let mut so = std::io::stdout().lock();
                so.write_all(bytes)?;
                so.flush()?;
                Ok(())
            }
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<Vec<u8>> {
        #[derive(Serialize)]
        struct Wrapped<'a, T> {
            config_sha256: &'a str,
            version: &'static str,
            #[serde(flatten)]
            body: &'a T,
        }
        let mut v = serde_json::to_vec_pretty(&Wrapped {
            config_sha256: &self.hash,
            version: env!("CARGO_PKG_VERSION"),
            body: value,
        })
        .map_err(|e| Error::Config(e.to_string()))?;
        v.push(b'\n');
        Ok(v)
    }

    fn model(&self) -> Result<ModelSpec> {
        self.cfg.model_at(None)?.build()
    }
}

fn run_cli(cli: &Cli) -> Result<Vec<String>> {
    faer::set_global_parallelism(faer::Par::Seq);
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        // A pool built earlier in the process keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    let cfg = RunConfig::from_json(&text)?;
    let mut ctx = Context {
        seed: cli.seed.unwrap_or(cfg.solver.seed),
        hash: config_hash(&text),
        cfg,
        out: cli.out.clone(),
        warnings: vec![],
    };
    match cli.command {
        Command::Spectrum => cmd_spectrum(&mut ctx)?,
        Command::Steady => cmd_steady(&mut ctx)?,
        Command::Gap => cmd_gap(&mut ctx)?,
        Command::Scan => cmd_scan(&mut ctx)?,
        Command::Evolve => cmd_evolve(&mut ctx)?,
        Command::FitBifurcation => cmd_fit_bifurcation(&mut ctx)?,
        Command::Sectors => cmd_sectors(&mut ctx)?,
    }
    Ok(ctx.warnings)
}

fn csv_writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::Writer::from_writer(buf)
}

fn csv_err(e: csv::Error) -> Error {
    crate::dynamics::csv_err(e)
}

fn spectrum_of(ctx: &mut Context, model: &ModelSpec) -> Result<Spectrum> {
    let l = build_liouvillian(model)?;
    let n = l.len();
    let mut k = ctx.cfg.solver.k;
    if k > n {
        ctx.warnings.push(format!("k = {k} exceeds the Liouville dimension {n}; clamped"));
        k = n;
    }
    let im = ctx.cfg.solver.tolerances.im;
    let mut spec = if ctx.cfg.solver.mode == SolverMode::Dense {
        let mut s = full_spectrum_with_im_tol(&l, im)?;
        s.pairs.truncate(k);
        s
    } else {
        let shift = C64::new(ctx.cfg.solver.shift, 0.0);
        leading_spectrum_with(&l, k, shift, &ctx.leading_options(), im)?
    };
    spec.zero_tol = ctx.cfg.solver.tolerances.zero_rel * spec.norm1;
    Ok(spec)
}

fn cmd_spectrum(ctx: &mut Context) -> Result<()> {
    let model = ctx.model()?;
    let spec = spectrum_of(ctx, &model)?;
    let mut buf = Vec::new();
    if ctx.cfg.output.format == OutputFormat::Json {
        #[derive(Serialize)]
        struct Row {
            index: usize,
            re: f64,
            im: f64,
            trace_abs: f64,
            residual: f64,
        }
        #[derive(Serialize)]
        struct Out {
            gap: f64,
            eigenvalues: Vec<Row>,
        }
        let rows = spec
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| Row {
                index: i,
                re: p.value.re,
                im: p.value.im,
                trace_abs: p.right.trace().norm(),
                residual: p.residual,
            })
            .collect();
        buf = ctx.json(&Out {
            gap: spec.gap,
            eigenvalues: rows,
        })?;
    } else {
        writeln!(buf, "# {}", ctx.comment())?;
        let mut w = csv_writer(&mut buf);
        w.write_record(["index", "re", "im", "trace_abs", "residual"]).map_err(csv_err)?;
        for (i, p) in spec.pairs.iter().enumerate() {
            w.write_record([
                i.to_string(),
                format!("{:.15e}", p.value.re),
                format!("{:.15e}", p.value.im),
                format!("{:.6e}", p.right.trace().norm()),
                format!("{:.3e}", p.residual),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
    }
    ctx.emit(&buf)
}

fn cmd_steady(ctx: &mut Context) -> Result<()> {
    let model = ctx.model()?;
    let l = build_liouvillian(&model)?;
    let rho = steady_state(&l)?;
    let density = crate::analysis::expectation(&rho, &model.number_operator())? / model.meta.n;
    let tail = if model.dim > 2 { tail_population(&rho) } else { 0.0 };
    if tail > crate::models::TAIL_TOLERANCE {
        ctx.warnings.push(format!("tail population {tail:.2e}: increase the cutoff"));
    }
    let d = rho.dim();
    let mut buf = Vec::new();
    if ctx.cfg.output.format == OutputFormat::Json {
        #[derive(Serialize)]
        struct Out {
            dim: usize,
            density: f64,
            tail: f64,
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        buf = ctx.json(&Out {
            dim: d,
            density,
            tail,
            re: (0..d).map(|i| (0..d).map(|j| rho.get(i, j).re).collect()).collect(),
            im: (0..d).map(|i| (0..d).map(|j| rho.get(i, j).im).collect()).collect(),
        })?;
    } else {
        writeln!(buf, "# {} density={density:.12e} tail={tail:.3e}", ctx.comment())?;
        let mut w = csv_writer(&mut buf);
        w.write_record(["row", "col", "re", "im"]).map_err(csv_err)?;
        for i in 0..d {
            for j in 0..d {
                let v = rho.get(i, j);
                w.write_record([
                    i.to_string(),
                    j.to_string(),
                    format!("{:.15e}", v.re),
                    format!("{:.15e}", v.im),
                ])
                .map_err(csv_err)?;
            }
        }
        w.flush()?;
    }
    ctx.emit(&buf)
}

fn n_list(ctx: &Context) -> Vec<Option<f64>> {
    match ctx.cfg.scan.as_ref().and_then(|s| s.n_list.clone()) {
        Some(ns) => ns.into_iter().map(Some).collect(),
        None => vec![None],
    }
}

fn cmd_gap(ctx: &mut Context) -> Result<()> {
    let mut rows: Vec<(f64, Option<f64>, f64, f64)> = Vec::new();
    let gamma = ctx.cfg.model.gamma();
    match ctx.cfg.scan.clone() {
        Some(scan) => {
            for n in n_list(ctx) {
                let base = ctx.cfg.model_at(n)?;
                for z in scan.grid() {
                    let m = base.with_parameter(&scan.parameter, z * gamma)?.build()?;
                    let spec = spectrum_of(ctx, &m)?;
                    let (g, im) = gap_of(&spec)?;
                    rows.push((m.meta.n, Some(z), g, im));
                }
            }
        }
        None => {
            let m = ctx.model()?;
            let spec = spectrum_of(ctx, &m)?;
            let (g, im) = gap_of(&spec)?;
            rows.push((m.meta.n, None, g, im));
        }
    }
    let mut buf = Vec::new();
    writeln!(buf, "# {}", ctx.comment())?;
    let mut w = csv_writer(&mut buf);
    w.write_record(["N", "zeta", "gap", "im_lambda1"]).map_err(csv_err)?;
    for (n, z, g, im) in rows {
        w.write_record([
            n.to_string(),
            z.map(|v| format!("{v:.10e}")).unwrap_or_default(),
            format!("{g:.10e}"),
            format!("{im:.10e}"),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    drop(w);
    ctx.emit(&buf)
}

fn cmd_scan(ctx: &mut Context) -> Result<()> {
    let scan = ctx
        .cfg
        .scan
        .clone()
        .ok_or_else(|| Error::Config("the scan command needs a scan block".into()))?;
    let grid = scan.grid();
    let opts = ctx.scan_options();
    let mut records: Vec<ScanRecord> = Vec::new();
    for n in n_list(ctx) {
        let base = ctx.cfg.model_at(n)?;
        records.extend(scan_params(&base, &scan.parameter, &grid, &opts)?);
    }
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        ctx.warnings.push(format!("{failed} of {} grid points flagged in the status column", records.len()));
    }
    let buf = if ctx.cfg.output.format == OutputFormat::Json {
        #[derive(Serialize)]
        struct Out<'a> {
            records: &'a [ScanRecord],
        }
        ctx.json(&Out { records: &records })?
    } else {
        let mut b = Vec::new();
        write_scan_csv(&records, Some(&ctx.comment()), &mut b)?;
        b
    };
    ctx.emit(&buf)
}

fn random_state(d: usize, seed: u64) -> Result<Operator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Operator::from_fn(d, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })?;
    let r = g.matmul(&g.adjoint())?;
    let t = r.trace().re;
    Ok(r.scale_real(1.0 / t))
}

fn cmd_evolve(ctx: &mut Context) -> Result<()> {
    let ev = ctx
        .cfg
        .evolve
        .clone()
        .ok_or_else(|| Error::Config("the evolve command needs an evolve block".into()))?;
    let model = ctx.model()?;
    let l = build_liouvillian(&model)?;
    let d = model.dim;
    let rho0 = match ev.initial {
        InitialState::Vacuum => Operator::basis(d, 0, 0),
        InitialState::MaximallyMixed => Operator::identity(d).scale_real(1.0 / d as f64),
        InitialState::Random => random_state(d, ctx.seed)?,
        InitialState::Steady => steady_state(&l)?,
    };
    let times: Vec<f64> = (0..ev.samples)
        .map(|i| ev.t_max * i as f64 / (ev.samples - 1) as f64)
        .collect();
    let (sx, sy, sz) = pauli();
    let num = model.number_operator();
    let obs: Vec<(&str, &Operator)> = if model.meta.params.as_ref().is_some_and(|p| !p.is_bosonic()) || d == 2 {
        vec![("sx", &sx), ("sy", &sy), ("sz", &sz)]
    } else {
        vec![("n", &num)]
    };
    let tr = trajectory(&l, &rho0, &times, &obs)?;
    let mut buf = Vec::new();
    if ctx.cfg.output.format == OutputFormat::Json {
        buf = ctx.json(&tr)?;
    } else {
        writeln!(buf, "# {}", ctx.comment())?;
        tr.write_csv(&mut buf)?;
    }
    ctx.emit(&buf)
}

#[derive(Serialize)]
struct BifurcationRow {
    n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    g_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn cmd_fit_bifurcation(ctx: &mut Context) -> Result<()> {
    let mut table = Vec::new();
    if let Some(fit) = &ctx.cfg.fit {
        for &(n, g) in &fit.points {
            table.push(BifurcationRow {
                n,
                g_b: Some(g),
                error: None,
            });
        }
    } else {
        let scan = ctx
            .cfg
            .scan
            .clone()
            .ok_or_else(|| Error::Config("fit-bifurcation needs a scan block or fit.points".into()))?;
        if scan.n_list.is_none() {
            return Err(Error::Config("fit-bifurcation needs scan.n_list".into()));
        }
        let grid = scan.grid();
        let im_tol = ctx.cfg.solver.tolerances.bifurcation_im;
        let k = ctx.cfg.solver.k;
        let gamma = ctx.cfg.model.gamma();
        for n in n_list(ctx) {
            let base = ctx.cfg.model_at(n)?;
            let res = sector_bifurcation(
                |z| base.with_parameter(&scan.parameter, z * gamma)?.build(),
                &grid,
                im_tol,
                k,
            );
            let n = n.unwrap_or(1.0);
            table.push(match res {
                Ok(g) => BifurcationRow {
                    n,
                    g_b: Some(g),
                    error: None,
                },
                Err(e) => {
                    ctx.warnings.push(format!("N = {n}: {e}"));
                    BifurcationRow {
                        n,
                        g_b: None,
                        error: Some(e.to_string()),
                    }
                }
            });
        }
    }
    let points: Vec<(f64, f64)> = table.iter().filter_map(|r| r.g_b.map(|g| (r.n, g))).collect();
    #[derive(Serialize)]
    struct Out<'a> {
        #[serde(rename = "A")]
        amplitude: Option<f64>,
        exponent: Option<f64>,
        #[serde(rename = "G_c")]
        critical_value: Option<f64>,
        residual: Option<f64>,
        covariance: Option<[[f64; 3]; 3]>,
        table: &'a [BifurcationRow],
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        trace: Option<Vec<String>>,
    }
    let fit = power_law_fit(&points);
    let out = match &fit {
        Ok(f) => Out {
            amplitude: Some(f.amplitude),
            exponent: Some(f.exponent),
            critical_value: Some(f.critical_value),
            residual: Some(f.residual),
            covariance: Some(f.covariance),
            table: &table,
            error: None,
            trace: None,
        },
        Err(e) => Out {
            amplitude: None,
            exponent: None,
            critical_value: None,
            residual: None,
            covariance: None,
            table: &table,
            error: Some(e.to_string()),
            trace: match e {
                Error::Fit { trace, .. } => Some(trace.clone()),
                _ => None,
            },
        },
    };
    let buf = ctx.json(&out)?;
    ctx.emit(&buf)?;
    fit.map(|_| ())
}

fn cmd_sectors(ctx: &mut Context) -> Result<()> {
    let model = ctx.model()?;
    let l = build_liouvillian(&model)?;
    let order = ctx.cfg.solver.symmetry_order.unwrap_or(2);
    let s = number_parity_symmetry(model.dim, order)?;
    let defect = symmetry_defect(&l, &s, 8, ctx.seed)?;
    let dec = sector_decompose(&l, &s)?;
    let shift = C64::new(ctx.cfg.solver.shift, 0.0);
    let spectra = dec.low_spectra_with(ctx.cfg.solver.k, shift, &ctx.leading_options(), ctx.cfg.solver.tolerances.im)?;
    #[derive(Serialize)]
    struct Out {
        order: usize,
        relative_defect: f64,
        sectors: Vec<crate::symmetry::SectorSummary>,
    }
    let buf = ctx.json(&Out {
        order,
        relative_defect: defect,
        sectors: dec.summary(&spectra),
    })?;
    ctx.emit(&buf)
}
