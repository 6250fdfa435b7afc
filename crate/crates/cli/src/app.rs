use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use tripod_memory::experiments::{
    self, Engine, EventRecord, ExperimentConfig, Reading, ReadoutRecord, DISCREPANCY_TOLERANCE,
};
use tripod_memory::phase;

use crate::config::{parse_config, ConfigError, RunConfig};
use crate::output::{emit, Cell, PlotSpec, Series, Table};

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "TRIPOD_MEMORY_OUT";
const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Parser)]
#[command(name = "tripod-memory", version, about = "Two-channel phase-sensitive light storage in a tripod ensemble")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file (`key = value` with `[section]` headers).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Engine: analytic, numeric or both.
    #[arg(long, global = true, value_parser = ["analytic", "numeric", "both"])]
    engine: Option<String>,
    /// Output directory [default: $TRIPOD_MEMORY_OUT, else ./out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sweep points (fig4, fig5, fringe) or case count (oracle-check).
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Seed for randomized cases.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Single-channel reference and one- and two-beam reads of a two-channel store.
    Fig2,
    /// Destructive first read followed by a late read.
    Fig3,
    /// Two-read sweep of the first read phase.
    Fig4,
    /// Storage-time sweep with fixed and compensated read phase.
    Fig5,
    /// Store in one channel, read the other.
    Isolation,
    /// Read-phase fringe with a sinusoid fit.
    Fringe,
    /// Randomized analytic versus numeric equivalence check.
    OracleCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Fig4 => "fig4",
            Command::Fig5 => "fig5",
            Command::Isolation => "isolation",
            Command::Fringe => "fringe",
            Command::OracleCheck => "oracle-check",
        }
    }

    fn default_points(self) -> Option<usize> {
        match self {
            Command::Fig4 | Command::Fringe => Some(16),
            Command::Fig5 => Some(200),
            _ => None,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments; also carries `--help` and `--version` output.
    Usage(clap::Error),
    Config { path: Option<PathBuf>, source: ConfigError },
    Io { path: PathBuf, source: io::Error },
    Run(tripod_memory::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(e) => write!(f, "{e}"),
            CliError::Config { path: Some(p), source } => write!(f, "{}: {source}", p.display()),
            CliError::Config { path: None, source } => write!(f, "{source}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tripod_memory::Error> for CliError {
    fn from(e: tripod_memory::Error) -> Self {
        CliError::Run(e)
    }
}

/// What a successful invocation wrote, plus any failed checks.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Parse `argv` (including the program name), run the scenario and write its
/// files.
pub fn run_command<I, T>(argv: I) -> Result<Report, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Usage)?;
    let cmd = cli.command;

    let mut values = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)
                .map_err(|source| CliError::Config {
                    path: Some(path.clone()),
                    source,
                })?
                .values
        }
        None => RunConfig::default().values,
    };
    let usage = |msg: String| CliError::Usage(clap::Error::raw(clap::error::ErrorKind::ArgumentConflict, msg + "\n"));
    if let Some(s) = &values.scenario {
        if s != cmd.name() {
            return Err(usage(format!("config is for scenario `{s}`, not `{}`", cmd.name())));
        }
    }
    values.scenario = Some(cmd.name().to_owned());
    if let Some(e) = &cli.engine {
        values.engine = e.parse().expect("clap restricts the engine names");
    }
    if cmd == Command::OracleCheck {
        values.engine = Engine::Both;
    }
    if let Some(seed) = cli.seed {
        values.seed = seed;
    }
    match (cmd, cli.points) {
        (_, Some(0)) => return Err(usage("--points must be at least 1".into())),
        (Command::OracleCheck, Some(n)) => values.oracle_cases = n,
        (Command::Fig2 | Command::Fig3 | Command::Isolation, Some(_)) => {
            return Err(usage(format!("--points does not apply to {}", cmd.name())));
        }
        (_, Some(n)) => values.points = Some(n),
        (_, None) => {
            if values.points.is_none() {
                values.points = cmd.default_points();
            }
        }
    }
    if values.points == Some(0) || values.oracle_cases == 0 {
        return Err(usage("sweeps need at least one point".into()));
    }
    let cfg = RunConfig::from_values(values).map_err(|source| CliError::Config { path: None, source })?;

    let dir = cli
        .out
        .or_else(|| cfg.values.out_dir.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    fs::create_dir_all(&dir).map_err(|source| CliError::Io {
        path: dir.clone(),
        source,
    })?;

    let mut header = vec![
        format!("tripod-memory {} {}", env!("CARGO_PKG_VERSION"), cmd.name()),
        String::new(),
    ];
    header.extend(cfg.values.render());
    let mut run = Run {
        cfg: &cfg,
        dir: &dir,
        header,
        report: Report::default(),
    };
    match cmd {
        Command::Fig2 => run.fig2()?,
        Command::Fig3 => run.fig3()?,
        Command::Fig4 => run.fig4()?,
        Command::Fig5 => run.fig5()?,
        Command::Isolation => run.isolation()?,
        Command::Fringe => run.fringe()?,
        Command::OracleCheck => run.oracle()?,
    }
    Ok(run.report)
}

fn pi(x: f64) -> f64 {
    x / std::f64::consts::PI
}

fn us(t: f64) -> f64 {
    t * 1e6
}

/// Column names for one or both engines: `names`, then in `both` mode the
/// numeric variants and the discrepancy.
fn engine_columns(engine: Engine, names: &[&str], discrepancy: &[&str]) -> Vec<String> {
    let mut cols: Vec<String> = names.iter().map(|&n| n.to_owned()).collect();
    if engine == Engine::Both {
        cols.extend(names.iter().map(|n| format!("{n}_numeric")));
        cols.extend(discrepancy.iter().map(|&d| d.to_owned()));
    }
    cols
}

/// Cells matching [`engine_columns`] for readings taken from `events`.
fn engine_cells(engine: Engine, events: &[&EventRecord], f: impl Fn(&Reading) -> Vec<f64>) -> Vec<Cell> {
    let pick = |numeric: bool| {
        events
            .iter()
            .flat_map(|e| {
                let r = if numeric { e.numeric } else { e.analytic.or(e.numeric) };
                f(&r.expect("event carries the requested engine"))
            })
            .map(Cell::Num)
            .collect::<Vec<_>>()
    };
    let mut cells = pick(false);
    if engine == Engine::Both {
        cells.extend(pick(true));
    }
    cells
}

fn discrepancy_cells(engine: Engine, groups: &[&[&EventRecord]]) -> Vec<Cell> {
    if engine != Engine::Both {
        return Vec::new();
    }
    groups
        .iter()
        .map(|g| Cell::Num(g.iter().filter_map(|e| e.discrepancy()).fold(0.0, f64::max)))
        .collect()
}

struct Run<'a> {
    cfg: &'a RunConfig,
    dir: &'a Path,
    header: Vec<String>,
    report: Report,
}

impl Run<'_> {
    fn engine(&self) -> Engine {
        self.cfg.values.engine
    }

    fn exp(&self) -> &ExperimentConfig {
        &self.cfg.experiment
    }

    fn points(&self) -> usize {
        self.cfg.values.points.expect("sweep commands have a point count")
    }

    fn table(&self, columns: Vec<String>) -> Table {
        Table::new(self.header.clone(), columns)
    }

    fn emit(&mut self, name: &str, table: &Table, plot: Option<PlotSpec>) -> Result<(), CliError> {
        let files = emit(self.dir, name, table, plot.as_ref()).map_err(|source| CliError::Io {
            path: self.dir.join(name),
            source,
        })?;
        self.report.notes.push(format!("{name}: {} rows", table.rows.len()));
        self.report.files.extend(files);
        Ok(())
    }

    fn check_discrepancy<'e>(&mut self, events: impl IntoIterator<Item = &'e EventRecord>) {
        let (mut worst, mut bad) = (None::<f64>, 0);
        for d in events.into_iter().filter_map(EventRecord::discrepancy) {
            worst = Some(worst.map_or(d, |w| w.max(d)));
            bad += usize::from(d > DISCREPANCY_TOLERANCE);
        }
        if let Some(w) = worst {
            self.report.notes.push(format!("largest analytic/numeric discrepancy: {w:.3e}"));
            if bad > 0 {
                self.report.failures.push(format!(
                    "{bad} reading(s) differ between engines by more than {DISCREPANCY_TOLERANCE} (worst {w:.3e})"
                ));
            }
        }
    }

    fn records_table(&self, records: &[(&str, &ReadoutRecord)]) -> Table {
        let engine = self.engine();
        let mut cols: Vec<String> = ["panel", "read", "t_us", "delta_r_pi", "total_phase_pi"]
            .map(str::to_owned)
            .into();
        cols.extend(engine_columns(
            engine,
            &["intensity", "energy", "remaining_norm"],
            &["discrepancy"],
        ));
        let mut t = self.table(cols);
        for (panel, rec) in records {
            for (k, ev) in rec.events.iter().enumerate() {
                let mut row = vec![
                    Cell::from(*panel),
                    Cell::Num((k + 1) as f64),
                    Cell::Num(us(ev.time)),
                    Cell::Num(pi(ev.delta_r)),
                    Cell::Num(pi(ev.total_phase)),
                ];
                row.extend(engine_cells(engine, &[ev], |r| vec![r.intensity, r.energy, r.remaining_norm]));
                row.extend(discrepancy_cells(engine, &[&[ev]]));
                t.push(row);
            }
        }
        t
    }

    fn records_plot(title: &str) -> PlotSpec {
        PlotSpec {
            title: title.into(),
            xlabel: "read time (us)".into(),
            ylabel: "intensity (single-channel units)".into(),
            series: vec![
                Series::new("t_us", "intensity", "analytic or selected engine"),
                Series::new("t_us", "intensity_numeric", "numeric"),
            ],
        }
    }

    fn fig2(&mut self) -> Result<(), CliError> {
        let f = experiments::run_fig2(self.exp(), self.engine())?;
        let t = self.records_table(&[("a", &f.a), ("b", &f.b), ("c", &f.c), ("d", &f.d)]);
        let single = f.a.events[0].reading().intensity;
        if single > 0.0 {
            let ratio = f.d.events[0].reading().intensity / single;
            self.report.notes.push(format!("two-beam / single-channel intensity: {ratio}"));
        }
        let events: Vec<_> = [&f.a, &f.b, &f.c, &f.d].into_iter().flat_map(|r| r.events.clone()).collect();
        self.emit("fig2", &t, Some(Self::records_plot("Single- and two-channel reads")))?;
        self.check_discrepancy(&events);
        Ok(())
    }

    fn fig3(&mut self) -> Result<(), CliError> {
        let f = experiments::run_fig3(self.exp(), self.engine())?;
        let t = self.records_table(&[("a", &f.a), ("b", &f.b)]);
        let events: Vec<_> = f.a.events.iter().chain(&f.b.events).copied().collect();
        self.emit("fig3", &t, Some(Self::records_plot("Destructive read, then late read")))?;
        self.check_discrepancy(&events);
        Ok(())
    }

    fn isolation(&mut self) -> Result<(), CliError> {
        let r = experiments::run_isolation(self.exp(), self.engine())?;
        let t = self.records_table(&[("isolation", &r)]);
        self.emit("isolation", &t, Some(Self::records_plot("Channel isolation")))?;
        self.check_discrepancy(&r.events);
        Ok(())
    }

    fn fig4(&mut self) -> Result<(), CliError> {
        let engine = self.engine();
        let grid = experiments::fig4_grid(self.exp(), self.points());
        let rows = experiments::run_fig4(self.exp(), engine, &grid)?;
        let mut cols = vec!["delta_r_pi".to_owned()];
        cols.extend(engine_columns(
            engine,
            &["first_read", "second_read", "second_read_literal", "corrected_sum"],
            &["discrepancy"],
        ));
        let mut t = self.table(cols);
        for row in &rows {
            let mut cells = vec![Cell::Num(pi(row.delta_r))];
            let (first, second, literal) = (row.first, row.second, row.second_literal);
            let vals = |r: &dyn Fn(&EventRecord) -> Option<Reading>| -> Vec<f64> {
                let (a, b, c) = (r(&first).unwrap(), r(&second).unwrap(), r(&literal).unwrap());
                vec![a.intensity, b.intensity, c.intensity, 0.5 * (a.intensity + b.intensity)]
            };
            cells.extend(vals(&|e| e.analytic.or(e.numeric)).into_iter().map(Cell::Num));
            if engine == Engine::Both {
                cells.extend(vals(&|e| e.numeric).into_iter().map(Cell::Num));
            }
            cells.extend(discrepancy_cells(engine, &[&[&first, &second, &literal]]));
            t.push(cells);
        }
        let mut series = vec![
            Series::new("delta_r_pi", "first_read", "first read"),
            Series::new("delta_r_pi", "second_read", "second read"),
            Series::new("delta_r_pi", "second_read_literal", "second read, write phase"),
        ];
        if engine == Engine::Both {
            series.push(Series::new("delta_r_pi", "first_read_numeric", "first read, numeric"));
            series.push(Series::new("delta_r_pi", "second_read_numeric", "second read, numeric"));
        }
        let plot = PlotSpec {
            title: "Two reads against the first read phase".into(),
            xlabel: "delta_R / pi".into(),
            ylabel: "decay-corrected intensity".into(),
            series,
        };
        self.emit("fig4", &t, Some(plot))?;
        self.check_discrepancy(rows.iter().flat_map(|r| [&r.first, &r.second, &r.second_literal]));
        Ok(())
    }

    fn fig5(&mut self) -> Result<(), CliError> {
        let engine = self.engine();
        let times = experiments::fig5_times(self.exp(), self.points());
        let uncomp = experiments::run_fig5(self.exp(), engine, &times, false)?;
        let comp = experiments::run_fig5(self.exp(), engine, &times, true)?;
        let mut cols = vec!["t_us".to_owned()];
        cols.extend(engine_columns(
            engine,
            &["efficiency_uncomp", "efficiency_comp"],
            &["discrepancy_uncomp", "discrepancy_comp"],
        ));
        let mut t = self.table(cols);
        let exp = *self.exp();
        for (u, c) in uncomp.iter().zip(&comp) {
            let mut row = vec![Cell::Num(us(u.time))];
            row.extend(engine_cells(engine, &[u, c], |r| vec![exp.efficiency(r)]));
            row.extend(discrepancy_cells(engine, &[&[u], &[c]]));
            t.push(row);
        }
        let mut series = vec![
            Series::new("t_us", "efficiency_uncomp", "fixed read phase"),
            Series::new("t_us", "efficiency_comp", "compensated read phase"),
        ];
        if engine == Engine::Both {
            series.push(Series::new("t_us", "efficiency_uncomp_numeric", "fixed, numeric"));
            series.push(Series::new("t_us", "efficiency_comp_numeric", "compensated, numeric"));
        }
        let plot = PlotSpec {
            title: "Retrieval efficiency against storage time".into(),
            xlabel: "storage time (us)".into(),
            ylabel: "retrieval efficiency".into(),
            series,
        };
        self.emit("fig5", &t, Some(plot))?;
        self.check_discrepancy(uncomp.iter().chain(&comp));
        Ok(())
    }

    fn fringe(&mut self) -> Result<(), CliError> {
        let engine = self.engine();
        let grid = experiments::fringe_grid(self.points());
        let events = experiments::run_fringe(self.exp(), engine, &grid)?;
        let mut cols = vec!["delta_r_pi".to_owned(), "total_phase_pi".to_owned()];
        cols.extend(engine_columns(engine, &["intensity"], &["discrepancy"]));
        let mut t = self.table(cols);
        for ev in &events {
            let mut row = vec![Cell::Num(pi(ev.delta_r)), Cell::Num(pi(ev.total_phase))];
            row.extend(engine_cells(engine, &[ev], |r| vec![r.intensity]));
            row.extend(discrepancy_cells(engine, &[&[ev]]));
            t.push(row);
        }
        let plot = PlotSpec {
            title: "Readout against read phase".into(),
            xlabel: "delta_R / pi".into(),
            ylabel: "intensity (single-channel units)".into(),
            series: vec![
                Series::new("delta_r_pi", "intensity", "intensity"),
                Series::new("delta_r_pi", "intensity_numeric", "numeric"),
            ],
        };
        self.emit("fringe", &t, Some(plot))?;

        let cols = ["engine", "period_pi", "visibility", "offset", "amplitude", "first_max_pi", "rms_residual"];
        let mut fits = self.table(cols.map(str::to_owned).into());
        for (name, numeric) in [("analytic", false), ("numeric", true)] {
            let ran = if numeric { engine.runs_numeric() } else { engine.runs_analytic() };
            if !ran {
                continue;
            }
            match experiments::fit_fringe(&events, numeric) {
                Some(fit) => {
                    self.report.notes.push(format!(
                        "{name} fit: period {:.6} pi, visibility {:.6}",
                        pi(fit.period()),
                        fit.visibility()
                    ));
                    fits.push(vec![
                        Cell::from(name),
                        Cell::Num(pi(fit.period())),
                        Cell::Num(fit.visibility()),
                        Cell::Num(fit.offset),
                        Cell::Num(fit.amplitude),
                        Cell::Num(pi(fit.first_maximum())),
                        Cell::Num(fit.rms_residual),
                    ]);
                }
                None => self.report.notes.push(format!("{name} fit: not enough points")),
            }
        }
        self.emit("fringe_fit", &fits, None)?;
        self.check_discrepancy(&events);
        Ok(())
    }

    fn oracle(&mut self) -> Result<(), CliError> {
        let v = &self.cfg.values;
        let (lo, hi) = self.cfg.oracle_tau_range();
        let cases = experiments::oracle_cases(v.seed, v.oracle_cases, lo, hi);
        let outcomes = experiments::run_oracle(self.exp(), &cases)?;
        let cols = [
            "case",
            "delta_w_pi",
            "delta_r_pi",
            "tau_us",
            "total_phase_pi",
            "intensity",
            "intensity_numeric",
            "energy",
            "energy_numeric",
            "discrepancy",
            "status",
        ];
        let mut t = self.table(cols.map(str::to_owned).into());
        for (k, o) in outcomes.iter().enumerate() {
            let (a, n) = (o.event.analytic.unwrap(), o.event.numeric.unwrap());
            let d = o.discrepancy();
            t.push(vec![
                Cell::Num(k as f64),
                Cell::Num(pi(phase::wrap(o.case.delta_w))),
                Cell::Num(pi(o.event.delta_r)),
                Cell::Num(us(o.case.tau)),
                Cell::Num(pi(o.event.total_phase)),
                Cell::Num(a.intensity),
                Cell::Num(n.intensity),
                Cell::Num(a.energy),
                Cell::Num(n.energy),
                Cell::Num(d),
                Cell::from(if d <= DISCREPANCY_TOLERANCE { "pass" } else { "fail" }),
            ]);
        }
        let plot = PlotSpec {
            title: "Analytic against numeric readout".into(),
            xlabel: "case".into(),
            ylabel: "discrepancy (full-scale fraction)".into(),
            series: vec![Series::new("case", "discrepancy", "discrepancy")],
        };
        self.emit("oracle", &t, Some(plot))?;
        let events: Vec<_> = outcomes.iter().map(|o| o.event).collect();
        self.check_discrepancy(&events);
        Ok(())
    }
}
