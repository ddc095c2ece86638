use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nonsaddle::algebra::Coeff;
use nonsaddle::continuation::{default_lambda_grid, sweep, SweepParams};
use nonsaddle::dynamics::{refine_problem, AnalysisParams};
use nonsaddle::flow::{
    builtin_fixture, load_flow_spec, FamilyKind, Fixture, FlowFamily, FlowSpec, FAMILY_SUBDIV, FIXTURE_NAMES,
};
use nonsaddle::mesh::{write_mesh, write_sidecar};
use nonsaddle::render::{render_svg, RenderOptions};
use nonsaddle::verify::{analyze, verify_report, AnalysisReport, VerdictDocument};
use nonsaddle::{Error, Result};

#[derive(Parser)]
#[command(name = "nonsaddle", version, about = "Isolated non-saddle sets on triangulated surfaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Integration step.
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Integration horizon of the classification.
    #[arg(long, global = true)]
    tmax: Option<f64>,
    /// Midpoint subdivisions before analysis.
    #[arg(long, global = true)]
    refine: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = CoeffArg::Z2)]
    coeff: CoeffArg,
    /// Output file (prefix for `generate`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoeffArg {
    Z,
    Z2,
}

/// A flow-spec file, or a builtin fixture with its parameters.
#[derive(Args)]
struct Input {
    /// Path to a flow spec (.json) or a fixture name.
    input: String,
    #[arg(long)]
    g: Option<u32>,
    /// Generator partition, comma separated.
    #[arg(long)]
    ks: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Mesh subdivision level of the builtin.
    #[arg(long, default_value_t = 0)]
    level: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Build generator(g, ks) and write mesh, sidecar with K, and flow spec.
    Generate {
        g: u32,
        /// Partition of g, comma separated; may be empty for g = 0.
        #[arg(default_value = "")]
        ks: String,
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Analyze a fixture and print the report.
    Analyze(Input),
    /// Check the theorems on a report file, a fixture, or `all` builtins.
    Verify(Input),
    /// Sweep a λ-family and test the robustness criteria.
    Sweep {
        /// One of sphere-circle, constant-nonsaddle, constant-saddle, empty, reversed.
        family: String,
        /// Comma separated λ values.
        #[arg(long)]
        lambda_grid: Option<String>,
        /// Nested stars probed for saddle witnesses; 0 skips the probe.
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Draw a fixture as SVG, coloured by a report when one is given.
    Render {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Number of seeded streamlines.
        #[arg(long, default_value_t = 120)]
        seed_count: usize,
    },
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| Error::Param(format!("bad {what} entry {x:?}"))))
        .collect()
}

impl Global {
    fn params(&self) -> AnalysisParams {
        let mut p = AnalysisParams::default();
        if let Some(s) = self.step {
            p.step = s;
        }
        if let Some(t) = self.tmax {
            p.t_max = t;
        }
        if let Some(r) = self.refine {
            p.refine = r;
        }
        p
    }

    fn coeff(&self) -> Coeff {
        match self.coeff {
            CoeffArg::Z => Coeff::Z,
            CoeffArg::Z2 => Coeff::Z2,
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => fs::write(p, text)?,
            None => {
                let mut o = std::io::stdout().lock();
                match writeln!(o, "{}", text.trim_end()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

impl Input {
    fn fixture(&self) -> Result<Fixture> {
        self.fixture_named(&self.input)
    }

    fn fixture_named(&self, name: &str) -> Result<Fixture> {
        let path = Path::new(name);
        if path.is_file() {
            return load_flow_spec(path);
        }
        let ks = self.ks.as_deref().map(|s| parse_list::<usize>(s, "partition")).transpose()?;
        builtin_fixture(name, self.g, ks.as_deref(), self.lambda, self.level)
    }
}

fn generate(global: &Global, g: u32, ks: &str, level: usize) -> Result<i32> {
    let ks: Vec<usize> = parse_list(ks, "partition")?;
    let fx = nonsaddle::flow::generator(g, &ks, level)?;
    let prefix = global.out.clone().unwrap_or_else(|| PathBuf::from(&fx.name));
    let with_ext = |ext: &str| {
        let mut s = prefix.clone().into_os_string();
        s.push(ext);
        PathBuf::from(s)
    };
    let (off, side, spec) = (with_ext(".off"), with_ext(".sidecar"), with_ext(".flow.json"));
    let m = fx.surface.mesh();
    fs::write(&off, write_mesh(m))?;
    fs::write(&side, write_sidecar(m, &[("K", &fx.k)]))?;
    let text = serde_json::to_string_pretty(&FlowSpec::generator(g, &fx.ks, level))?;
    fs::write(&spec, text + "\n")?;
    eprintln!(
        "wrote {}, {}, {} (genus {}, χ = {})",
        off.display(),
        side.display(),
        spec.display(),
        fx.surface.genus(),
        m.euler_characteristic()
    );
    Ok(0)
}

fn verify(global: &Global, input: &Input) -> Result<i32> {
    let path = Path::new(&input.input);
    let docs: Vec<VerdictDocument> = if path.is_file() {
        let text = fs::read_to_string(path)?;
        let report = match AnalysisReport::from_json(&text) {
            Ok(r) => r,
            // not a report: treat it as a flow spec
            Err(_) => analyze(&load_flow_spec(path)?, &global.params(), global.coeff())?.report,
        };
        vec![verify_report(&report)?]
    } else if input.input == "all" {
        let mut out = Vec::new();
        for name in FIXTURE_NAMES {
            let fx = input.fixture_named(name)?;
            out.push(verify_report(&analyze(&fx, &global.params(), global.coeff())?.report)?);
        }
        out
    } else {
        vec![verify_report(&analyze(&input.fixture()?, &global.params(), global.coeff())?.report)?]
    };
    for d in &docs {
        for v in d.failed() {
            eprintln!("{}: {} failed: {}", d.subject, v.check, v.detail);
        }
    }
    let text = if docs.len() == 1 { docs[0].to_json() } else { serde_json::to_string_pretty(&docs)? };
    global.emit(&text)?;
    Ok(docs.iter().map(|d| d.exit_code()).max().unwrap_or(0))
}

fn run_sweep(global: &Global, family: &str, grid: Option<&str>, depth: usize) -> Result<i32> {
    let kind: FamilyKind = family.parse()?;
    let grid = match grid {
        Some(g) => parse_list::<f64>(g, "λ")?,
        None => default_lambda_grid(),
    };
    if grid.is_empty() {
        return Err(Error::Param("empty λ grid".into()));
    }
    let mut p = SweepParams { depth, ..SweepParams::default() };
    if let Some(s) = global.step {
        p.step = s;
    }
    let r = sweep(&FlowFamily::new(kind, FAMILY_SUBDIV), &grid, &p)?;
    global.emit(&r.to_json())?;
    Ok(r.exit_code())
}

fn render(global: &Global, input: &Input, report: Option<&Path>, seed_count: usize) -> Result<i32> {
    let fx = input.fixture()?;
    let mut opts = RenderOptions { seed: global.seed, streamlines: seed_count, ..RenderOptions::default() };
    if let Some(s) = global.step {
        opts.step = s;
    }
    let svg = match report {
        Some(path) => {
            let r = AnalysisReport::from_json(&fs::read_to_string(path)?)?;
            let (surface, k, flow) = refine_problem(&fx.surface, &fx.k, &fx.flow, r.params.refine);
            render_svg(surface.mesh(), &flow, &k, Some(&r.influence.labels), &opts)?
        }
        None => {
            let (surface, k, flow) = refine_problem(&fx.surface, &fx.k, &fx.flow, global.refine.unwrap_or(0));
            render_svg(surface.mesh(), &flow, &k, None, &opts)?
        }
    };
    global.emit(&svg)?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<i32> {
    let global = &cli.global;
    match &cli.command {
        Command::Generate { g, ks, level } => generate(global, *g, ks, *level),
        Command::Analyze(input) => {
            let a = analyze(&input.fixture()?, &global.params(), global.coeff())?;
            global.emit(&a.report.to_json())?;
            Ok(0)
        }
        Command::Verify(input) => verify(global, input),
        Command::Sweep { family, lambda_grid, depth } => run_sweep(global, family, lambda_grid.as_deref(), *depth),
        Command::Render { input, report, seed_count } => render(global, input, report.as_deref(), *seed_count),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
