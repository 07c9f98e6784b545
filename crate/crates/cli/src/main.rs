use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meyerkit::discretize::{self, DiscretizedSequence};
use meyerkit::frequency::{frequency_table, mean_frequency};
use meyerkit::modelset::{self, BoxClosure};
use meyerkit::{acceptance, dirichlet, exact, io as kit_io, linalg, minkowski};
use meyerkit::{parse_body, CutAndProjectScheme, Error, FrequencyTable, PointSample, Window};

#[derive(Parser)]
#[command(name = "meyer", version, about = "Meyer sets, model sets and Minkowski-type inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate model sets
    #[command(subcommand)]
    Modelset(ModelsetCmd),
    /// Density, Delone parameters and patch comparison
    #[command(subcommand)]
    Pointset(PointsetCmd),
    /// Frequencies of differences
    #[command(subcommand)]
    Freq(FreqCmd),
    /// Minkowski-type inequalities
    #[command(subcommand)]
    Minkowski(MinkowskiCmd),
    /// Slope approximation by differences
    #[command(subcommand)]
    Dirichlet(DirichletCmd),
    /// Rounded rotations of the integer grid
    #[command(subcommand)]
    Discretize(DiscretizeCmd),
    /// Run the acceptance suite
    Accept {
        /// Comma-separated criterion ids (all by default)
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Print elapsed time per criterion
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Subcommand)]
enum ModelsetCmd {
    /// Cut-and-project set from a basis (rows) and a box window
    Gen {
        /// Basis rows `b11,b12;b21,b22`; generators are the columns, the first m rows are internal
        #[arg(long, allow_hyphen_values = true)]
        basis: String,
        /// Window box `lo,hi` per internal coordinate, separated by `;`
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long, default_value = "half-open")]
        closure: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "R")]
        r: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `{y ∈ Z : dist(y α_i, Z) < ε}` on `[−Y, Y]`
    Ealpha {
        /// Comma-separated slopes
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<f64>,
        #[arg(long)]
        eps: f64,
        #[arg(long = "Y")]
        y: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PointsetCmd {
    /// Upper density over a grid of centres
    Density {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "R")]
        r: f64,
        #[arg(long, default_value_t = 5.0)]
        grid: f64,
    },
    /// Packing and covering radii, optionally the Meyer check
    Delone {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        spacing: f64,
        /// Also check that the differences within this cutoff are uniformly discrete
        #[arg(long)]
        cutoff: Option<f64>,
    },
    /// Patch defect between the balls around two centres
    Wap {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long = "R")]
        r: f64,
        /// Candidate radius (R/10 by default)
        #[arg(long)]
        near: Option<f64>,
    },
}

#[derive(Subcommand)]
enum FreqCmd {
    /// Tabulate frequencies of differences
    Table {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        cutoff: f64,
        #[arg(long = "R")]
        r: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average frequency mass over balls
    Mean {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        r: f64,
        /// Centres separated by `;`, coordinates by `,`
        #[arg(long, allow_hyphen_values = true)]
        centers: String,
    },
}

#[derive(Args)]
struct TableSource {
    /// Point file to tabulate
    #[arg(long, conflicts_with = "table")]
    pts: Option<PathBuf>,
    /// Precomputed frequency table
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long = "R")]
    r: Option<f64>,
}

#[derive(Subcommand)]
enum MinkowskiCmd {
    /// Σρ over S against D·Vol(S/2), or D·#(S/2 ∩ Z^n) with --integer
    Verify {
        #[command(flatten)]
        source: TableSource,
        #[arg(long)]
        body: String,
        #[arg(long)]
        integer: bool,
        /// Report lhs/rhs against the doubled right-hand side as well
        #[arg(long = "probe-factor2")]
        probe_factor2: bool,
    },
    /// Classical bound on a lattice
    Classical {
        #[arg(long, allow_hyphen_values = true)]
        basis: String,
        #[arg(long)]
        body: String,
    },
    /// The equality hexagon on kZ × Z
    Equality {
        #[arg(long)]
        k: u32,
    },
}

#[derive(Subcommand)]
enum DirichletCmd {
    /// Smallest difference vector inside the slab
    Find {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<String>,
        #[arg(long = "Q")]
        q: String,
        #[arg(long)]
        pts: PathBuf,
        /// Density of the set (measured on the sample by default)
        #[arg(long)]
        density: Option<f64>,
    },
    /// Frequency mass inside the slab
    Mass {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<String>,
        #[arg(long = "Q")]
        q: String,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        density: Option<f64>,
    },
}

#[derive(Args)]
struct SequenceArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    k: usize,
    /// Repeat one rotation angle (in units of π) instead of random angles
    #[arg(long, allow_hyphen_values = true)]
    angle: Option<f64>,
}

impl SequenceArgs {
    fn build(&self) -> meyerkit::Result<DiscretizedSequence> {
        match self.angle {
            Some(a) => DiscretizedSequence::rotations(&vec![a * PI; self.k]),
            None => discretize::random_rotation_sequence(self.seed, self.k),
        }
    }
}

#[derive(Subcommand)]
enum DiscretizeCmd {
    /// Rate of injectivity of the composed rounded rotations
    Tau {
        #[command(flatten)]
        seq: SequenceArgs,
        #[arg(long = "R", value_delimiter = ',')]
        r: Vec<f64>,
    },
    /// Push a PGM image through the rounded rotations
    Degrade {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        seq: SequenceArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Most frequent short difference of an integral set
    SeedDiff {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        density: Option<f64>,
    },
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InequalityViolation(_) => Failure::Verification(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<bool, Failure>;

/// Collects `key=value` lines.
#[derive(Default)]
struct Report(Vec<String>);

impl Report {
    fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        self.0.push(format!("{key}={value}"));
    }
}

fn list<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn numbers(text: &str) -> std::result::Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Failure::Input(format!("bad number {t:?}")))
        })
        .collect()
}

fn rows(text: &str) -> std::result::Result<Vec<Vec<f64>>, Failure> {
    text.split(';').map(numbers).collect()
}

fn open(path: &Path) -> std::result::Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_points(path: &Path) -> std::result::Result<PointSample, Failure> {
    Ok(kit_io::read_points(open(path)?)?)
}

fn read_table(path: &Path) -> std::result::Result<FrequencyTable, Failure> {
    Ok(kit_io::read_table(open(path)?)?)
}

fn sink(out: Option<&Path>) -> std::result::Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn measured_density(gamma: &PointSample) -> meyerkit::Result<f64> {
    let origin = vec![0.0; gamma.dim()];
    Ok(gamma.density_at(gamma.region_radius(), &[origin])?.value)
}

fn query(alpha: &[String], q: &str, density: f64) -> meyerkit::Result<dirichlet::ApproximationQuery> {
    let alpha = alpha.iter().map(|a| exact::parse_decimal(a)).collect::<meyerkit::Result<_>>()?;
    dirichlet::ApproximationQuery::new(alpha, exact::parse_decimal(q)?, density)
}

fn run(cmd: Command, rep: &mut Report) -> Outcome {
    match cmd {
        Command::Modelset(c) => modelset_cmd(c, rep),
        Command::Pointset(c) => pointset_cmd(c, rep),
        Command::Freq(c) => freq_cmd(c, rep),
        Command::Minkowski(c) => minkowski_cmd(c, rep),
        Command::Dirichlet(c) => dirichlet_cmd(c, rep),
        Command::Discretize(c) => discretize_cmd(c, rep),
        Command::Accept { only, timings } => {
            let results = acceptance::run_selected(&only, |r| {
                if timings {
                    println!("{}  [{:.2}s]", r.line(), r.elapsed.as_secs_f64());
                } else {
                    println!("{}", r.line());
                }
            });
            let failed = results.iter().filter(|r| !r.pass).count();
            rep.put("criteria", results.len());
            rep.put("failed", failed);
            Ok(failed == 0)
        }
    }
}

fn modelset_cmd(cmd: ModelsetCmd, rep: &mut Report) -> Outcome {
    let (sample, out) = match cmd {
        ModelsetCmd::Gen {
            basis,
            window,
            closure,
            m,
            n,
            r,
            out,
        } => {
            let closure = match closure.as_str() {
                "half-open" => BoxClosure::HalfOpen,
                "open" => BoxClosure::Open,
                "closed" => BoxClosure::Closed,
                other => return Err(Failure::Input(format!("unknown closure {other:?}"))),
            };
            let basis = linalg::matrix_from_rows(&rows(&basis)?)?;
            let sides = rows(&window)?;
            if sides.iter().any(|s| s.len() != 2) {
                return Err(Failure::Input("window sides must be `lo,hi`".into()));
            }
            let lo = sides.iter().map(|s| s[0]).collect();
            let hi = sides.iter().map(|s| s[1]).collect();
            let scheme = CutAndProjectScheme::new(m, n, basis, Window::boxed(lo, hi, closure)?)?;
            rep.put("expected_density", scheme.expected_density());
            (scheme.generate(r)?, out)
        }
        ModelsetCmd::Ealpha { alpha, eps, y, out } => {
            rep.put("expected_density", (2.0 * eps).powi(alpha.len() as i32));
            (modelset::e_alpha_epsilon(&alpha, eps, y)?, out)
        }
    };
    rep.put("points", sample.len());
    let to_stdout = out.is_none();
    kit_io::write_points(&sample, sink(out.as_deref())?)?;
    if to_stdout {
        rep.0.clear();
    }
    Ok(true)
}

fn pointset_cmd(cmd: PointsetCmd, rep: &mut Report) -> Outcome {
    match cmd {
        PointsetCmd::Density { input, r, grid } => {
            let gamma = read_points(&input)?;
            let est = gamma.upper_density(&[r / 4.0, r / 2.0, 3.0 * r / 4.0, r], grid)?;
            rep.put("density", est.value);
            rep.put("radius", est.radius_used);
            rep.put("centers", est.center_count);
            rep.put("erosion_margin", est.erosion_margin);
            rep.put("oscillation", est.oscillation());
            for (radius, value) in &est.trace {
                rep.put(&format!("trace_{radius}"), value);
            }
        }
        PointsetCmd::Delone { input, spacing, cutoff } => {
            let gamma = read_points(&input)?;
            let d = gamma.delone_parameters(spacing)?;
            rep.put("r_packing", d.r_packing);
            rep.put("r_covering", d.r_covering);
            rep.put("probe_spacing", d.probe_spacing);
            rep.put("probes", d.probe_count);
            if let Some(c) = cutoff {
                let m = gamma.meyer_check(c)?;
                rep.put("differences", m.difference_count);
                rep.put("difference_min_gap", m.min_gap);
                rep.put("uniformly_discrete_differences", m.is_uniformly_discrete);
                return Ok(m.is_uniformly_discrete);
            }
        }
        PointsetCmd::Wap { input, x, y, r, near } => {
            let gamma = read_points(&input)?;
            let (x, y) = (numbers(&x)?, numbers(&y)?);
            let p = gamma.patch_defect_with(&x, &y, r, near.unwrap_or(r / 10.0))?;
            rep.put("defect", p.defect);
            rep.put("v", list(&p.v_best));
            rep.put("matches", p.matches);
            rep.put("patch_x", p.patch_sizes.0);
            rep.put("patch_y", p.patch_sizes.1);
            rep.put("candidates", p.candidates);
        }
    }
    Ok(true)
}

fn freq_cmd(cmd: FreqCmd, rep: &mut Report) -> Outcome {
    match cmd {
        FreqCmd::Table { input, cutoff, r, out } => {
            let gamma = read_points(&input)?;
            let table = frequency_table(&gamma, cutoff, r)?;
            let to_stdout = out.is_none();
            kit_io::write_table(&table, sink(out.as_deref())?)?;
            if !to_stdout {
                rep.put("entries", table.entries.len());
                rep.put("density", table.density.value);
                rep.put("exact", table.is_exact());
            }
        }
        FreqCmd::Mean { table, r, centers } => {
            let table = read_table(&table)?;
            let m = mean_frequency(&table, r, &rows(&centers)?)?;
            rep.put("mean", m.mean);
            rep.put("density", table.density.value);
            rep.put("max_deviation", m.max_deviation);
            rep.put("per_center", list(&m.per_center));
        }
    }
    Ok(true)
}

fn load_table(src: &TableSource) -> std::result::Result<FrequencyTable, Failure> {
    match (&src.pts, &src.table) {
        (Some(p), None) => {
            let (Some(cutoff), Some(r)) = (src.cutoff, src.r) else {
                return Err(Failure::Input("--pts needs --cutoff and --R".into()));
            };
            Ok(frequency_table(&read_points(p)?, cutoff, r)?)
        }
        (None, Some(t)) => read_table(t),
        _ => Err(Failure::Input("give either --pts or --table".into())),
    }
}

fn minkowski_cmd(cmd: MinkowskiCmd, rep: &mut Report) -> Outcome {
    match cmd {
        MinkowskiCmd::Verify {
            source,
            body,
            integer,
            probe_factor2,
        } => {
            let table = load_table(&source)?;
            let body = parse_body(&body, Some(table.dim))?;
            let r = if integer {
                minkowski::verify_integer_inequality(&table, &body)?
            } else {
                minkowski::verify_inequality(&table, &body)?
            };
            rep.put("mode", r.mode);
            rep.put("lhs", r.lhs);
            rep.put("rhs", r.rhs);
            rep.put("margin", r.margin);
            rep.put("sampling_uncertainty", r.sampling_uncertainty);
            rep.put("uncertainty_kind", "heuristic (density trace oscillation)");
            rep.put("support", r.support_size);
            if let Some(e) = &r.exact {
                rep.put("exact_lhs", &e.lhs);
                rep.put("exact_rhs", &e.rhs);
                rep.put("exact_margin", &e.margin);
            }
            if probe_factor2 {
                rep.put("ratio", r.ratio());
                rep.put("ratio_to_doubled_rhs", r.lhs / (2.0 * r.rhs));
            }
            rep.put("pass", r.pass);
            Ok(r.pass)
        }
        MinkowskiCmd::Classical { basis, body } => {
            let basis = linalg::matrix_from_rows(&rows(&basis)?)?;
            let body = parse_body(&body, Some(basis.nrows()))?;
            let r = minkowski::classical_bound_check(&basis, &body)?;
            rep.put("count_nonzero", r.count_nonzero);
            rep.put("count", r.count_nonzero + 1);
            rep.put("k", r.k);
            rep.put("bound", r.bound);
            rep.put("pass", r.pass);
            Ok(r.pass)
        }
        MinkowskiCmd::Equality { k } => {
            let r = minkowski::equality_report(k)?;
            let e = r.exact.as_ref().expect("periodic path is exact");
            rep.put("k", k);
            rep.put("lhs", &e.lhs);
            rep.put("rhs", &e.rhs);
            rep.put("margin", &e.margin);
            rep.put("pass", r.pass);
            Ok(r.pass)
        }
    }
}

fn dirichlet_cmd(cmd: DirichletCmd, rep: &mut Report) -> Outcome {
    match cmd {
        DirichletCmd::Find { alpha, q, pts, density } => {
            let gamma = read_points(&pts)?;
            let d = match density {
                Some(d) => d,
                None => measured_density(&gamma)?,
            };
            let w = dirichlet::find_witness(&query(&alpha, &q, d)?, &gamma)?;
            rep.put("v", list(&w.v));
            rep.put("w", list(&w.w));
            rep.put("u", list(&w.u));
            rep.put("err", list(&w.errors));
            rep.put("bound", w.bound);
            rep.put("q_form", w.q_form);
            rep.put("primitive", w.primitive);
            rep.put("borderline", w.borderline);
            rep.put("density", d);
        }
        DirichletCmd::Mass { alpha, q, table, density } => {
            let table = read_table(&table)?;
            let d = density.unwrap_or(table.density.value);
            let m = dirichlet::guaranteed_mass(&query(&alpha, &q, d)?, &table)?;
            rep.put("mass", m.empirical);
            rep.put("floor", m.floor);
            rep.put("support", m.support_size);
            let pass = m.empirical >= m.floor - table.sampling_uncertainty();
            rep.put("pass", pass);
            return Ok(pass);
        }
    }
    Ok(true)
}

fn discretize_cmd(cmd: DiscretizeCmd, rep: &mut Report) -> Outcome {
    match cmd {
        DiscretizeCmd::Tau { seq, r } => {
            let s = seq.build()?;
            let t = discretize::rate_of_injectivity(&s, seq.k, &r)?;
            if let Some(angles) = s.angles() {
                rep.put("angles", list(&angles));
            }
            for (i, radius) in t.radii.iter().enumerate() {
                rep.put(&format!("input_{radius}"), t.input_counts[i]);
                rep.put(&format!("tau_{radius}"), list(&t.tau[i]));
            }
            rep.put("note", &t.note);
        }
        DiscretizeCmd::Degrade { input, seq, out } => {
            let image = discretize::read_pgm(open(&input)?)?;
            let (degraded, lost) = discretize::degrade_trace(&image, &seq.build()?)?;
            discretize::write_pgm(&degraded, sink(Some(&out))?)?;
            rep.put("lost", list(&lost));
        }
        DiscretizeCmd::SeedDiff { table, density } => {
            let table = read_table(&table)?;
            let d = density.unwrap_or(table.density.value);
            let s = discretize::seed_difference(&table, d)?;
            rep.put("u0", list(&s.u0));
            rep.put("rho0", s.rho0);
            rep.put("r", s.r);
            rep.put("mass", s.mass);
            rep.put("floor", s.floor);
            rep.put("sampling_uncertainty", s.sampling_uncertainty);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    let mut rep = Report::default();
    let outcome = run(cli.command, &mut rep);
    let mut stdout = io::stdout().lock();
    for line in &rep.0 {
        let _ = writeln!(stdout, "{line}");
    }
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(stdout, "pass=false");
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
