use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use spin_squeeze::closedform::{
    frame_moments_closed_form, frame_moments_from_moments, min_transverse_variance_closed_form,
    second_moments_closed_form, squeezing_paper_literal, squeezing_standard,
};
use spin_squeeze::crosscheck::{
    default_betas, default_grid, default_mus, default_nus, product_grid, DEFAULT_TOL,
};
use spin_squeeze::frame::{compute_frame, DEFAULT_FRAME_EPS};
use spin_squeeze::sweep::{linspace, write_rows};
use spin_squeeze::{
    mean_spin_closed_form, mean_spin_length, mean_spin_length_closed_form, run_crosscheck,
    run_figure, run_sweep, squeeze_oracle, write_figure, Convention, Error, FigureName,
    FrameStatus, OutputFormat, SqueezeParams, SweepSpec,
};

const EXIT_USAGE: u8 = 1;
const EXIT_CHECK: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "spin-squeeze",
    version,
    about = "Mean spin and spin squeezing of a two-qubit superposition state"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every quantity at one parameter point.
    Point,
    /// Sweep a (mu, nu, beta) grid and write one row per point.
    Sweep,
    /// Reproduce the data behind a figure and check its qualitative shape.
    Figure {
        /// fig1 (mean spin length) or fig2 (squeezing parameter)
        name: String,
    },
    /// Compare the closed forms against the direct operator computation.
    Crosscheck,
}

#[derive(Args, Debug, Default, Clone)]
struct Opts {
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    nu: Option<f64>,
    #[arg(long, global = true)]
    beta_min: Option<f64>,
    #[arg(long, global = true)]
    beta_max: Option<f64>,
    #[arg(long, global = true)]
    beta_steps: Option<usize>,
    /// Comma-separated radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    mu_list: Option<String>,
    /// Comma-separated radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    nu_list: Option<String>,
    /// standard or paper-literal
    #[arg(long, global = true)]
    convention: Option<String>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// Exit with status 2 when a sweep contains degenerate points.
    #[arg(long, global = true)]
    strict: bool,
    /// key=value file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

/// A failure with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn check(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CHECK,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, Failure> {
    value
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("invalid value '{value}' for {key}")))
}

fn load_config(path: &Path) -> std::result::Result<Opts, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Failure::usage(format!(
                "{}:{}: expected key=value",
                path.display(),
                lineno + 1
            ))
        })?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    let mut opts = Opts::default();
    for (k, v) in &map {
        match k.as_str() {
            "beta" => opts.beta = Some(parse_value(k, v)?),
            "mu" => opts.mu = Some(parse_value(k, v)?),
            "nu" => opts.nu = Some(parse_value(k, v)?),
            "beta_min" => opts.beta_min = Some(parse_value(k, v)?),
            "beta_max" => opts.beta_max = Some(parse_value(k, v)?),
            "beta_steps" => opts.beta_steps = Some(parse_value(k, v)?),
            "mu_list" => opts.mu_list = Some(v.clone()),
            "nu_list" => opts.nu_list = Some(v.clone()),
            "convention" => opts.convention = Some(v.clone()),
            "tol" => opts.tol = Some(parse_value(k, v)?),
            "out" => opts.out = Some(PathBuf::from(v)),
            "format" => opts.format = Some(v.clone()),
            "strict" => opts.strict = parse_value(k, v)?,
            "threads" => opts.threads = Some(parse_value(k, v)?),
            other => {
                return Err(Failure::usage(format!(
                    "{}: unknown key '{other}'",
                    path.display()
                )))
            }
        }
    }
    Ok(opts)
}

/// Flags override config-file values.
fn merge(flags: Opts, file: Opts) -> Opts {
    Opts {
        beta: flags.beta.or(file.beta),
        mu: flags.mu.or(file.mu),
        nu: flags.nu.or(file.nu),
        beta_min: flags.beta_min.or(file.beta_min),
        beta_max: flags.beta_max.or(file.beta_max),
        beta_steps: flags.beta_steps.or(file.beta_steps),
        mu_list: flags.mu_list.or(file.mu_list),
        nu_list: flags.nu_list.or(file.nu_list),
        convention: flags.convention.or(file.convention),
        tol: flags.tol.or(file.tol),
        out: flags.out.or(file.out),
        format: flags.format.or(file.format),
        strict: flags.strict || file.strict,
        config: None,
        threads: flags.threads.or(file.threads),
    }
}

fn parse_list(key: &str, s: &str) -> std::result::Result<Vec<f64>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_value(key, t))
        .collect()
}

impl Opts {
    fn convention(&self) -> std::result::Result<Convention, Failure> {
        Ok(self
            .convention
            .as_deref()
            .map(Convention::parse)
            .transpose()?
            .unwrap_or_default())
    }

    fn format(&self) -> std::result::Result<OutputFormat, Failure> {
        Ok(self
            .format
            .as_deref()
            .map(OutputFormat::parse)
            .transpose()?
            .unwrap_or_default())
    }

    fn threads(&self) -> std::result::Result<Option<usize>, Failure> {
        match self.threads {
            Some(0) => Err(Failure::usage("--threads must be at least 1")),
            t => Ok(t),
        }
    }

    fn params(&self) -> std::result::Result<SqueezeParams, Failure> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Failure::usage(format!("missing --{name}")))
        };
        Ok(SqueezeParams::new(
            need(self.beta, "beta")?,
            need(self.mu, "mu")?,
            need(self.nu, "nu")?,
        )?)
    }

    fn angle_list(
        &self,
        list: &Option<String>,
        single: Option<f64>,
        key: &str,
    ) -> std::result::Result<Option<Vec<f64>>, Failure> {
        match (list, single) {
            (Some(s), _) => parse_list(key, s).map(Some),
            (None, Some(x)) => Ok(Some(vec![x])),
            (None, None) => Ok(None),
        }
    }

    fn sweep_spec(&self) -> std::result::Result<SweepSpec, Failure> {
        let mu_values = self
            .angle_list(&self.mu_list, self.mu, "mu-list")?
            .ok_or_else(|| Failure::usage("missing --mu-list"))?;
        let nu_values = self
            .angle_list(&self.nu_list, self.nu, "nu-list")?
            .ok_or_else(|| Failure::usage("missing --nu-list"))?;
        let spec = SweepSpec {
            mu_values,
            nu_values,
            beta_min: self.beta_min.unwrap_or(0.0),
            beta_max: self.beta_max.unwrap_or(1.0),
            beta_steps: self.beta_steps.unwrap_or(101),
            convention: self.convention()?,
            format: self.format()?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn open_output(path: Option<&Path>) -> std::result::Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), |v| format!("{v:.12}"))
}

fn cmd_point(o: &Opts) -> CmdResult {
    let params = o.params()?;
    let convention = o.convention()?;
    let res = squeeze_oracle(&params)?;
    let cf = mean_spin_closed_form(&params);
    let cf_frame = compute_frame(&cf, DEFAULT_FRAME_EPS);
    let ms2 = second_moments_closed_form(&params);
    let printed = frame_moments_closed_form(&params, &cf_frame).ok();
    let rederived = frame_moments_from_moments(&ms2, &cf_frame).ok();
    let headline = match convention {
        Convention::Standard => res.xi2_std,
        Convention::PaperLiteral => res.xi2_literal,
    };

    if o.format()? == OutputFormat::Json {
        let value = serde_json::json!({
            "convention": convention,
            "xi2": headline,
            "oracle": res,
            "closed_form": {
                "mean": cf,
                "r_eq9": mean_spin_length(&cf),
                "r_eq10": mean_spin_length_closed_form(&params),
                "frame": cf_frame,
                "second_moments": {
                    "jplus_sq": [ms2.jplus_sq.re, ms2.jplus_sq.im],
                    "jz_sq": ms2.jz_sq,
                    "jplus_2jz1": [ms2.jplus_2jz1.re, ms2.jplus_2jz1.im],
                },
                "frame_moments_printed": printed,
                "frame_moments_rederived": rederived,
                "xi2_std_printed": printed.map(|f| squeezing_standard(&f)),
                "xi2_literal_printed": printed.map(|f| squeezing_paper_literal(&f)),
            },
        });
        let mut out = open_output(o.out.as_deref())?;
        serde_json::to_writer_pretty(&mut out, &value).map_err(Error::from)?;
        writeln!(out)?;
        out.flush()?;
        return Ok(());
    }

    let mut out = open_output(o.out.as_deref())?;
    let w = &mut out;
    writeln!(w, "beta                 {}", params.beta())?;
    writeln!(w, "mu                   {}", params.mu())?;
    writeln!(w, "nu                   {}", params.nu())?;
    writeln!(
        w,
        "mean closed-form     ({:.12}, {:.12}, {:.12})",
        cf.jx, cf.jy, cf.jz
    )?;
    writeln!(
        w,
        "mean oracle          ({:.12}, {:.12}, {:.12})",
        res.mean.jx, res.mean.jy, res.mean.jz
    )?;
    writeln!(w, "R                    {:.6}", res.frame.r)?;
    writeln!(w, "R norm of mean       {:.12}", mean_spin_length(&cf))?;
    writeln!(
        w,
        "R closed-form        {:.12}",
        mean_spin_length_closed_form(&params)
    )?;
    writeln!(w, "theta                {:.12}", res.frame.theta)?;
    writeln!(w, "phi                  {:.12}", res.frame.phi)?;
    writeln!(w, "frame_status         {}", res.frame_status)?;
    writeln!(w, "method               {}", res.method)?;
    writeln!(
        w,
        "<J+^2> closed-form   {:.12} {:+.12}i",
        ms2.jplus_sq.re, ms2.jplus_sq.im
    )?;
    writeln!(w, "<Jz^2> closed-form   {:.12}", ms2.jz_sq)?;
    writeln!(
        w,
        "<J+(2Jz+1)> cf       {:.12} {:+.12}i",
        ms2.jplus_2jz1.re, ms2.jplus_2jz1.im
    )?;
    let fm = res.frame_moments;
    writeln!(w, "jn1sq oracle         {}", opt(fm.map(|f| f.jn1_sq)))?;
    writeln!(w, "jn2sq oracle         {}", opt(fm.map(|f| f.jn2_sq)))?;
    writeln!(w, "anticomm oracle      {}", opt(fm.map(|f| f.anticomm)))?;
    writeln!(w, "jn1sq closed-form    {}", opt(printed.map(|f| f.jn1_sq)))?;
    writeln!(w, "jn2sq closed-form    {}", opt(printed.map(|f| f.jn2_sq)))?;
    writeln!(
        w,
        "anticomm closed-form {}",
        opt(printed.map(|f| f.anticomm))
    )?;
    writeln!(
        w,
        "jn1sq rederived      {}",
        opt(rederived.map(|f| f.jn1_sq))
    )?;
    writeln!(
        w,
        "jn2sq rederived      {}",
        opt(rederived.map(|f| f.jn2_sq))
    )?;
    writeln!(
        w,
        "anticomm rederived   {}",
        opt(rederived.map(|f| f.anticomm))
    )?;
    writeln!(w, "lambda_min oracle    {:.12}", res.lambda_min)?;
    writeln!(w, "lambda_min search    {:.12}", res.search_lambda_min)?;
    writeln!(
        w,
        "lambda_min printed   {}",
        opt(printed.map(|f| min_transverse_variance_closed_form(&f)))
    )?;
    writeln!(w, "chi_min              {}", opt(res.chi_min))?;
    writeln!(w, "xi2_std              {:.12}", res.xi2_std)?;
    writeln!(w, "xi2_literal          {:.12}", res.xi2_literal)?;
    writeln!(
        w,
        "xi2_std printed      {}",
        opt(printed.map(|f| squeezing_standard(&f)))
    )?;
    writeln!(
        w,
        "xi2_literal printed  {}",
        opt(printed.map(|f| squeezing_paper_literal(&f)))
    )?;
    writeln!(w, "xi2 ({})        {:.12}", convention.as_str(), headline)?;
    writeln!(w, "concurrence          {:.12}", res.concurrence)?;
    out.flush()?;
    Ok(())
}

fn cmd_sweep(o: &Opts) -> CmdResult {
    let spec = o.sweep_spec()?;
    let rows = run_sweep(&spec, o.threads()?)?;
    let mut out = open_output(o.out.as_deref())?;
    write_rows(&rows, spec.format, &mut out)?;
    out.flush()?;
    let degenerate = rows
        .iter()
        .filter(|r| r.frame_status == FrameStatus::FullyDegenerate)
        .count();
    if o.strict && degenerate > 0 {
        return Err(Failure::check(format!(
            "{degenerate} of {} points have a degenerate frame",
            rows.len()
        )));
    }
    Ok(())
}

fn cmd_crosscheck(o: &Opts) -> CmdResult {
    let tol = o.tol.unwrap_or(DEFAULT_TOL);
    let custom = o.mu_list.is_some()
        || o.nu_list.is_some()
        || o.mu.is_some()
        || o.nu.is_some()
        || o.beta_min.is_some()
        || o.beta_max.is_some()
        || o.beta_steps.is_some();
    let grid = if custom {
        let betas = match (o.beta_min, o.beta_max, o.beta_steps) {
            (None, None, None) => default_betas(),
            (lo, hi, n) => linspace(lo.unwrap_or(0.0), hi.unwrap_or(1.0), n.unwrap_or(21)),
        };
        let mus = o
            .angle_list(&o.mu_list, o.mu, "mu-list")?
            .unwrap_or_else(default_mus);
        let nus = o
            .angle_list(&o.nu_list, o.nu, "nu-list")?
            .unwrap_or_else(default_nus);
        product_grid(&betas, &mus, &nus)?
    } else {
        default_grid()
    };
    let report = spin_squeeze::sweep::with_threads(o.threads()?, || run_crosscheck(&grid, tol))??;
    if let Some(path) = &o.out {
        let mut out = open_output(Some(path))?;
        serde_json::to_writer_pretty(&mut out, &report).map_err(Error::from)?;
        writeln!(out)?;
        out.flush()?;
    }
    println!("{}", report.summary_line());
    if report.convention_independent_ok {
        Ok(())
    } else {
        Err(Failure::check(
            "convention-independent quantities disagree with the oracle",
        ))
    }
}

fn cmd_figure(o: &Opts, name: &str) -> CmdResult {
    let name = FigureName::parse(name)?;
    let output = run_figure(name, o.threads()?)?;
    let outdir = o.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let written = write_figure(&output, &outdir)
        .map_err(|e| Failure::usage(format!("cannot write to {}: {e}", outdir.display())))?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    for check in &output.summary.checks {
        let conv = check
            .convention
            .map_or(String::new(), |c| format!(" [{}]", c.as_str()));
        println!(
            "{} {}{}: {} ({})",
            if check.passed { "PASS" } else { "FAIL" },
            name.as_str(),
            conv,
            check.claim,
            check.detail
        );
    }
    for iv in &output.summary.intervals {
        let range = match (iv.first, iv.last) {
            (Some(a), Some(b)) => format!("[{a:.3}, {b:.3}]"),
            _ => "none".to_string(),
        };
        println!(
            "squeezed interval [{}] mu={:.6}: {range} width={:.3}",
            iv.convention.as_str(),
            iv.mu,
            iv.width
        );
    }
    if output.summary.concurrence_total > 0 {
        println!(
            "concurrence diagnostic: xi2_std = 1 - C at {} of {} points",
            output.summary.concurrence_agreeing, output.summary.concurrence_total
        );
    }
    let failed: Vec<String> = output.summary.failed().map(|c| c.slice.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::check(format!(
            "shape check failed for: {}",
            failed.join("; ")
        )))
    }
}

fn run(cli: Cli) -> CmdResult {
    let file = match &cli.opts.config {
        Some(path) => load_config(path)?,
        None => Opts::default(),
    };
    let opts = merge(cli.opts, file);
    if let Some(tol) = opts.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::usage(format!("--tol must be positive, got {tol}")));
        }
    }
    match &cli.command {
        Command::Point => cmd_point(&opts),
        Command::Sweep => cmd_sweep(&opts),
        Command::Figure { name } => cmd_figure(&opts, name),
        Command::Crosscheck => cmd_crosscheck(&opts),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
