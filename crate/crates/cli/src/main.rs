use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use delta_resonance::asymptotics::certify;
use delta_resonance::figure::{figure_data, FigureId, FigureOverrides, Window};
use delta_resonance::lambert::{w_branch, MAX_WEIGHT};
use delta_resonance::model::{resonances, widened_range};
use delta_resonance::output::{
    contour_rows, curve_rows, params_header, resonance_rows, write_report, write_table, BranchRow,
    CoefficientRow, Format,
};
use delta_resonance::stirling::series_coefficient;
use delta_resonance::{Error, ModelParams};

const EXIT_VIOLATION: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Resonances of a delta-function barrier near the semiclassical limit.
#[derive(Debug, Parser)]
#[command(name = "deltares", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Resonances from every branch of the widened index range.
    Compute {
        #[command(flatten)]
        params: ParamArgs,
        /// Keep only resonances inside re_min,re_max,im_min,im_max.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<[f64; 4]>,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// Check the width law of the regime against its error bound.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// Contours, resonances and width curves for one of the three figures.
    Figure {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        id: u8,
        #[arg(long, allow_negative_numbers = true)]
        h: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<f64>,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<[f64; 4]>,
        /// Grid points nx,ny.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Lambert W branch values with remainder and tail bound.
    Wdump {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// Exact coefficients of the W remainder series, j + m <= max weight.
    Coeffs {
        #[arg(long, default_value_t = 12)]
        max_weight: usize,
        #[command(flatten)]
        io: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    h: f64,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.3)]
    eps: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<ModelParams, Error> {
        ModelParams::new(self.h, self.alpha, self.eps)
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn writer(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn parse_list<T: std::str::FromStr, const N: usize>(s: &str) -> Result<[T; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!(
            "expected {N} comma-separated values, got {}",
            parts.len()
        ));
    }
    let values = parts
        .iter()
        .map(|p| p.parse::<T>().map_err(|_| format!("cannot parse {p:?}")))
        .collect::<Result<Vec<T>, String>>()?;
    values
        .try_into()
        .map_err(|_| "wrong number of values".to_string())
}

fn parse_window(s: &str) -> Result<[f64; 4], String> {
    parse_list(s)
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let [nx, ny] = parse_list(s)?;
    Ok((nx, ny))
}

enum Outcome {
    Pass,
    Violation,
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Compute { params, window, io } => {
            let params = params.params()?;
            let window = window
                .map(|[a, b, c, d]| Window::new(a, b, c, d, 2, 2))
                .transpose()?;
            let found: Vec<_> = resonances(&params)?
                .into_iter()
                .filter(|r| window.is_none_or(|w| w.contains(r.z_refined)))
                .collect();
            let rows = resonance_rows(&found);
            write_table(
                io.writer()?,
                io.format.into(),
                params_header(&params),
                &rows,
            )?;
        }
        Command::Verify { params, io } => {
            let report = certify(&params.params()?)?;
            write_report(io.writer()?, io.format.into(), &report)?;
            if !report.all_pass() {
                eprintln!("{} bound violation(s)", report.violations());
                return Ok(Outcome::Violation);
            }
        }
        Command::Figure {
            id,
            h,
            alpha,
            eps,
            window,
            grid,
            format,
            out,
        } => {
            let figure = FigureId::from_number(id).expect("clap restricts the id");
            let defaults = figure.default_params();
            let params = ModelParams::new(
                h.unwrap_or(defaults.h),
                alpha.unwrap_or(defaults.alpha),
                eps.unwrap_or(defaults.eps),
            )?;
            let mut win = match window {
                Some([a, b, c, d]) => {
                    let base = figure.default_window();
                    Window::new(a, b, c, d, base.nx, base.ny)?
                }
                None => figure.default_window(),
            };
            if let Some((nx, ny)) = grid {
                win = win.with_grid(nx, ny)?;
            }
            let data = figure_data(
                figure,
                FigureOverrides {
                    params: Some(params),
                    window: Some(win),
                },
            )?;
            write_figure(&out, id, format.into(), &data)?;
            eprintln!(
                "figure {id}: {} intersections, {} resonances, matching {}",
                data.contours.intersections.len(),
                data.resonances.len(),
                if data.matching.is_complete() {
                    "complete"
                } else {
                    "incomplete"
                }
            );
        }
        Command::Wdump { params, io } => {
            let params = params.params()?;
            let arg = params.log_argument()?;
            let rows = widened_range(&params)?
                .indices()
                .into_iter()
                .map(|k| w_branch(&arg, k).map(|v| BranchRow::from(&v)))
                .collect::<Result<Vec<_>, _>>()?;
            write_table(
                io.writer()?,
                io.format.into(),
                params_header(&params),
                &rows,
            )?;
        }
        Command::Coeffs { max_weight, io } => {
            if max_weight > MAX_WEIGHT {
                return Err(Error::InvalidParams(format!(
                    "max weight {max_weight} exceeds {MAX_WEIGHT}"
                )));
            }
            let mut rows = Vec::new();
            for n in 1..=max_weight {
                for m in 1..=n {
                    rows.push(CoefficientRow::from(&series_coefficient(n - m, m)?));
                }
            }
            let header = serde_json::json!({ "max_weight": max_weight });
            write_table(io.writer()?, io.format.into(), header, &rows)?;
        }
    }
    Ok(Outcome::Pass)
}

fn write_figure(
    dir: &Path,
    id: u8,
    format: Format,
    data: &delta_resonance::figure::FigureData,
) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    let ext = format.extension();
    let file = |name: &str| -> io::Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(
            dir.join(format!("fig{id}_{name}.{ext}")),
        )?))
    };
    let mut header = params_header(&data.params);
    header["window"] = serde_json::to_value(data.contours.window)?;
    write_table(
        file("contours")?,
        format,
        header.clone(),
        &contour_rows(&data.contours),
    )?;
    write_table(
        file("resonances")?,
        format,
        header.clone(),
        &resonance_rows(&data.resonances),
    )?;
    write_table(file("curves")?, format, header, &curve_rows(&data.curves))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(EXIT_VIOLATION),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INVALID
            })
        }
    }
}
