mod output;
mod quantity;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clusterfuse::closed_forms::{ConstructionMethod, Transcription};
use clusterfuse::error::{Error, Result};
use clusterfuse::figures::{figure, grid, FigureId};
use clusterfuse::montecarlo::{monte_carlo, McPolicy, HISTOGRAM_BINS};
use clusterfuse::noise::DephasingStrength;
use clusterfuse::strategies::{compare_methods, run_scenario, Binding, Interval, Scenario, ScenarioKind, Strengths};

use output::{Cell, Format, Output};
use quantity::Quantity;

#[derive(Parser, Debug)]
#[command(name = "clusterfuse", version, about = "Fusion of dephased photonic cluster states")]
struct Cli {
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Random seed (Monte Carlo only; recorded in the metadata otherwise).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Curves for one of the standard plots, simulated and analytic.
    Figure {
        /// fig1, fig2, fig3-left, fig3-right, fig4-left or fig4-right.
        #[arg(value_parser = parse_name::<FigureId>)]
        id: FigureId,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// One construction storyline with explicit storage strengths.
    Scenario {
        /// e.g. method1-all-success, method1-fail-fresh, method2-fail4.
        #[arg(long, value_parser = parse_name::<ScenarioKind>)]
        name: ScenarioKind,
        #[command(flatten)]
        strengths: StrengthArgs,
    },
    /// Named quantities over a grid of dephasing strengths.
    Sweep {
        #[command(flatten)]
        grid: GridArgs,
        /// Comma-separated, e.g. `eq2:q=5,neg:q=4:pt=1+2,scenario:method1-wait`.
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_name::<Quantity>)]
        quantities: Vec<Quantity>,
    },
    /// Monte Carlo over random fusion outcomes.
    Mc {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Reuse failure remnants instead of abandoning the sample.
        #[arg(long)]
        recycle: bool,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 64)]
        max_attempts: u32,
        /// Dephasing of each fresh primitive.
        #[arg(long, default_value_t = 0.0)]
        p1: f64,
        /// Storage strength before each attempt; the last value repeats.
        #[arg(long, value_delimiter = ',')]
        storage: Vec<f64>,
        /// Track chain lengths only; no fidelities.
        #[arg(long)]
        lengths_only: bool,
    },
    /// Simulated fidelity of both no-failure constructions.
    CompareMethods {
        #[arg(long, value_enum, default_value_t = BindingArg::Equal)]
        binding: BindingArg,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    p_min: f64,
    #[arg(long, default_value_t = 1.0)]
    p_max: f64,
    #[arg(long, default_value_t = 11)]
    steps: usize,
}

impl GridArgs {
    fn points(&self) -> Result<Vec<DephasingStrength>> {
        grid(self.p_min, self.p_max, self.steps)
    }
}

#[derive(Args, Debug)]
struct StrengthArgs {
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    p3: Option<f64>,
    #[arg(long)]
    p4: Option<f64>,
    #[arg(long)]
    p5: Option<f64>,
    #[arg(long)]
    p_wait: Option<f64>,
}

impl StrengthArgs {
    fn pairs(&self) -> [(Interval, Option<f64>); 6] {
        [
            (Interval::P1, self.p1),
            (Interval::P2, self.p2),
            (Interval::P3, self.p3),
            (Interval::P4, self.p4),
            (Interval::P5, self.p5),
            (Interval::Wait, self.p_wait),
        ]
    }

    fn strengths(&self) -> Result<Strengths> {
        let mut s = Strengths::new();
        for (interval, value) in self.pairs() {
            if let Some(v) = value {
                s.set(interval, DephasingStrength::new(v)?);
            }
        }
        Ok(s)
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MethodArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum BindingArg {
    Equal,
    Fresh,
}

fn parse_name<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn base(cli: &Cli, command: &str, columns: Vec<String>) -> Output {
    Output::new(columns)
        .meta("tool", "clusterfuse")
        .meta("version", env!("CARGO_PKG_VERSION"))
        .meta("command", command)
        .meta("seed", cli.seed)
}

fn strs(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Figure { id, grid } => {
            let id = *id;
            let table = figure(id, &grid.points()?)?;
            let mut out = base(cli, "figure", table.columns.clone()).meta("figure", id.name());
            for row in table.rows {
                out.push(row.into_iter().map(Cell::Num).collect());
            }
            Ok(out)
        }
        Command::Scenario { name, strengths } => {
            let kind = *name;
            let scenario = Scenario::new(kind, strengths.strengths()?)?;
            let run = run_scenario(&scenario)?;
            let mut columns = strs(&["scenario"]);
            columns.extend(Interval::ALL.iter().map(|i| i.name().to_owned()));
            columns.extend(strs(&[
                "fidelity_sim",
                "fidelity_formula",
                "fidelity_formula_literal",
                "branch_probability",
                "fusion_attempts",
                "primitives_used",
            ]));
            let mut row: Vec<Cell> = vec![kind.name().into()];
            for (_, v) in strengths.pairs() {
                row.push(v.map_or(Cell::Text(String::new()), Cell::Num));
            }
            let form = |t| scenario.closed_form(t).unwrap_or(f64::NAN);
            row.extend([
                Cell::Num(run.fidelity),
                Cell::Num(form(Transcription::Corrected)),
                Cell::Num(form(Transcription::Literal)),
                Cell::Num(run.branch_probability),
                Cell::Int(run.fusion_attempts as u64),
                Cell::Int(run.primitives_used as u64),
            ]);
            let mut out = base(cli, "scenario", columns).meta("scenario", kind.name());
            out.push(row);
            Ok(out)
        }
        Command::Sweep { grid, quantities } => {
            let mut columns = strs(&["p"]);
            columns.extend(quantities.iter().map(|q| q.spec().to_owned()));
            let mut out = base(cli, "sweep", columns);
            for p in grid.points()? {
                let mut row = vec![Cell::Num(p.value())];
                for q in quantities {
                    row.push(Cell::Num(q.eval(p)?));
                }
                out.push(row);
            }
            Ok(out)
        }
        Command::Mc {
            method,
            recycle,
            samples,
            max_attempts,
            p1,
            storage,
            lengths_only,
        } => {
            let policy = McPolicy {
                method: match method {
                    MethodArg::One => ConstructionMethod::ThreeThree,
                    MethodArg::Two => ConstructionMethod::FourTwo,
                },
                recycle: *recycle,
                max_attempts: *max_attempts,
                primitive_strength: DephasingStrength::new(*p1)?,
                storage_strengths: storage
                    .iter()
                    .map(|&p| DephasingStrength::new(p))
                    .collect::<Result<_>>()?,
                track_states: !lengths_only,
            };
            let report = monte_carlo(&policy, *samples, cli.seed)?;
            let mut columns = strs(&[
                "method",
                "recycle",
                "samples",
                "seed",
                "successes",
                "aborted",
                "success_rate",
                "fusion_attempts",
                "fusion_successes",
                "fusion_success_rate",
                "mean_fidelity",
                "primitives_consumed",
            ]);
            columns.extend((0..HISTOGRAM_BINS).map(|b| format!("fidelity_bin_{b:02}")));
            let consumed: Vec<String> = report
                .primitives_consumed
                .iter()
                .map(|(k, v)| format!("{k}:{v}"))
                .collect();
            let mut row = vec![
                Cell::Int(if matches!(method, MethodArg::One) { 1 } else { 2 }),
                Cell::Text(recycle.to_string()),
                Cell::Int(report.samples),
                Cell::Int(report.seed),
                Cell::Int(report.successes),
                Cell::Int(report.aborted),
                Cell::Num(report.success_rate),
                Cell::Int(report.fusion_attempts),
                Cell::Int(report.fusion_successes),
                Cell::Num(report.fusion_success_rate()),
                Cell::Num(report.mean_fidelity.unwrap_or(f64::NAN)),
                Cell::Text(consumed.join(";")),
            ];
            match &report.fidelity_histogram {
                Some(h) => row.extend(h.iter().map(|&c| Cell::Int(c))),
                None => row.extend((0..HISTOGRAM_BINS).map(|_| Cell::Text(String::new()))),
            }
            let mut out = base(cli, "mc", columns);
            out.push(row);
            Ok(out)
        }
        Command::CompareMethods { binding, grid } => {
            let binding = match binding {
                BindingArg::Equal => Binding::Equal,
                BindingArg::Fresh => Binding::FreshPrimitives,
            };
            let rows = compare_methods(&grid.points()?, binding)?;
            let mut out = base(
                cli,
                "compare-methods",
                strs(&["p", "three_three", "four_two", "difference"]),
            )
            .meta("binding", format!("{binding:?}"));
            for r in rows {
                out.push(vec![
                    Cell::Num(r.p),
                    Cell::Num(r.three_three),
                    Cell::Num(r.four_two),
                    Cell::Num(r.difference),
                ]);
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let out = match run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match out.write(cli.format, cli.out.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let target = cli
                .out
                .as_ref()
                .map_or("standard output".to_owned(), |p| p.display().to_string());
            eprintln!("error: cannot write {target}: {e}");
            ExitCode::from(1)
        }
    }
}
