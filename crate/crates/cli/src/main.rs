use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use irred_core::exactalg::parse::parse_ratfun;
use irred_core::exactalg::{parse_rat, Rat, RatFun};
use irred_core::jets::{curve_point, numeric_ve_oracle, prolong, EquationFamily, OracleConfig, VectorFieldSpec};
use irred_core::verdict::{check_p2, check_p3, criterion_airy_family, Certificate, Evidence};
use irred_core::Error;

/// Galoisian irreducibility certificates for second-order ODEs.
#[derive(Parser)]
#[command(name = "irred", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Criterion for y'' = x*y + y^n*P(x, y).
    Family {
        #[arg(long)]
        n: usize,
        #[arg(long = "P")]
        p: String,
        /// Also write the certificate to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Painlevé II with a = 0.
    P2 {
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Painlevé III family at the given values of mu.
    P3 {
        #[arg(long = "mu", default_value = "1/2")]
        mu: Vec<String>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Prints the variational equations of a field along a curve.
    Ve {
        #[command(flatten)]
        field: FieldArgs,
        /// Curve components in the variable t, separated by ';'.
        #[arg(long)]
        curve: String,
        #[arg(long)]
        order: usize,
        /// Drop the jets of the independent coordinate.
        #[arg(long)]
        normal: bool,
        /// Print the linear system on monomials instead of the jet equations.
        #[arg(long)]
        linearize: bool,
    },
    /// Numeric cross-check of the jet prolongation.
    Oracle {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        order: usize,
        /// Start point, comma separated.
        #[arg(long, conflicts_with = "curve")]
        start: Option<String>,
        /// Curve evaluated at --t0 for the start point.
        #[arg(long)]
        curve: Option<String>,
        #[arg(long, default_value_t = 0.5)]
        t0: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 4)]
        seeds: u64,
    },
}

#[derive(clap::Args)]
struct FieldArgs {
    /// Components as `name = expr` separated by ';', e.g. "x = 1; y = z; z = x*y + 2*y^3".
    #[arg(long)]
    field: String,
    /// Coordinate entering rationally; defaults to one whose component is 1.
    #[arg(long)]
    indep: Option<String>,
}

impl FieldArgs {
    fn spec(&self) -> irred_core::Result<VectorFieldSpec> {
        let mut names = Vec::new();
        let mut comps = Vec::new();
        for part in self.field.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, expr) =
                part.split_once('=').ok_or_else(|| Error::Input(format!("expected `name = expr`, got `{part}`")))?;
            names.push(name.trim().trim_end_matches('\'').trim());
            comps.push(expr.trim());
        }
        let indep = match &self.indep {
            Some(n) => Some(n.as_str()),
            None => names.iter().zip(&comps).find(|(_, c)| **c == "1").map(|(n, _)| *n),
        };
        VectorFieldSpec::parse(&names, indep, &comps, &[])
    }
}

fn parse_curve(s: &str) -> irred_core::Result<Vec<RatFun>> {
    s.split(';').map(|c| parse_ratfun(c.trim(), "t", &[])).collect()
}

fn print_certificate(out: &mut String, c: &Certificate, json: Option<&PathBuf>) -> irred_core::Result<()> {
    for e in &c.evidence {
        writeln!(out, "  {:<44} {}", e.label(), summary(e)).unwrap();
    }
    writeln!(out, "verdict: {}", c.verdict).unwrap();
    if let Some(path) = json {
        std::fs::write(path, c.to_json()).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        writeln!(out, "certificate written to {}", path.display()).unwrap();
    }
    Ok(())
}

fn summary(e: &Evidence) -> String {
    match e {
        Evidence::Matrix { rows, .. } => format!("matrix {}x{}", rows.len(), rows.first().map_or(0, Vec::len)),
        Evidence::Operator { expr, .. } => expr.clone(),
        Evidence::Screen { tag, .. } => tag.to_string(),
        Evidence::LieClosure { dimension, classification, .. } => match classification {
            Some(c) => format!("dim {dimension} ({c})"),
            None => format!("dim {dimension}"),
        },
        Evidence::PoleShortcut { pole_orders, applies, .. } => {
            format!("pole orders {pole_orders:?}, {}", if *applies { "applies" } else { "declines" })
        }
        Evidence::RationalSolutions { particular, degree_bound, denominator, .. } => match particular {
            Some(y) => format!("solution {y}"),
            None => format!("no rational solution (denominator {denominator}, degree bound {degree_bound})"),
        },
        Evidence::SystemSolutions { particular, .. } => match particular {
            Some(f) => format!("solution [{}]", f.join(", ")),
            None => "no rational solution".into(),
        },
        Evidence::Exponents { indicial, .. } => format!("indicial {indicial}"),
        Evidence::Scalarization { scalar_rhs, .. } => format!("rhs {scalar_rhs}"),
        Evidence::Trace { trace, .. } => format!("trace {trace}"),
        _ => "ok".into(),
    }
}

/// Writes the report into `out`; errors leave what was written so far.
fn run(cli: Cli, out: &mut String) -> irred_core::Result<()> {
    match cli.cmd {
        Cmd::Family { n, p, json } => {
            let fam = EquationFamily::parse(n, &p)?;
            writeln!(out, "family n = {n}, P = {p}").unwrap();
            print_certificate(out, &criterion_airy_family(&fam)?, json.as_ref())
        }
        Cmd::P2 { json } => {
            writeln!(out, "Painlevé II, a = 0").unwrap();
            print_certificate(out, &check_p2()?, json.as_ref())
        }
        Cmd::P3 { mu, json } => {
            let mus = mu.iter().map(|m| parse_rat(m)).collect::<irred_core::Result<Vec<Rat>>>()?;
            writeln!(out, "Painlevé III, mu = {}", mu.join(", ")).unwrap();
            print_certificate(out, &check_p3(&mus)?, json.as_ref())
        }
        Cmd::Ve { field, curve, order, normal, linearize } => {
            let f = field.spec()?;
            let c = parse_curve(&curve)?;
            let mut j = prolong(&f, order)?.restrict_to_curve(&f, &c)?;
            if normal {
                let idx = f.indep().ok_or_else(|| Error::Input("--normal needs an independent coordinate".into()))?;
                j = j.normal_restrict(idx)?;
            }
            if linearize {
                let l = j.linearize(order)?;
                writeln!(out, "variables: {}", l.render_vars().join(", ")).unwrap();
                for row in l.matrix().render_rows("t") {
                    writeln!(out, "[{}]", row.join(", ")).unwrap();
                }
            } else {
                for line in j.render() {
                    writeln!(out, "{line}").unwrap();
                }
            }
            Ok(())
        }
        Cmd::Oracle { field, order, start, curve, t0, eps, seeds } => {
            let f = field.spec()?;
            let start = match (start, curve) {
                (Some(s), _) => s
                    .split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Input(format!("bad start entry `{x}`"))))
                    .collect::<irred_core::Result<Vec<f64>>>()?,
                (None, Some(c)) => curve_point(&parse_curve(&c)?, t0)?,
                (None, None) => return Err(Error::Input("give --start or --curve".into())),
            };
            let cfg = OracleConfig { eps, ..OracleConfig::default() };
            let seeds: Vec<u64> = (1..=seeds).collect();
            let r = numeric_ve_oracle(&f, &start, order, &seeds, &cfg)?;
            for (k, res) in r.per_order.iter().enumerate() {
                writeln!(out, "order {}: max relative residual {res:.3e}", k + 1).unwrap();
            }
            writeln!(out, "max residual {:.3e} over {} mesh points", r.max_residual, r.steps).unwrap();
            Ok(())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::Input(_)
        | Error::IntegerMu { .. }
        | Error::Dimension(_)
        | Error::IndexOutOfRange(_)
        | Error::InvalidOperator(_)
        | Error::VanishingDenominator { .. }
        | Error::ZeroPoleOrders
        | Error::NotHomogeneous(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let mut out = String::new();
    let result = run(Cli::parse(), &mut out);
    // A closed pipe (e.g. `| head`) is not an error.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
