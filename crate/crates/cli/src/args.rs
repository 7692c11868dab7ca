use std::ops::RangeInclusive;
use std::path::PathBuf;

use bmcert::rational::{parse_rational, Rational};
use bmcert::systems::{CPolicy, DichotomyConfig, JCase, Variant};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "bmcert",
    version,
    about = "Certified bounds for the Banach-Mazur distance between C([0,w]x3) and C[0,w]"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide the four case systems at one t and emit their certificates
    Certify(CertifyArgs),
    /// Bisect for the largest certified t
    Search(SearchArgs),
    /// Compare c-policies by their certified bounds
    Sweep(SweepArgs),
    /// Run every branch assignment of the experimental dichotomy systems
    Dichotomy(DichotomyArgs),
    /// Tabulate the closed-form lower bounds
    Bounds(BoundsArgs),
    /// Norms and distortion of the block isomorphism
    Upper(UpperArgs),
    /// Re-check a certificate file by substitution only
    VerifyCert(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Structured,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Printed,
    Symmetrized,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Printed => Variant::Printed,
            VariantArg::Symmetrized => Variant::Symmetrized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantChoice {
    Printed,
    Symmetrized,
    Both,
}

impl VariantChoice {
    pub fn variants(self) -> Vec<Variant> {
        match self {
            VariantChoice::Printed => vec![Variant::Printed],
            VariantChoice::Symmetrized => vec![Variant::Symmetrized],
            VariantChoice::Both => Variant::BOTH.to_vec(),
        }
    }
}

pub fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

pub fn policy(s: &str) -> Result<CPolicy, String> {
    s.parse()
        .map_err(|e: bmcert::systems::SystemError| e.to_string())
}

/// Either every case or a single one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseFilter(pub Option<JCase>);

impl CaseFilter {
    pub fn admits(self, case: JCase) -> bool {
        self.0.is_none_or(|c| c == case)
    }
}

/// `all` or one case tag.
pub fn case_filter(s: &str) -> Result<CaseFilter, String> {
    if s.eq_ignore_ascii_case("all") {
        Ok(CaseFilter(None))
    } else {
        s.parse().map(|c| CaseFilter(Some(c)))
    }
}

/// `a..b` or a single integer.
pub fn int_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let parse = |x: &str| {
        x.trim()
            .parse::<i64>()
            .map_err(|_| format!("`{x}` is not an integer"))
    };
    let range = match s.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.trim_start_matches('='))?,
        None => {
            let v = parse(s)?;
            v..=v
        }
    };
    if range.is_empty() {
        return Err(format!("empty range `{s}`"));
    }
    Ok(range)
}

/// `lo:hi:step` with rational entries.
pub fn scan_spec(s: &str) -> Result<(Rational, Rational, Rational), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:step, got `{s}`"));
    }
    Ok((
        rational(parts[0])?,
        rational(parts[1])?,
        rational(parts[2])?,
    ))
}

pub fn functions(s: &str) -> Result<DichotomyConfig, String> {
    s.parse()
        .map_err(|e: bmcert::systems::SystemError| e.to_string())
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Probe value, `p/q` or an integer
    #[arg(long, value_parser = rational, required_unless_present = "system")]
    pub t: Option<Rational>,
    /// c(t) = (p*t + q)/r
    #[arg(long = "c-policy", value_parser = policy, default_value = "2,1,4")]
    pub c_policy: CPolicy,
    #[arg(long, value_enum, default_value = "symmetrized")]
    pub variant: VariantArg,
    /// all, J012, not0, in0not1 or in01not2
    #[arg(long, value_parser = case_filter, default_value = "all")]
    pub case: CaseFilter,
    /// Decide a single system-definition file instead of the built-in cases
    #[arg(long, conflicts_with_all = ["t", "case"])]
    pub system: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, value_parser = rational, default_value = "3")]
    pub lo: Rational,
    #[arg(long, value_parser = rational, default_value = "5")]
    pub hi: Rational,
    #[arg(long, default_value_t = 6)]
    pub iters: u32,
    #[arg(long = "c-policy", value_parser = policy, default_value = "2,1,4")]
    pub c_policy: CPolicy,
    #[arg(long, value_enum, default_value = "symmetrized")]
    pub variant: VariantChoice,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Semicolon-separated policies, each `p,q,r`
    #[arg(long, default_value = "1,0,2;1,1,2;2,1,4")]
    pub policies: String,
    #[arg(long, value_parser = rational, default_value = "3")]
    pub lo: Rational,
    #[arg(long, value_parser = rational, default_value = "5")]
    pub hi: Rational,
    #[arg(long, default_value_t = 8)]
    pub iters: u32,
    #[arg(long, value_enum, default_value = "symmetrized")]
    pub variant: VariantChoice,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DichotomyArgs {
    #[arg(long, value_parser = rational)]
    pub t: Rational,
    #[arg(long = "c-policy", value_parser = policy, default_value = "2,1,4")]
    pub c_policy: CPolicy,
    #[arg(long, value_enum, default_value = "symmetrized")]
    pub variant: VariantArg,
    /// Indices m of the functions chi_{A_m} generating a dichotomy
    #[arg(long, value_parser = functions, default_value = "0,1,2")]
    pub functions: DichotomyConfig,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Heights for m + sqrt((m-1)(m+3)), `a..b` or a single value
    #[arg(long, value_parser = int_range)]
    pub m: Option<RangeInclusive<i64>>,
    /// k for the Gergont-Piasecki bound, `a..b` or a single value
    #[arg(long, value_parser = int_range)]
    pub k: Option<RangeInclusive<i64>>,
    /// Also run the derivative checks for h(theta) and s(theta) over the m range
    #[arg(long)]
    pub checks: bool,
    /// Significant digits in text and csv output
    #[arg(long, default_value_t = 30)]
    pub digits: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct UpperArgs {
    /// Exact report at one t in [3, 4]
    #[arg(long, value_parser = rational, conflicts_with_all = ["scan", "optimize"])]
    pub t: Option<Rational>,
    /// Exact scan `lo:hi:step`
    #[arg(long, value_parser = scan_spec, conflicts_with = "optimize")]
    pub scan: Option<(Rational, Rational, Rational)>,
    /// Minimise the distortion over [3, 4] (the default action)
    #[arg(long)]
    pub optimize: bool,
    /// Optimiser tolerance on t, e.g. 1e-20
    #[arg(long)]
    pub tol: Option<String>,
    /// Also evaluate the closed-form cubic expression in both readings
    #[arg(long)]
    pub cubic: bool,
    #[arg(long, default_value_t = 30)]
    pub digits: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Certificate file written by certify, search or dichotomy
    pub path: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}
