//! Command line interface: `clone`, `sweep`, `qkd`, `paper-check`, `mc`.
//!
//! Exit codes: 0 on success, 2 for invalid parameters or usage, 3 when
//! computation routes that must agree do not (including `paper-check`
//! failures).

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Complex;

use crate::analysis;
use crate::cloners::{
    known_phase_clone, symmetric_clone, CloneParams, DisplacementMode, Epsilon, Machine,
    SqueezePolicy,
};
use crate::mc::{attach_mc_fidelity, mc_moments, HeterodyneModel, McConfig};
use crate::report::{self, format_sig, render_grid, ReportRow};
use crate::{CloneCount, Error, Result};

/// Parses the process arguments, runs the command, prints its output, and
/// returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 2 } else { 0 };
        }
    };
    let mut out = String::new();
    match dispatch(&cli.command, &mut out) {
        Ok(()) => {
            print!("{out}");
            0
        }
        Err(err) => {
            // Partial output (e.g. the check table) still goes out.
            print!("{out}");
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cvcloner",
    version,
    about = "Coherent-state cloning calculator: closed forms, exact circuits, Monte Carlo"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one cloning machine and report gain, variances, and fidelity.
    Clone(CloneArgs),
    /// Tabulate cloning machines over ranges of N and M.
    Sweep(SweepArgs),
    /// Excess-noise thresholds below which a measure-and-prepare channel is
    /// impossible.
    Qkd(QkdArgs),
    /// Recompute the built-in golden values along every route; any
    /// disagreement fails the run with exit code 3.
    PaperCheck(PaperCheckArgs),
    /// Monte Carlo estimate of the clone fidelity or quadrature moments.
    Mc(McArgs),
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Cloning machine.
    #[arg(long, value_enum, default_value_t = MachineArg::Symmetric)]
    machine: MachineArg,
    /// Number of identical input copies N.
    #[arg(long)]
    n: u32,
    /// Number of clones M, or "inf" for the measurement limit.
    #[arg(long)]
    m: CloneCount,
    /// Input amplitude: "0.4", "0.4-0.2i", or "0.4,-0.2".
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Complex<f64>,
    /// Beam-splitter split: "auto" (unit-gain optimum) or a value in [0, 1].
    #[arg(long, default_value = "auto", value_parser = parse_epsilon, allow_hyphen_values = true)]
    epsilon: Epsilon,
    /// Squeezing policy of the known-phase machine: "none", "optimal",
    /// "symmetric-noise", or a number r.
    #[arg(long, default_value = "none", value_parser = parse_squeeze, allow_hyphen_values = true)]
    squeeze: SqueezePolicy,
    /// Whether the symmetric machine displaces once before distribution or
    /// per clone after it (the outputs are identical).
    #[arg(long, value_enum, default_value_t = DisplacementArg::Joint)]
    displacement: DisplacementArg,
}

impl ParamArgs {
    fn machine(&self) -> Machine {
        self.machine.into()
    }

    fn params(&self) -> CloneParams {
        CloneParams {
            n: self.n,
            m: self.m,
            alpha: self.alpha,
            epsilon: self.epsilon,
            squeeze: self.squeeze,
            displacement: self.displacement.into(),
        }
    }
}

#[derive(Args)]
struct CloneArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// Input copies N, as "1..3" (inclusive) or a single value.
    #[arg(long, default_value = "1..3", value_parser = parse_range)]
    n: IntRange,
    /// Clones M, as "2..4" (inclusive) or a single value; pairs with M <= N
    /// are skipped.
    #[arg(long, default_value = "2..4", value_parser = parse_range)]
    m: IntRange,
    #[arg(long, value_enum, default_value_t = SweepMachineArg::Symmetric)]
    machine: SweepMachineArg,
    /// Pin the known-phase squeezing policy instead of sweeping none,
    /// optimal, and symmetric-noise.
    #[arg(long, value_parser = parse_squeeze, allow_hyphen_values = true)]
    squeeze: Option<SqueezePolicy>,
    /// Append the M → ∞ row for every (N, machine, policy).
    #[arg(long)]
    include_inf: bool,
    /// Input amplitude (must be real when known-phase rows are swept).
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Complex<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct QkdArgs {
    /// Line transmission of the eavesdropped link, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Observed excess noise to classify against the thresholds.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct PaperCheckArgs {
    /// Also cross-check Monte Carlo estimates with this many trajectories.
    #[arg(long)]
    mc: Option<u64>,
    /// Seed for the optional Monte Carlo cross-check.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 100_000)]
    trajectories: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// How heterodyne outcomes are drawn.
    #[arg(long, value_enum, default_value_t = HeterodyneArg::Direct)]
    heterodyne: HeterodyneArg,
    /// Report sampled quadrature moments instead of the fidelity row.
    #[arg(long)]
    moments: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MachineArg {
    Symmetric,
    KnownPhase,
}

impl From<MachineArg> for Machine {
    fn from(a: MachineArg) -> Self {
        match a {
            MachineArg::Symmetric => Machine::Symmetric,
            MachineArg::KnownPhase => Machine::KnownPhase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepMachineArg {
    Symmetric,
    KnownPhase,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DisplacementArg {
    Joint,
    Individual,
}

impl From<DisplacementArg> for DisplacementMode {
    fn from(a: DisplacementArg) -> Self {
        match a {
            DisplacementArg::Joint => DisplacementMode::Joint,
            DisplacementArg::Individual => DisplacementMode::Individual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HeterodyneArg {
    Direct,
    AncillaCircuit,
}

impl From<HeterodyneArg> for HeterodyneModel {
    fn from(a: HeterodyneArg) -> Self {
        match a {
            HeterodyneArg::Direct => HeterodyneModel::Direct,
            HeterodyneArg::AncillaCircuit => HeterodyneModel::AncillaCircuit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

/// Inclusive integer range from the command line.
#[derive(Debug, Clone, Copy)]
struct IntRange {
    lo: u32,
    hi: u32,
}

impl IntRange {
    fn iter(self) -> std::ops::RangeInclusive<u32> {
        self.lo..=self.hi
    }
}

// ---------------------------------------------------------------------------
// Value parsers

fn parse_complex(s: &str) -> std::result::Result<Complex<f64>, String> {
    let t = s.trim();
    let num = |v: &str, what: &str| -> std::result::Result<f64, String> {
        v.trim().parse::<f64>().map_err(|_| format!("invalid {what} part in amplitude {t:?}"))
    };
    if let Some((re, im)) = t.split_once(',') {
        return Ok(Complex::new(num(re, "real")?, num(im, "imaginary")?));
    }
    if let Some(body) = t.strip_suffix(['i', 'I']) {
        // Split at the last sign that is not a leading sign or an exponent
        // sign: "0.4-0.2i" → ("0.4", "-0.2"), "1e-3i" stays pure imaginary.
        let split = body
            .char_indices()
            .rev()
            .find(|(k, c)| {
                matches!(c, '+' | '-')
                    && *k > 0
                    && !matches!(body.as_bytes()[k - 1], b'e' | b'E')
            })
            .map(|(k, _)| k);
        let (re, im) = match split {
            Some(k) => (num(&body[..k], "real")?, signed_or_unit(&body[k..], t)?),
            None => (0.0, signed_or_unit(body, t)?),
        };
        return Ok(Complex::new(re, im));
    }
    Ok(Complex::new(num(t, "real")?, 0.0))
}

/// Parses the imaginary coefficient, where "", "+", and "-" mean ±1.
fn signed_or_unit(v: &str, whole: &str) -> std::result::Result<f64, String> {
    match v {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => v.parse::<f64>().map_err(|_| format!("invalid imaginary part in amplitude {whole:?}")),
    }
}

fn parse_epsilon(s: &str) -> std::result::Result<Epsilon, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Epsilon::Auto);
    }
    s.parse::<f64>()
        .map(Epsilon::Explicit)
        .map_err(|_| format!("expected \"auto\" or a number, got {s:?}"))
}

fn parse_squeeze(s: &str) -> std::result::Result<SqueezePolicy, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(SqueezePolicy::None);
    }
    if s.eq_ignore_ascii_case("optimal") {
        return Ok(SqueezePolicy::Optimal);
    }
    if s.eq_ignore_ascii_case("symmetric-noise") {
        return Ok(SqueezePolicy::SymmetricNoise);
    }
    let body = s.strip_prefix("r=").unwrap_or(s);
    body.parse::<f64>().map(SqueezePolicy::Explicit).map_err(|_| {
        format!("expected \"none\", \"optimal\", \"symmetric-noise\", or a number, got {s:?}")
    })
}

fn parse_range(s: &str) -> std::result::Result<IntRange, String> {
    let bad = |_| format!("expected an integer or \"A..B\", got {s:?}");
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(bad)?;
        let hi: u32 = hi.trim().parse().map_err(bad)?;
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        return Ok(IntRange { lo, hi });
    }
    let v: u32 = s.trim().parse().map_err(bad)?;
    Ok(IntRange { lo: v, hi: v })
}

// ---------------------------------------------------------------------------
// Command dispatch

fn dispatch(command: &Command, out: &mut String) -> Result<()> {
    match command {
        Command::Clone(args) => cmd_clone(args, out),
        Command::Sweep(args) => cmd_sweep(args, out),
        Command::Qkd(args) => cmd_qkd(args, out),
        Command::PaperCheck(args) => cmd_paper_check(args, out),
        Command::Mc(args) => cmd_mc(args, out),
    }
}

fn clone_report(machine: Machine, params: &CloneParams) -> Result<crate::cloners::CloneReport> {
    match machine {
        Machine::Symmetric => symmetric_clone(params),
        Machine::KnownPhase => known_phase_clone(params),
    }
}

fn emit_rows(format: Format, rows: &[ReportRow], out: &mut String) {
    match format {
        Format::Table => out.push_str(&report::table(rows)),
        Format::Csv => out.push_str(&report::csv(rows)),
        Format::Json => out.push_str(&report::json(rows)),
    }
}

fn cmd_clone(args: &CloneArgs, out: &mut String) -> Result<()> {
    let rep = clone_report(args.params.machine(), &args.params.params())?;
    emit_rows(args.format, &[ReportRow::from(&rep)], out);
    Ok(())
}

fn cmd_mc(args: &McArgs, out: &mut String) -> Result<()> {
    let machine = args.params.machine();
    let params = args.params.params();
    if args.moments {
        let cfg = McConfig::new(machine, params)
            .with_trajectories(args.trajectories)
            .with_seed(args.seed)
            .with_heterodyne(args.heterodyne.into());
        let m = mc_moments(&cfg)?;
        let fields: Vec<(&str, String, bool)> = vec![
            ("machine", machine.to_string(), true),
            ("n", args.params.n.to_string(), false),
            ("m", args.params.m.to_string(), matches!(args.params.m, CloneCount::Inf)),
            ("trajectories", m.trajectories.to_string(), false),
            ("seed", args.seed.to_string(), false),
            ("mean_x", format_sig(m.mean[0]), false),
            ("mean_p", format_sig(m.mean[1]), false),
            ("var_x", format_sig(m.cov[(0, 0)]), false),
            ("var_p", format_sig(m.cov[(1, 1)]), false),
            ("cov_xp", format_sig(m.cov[(0, 1)]), false),
            ("mean_stderr_x", format_sig(m.mean_stderr[0]), false),
            ("mean_stderr_p", format_sig(m.mean_stderr[1]), false),
            ("var_stderr_x", format_sig(m.var_stderr[0]), false),
            ("var_stderr_p", format_sig(m.var_stderr[1]), false),
            ("degenerate", m.degenerate.to_string(), false),
        ];
        emit_fields(args.format, &fields, out);
        return Ok(());
    }
    let mut rep = clone_report(machine, &params)?;
    attach_mc_fidelity(&mut rep, args.trajectories, args.seed, args.heterodyne.into())?;
    let mut row = ReportRow::from(&rep);
    row.seed = Some(args.seed);
    emit_rows(args.format, &[row], out);
    Ok(())
}

/// Emits one record of named fields; `quoted` marks JSON string values.
fn emit_fields(format: Format, fields: &[(&str, String, bool)], out: &mut String) {
    match format {
        Format::Table => {
            let grid = vec![
                fields.iter().map(|(name, _, _)| name.to_string()).collect(),
                fields.iter().map(|(_, value, _)| value.clone()).collect(),
            ];
            out.push_str(&render_grid(&grid));
        }
        Format::Csv => {
            let names: Vec<&str> = fields.iter().map(|(name, _, _)| *name).collect();
            let values: Vec<&str> = fields.iter().map(|(_, value, _)| value.as_str()).collect();
            out.push_str(&names.join(","));
            out.push('\n');
            out.push_str(&values.join(","));
            out.push('\n');
        }
        Format::Json => {
            out.push('{');
            for (i, (name, value, quoted)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if *quoted {
                    out.push_str(&format!("\"{name}\":\"{value}\""));
                } else {
                    out.push_str(&format!("\"{name}\":{value}"));
                }
            }
            out.push_str("}\n");
        }
    }
}

fn cmd_sweep(args: &SweepArgs, out: &mut String) -> Result<()> {
    let machines: &[Machine] = match args.machine {
        SweepMachineArg::Symmetric => &[Machine::Symmetric],
        SweepMachineArg::KnownPhase => &[Machine::KnownPhase],
        SweepMachineArg::Both => &[Machine::Symmetric, Machine::KnownPhase],
    };
    let policies = |machine: Machine| -> Vec<SqueezePolicy> {
        match machine {
            Machine::Symmetric => vec![SqueezePolicy::None],
            Machine::KnownPhase => match args.squeeze {
                Some(policy) => vec![policy],
                None => vec![
                    SqueezePolicy::None,
                    SqueezePolicy::Optimal,
                    SqueezePolicy::SymmetricNoise,
                ],
            },
        }
    };
    let row_for = |machine: Machine, n: u32, m: CloneCount, policy: SqueezePolicy| {
        let params = CloneParams::new(n, m).with_alpha(args.alpha).with_squeeze(policy);
        clone_report(machine, &params).map(|rep| ReportRow::from(&rep))
    };

    let mut rows = Vec::new();
    for n in args.n.iter() {
        for m in args.m.iter() {
            if m <= n {
                continue;
            }
            for &machine in machines {
                for policy in policies(machine) {
                    rows.push(row_for(machine, n, CloneCount::Finite(m), policy)?);
                }
            }
        }
    }
    if args.include_inf {
        for n in args.n.iter() {
            for &machine in machines {
                for policy in policies(machine) {
                    rows.push(row_for(machine, n, CloneCount::Inf, policy)?);
                }
            }
        }
    }
    emit_rows(args.format, &rows, out);
    Ok(())
}

fn cmd_qkd(args: &QkdArgs, out: &mut String) -> Result<()> {
    let unknown = analysis::qkd_threshold(args.eta, false)?;
    let known = analysis::qkd_threshold(args.eta, true)?;
    let verdict = |delta_max: f64| {
        args.delta.map(|d| if d < delta_max { "eb-excluded" } else { "eb-reachable" })
    };

    match args.format {
        Format::Json => {
            let side = |bound: &analysis::QkdBound| {
                format!(
                    "{{\"classical_delta\":{},\"delta_max\":{},\"delta\":{},\"verdict\":{}}}",
                    format_sig(analysis::excess_noise_classical(bound.phase_known)),
                    format_sig(bound.delta_max),
                    args.delta.map(format_sig).unwrap_or_else(|| "null".into()),
                    verdict(bound.delta_max)
                        .map(|v| format!("\"{v}\""))
                        .unwrap_or_else(|| "null".into()),
                )
            };
            out.push_str(&format!(
                "{{\"eta\":{},\"unknown_phase\":{},\"known_phase\":{}}}\n",
                format_sig(args.eta),
                side(&unknown),
                side(&known),
            ));
        }
        Format::Table | Format::Csv => {
            let header =
                ["phase", "classical_delta", "eta", "delta_max", "delta", "verdict"];
            let line = |label: &str, bound: &analysis::QkdBound| {
                vec![
                    label.to_string(),
                    format_sig(analysis::excess_noise_classical(bound.phase_known)),
                    format_sig(args.eta),
                    format_sig(bound.delta_max),
                    args.delta.map(format_sig).unwrap_or_default(),
                    verdict(bound.delta_max).unwrap_or_default().to_string(),
                ]
            };
            let rows = [line("unknown", &unknown), line("known", &known)];
            if args.format == Format::Csv {
                out.push_str(&header.join(","));
                out.push('\n');
                for row in &rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
            } else {
                let mut grid =
                    vec![header.iter().map(|h| h.to_string()).collect::<Vec<_>>()];
                for row in rows {
                    grid.push(
                        row.into_iter()
                            .map(|c| if c.is_empty() { "-".into() } else { c })
                            .collect(),
                    );
                }
                out.push_str(&render_grid(&grid));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// paper-check

struct Check {
    label: &'static str,
    expected: f64,
    computed: f64,
    tol: f64,
}

impl Check {
    fn passed(&self) -> bool {
        (self.computed - self.expected).abs() < self.tol
    }
}

fn cmd_paper_check(args: &PaperCheckArgs, out: &mut String) -> Result<()> {
    let mut checks = golden_checks()?;
    if let Some(trajectories) = args.mc {
        checks.extend(mc_checks(trajectories, args.seed)?);
    }

    let mut grid = vec![vec![
        "check".to_string(),
        "expected".to_string(),
        "computed".to_string(),
        "status".to_string(),
    ]];
    let mut failed = 0usize;
    for check in &checks {
        let ok = check.passed();
        if !ok {
            failed += 1;
        }
        grid.push(vec![
            check.label.to_string(),
            format_sig(check.expected),
            format_sig(check.computed),
            if ok { "PASS".to_string() } else { "FAIL".to_string() },
        ]);
    }
    out.push_str(&render_grid(&grid));
    if failed > 0 {
        out.push_str(&format!("{failed} of {} checks FAILED\n", checks.len()));
        return Err(Error::RouteDisagreement(format!(
            "{failed} of {} golden-value checks failed",
            checks.len()
        )));
    }
    out.push_str(&format!("all {} checks passed\n", checks.len()));
    Ok(())
}

fn golden_checks() -> Result<Vec<Check>> {
    const ANALYTIC: f64 = 1e-12;
    const CIRCUIT: f64 = 1e-10;
    let fin = CloneCount::Finite;
    let mut checks = Vec::new();
    let mut push = |label: &'static str, expected: f64, computed: f64, tol: f64| {
        checks.push(Check { label, expected, computed, tol });
    };

    let sym12 = symmetric_clone(&CloneParams::new(1, fin(2)))?;
    push("symmetric 1->2 fidelity, closed form", 2.0 / 3.0, sym12.fidelity_analytic, ANALYTIC);
    push(
        "symmetric 1->2 fidelity, circuit",
        2.0 / 3.0,
        sym12.fidelity_circuit.expect("finite M has a circuit route"),
        CIRCUIT,
    );
    push("symmetric 1->2 clone variance (x)", 0.5, sym12.var_x, CIRCUIT);
    push("symmetric 1->2 clone variance (p)", 0.5, sym12.var_p, CIRCUIT);
    push("symmetric 1->2 per-clone gain", 0.5f64.sqrt(), sym12.params.per_clone_gain, ANALYTIC);

    let sym23 = symmetric_clone(&CloneParams::new(2, fin(3)))?;
    push("symmetric 2->3 fidelity, closed form", 6.0 / 7.0, sym23.fidelity_analytic, ANALYTIC);
    push(
        "symmetric 2->3 fidelity, circuit",
        6.0 / 7.0,
        sym23.fidelity_circuit.expect("finite M has a circuit route"),
        CIRCUIT,
    );

    let sym_inf = symmetric_clone(&CloneParams::new(1, CloneCount::Inf))?;
    push("symmetric 1->inf fidelity", 0.5, sym_inf.fidelity_analytic, ANALYTIC);
    push("symmetric 1->inf clone variance", 0.75, sym_inf.var_x, ANALYTIC);

    let kp_plain = known_phase_clone(&CloneParams::new(1, fin(2)))?;
    push(
        "known-phase 1->2 fidelity, no squeezing, closed form",
        0.8f64.sqrt(),
        kp_plain.fidelity_analytic,
        ANALYTIC,
    );
    push(
        "known-phase 1->2 fidelity, no squeezing, circuit",
        0.8f64.sqrt(),
        kp_plain.fidelity_circuit.expect("finite M has a circuit route"),
        CIRCUIT,
    );
    push("known-phase 1->2 clone variance (x)", 3.0 / 8.0, kp_plain.var_x, CIRCUIT);
    push("known-phase 1->2 clone variance (p)", 0.25, kp_plain.var_p, CIRCUIT);

    let kp_opt =
        known_phase_clone(&CloneParams::new(1, fin(2)).with_squeeze(SqueezePolicy::Optimal))?;
    push(
        "known-phase 1->2 optimal squeezing parameter",
        2.0f64.ln() / 2.0,
        kp_opt.params.r,
        ANALYTIC,
    );
    push(
        "known-phase 1->2 fidelity, optimal squeezing, closed form",
        2.0 * 2.0f64.sqrt() / 3.0,
        kp_opt.fidelity_analytic,
        ANALYTIC,
    );
    push(
        "known-phase 1->2 fidelity, optimal squeezing, circuit",
        2.0 * 2.0f64.sqrt() / 3.0,
        kp_opt.fidelity_circuit.expect("finite M has a circuit route"),
        CIRCUIT,
    );

    let kp_sym = known_phase_clone(
        &CloneParams::new(1, fin(2)).with_squeeze(SqueezePolicy::SymmetricNoise),
    )?;
    push(
        "known-phase 1->2 fidelity, noise-symmetric squeezing",
        4.0 / (3.0 + 3.0f64.sqrt()),
        kp_sym.fidelity_analytic,
        ANALYTIC,
    );
    push(
        "known-phase 1->2 clone variance, noise-symmetric squeezing",
        (1.0 + 3.0f64.sqrt()) / 8.0,
        kp_sym.var_x,
        CIRCUIT,
    );

    let kp_inf = known_phase_clone(&CloneParams::new(1, CloneCount::Inf))?;
    push(
        "known-phase 1->inf fidelity, no squeezing",
        (2.0f64 / 3.0).sqrt(),
        kp_inf.fidelity_analytic,
        ANALYTIC,
    );

    let kp_inf_sym = known_phase_clone(
        &CloneParams::new(1, CloneCount::Inf).with_squeeze(SqueezePolicy::SymmetricNoise),
    )?;
    push(
        "known-phase 1->inf symmetric clone variance",
        (5.0f64.sqrt() + 1.0) / 8.0,
        kp_inf_sym.var_x,
        ANALYTIC,
    );
    push(
        "known-phase 1->inf noise-symmetric anti-squeezing e^{-2r}",
        (1.0 + 5.0f64.sqrt()) / 2.0,
        (-2.0 * kp_inf_sym.params.r).exp(),
        ANALYTIC,
    );

    push(
        "excess-noise threshold, unknown phase",
        2.0,
        analysis::excess_noise_classical(false),
        ANALYTIC,
    );
    push(
        "excess-noise threshold, known phase",
        (5.0f64.sqrt() - 1.0) / 2.0,
        analysis::excess_noise_classical(true),
        ANALYTIC,
    );
    push(
        "threshold ratio unknown/known",
        5.0f64.sqrt() + 1.0,
        analysis::excess_noise_classical(false) / analysis::excess_noise_classical(true),
        ANALYTIC,
    );

    Ok(checks)
}

fn mc_checks(trajectories: u64, seed: u64) -> Result<Vec<Check>> {
    let fin = CloneCount::Finite;
    let mut checks = Vec::new();
    let cases: [(&'static str, Machine, CloneParams); 2] = [
        (
            "symmetric 1->2 fidelity, Monte Carlo",
            Machine::Symmetric,
            CloneParams::new(1, fin(2)).with_alpha(Complex::new(0.5, -0.3)),
        ),
        (
            "known-phase 1->2 fidelity, Monte Carlo",
            Machine::KnownPhase,
            CloneParams::new(1, fin(2)).with_alpha(Complex::new(0.5, 0.0)),
        ),
    ];
    for (label, machine, params) in cases {
        let rep = clone_report(machine, &params)?;
        let cfg = McConfig::new(machine, params)
            .with_trajectories(trajectories)
            .with_seed(seed);
        let est = crate::mc::mc_fidelity(&cfg)?;
        checks.push(Check {
            label,
            expected: rep.fidelity_analytic,
            computed: est.mean,
            tol: 4.0 * est.stderr + 1e-12,
        });
    }
    Ok(checks)
}
