//! `dualent` command-line interface.
//!
//! Subcommands: `demo` runs the built-in activation checks, `sweep`
//! tabulates the frame-parameter curve, `threshold` locates the frame
//! separability boundary, and `twirl` prints the effective state of a
//! named input with its charge sectors.
//!
//! Exit codes: 0 on success, 1 on a failed check or I/O error, 2 on a
//! usage error.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dualent::siv::{siv_formation, werner_siv_closed_form, SivOptions};
use dualent::ssr::{local_charge_operator, sectors, twirl, ChargeAssignment};
use dualent::states::{hyper_state, system_with_frame, two_copies, werner, Party, PartyLayout};
use dualent::{
    duality_certificate, pdc_distinguishable, pdc_bosonic, ppt_report, relabel,
    symmetrized_distinguishable, werner_ppt_threshold, ComplexMatrix, LabelDof,
    QubitFactorization,
};
use output::{fmt12, to_csv, to_json, Manifest, SweepRow};

#[derive(Parser)]
#[command(
    name = "dualent",
    version,
    about = "Dual entanglement of distinguishable particles: effective states, PPT reports, frame variance"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the built-in demonstration checks and exit nonzero if any fails.
    ///
    /// Entanglement is certified when the minimum partial-transpose
    /// eigenvalue lies below -1e-10. Frame parameters smaller than about
    /// 4e-10 therefore report as not entangled.
    Demo {
        /// Frame parameter for the activation check.
        #[arg(long, default_value_t = 0.2)]
        p: f64,
    },
    /// Sweep the frame parameter and write a CSV or JSON table.
    Sweep {
        #[arg(long = "p-min", default_value_t = 0.0)]
        p_min: f64,
        #[arg(long = "p-max", default_value_t = 1.0)]
        p_max: f64,
        /// Number of rows, endpoints included.
        #[arg(long, default_value_t = 21)]
        steps: usize,
        /// Output file path.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Seed of the variance minimizer, recorded in the manifest.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Omit the timestamp so reruns are byte-identical.
        #[arg(long = "no-timestamp")]
        no_timestamp: bool,
    },
    /// Locate the frame separability threshold and the variance bound there.
    Threshold {
        /// Bisection tolerance.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Print the twirled effective state of a named input and its sectors.
    ///
    /// States: two-copies, rho-p:<p>, pdc-dist-pol, pdc-dist-mom, hyper.
    Twirl {
        state: String,
        /// Also print the full matrix, one row per line with 17
        /// significant digits per entry.
        #[arg(long)]
        dump: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Demo { p } => cmd_demo(p),
        Command::Sweep { p_min, p_max, steps, out, format, seed, no_timestamp } => {
            cmd_sweep(p_min, p_max, steps, &out, format, seed, no_timestamp)
        }
        Command::Threshold { tol } => cmd_threshold(tol),
        Command::Twirl { state, dump } => cmd_twirl(&state, dump),
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn run_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(1)
}

fn cmd_demo(p: f64) -> ExitCode {
    if !(0.0..=1.0).contains(&p) {
        return usage_error(&format!("--p must lie in [0, 1], got {p}"));
    }

    let mut failed: Option<&str> = None;

    // 1. bosonic pair: the same negativity no matter which degree of
    //    freedom labels the parties
    let bosonic = pdc_bosonic();
    let by_mom = relabel(&bosonic, LabelDof::Momentum).expect("labels are distinct");
    let by_pol = relabel(&bosonic, LabelDof::Polarization).expect("labels are distinct");
    let neg_m = ppt_report(&by_mom.rho, &by_mom.fact, &by_mom.layout)
        .expect("valid state")
        .negativity;
    let neg_p = ppt_report(&by_pol.rho, &by_pol.fact, &by_pol.layout)
        .expect("valid state")
        .negativity;
    let ok = (neg_m - neg_p).abs() < 1e-10 && neg_m > 1e-10;
    report_check(
        1,
        "bosonic duality",
        ok,
        &format!("negativity momentum = {}, polarization = {}", fmt12(neg_m), fmt12(neg_p)),
    );
    if !ok {
        failed.get_or_insert("bosonic duality");
    }

    // 2. distinguishable pair without a frame: entangled under momentum
    //    labeling, operationally mixed under polarization labeling
    let dist = pdc_distinguishable();
    let by_mom = relabel(&dist, LabelDof::Momentum).expect("labels are distinct");
    let mom_eff = by_mom.twirled();
    let neg_m = ppt_report(&mom_eff, &by_mom.fact, &by_mom.layout)
        .expect("valid state")
        .negativity;
    let by_pol = relabel(&dist, LabelDof::Polarization).expect("labels are distinct");
    let pol_eff = by_pol.twirled();
    let neg_p = ppt_report(&pol_eff, &by_pol.fact, &by_pol.layout)
        .expect("valid state")
        .negativity;
    let ok = neg_m > 1e-10 && neg_p <= 1e-12;
    report_check(
        2,
        "no duality without a frame",
        ok,
        &format!(
            "twirled negativity momentum = {}, polarization = {}",
            fmt12(neg_m),
            fmt12(neg_p)
        ),
    );
    if !ok {
        failed.get_or_insert("no duality without a frame");
    }

    // 3. symmetrized distinguishable pair passes the duality test
    let sym = symmetrized_distinguishable();
    let mut sym_ok = true;
    let mut sym_values = Vec::new();
    for label in [LabelDof::Momentum, LabelDof::Polarization] {
        let lab = relabel(&sym, label).expect("labels are distinct");
        let eff = lab.twirled();
        let neg = ppt_report(&eff, &lab.fact, &lab.layout).expect("valid state").negativity;
        sym_ok &= neg > 1e-10;
        sym_values.push(fmt12(neg));
    }
    report_check(
        3,
        "symmetrization simulates indistinguishability",
        sym_ok,
        &format!(
            "twirled negativity momentum = {}, polarization = {}",
            sym_values[0], sym_values[1]
        ),
    );
    if !sym_ok {
        failed.get_or_insert("symmetrization simulates indistinguishability");
    }

    // 4. a separable frame activates the dual entanglement
    let cert = duality_certificate(p).expect("p validated above");
    let ok = cert.frame_separable && cert.dual_entangled;
    let detail = format!(
        "p = {}, frame separable = {}, dual entangled = {}",
        fmt12(p),
        cert.frame_separable,
        cert.dual_entangled
    );
    report_check(4, "separable frame activates dual entanglement", ok, &detail);
    if !ok {
        failed.get_or_insert("separable frame activates dual entanglement");
        if !cert.dual_entangled {
            eprintln!(
                "note: the twirled total state at p = {} is not entangled; \
                 activation needs p > 0 (in practice p > 4e-10)",
                fmt12(p)
            );
        }
        if !cert.frame_separable {
            eprintln!(
                "note: the frame at p = {} is itself entangled; choose p < 1/3 \
                 to demonstrate activation by a separable frame",
                fmt12(p)
            );
        }
    }

    match failed {
        None => {
            println!("all checks passed");
            ExitCode::SUCCESS
        }
        Some(name) => run_error(&format!("check failed: {name}")),
    }
}

fn report_check(number: usize, name: &str, ok: bool, detail: &str) {
    println!("check {number}: {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
}

fn cmd_sweep(
    p_min: f64,
    p_max: f64,
    steps: usize,
    out: &PathBuf,
    format: Format,
    seed: u64,
    no_timestamp: bool,
) -> ExitCode {
    if !(0.0..=1.0).contains(&p_min) || !(0.0..=1.0).contains(&p_max) || p_min > p_max {
        return usage_error(&format!(
            "need 0 <= p-min <= p-max <= 1, got p-min = {p_min}, p-max = {p_max}"
        ));
    }
    if steps < 2 {
        return usage_error(&format!("--steps must be at least 2, got {steps}"));
    }

    let fact2 = QubitFactorization::new(2).expect("two slots fit");
    let layout2 = PartyLayout::new(vec![0], vec![1], 2).expect("valid layout");
    let charges2 = ChargeAssignment::per_particle_slot(2);
    let n_a = local_charge_operator(&fact2, &layout2, Party::Alice, &charges2);
    let charges4 = ChargeAssignment::per_particle_slot(4);
    let opts = SivOptions { seed, ..SivOptions::default() };

    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let p = p_min + (p_max - p_min) * i as f64 / (steps - 1) as f64;

        let swf = system_with_frame(p).expect("p validated above");
        let eff = twirl(&swf.rho, &swf.fact, &swf.layout, &charges4);
        let dual = ppt_report(&eff, &swf.fact, &swf.layout).expect("twirled state is valid");

        let frame = werner(p).expect("p validated above");
        let frame_report = ppt_report(&frame, &fact2, &layout2).expect("frame is valid");

        let closed = werner_siv_closed_form(p).expect("p validated above").value;
        let minimizer = siv_formation(&frame, &n_a, &charges2, &opts)
            .expect("frame has no cross-charge coherence")
            .value;

        let ratio = if closed > 0.0 { minimizer / closed } else { f64::NAN };
        println!(
            "p = {}: min_pt_eigenvalue = {}, negativity = {}, frame_separable = {}, \
             siv_closed_form = {} (unnormalized), siv_minimizer = {} (factor-four), \
             minimizer/closed-form = {}",
            fmt12(p),
            fmt12(dual.min_eigenvalue),
            fmt12(dual.negativity),
            !frame_report.entangled,
            fmt12(closed),
            fmt12(minimizer),
            if ratio.is_nan() { "n/a".to_string() } else { fmt12(ratio) },
        );

        rows.push(SweepRow {
            p,
            min_pt_eigenvalue: dual.min_eigenvalue,
            negativity: dual.negativity,
            frame_separable: !frame_report.entangled,
            siv_closed_form: closed,
            siv_minimizer: minimizer,
        });
    }

    let timestamp_unix_s = if no_timestamp {
        None
    } else {
        Some(
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        )
    };
    let manifest = Manifest { seed, timestamp_unix_s };
    let contents = match format {
        Format::Csv => to_csv(&rows),
        Format::Json => to_json(&rows, &manifest),
    };
    if let Err(err) = std::fs::write(out, contents) {
        return run_error(&format!("cannot write {}: {err}", out.display()));
    }
    println!("wrote {} rows to {}", rows.len(), out.display());
    ExitCode::SUCCESS
}

fn cmd_threshold(tol: f64) -> ExitCode {
    if !(tol > 0.0) {
        return usage_error(&format!("--tol must be positive, got {tol}"));
    }
    let threshold = werner_ppt_threshold(tol);
    let bound = werner_siv_closed_form(threshold).expect("threshold lies in [0, 1]").value;
    println!("frame separability threshold: p* = {} (tol {})", fmt12(threshold), fmt12(tol));
    println!(
        "frame variance bound at p*: {} (unnormalized convention; 1/24 = {})",
        fmt12(bound),
        fmt12(1.0 / 24.0)
    );
    ExitCode::SUCCESS
}

struct TwirlInput {
    rho: ComplexMatrix,
    fact: QubitFactorization,
    layout: PartyLayout,
    charges: ChargeAssignment,
}

fn twirl_input(name: &str) -> Result<TwirlInput, String> {
    if let Some(arg) = name.strip_prefix("rho-p:") {
        let p: f64 = arg.parse().map_err(|_| format!("cannot parse frame parameter {arg:?}"))?;
        let swf = system_with_frame(p).map_err(|e| e.to_string())?;
        return Ok(TwirlInput {
            rho: swf.rho,
            fact: swf.fact,
            layout: swf.layout,
            charges: ChargeAssignment::per_particle_slot(4),
        });
    }
    match name {
        "two-copies" => Ok(TwirlInput {
            rho: two_copies().density(),
            fact: QubitFactorization::new(4).expect("4 slots fit"),
            layout: PartyLayout::new(vec![0, 1], vec![2, 3], 4).expect("valid layout"),
            charges: ChargeAssignment::per_particle_slot(4),
        }),
        "pdc-dist-pol" | "pdc-dist-mom" => {
            let label =
                if name.ends_with("pol") { LabelDof::Polarization } else { LabelDof::Momentum };
            let lab = relabel(&pdc_distinguishable(), label).expect("labels are distinct");
            Ok(TwirlInput { rho: lab.rho, fact: lab.fact, layout: lab.layout, charges: lab.charges })
        }
        "hyper" => Ok(TwirlInput {
            rho: hyper_state().density(),
            // parties are the two particles: (pol1, mom1) vs (pol2, mom2)
            fact: QubitFactorization::new(4).expect("4 slots fit"),
            layout: PartyLayout::new(vec![0, 2], vec![1, 3], 4).expect("valid layout"),
            charges: ChargeAssignment::chargeless(4),
        }),
        other => Err(format!(
            "unknown state {other:?}; expected two-copies, rho-p:<p>, pdc-dist-pol, \
             pdc-dist-mom or hyper"
        )),
    }
}

fn cmd_twirl(name: &str, dump: bool) -> ExitCode {
    let input = match twirl_input(name) {
        Ok(input) => input,
        Err(message) => return usage_error(&message),
    };
    let eff = twirl(&input.rho, &input.fact, &input.layout, &input.charges);

    println!(
        "state {name}: {} slots, alice {:?}, bob {:?}",
        input.fact.num_qubits(),
        input.layout.alice(),
        input.layout.bob()
    );
    let nonzero = (0..eff.dim())
        .flat_map(|r| (0..eff.dim()).map(move |c| (r, c)))
        .filter(|&(r, c)| eff.get(r, c).norm() > 1e-12)
        .count();
    println!("twirled effective state: {nonzero} nonzero entries of {0}x{0}", eff.dim());

    let decomposition =
        sectors(&eff, &input.fact, &input.layout, &input.charges).expect("twirled state");
    println!("sectors (q_alice, q_bob): dimension, basis indices");
    for sector in &decomposition.sectors {
        println!(
            "  ({}, {}): dim {}, indices {:?}",
            sector.charges.0,
            sector.charges.1,
            sector.indices.len(),
            sector.indices
        );
    }

    if dump {
        println!("twirled matrix dump:");
        print!("{}", eff.dump());
    }
    ExitCode::SUCCESS
}
