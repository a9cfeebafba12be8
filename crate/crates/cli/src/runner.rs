//! Experiment runners: each takes a validated configuration, executes its
//! trials with counter-derived per-trial seeds, and produces one nested
//! JSON report plus flat rows for CSV output. Every row carries the seed
//! and parameters that reproduce it.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use qloc_core::adversary::{
    relay_attack_delay, run_cloner_attack, run_relay_attack, AttackSpec, ClonerModel,
};
use qloc_core::coding::BsmMode;
use qloc_core::masking::{ensemble_fidelity_stats, mask_uniformity};
use qloc_core::protocol::{run_protocol, Alphabet, VerificationReport};
use qloc_core::qstate::rng_from_seed;

use crate::config::{mask_kind_label, trial_seed, ExperimentConfig, ExperimentKind, OutputFormat};
use crate::Failure;

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

fn alphabet_label(alphabet: Alphabet) -> &'static str {
    match alphabet {
        Alphabet::Bell => "bell",
        Alphabet::Ghz => "ghz",
    }
}

fn bsm_label(mode: BsmMode) -> &'static str {
    match mode {
        BsmMode::Full => "full",
        BsmMode::LinearOptics => "linear_optics",
    }
}

fn model_label(model: ClonerModel) -> &'static str {
    match model {
        ClonerModel::Bernoulli => "bernoulli",
        ClonerModel::StateLevel => "state_level",
    }
}

/// Worst observed round-trip excess across stations, seconds.
fn worst_excess(report: &VerificationReport) -> f64 {
    report
        .timing
        .iter()
        .map(|r| r.excess())
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Serialize)]
pub struct VerifyRow {
    experiment: &'static str,
    trial: usize,
    seed: u64,
    num_systems: usize,
    alphabet: &'static str,
    bsm_mode: &'static str,
    mask_kind: String,
    timing_tol: f64,
    verdict: &'static str,
    correct: usize,
    sequence_match: bool,
    max_rtt_excess: f64,
    confidence_against_cloner: f64,
}

#[derive(Debug, Serialize)]
pub struct ClonerRow {
    experiment: &'static str,
    trial: usize,
    seed: u64,
    num_systems: usize,
    fidelity: f64,
    model: &'static str,
    passed: bool,
    correct: usize,
    analytic_pass_probability: f64,
}

#[derive(Debug, Serialize)]
pub struct RelayRow {
    experiment: &'static str,
    trial: usize,
    seed: u64,
    num_systems: usize,
    devices: usize,
    exclusion_radius: f64,
    passed: bool,
    correct: usize,
    best_device: usize,
    max_timing_excess: f64,
    analytic_pass_probability: f64,
}

#[derive(Debug, Serialize)]
pub struct MaskStatsRow {
    experiment: &'static str,
    seed: u64,
    num_qubits: usize,
    mask_kind: String,
    samples: usize,
    mean_fidelity: f64,
    stddev_fidelity: Option<f64>,
    min_fidelity: f64,
    max_fidelity: f64,
    p0: Option<f64>,
    p1: Option<f64>,
    p2: Option<f64>,
    p3: Option<f64>,
    p4: Option<f64>,
    p5: Option<f64>,
    p6: Option<f64>,
    p7: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    experiment: &'static str,
    base: &'static str,
    param: String,
    value: f64,
    trial: usize,
    seed: u64,
    num_systems: usize,
    passed: bool,
    correct: usize,
    max_timing_excess: f64,
    analytic_pass_probability: Option<f64>,
}

/// Flat rows, one table shape per experiment family.
#[derive(Debug)]
pub enum RowTable {
    Verify(Vec<VerifyRow>),
    Cloner(Vec<ClonerRow>),
    Relay(Vec<RelayRow>),
    MaskStats(Vec<MaskStatsRow>),
    Sweep(Vec<SweepRow>),
}

/// Everything a finished experiment hands back to the front end.
#[derive(Debug)]
pub struct Outcome {
    pub exit: i32,
    pub json: serde_json::Value,
    pub rows: RowTable,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Outcome, Failure> {
    match config.experiment {
        ExperimentKind::Verify => run_verify(config),
        ExperimentKind::CloneAttack => run_clone_attack(config),
        ExperimentKind::RelayAttack => run_relay(config),
        ExperimentKind::MaskStats => run_mask_stats(config),
        ExperimentKind::Sweep => Err(Failure::Config(
            "sweep experiments run through the sweep subcommand, \
             which supplies --param and --values"
                .into(),
        )),
    }
}

fn run_verify(config: &ExperimentConfig) -> Result<Outcome, Failure> {
    let master = config.protocol.seed;
    let mut rows = Vec::with_capacity(config.trials);
    let mut trials_json = Vec::with_capacity(config.trials);
    let mut verified = 0usize;
    for trial in 0..config.trials {
        let seed = trial_seed(master, trial);
        let mut protocol = config.protocol.clone();
        protocol.seed = seed;
        let report = run_protocol(&protocol).map_err(runtime)?;
        verified += usize::from(report.verdict.is_verified());
        rows.push(VerifyRow {
            experiment: "verify",
            trial,
            seed,
            num_systems: protocol.num_systems,
            alphabet: alphabet_label(protocol.alphabet),
            bsm_mode: bsm_label(protocol.bsm_mode),
            mask_kind: mask_kind_label(protocol.mask_kind),
            timing_tol: protocol.timing_tol,
            verdict: if report.verdict.is_verified() {
                "verified"
            } else {
                "rejected"
            },
            correct: report.correct.iter().filter(|&&c| c).count(),
            sequence_match: report.sequence_match,
            max_rtt_excess: worst_excess(&report),
            confidence_against_cloner: report.confidence_against_cloner,
        });
        trials_json.push(json!({ "trial": trial, "seed": seed, "report": report }));
    }
    let exit = if verified == config.trials { 0 } else { 1 };
    let json = json!({
        "experiment": "verify",
        "config": config,
        "verified_fraction": verified as f64 / config.trials as f64,
        "trials": trials_json,
    });
    Ok(Outcome {
        exit,
        json,
        rows: RowTable::Verify(rows),
    })
}

fn run_clone_attack(config: &ExperimentConfig) -> Result<Outcome, Failure> {
    let (fidelity, model) = match &config.attack {
        Some(AttackSpec::Cloner { fidelity, model }) => (*fidelity, *model),
        _ => return Err(Failure::Config("clone_attack needs a cloner section".into())),
    };
    let master = config.protocol.seed;
    let mut rows = Vec::with_capacity(config.trials);
    let mut trials_json = Vec::with_capacity(config.trials);
    let mut passes = 0usize;
    let mut analytic = 0.0;
    for trial in 0..config.trials {
        let seed = trial_seed(master, trial);
        let mut protocol = config.protocol.clone();
        protocol.seed = seed;
        let report = run_cloner_attack(&protocol, fidelity, model).map_err(runtime)?;
        passes += usize::from(report.passed);
        analytic = report.analytic_pass_probability;
        rows.push(ClonerRow {
            experiment: "clone_attack",
            trial,
            seed,
            num_systems: protocol.num_systems,
            fidelity,
            model: model_label(model),
            passed: report.passed,
            correct: report.num_correct(),
            analytic_pass_probability: report.analytic_pass_probability,
        });
        trials_json.push(json!({ "trial": trial, "seed": seed, "report": report }));
    }
    let json = json!({
        "experiment": "clone_attack",
        "config": config,
        "analytic_pass_probability": analytic,
        "empirical_pass_rate": passes as f64 / config.trials as f64,
        "trials": trials_json,
    });
    Ok(Outcome {
        exit: 0,
        json,
        rows: RowTable::Cloner(rows),
    })
}

fn run_relay(config: &ExperimentConfig) -> Result<Outcome, Failure> {
    let spec = match &config.attack {
        Some(spec @ AttackSpec::Relay { .. }) => spec,
        _ => return Err(Failure::Config("relay_attack needs a relay section".into())),
    };
    let (devices, exclusion_radius) = match spec {
        AttackSpec::Relay {
            devices,
            exclusion_radius,
        } => (devices, *exclusion_radius),
        AttackSpec::Cloner { .. } => unreachable!("matched above"),
    };
    let delay = relay_attack_delay(
        &config.protocol.stations,
        devices,
        &config.protocol.claimed_location,
    )
    .map_err(runtime)?;

    let master = config.protocol.seed;
    let mut rows = Vec::with_capacity(config.trials);
    let mut trials_json = Vec::with_capacity(config.trials);
    let mut passes = 0usize;
    let mut analytic = 0.0;
    for trial in 0..config.trials {
        let seed = trial_seed(master, trial);
        let mut protocol = config.protocol.clone();
        protocol.seed = seed;
        let report = run_relay_attack(&protocol, spec).map_err(runtime)?;
        passes += usize::from(report.passed);
        analytic = report.analytic_pass_probability;
        rows.push(RelayRow {
            experiment: "relay_attack",
            trial,
            seed,
            num_systems: protocol.num_systems,
            devices: devices.len(),
            exclusion_radius,
            passed: report.passed,
            correct: report.num_correct(),
            best_device: delay.best_device,
            max_timing_excess: delay.max_excess,
            analytic_pass_probability: report.analytic_pass_probability,
        });
        trials_json.push(json!({ "trial": trial, "seed": seed, "report": report }));
    }
    let json = json!({
        "experiment": "relay_attack",
        "config": config,
        "delay": delay,
        "analytic_pass_probability": analytic,
        "empirical_pass_rate": passes as f64 / config.trials as f64,
        "trials": trials_json,
    });
    Ok(Outcome {
        exit: 0,
        json,
        rows: RowTable::Relay(rows),
    })
}

fn run_mask_stats(config: &ExperimentConfig) -> Result<Outcome, Failure> {
    let num_qubits = config.protocol.alphabet.num_qubits();
    let kind = config.protocol.mask_kind;
    let samples = config.trials;
    let seed = config.protocol.seed;
    let mut rng = rng_from_seed(seed);
    let fidelity = ensemble_fidelity_stats(num_qubits, kind, samples, &mut rng).map_err(runtime)?;
    let uniformity = mask_uniformity(num_qubits, kind, samples, &mut rng).map_err(runtime)?;

    let p = |i: usize| uniformity.get(i).copied();
    let rows = vec![MaskStatsRow {
        experiment: "mask_stats",
        seed,
        num_qubits,
        mask_kind: mask_kind_label(kind),
        samples,
        mean_fidelity: fidelity.mean,
        stddev_fidelity: fidelity.stddev,
        min_fidelity: fidelity.min,
        max_fidelity: fidelity.max,
        p0: p(0),
        p1: p(1),
        p2: p(2),
        p3: p(3),
        p4: p(4),
        p5: p(5),
        p6: p(6),
        p7: p(7),
    }];
    let json = json!({
        "experiment": "mask_stats",
        "config": config,
        "num_qubits": num_qubits,
        "samples": samples,
        "fidelity": fidelity,
        "uniformity": { "trials": samples, "mean_probabilities": uniformity },
    });
    Ok(Outcome {
        exit: 0,
        json,
        rows: RowTable::MaskStats(rows),
    })
}

/// Set the swept parameter on a configuration copy.
fn apply_param(config: &mut ExperimentConfig, param: &str, value: f64) -> Result<(), Failure> {
    match param {
        "num_systems" => {
            if !(value.is_finite() && value > 0.0 && value.fract() == 0.0) {
                return Err(Failure::Config(format!(
                    "num_systems values must be positive integers, got {value}"
                )));
            }
            config.protocol.num_systems = value as usize;
        }
        "timing_tol" => config.protocol.timing_tol = value,
        "quantum_channel_speed" => config.protocol.quantum_channel_speed = value,
        "processing_delay" => config.protocol.processing_delay = value,
        "fidelity" => match &mut config.attack {
            Some(AttackSpec::Cloner { fidelity, .. }) => *fidelity = value,
            _ => {
                return Err(Failure::Config(
                    "the fidelity parameter applies to cloner attacks only".into(),
                ))
            }
        },
        other => {
            return Err(Failure::Config(format!(
                "unknown sweep parameter {other}; expected one of num_systems, fidelity, \
                 timing_tol, quantum_channel_speed, processing_delay"
            )))
        }
    }
    Ok(())
}

fn sweep_base(config: &ExperimentConfig) -> &'static str {
    match &config.attack {
        None => "verify",
        Some(AttackSpec::Cloner { .. }) => "clone_attack",
        Some(AttackSpec::Relay { .. }) => "relay_attack",
    }
}

/// One swept value: run every trial and summarize.
fn sweep_value(variant: &ExperimentConfig, param: &str, value: f64) -> SweepValueResult {
    let base = sweep_base(variant);
    let master = variant.protocol.seed;
    let mut rows = Vec::with_capacity(variant.trials);
    let mut passes = 0usize;
    let mut analytic = None;
    for trial in 0..variant.trials {
        let seed = trial_seed(master, trial);
        let mut protocol = variant.protocol.clone();
        protocol.seed = seed;
        let (passed, correct, max_timing_excess, trial_analytic) = match &variant.attack {
            None => {
                let report = run_protocol(&protocol).map_err(runtime)?;
                let correct = report.correct.iter().filter(|&&c| c).count();
                (
                    report.verdict.is_verified(),
                    correct,
                    worst_excess(&report),
                    None,
                )
            }
            Some(AttackSpec::Cloner { fidelity, model }) => {
                let report = run_cloner_attack(&protocol, *fidelity, *model).map_err(runtime)?;
                let excess = report.timing_excess.iter().cloned().fold(0.0, f64::max);
                (
                    report.passed,
                    report.num_correct(),
                    excess,
                    Some(report.analytic_pass_probability),
                )
            }
            Some(spec @ AttackSpec::Relay { .. }) => {
                let report = run_relay_attack(&protocol, spec).map_err(runtime)?;
                let excess = report.timing_excess.iter().cloned().fold(0.0, f64::max);
                (
                    report.passed,
                    report.num_correct(),
                    excess,
                    Some(report.analytic_pass_probability),
                )
            }
        };
        passes += usize::from(passed);
        analytic = trial_analytic;
        rows.push(SweepRow {
            experiment: "sweep",
            base,
            param: param.to_string(),
            value,
            trial,
            seed,
            num_systems: protocol.num_systems,
            passed,
            correct,
            max_timing_excess,
            analytic_pass_probability: analytic,
        });
    }
    let summary = json!({
        "param": param,
        "value": value,
        "empirical_pass_rate": passes as f64 / variant.trials as f64,
        "analytic_pass_probability": analytic,
        "trials": serde_json::to_value(&rows).map_err(runtime)?,
    });
    Ok((rows, summary))
}

type SweepValueResult = Result<(Vec<SweepRow>, serde_json::Value), Failure>;

/// Run the configured experiment once per value, one worker thread per
/// value. Merging is order-independent: results land in slots indexed by
/// the value's position, so rows always come out grouped by value in the
/// order given, trials ascending within each group.
pub fn run_sweep(
    config: &ExperimentConfig,
    param: &str,
    values: &[f64],
) -> Result<Outcome, Failure> {
    if values.is_empty() {
        return Err(Failure::Config("sweep needs at least one value".into()));
    }
    let mut variants = Vec::with_capacity(values.len());
    for &value in values {
        let mut variant = config.clone();
        apply_param(&mut variant, param, value)?;
        variant.validate().map_err(Failure::Config)?;
        variants.push(variant);
    }

    let mut slots: Vec<Option<SweepValueResult>> =
        std::iter::repeat_with(|| None).take(values.len()).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = variants
            .iter()
            .zip(values)
            .map(|(variant, &value)| scope.spawn(move || sweep_value(variant, param, value)))
            .collect();
        for (slot, handle) in slots.iter_mut().zip(handles) {
            *slot = Some(handle.join().expect("sweep worker panicked"));
        }
    });

    let mut rows = Vec::new();
    let mut results = Vec::with_capacity(values.len());
    for slot in slots {
        let (value_rows, summary) = slot.expect("every slot is filled")?;
        rows.extend(value_rows);
        results.push(summary);
    }
    let json = json!({
        "experiment": "sweep",
        "config": config,
        "base": sweep_base(config),
        "param": param,
        "values": values,
        "results": results,
    });
    Ok(Outcome {
        exit: 0,
        json,
        rows: RowTable::Sweep(rows),
    })
}

fn write_csv<R: Serialize, W: Write>(rows: &[R], writer: W) -> Result<(), Failure> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    for row in rows {
        csv_writer.serialize(row).map_err(runtime)?;
    }
    csv_writer.flush().map_err(runtime)
}

pub(crate) fn emit<W: Write>(
    outcome: &Outcome,
    format: OutputFormat,
    mut writer: W,
) -> Result<(), Failure> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut writer, &outcome.json).map_err(runtime)?;
            writeln!(writer).map_err(runtime)
        }
        OutputFormat::Csv => match &outcome.rows {
            RowTable::Verify(rows) => write_csv(rows, writer),
            RowTable::Cloner(rows) => write_csv(rows, writer),
            RowTable::Relay(rows) => write_csv(rows, writer),
            RowTable::MaskStats(rows) => write_csv(rows, writer),
            RowTable::Sweep(rows) => write_csv(rows, writer),
        },
    }
}

/// Send the outcome to `out`, or stdout when no file is configured.
pub fn write_output(
    outcome: &Outcome,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                Failure::Runtime(format!("cannot write {}: {e}", path.display()))
            })?;
            emit(outcome, format, file)?;
            log::info!("wrote report to {}", path.display());
            Ok(())
        }
        None => emit(outcome, format, io::stdout().lock()),
    }
}
