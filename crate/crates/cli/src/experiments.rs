//! One function per subcommand, each turning a validated config into a record.

use num_complex::Complex64;
use pft_core::dressing::{dressed_transfer_check, random_unitary, DressingSpec};
use pft_core::dynamics::{disorder_fidelities, fidelity_sweep, FactorizedPropagator};
use pft_core::fock::function_transfer_check;
use pft_core::fock::transfer::TransferFit;
use pft_core::lattice::CouplingProfile;
use pft_core::verify::{run_suite, Scalar};
use pft_core::{mirror_site, SiteIndex};

use crate::config::{DressingName, Experiment, Resolved};
use crate::error::{CliError, CliResult};
use crate::record::{Column, ResultRecord, Table, Value};

/// A finished record plus whether every assertion in it held.
pub struct Outcome {
    pub record: ResultRecord,
    pub passed: bool,
}

pub fn run(r: &Resolved, config_hash: String) -> CliResult<Outcome> {
    let mut record = ResultRecord::new(r.experiment.name(), config_hash);
    let passed = match r.experiment {
        Experiment::Couplings => couplings(r, &mut record).map(|_| true),
        Experiment::Evolve => evolve(r, &mut record).map(|_| true),
        Experiment::Fidelity => fidelity(r, &mut record).map(|_| true),
        Experiment::Sweep => sweep(r, &mut record).map(|_| true),
        Experiment::Disorder => disorder(r, &mut record).map(|_| true),
        Experiment::Dressing => dressing(r, &mut record).map(|_| true),
        Experiment::Verify => verify(r, &mut record),
    }?;
    Ok(Outcome { record, passed })
}

fn during(r: &Resolved) -> impl Fn(pft_core::PftError) -> CliError + '_ {
    move |e| CliError::during(r.experiment.name(), e)
}

/// The one J shared by every axis, for experiments defined at t0.
fn common_coupling(r: &Resolved) -> CliResult<f64> {
    match r.t0 {
        Some(_) => Ok(r.couplings[0]),
        None => Err(CliError::validation(
            "couplings",
            format!(
                "{} needs the same nonzero J on every axis",
                r.experiment.name()
            ),
        )),
    }
}

fn site_columns(rank: usize) -> Vec<Column> {
    (1..=rank)
        .map(|a| Column::plain(&format!("x{a}")))
        .collect()
}

fn site_cells(site: &SiteIndex) -> Vec<Value> {
    site.coords.iter().map(|&c| Value::int(c)).collect()
}

fn couplings(r: &Resolved, rec: &mut ResultRecord) -> CliResult<()> {
    let rank = r.dims.rank();
    let mut columns = Vec::new();
    if rank > 1 {
        columns.push(Column::plain("axis"));
    }
    columns.push(Column::plain("j"));
    columns.push(Column::plain("value"));
    let mut table = Table::new(columns);
    for (axis, (&extent, &j)) in r.dims.extents().iter().zip(&r.couplings).enumerate() {
        let profile = CouplingProfile::engineered(axis, extent, j)
            .map_err(|e| CliError::field("couplings", e))?;
        for (k, &v) in profile.values.iter().enumerate() {
            let mut row = Vec::new();
            if rank > 1 {
                row.push(Value::int(axis + 1));
            }
            row.push(Value::int(k + 1));
            row.push(Value::real(v));
            table.push(row);
        }
    }
    if let Some(t0) = r.t0 {
        rec.set("transfer_time", Value::real(t0));
    }
    rec.table = Some(table);
    Ok(())
}

fn evolve(r: &Resolved, rec: &mut ResultRecord) -> CliResult<()> {
    let u = FactorizedPropagator::analytic(&r.dims, &r.couplings, r.time).map_err(during(r))?;
    let mut columns = site_columns(r.dims.rank());
    columns.push(Column::complex("amplitude"));
    columns.push(Column::plain("probability"));
    let mut table = Table::new(columns);
    let mut norm = 0.0;
    for site in r.dims.sites() {
        let a = u.amplitude(&site, &r.source);
        norm += a.norm_sqr();
        let mut row = site_cells(&site);
        row.push(Value::complex(a));
        row.push(Value::real(a.norm_sqr()));
        table.push(row);
    }
    rec.set("time", Value::real(r.time));
    rec.set("norm", Value::real(norm.sqrt()));
    rec.table = Some(table);
    Ok(())
}

fn fit_scalars(rec: &mut ResultRecord, fit: &TransferFit) {
    rec.set("fidelity", Value::real(fit.fidelity));
    rec.set("per_particle_phase", Value::complex(fit.per_particle_phase));
    rec.set("rigidity_residual", Value::real(fit.rigidity_residual));
}

fn sector_scalars(rec: &mut ResultRecord, fit: &TransferFit) {
    for s in &fit.sector_phases {
        rec.set(&format!("sector_phase.n{}", s.n), Value::complex(s.phase));
        rec.set(&format!("sector_weight.n{}", s.n), Value::real(s.weight));
    }
}

fn fidelity(r: &Resolved, rec: &mut ResultRecord) -> CliResult<()> {
    rec.set("time", Value::real(r.time));
    let Some(f) = &r.function else {
        let u = FactorizedPropagator::analytic(&r.dims, &r.couplings, r.time).map_err(during(r))?;
        let a = u.amplitude(&r.target, &r.source);
        rec.set("amplitude", Value::complex(a));
        rec.set("fidelity", Value::real(a.norm_sqr().min(1.0)));
        return Ok(());
    };
    common_coupling(r)?;
    let mirror = mirror_site(&r.source, &r.dims).map_err(|e| CliError::field("source", e))?;
    if r.target != mirror {
        return Err(CliError::validation(
            "target",
            "a function is always compared with its mirror image; leave target unset",
        ));
    }
    let model = r.model()?;
    let report = function_transfer_check(&model, &r.couplings, f, r.time).map_err(during(r))?;
    fit_scalars(rec, &report.fit);
    rec.set("expected_phase", Value::complex(report.expected_phase));
    rec.set("phase_error", Value::real(report.phase_error));
    sector_scalars(rec, &report.fit);
    Ok(())
}

fn sweep(r: &Resolved, rec: &mut ResultRecord) -> CliResult<()> {
    let series = fidelity_sweep(
        &r.dims,
        &r.couplings,
        &r.source,
        &r.target,
        &r.times,
        r.mode,
    )
    .map_err(during(r))?;
    let mut table = Table::new(vec![Column::plain("t"), Column::plain("fidelity")]);
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for &(t, f) in &series {
        if f > best.1 {
            best = (t, f);
        }
        table.push(vec![Value::real(t), Value::real(f)]);
    }
    rec.set("best_time", Value::real(best.0));
    rec.set("best_fidelity", Value::real(best.1));
    rec.table = Some(table);
    Ok(())
}

fn disorder(r: &Resolved, rec: &mut ResultRecord) -> CliResult<()> {
    common_coupling(r)?;
    let seeds: Vec<u64> = (0..r.samples as u64)
        .map(|k| r.seed.wrapping_add(k))
        .collect();
    let fids = disorder_fidelities(&r.dims, &r.couplings, &r.source, r.epsilon, &seeds, r.mode)
        .map_err(during(r))?;
    let n = fids.len() as f64;
    let mean = fids.iter().sum::<f64>() / n;
    let var = fids.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / n;
    let mut table = Table::new(vec![
        Column::plain("sample"),
        Column::plain("seed"),
        Column::plain("fidelity"),
    ]);
    for (k, (&s, &f)) in seeds.iter().zip(&fids).enumerate() {
        table.push(vec![Value::int(k), Value::UInt(s), Value::real(f)]);
    }
    rec.set("epsilon", Value::real(r.epsilon));
    rec.set("mean_fidelity", Value::real(mean));
    rec.set(
        "min_fidelity",
        Value::real(fids.iter().copied().fold(f64::INFINITY, f64::min)),
    );
    rec.set(
        "max_fidelity",
        Value::real(fids.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
    );
    rec.set("std_fidelity", Value::real(var.sqrt()));
    rec.table = Some(table);
    Ok(())
}

fn option_complex(rec: &mut ResultRecord, name: &str, z: Option<Complex64>) {
    if let Some(z) = z {
        rec.set(name, Value::complex(z));
    }
}

fn dressing(r: &Resolved, rec: &mut ResultRecord) -> CliResult<()> {
    common_coupling(r)?;
    let model = r.model()?;
    let f = r.function_or_default();
    let spec = match r.dressing {
        DressingName::Lz => DressingSpec::LzRotation(r.theta),
        DressingName::Random => {
            let degrees = f.degrees();
            let [n] = degrees.iter().copied().collect::<Vec<_>>()[..] else {
                return Err(CliError::validation(
                    "function",
                    "a random dressing acts on one sector; every term must have the same degree",
                ));
            };
            let dim = model
                .sector_dimension(n)
                .and_then(|d| usize::try_from(d).ok())
                .ok_or_else(|| {
                    CliError::validation("function", format!("sector n = {n} is too large"))
                })?;
            let w = random_unitary(dim, r.seed).map_err(|e| CliError::field("function", e))?;
            DressingSpec::Generic(w)
        }
    };
    let report =
        dressed_transfer_check(&model, &r.couplings, &spec, &f, r.time).map_err(during(r))?;
    fit_scalars(rec, &report.fit);
    rec.set("time", Value::real(r.time));
    rec.set("undressed_fidelity", Value::real(report.undressed_fidelity));
    rec.set(
        "fidelity_gap",
        Value::real((report.fit.fidelity - report.undressed_fidelity).abs()),
    );
    if r.dressing == DressingName::Lz {
        rec.set("theta", Value::real(r.theta));
    }
    option_complex(rec, "bare_frame_phase", report.bare_frame_phase);
    option_complex(rec, "source_dressing_phase", report.source_dressing_phase);
    option_complex(rec, "target_dressing_phase", report.target_dressing_phase);
    option_complex(rec, "quoted_phase", report.quoted_phase);
    sector_scalars(rec, &report.fit);
    Ok(())
}

fn verify(r: &Resolved, rec: &mut ResultRecord) -> CliResult<bool> {
    let report = run_suite(r.mode).map_err(during(r))?;
    let mut table = Table::new(vec![
        Column::plain("id"),
        Column::plain("name"),
        Column::plain("passed"),
        Column::plain("measured"),
        Column::plain("relation"),
        Column::plain("threshold"),
        Column::plain("within_budget"),
    ]);
    for o in &report.outcomes {
        table.push(vec![
            Value::int(o.id),
            Value::text(o.name),
            Value::Bool(o.passed),
            Value::real(o.measured),
            Value::text(o.relation.symbol()),
            Value::real(o.threshold),
            Value::Bool(o.within_budget),
        ]);
    }
    for (name, v) in &report.extras {
        let v = match *v {
            Scalar::Real(x) => Value::real(x),
            Scalar::Complex(z) => Value::complex(z),
        };
        rec.set(name, v);
    }
    let passed = report.all_passed();
    rec.set(
        "criteria_passed",
        Value::int(report.outcomes.iter().filter(|o| o.passed).count()),
    );
    rec.set("criteria_total", Value::int(report.outcomes.len()));
    for (id, d) in &report.timings {
        eprintln!("timing: criterion {id}: {:.3} s", d.as_secs_f64());
    }
    rec.table = Some(table);
    Ok(passed)
}
