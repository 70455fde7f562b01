//! One function per subcommand. Each writes its document and returns the
//! verdict that becomes the exit code.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde::{Deserialize, Serialize};

use euler_spectrum::evolution::{
    evolve_operator, resolve_dt, spectral_mapping_check, trial_initial_state, MappingReport,
};
use euler_spectrum::exec::ExecMode;
use euler_spectrum::operators::build_l2d;
use euler_spectrum::report::{
    slices_report, write_resolvent_csv, write_slices_csv, write_spectrum_csv, Document,
    KIND_EVOLUTION, KIND_RESOLVENT, KIND_SLICES, KIND_SPECTRUM,
};
use euler_spectrum::spectra::{nonimaginary_spectrum_with, resolvent_report};

use crate::config::{Format, Output, Resolved};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Violation,
    Unconverged,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Violation => 1,
            Verdict::Unconverged => 3,
        }
    }

    fn from_checks(converged: bool, ok: bool) -> Self {
        if !converged {
            Verdict::Unconverged
        } else if ok {
            Verdict::Pass
        } else {
            Verdict::Violation
        }
    }
}

pub(crate) fn emit(
    out: &Output,
    body: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match &out.path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &Output, kind: &str, body: T) -> Result<(), CliError> {
    let text = Document::new(kind, body).to_json(out.pretty)?;
    emit(out, |w| Ok(w.write_all(text.as_bytes())?))
}

pub fn slices(cfg: &Resolved) -> Result<Verdict, CliError> {
    let rep = slices_report(&cfg.instance)?;
    eprintln!(
        "p = {}: {} slices, kappa = {}",
        cfg.instance.p,
        rep.slices.len(),
        rep.kappa
    );
    let ok = rep.kappa % 2 == 0;
    match cfg.output.format {
        Format::Json => emit_json(&cfg.output, KIND_SLICES, rep)?,
        Format::Csv => emit(&cfg.output, |w| Ok(write_slices_csv(&rep, w)?))?,
    }
    Ok(Verdict::from_checks(true, ok))
}

pub fn spectrum(cfg: &Resolved) -> Result<Verdict, CliError> {
    let rep = nonimaginary_spectrum_with(&cfg.instance, ExecMode::default())?;
    eprintln!(
        "p = {}: {} nonimaginary eigenvalues, bound 2kappa = {}, symmetric: {}, converged: {}",
        cfg.instance.p,
        rep.count,
        2 * rep.kappa,
        rep.symmetry_ok,
        rep.converged
    );
    let verdict = Verdict::from_checks(rep.converged, rep.bound_ok && rep.symmetry_ok);
    match cfg.output.format {
        Format::Json => emit_json(&cfg.output, KIND_SPECTRUM, rep)?,
        Format::Csv => emit(&cfg.output, |w| Ok(write_spectrum_csv(&rep, w)?))?,
    }
    Ok(verdict)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
}

/// Evolution document: the mapping check plus the norm history of trial 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionOutput {
    #[serde(flatten)]
    pub mapping: MappingReport,
    pub trajectory: Series,
}

pub fn evolve(cfg: &Resolved) -> Result<Verdict, CliError> {
    let mapping = spectral_mapping_check(&cfg.instance, cfg.k, &cfg.settings, ExecMode::default())?;
    let op = build_l2d(&cfg.instance, cfg.k)?;
    let omega0 = trial_initial_state(cfg.k, cfg.settings.seed, 0);
    let traj = evolve_operator(
        &op,
        &omega0,
        cfg.settings.t_final,
        resolve_dt(&op, &cfg.settings),
    )?;
    let rates: Vec<String> = mapping.rates().iter().map(|r| format!("{r:.6}")).collect();
    eprintln!(
        "p = {}, K = {}: growth rates [{}], target {:.6} +/- {:.6}, ok: {}",
        cfg.instance.p,
        cfg.k,
        rates.join(", "),
        mapping.target,
        mapping.tolerance,
        mapping.ok
    );
    let verdict = Verdict::from_checks(mapping.spectrum_converged, mapping.ok);
    match cfg.output.format {
        Format::Json => {
            let out = EvolutionOutput {
                mapping,
                trajectory: Series {
                    times: traj.times,
                    norms: traj.norms,
                },
            };
            emit_json(&cfg.output, KIND_EVOLUTION, out)?
        }
        Format::Csv => emit(&cfg.output, |w| Ok(traj.write_csv(w)?))?,
    }
    Ok(verdict)
}

pub fn resolvent(cfg: &Resolved) -> Result<Verdict, CliError> {
    let rep = resolvent_report(&cfg.instance, cfg.k, cfg.a, &cfg.taus, ExecMode::default())?;
    let max = rep.samples.iter().copied().fold(0.0, f64::max);
    eprintln!(
        "p = {}, K = {}, a = {}: max norm {:.6}, far field ok: {}, tail ok: {}",
        cfg.instance.p, cfg.k, cfg.a, max, rep.far_field_ok, rep.tail_ok
    );
    let verdict = Verdict::from_checks(true, rep.far_field_ok && rep.tail_ok);
    match cfg.output.format {
        Format::Json => emit_json(&cfg.output, KIND_RESOLVENT, rep)?,
        Format::Csv => emit(&cfg.output, |w| Ok(write_resolvent_csv(&rep, w)?))?,
    }
    Ok(verdict)
}
