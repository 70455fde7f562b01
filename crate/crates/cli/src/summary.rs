//! Aggregates earlier run documents into one summary, grouped by instance.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use euler_spectrum::evolution::{MappingReport, FLAT_RATE};
use euler_spectrum::report::{
    peek_kind, Document, SlicesReport, KIND_EVOLUTION, KIND_RESOLVENT, KIND_SLICES, KIND_SPECTRUM,
    KIND_SUMMARY, SCHEMA_VERSION,
};
use euler_spectrum::spectra::{ResolventReport, SpectrumReport};
use euler_spectrum::{Circulation, LatticeVector, ProblemInstance};

use crate::commands::{emit, Verdict};
use crate::config::{Format, Output};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub file: String,
    pub kind: String,
    pub p: LatticeVector,
    pub gamma: Circulation,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub p: LatticeVector,
    pub gamma: Circulation,
    pub files: Vec<String>,
    pub spectral_abscissa: Option<f64>,
    pub growth_rates: Vec<f64>,
    /// Growth rates against the spectrum of the same instance, when both exist.
    pub rates_consistent: Option<bool>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub entries: Vec<SummaryEntry>,
    pub instances: Vec<InstanceSummary>,
    pub ok: bool,
}

enum Parsed {
    Slices(SlicesReport),
    Spectrum(SpectrumReport),
    Evolution(MappingReport),
    Resolvent(ResolventReport),
}

impl Parsed {
    fn instance(&self) -> &ProblemInstance {
        match self {
            Parsed::Slices(r) => &r.instance,
            Parsed::Spectrum(r) => &r.instance,
            Parsed::Evolution(r) => &r.instance,
            Parsed::Resolvent(r) => &r.instance,
        }
    }

    fn verdict(&self) -> (bool, String) {
        match self {
            Parsed::Slices(r) => (
                r.kappa % 2 == 0,
                format!("{} slices, kappa {}", r.slices.len(), r.kappa),
            ),
            Parsed::Spectrum(r) => (
                r.converged && r.bound_ok && r.symmetry_ok,
                format!(
                    "{} nonimaginary of bound {}, symmetric {}, converged {}",
                    r.count,
                    2 * r.kappa,
                    r.symmetry_ok,
                    r.converged
                ),
            ),
            Parsed::Evolution(r) => (
                r.ok && r.spectrum_converged,
                format!(
                    "K {}, rates {:?}, target {} +/- {}",
                    r.box_half_width,
                    r.rates(),
                    r.target,
                    r.tolerance
                ),
            ),
            Parsed::Resolvent(r) => (
                r.far_field_ok && r.tail_ok,
                format!(
                    "K {}, a {}, max norm {}, far field {}, tail {}",
                    r.box_half_width,
                    r.a,
                    r.samples.iter().copied().fold(0.0, f64::max),
                    r.far_field_ok,
                    r.tail_ok
                ),
            ),
        }
    }
}

fn parse(text: &str) -> Result<Option<(String, Parsed)>, CliError> {
    let Some((schema, kind)) = peek_kind(text) else {
        return Ok(None);
    };
    if schema != SCHEMA_VERSION {
        return Ok(None);
    }
    let parsed = match kind.as_str() {
        KIND_SLICES => Parsed::Slices(Document::from_json(text)?.body),
        KIND_SPECTRUM => Parsed::Spectrum(Document::from_json(text)?.body),
        KIND_EVOLUTION => Parsed::Evolution(Document::from_json(text)?.body),
        KIND_RESOLVENT => Parsed::Resolvent(Document::from_json(text)?.body),
        _ => return Ok(None),
    };
    Ok(Some((kind, parsed)))
}

/// Files named directly plus `*.json` files directly inside named
/// directories, in sorted order.
fn collect_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(path)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else if path.is_file() {
            files.push(path.clone());
        } else {
            return Err(CliError::Usage(format!("no such file: {}", path.display())));
        }
    }
    Ok(files)
}

fn key(inst: &ProblemInstance) -> (i64, i64, u64, u64) {
    (
        inst.p.x,
        inst.p.y,
        inst.gamma.a().to_bits(),
        inst.gamma.b().to_bits(),
    )
}

pub fn summarize(paths: &[PathBuf]) -> Result<Summary, CliError> {
    let mut entries = Vec::new();
    let mut groups: BTreeMap<_, Vec<(String, Parsed)>> = BTreeMap::new();
    for file in collect_files(paths)? {
        let text = std::fs::read_to_string(&file)?;
        let Some((kind, parsed)) = parse(&text)? else {
            continue;
        };
        let label = file.display().to_string();
        let (ok, detail) = parsed.verdict();
        let inst = parsed.instance();
        entries.push(SummaryEntry {
            file: label.clone(),
            kind,
            p: inst.p,
            gamma: inst.gamma,
            ok,
            detail,
        });
        groups.entry(key(inst)).or_default().push((label, parsed));
    }
    if entries.is_empty() {
        return Err(CliError::Usage("nothing to report".into()));
    }

    let instances = groups.into_values().map(|docs| link(&docs)).collect();
    let ok = entries.iter().all(|e| e.ok);
    Ok(Summary {
        entries,
        instances,
        ok,
    })
}

fn link(docs: &[(String, Parsed)]) -> InstanceSummary {
    let inst = docs[0].1.instance();
    let mut spectral: Option<Option<f64>> = None;
    let mut rates = Vec::new();
    for (_, d) in docs {
        match d {
            Parsed::Spectrum(r) if r.converged => spectral = Some(r.spectral_abscissa()),
            Parsed::Evolution(r) => rates.extend(r.rates()),
            _ => {}
        }
    }
    let rates_consistent = match spectral {
        Some(abscissa) if !rates.is_empty() => Some(rates.iter().all(|&r| match abscissa {
            Some(a) => (r - a.max(0.0)).abs() <= (0.05 * a.abs()).max(FLAT_RATE),
            None => r <= FLAT_RATE,
        })),
        _ => None,
    };
    let ok = docs.iter().all(|(_, d)| d.verdict().0) && rates_consistent != Some(false);
    InstanceSummary {
        p: inst.p,
        gamma: inst.gamma,
        files: docs.iter().map(|(f, _)| f.clone()).collect(),
        spectral_abscissa: spectral.flatten(),
        growth_rates: rates,
        rates_consistent,
        ok,
    }
}

fn write_csv(summary: &Summary, w: &mut dyn std::io::Write) -> std::io::Result<()> {
    writeln!(w, "file,kind,p_x,p_y,gamma_re,gamma_im,ok")?;
    for e in &summary.entries {
        writeln!(
            w,
            "{},{},{},{},{:e},{:e},{}",
            csv_field(&e.file),
            e.kind,
            e.p.x,
            e.p.y,
            e.gamma.a(),
            e.gamma.b(),
            e.ok
        )?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn report(paths: &[PathBuf], out: &Output) -> Result<Verdict, CliError> {
    let summary = summarize(paths)?;
    let failed = summary.entries.iter().filter(|e| !e.ok).count();
    eprintln!(
        "{} documents over {} instances, {} failing",
        summary.entries.len(),
        summary.instances.len(),
        failed
    );
    let verdict = if summary.ok {
        Verdict::Pass
    } else {
        Verdict::Violation
    };
    match out.format {
        Format::Json => {
            let text = Document::new(KIND_SUMMARY, summary).to_json(out.pretty)?;
            emit(out, |w| Ok(w.write_all(text.as_bytes())?))?;
        }
        Format::Csv => emit(out, |w| Ok(write_csv(&summary, w)?))?,
    }
    Ok(verdict)
}

pub fn default_paths() -> Vec<PathBuf> {
    vec![Path::new(".").to_path_buf()]
}
