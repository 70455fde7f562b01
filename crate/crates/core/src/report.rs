//! Versioned JSON and CSV output.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::coefficients::{beta, ProblemInstance};
use crate::error::Result;
use crate::evolution::csv_err;
use crate::lattice::{self, LatticeVector};
use crate::spectra::SpectrumReport;

pub const SCHEMA_VERSION: u32 = 1;

pub const KIND_SLICES: &str = "slices";
pub const KIND_SPECTRUM: &str = "spectrum";
pub const KIND_EVOLUTION: &str = "evolution";
pub const KIND_RESOLVENT: &str = "resolvent";
pub const KIND_SUMMARY: &str = "summary";

/// `{"schema": 1, "kind": ..., <body fields>}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub schema: u32,
    pub kind: String,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Document<T> {
    pub fn new(kind: &str, body: T) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            kind: kind.to_string(),
            body,
        }
    }

    pub fn to_json(&self, pretty: bool) -> Result<String> {
        let mut s = if pretty {
            serde_json::to_string_pretty(self)?
        } else {
            serde_json::to_string(self)?
        };
        s.push('\n');
        Ok(s)
    }
}

impl<T: DeserializeOwned> Document<T> {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceEntry {
    pub qhat: LatticeVector,
    pub window: Option<(i64, i64)>,
    pub in_disk: usize,
    pub beta: [f64; 2],
    pub beta_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlicesReport {
    pub instance: ProblemInstance,
    pub kappa: usize,
    pub slices: Vec<SliceEntry>,
}

pub fn slices_report(inst: &ProblemInstance) -> Result<SlicesReport> {
    let slices = lattice::contributing_slices(inst.p)?
        .into_iter()
        .map(|s| {
            let b = beta(inst.p, s.qhat, inst.gamma);
            SliceEntry {
                qhat: s.qhat,
                window: s.window,
                in_disk: s.in_disk_count(),
                beta: [b.re, b.im],
                beta_abs: b.norm(),
            }
        })
        .collect();
    Ok(SlicesReport {
        instance: inst.clone(),
        kappa: lattice::kappa(inst.p)?,
        slices,
    })
}

/// One row per eigenvalue of every contributing slice:
/// `qhat_x,qhat_y,re,im,converged`.
pub fn write_spectrum_csv<W: std::io::Write>(report: &SpectrumReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["qhat_x", "qhat_y", "re", "im", "converged"])
        .map_err(csv_err)?;
    for s in &report.per_slice {
        for z in &s.eigenvalues {
            out.write_record([
                s.slice.qhat.x.to_string(),
                s.slice.qhat.y.to_string(),
                format!("{:e}", z.re),
                format!("{:e}", z.im),
                s.converged.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_slices_csv<W: std::io::Write>(report: &SlicesReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "qhat_x", "qhat_y", "n_lo", "n_hi", "beta_re", "beta_im", "beta_abs",
    ])
    .map_err(csv_err)?;
    for s in &report.slices {
        let (lo, hi) = s.window.map_or((String::new(), String::new()), |(a, b)| {
            (a.to_string(), b.to_string())
        });
        out.write_record([
            s.qhat.x.to_string(),
            s.qhat.y.to_string(),
            lo,
            hi,
            format!("{:e}", s.beta[0]),
            format!("{:e}", s.beta[1]),
            format!("{:e}", s.beta_abs),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// `tau,norm,outer_norm` rows.
pub fn write_resolvent_csv<W: std::io::Write>(
    r: &crate::spectra::ResolventReport,
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["tau", "norm", "outer_norm"])
        .map_err(csv_err)?;
    for ((t, s), o) in r.taus.iter().zip(&r.samples).zip(&r.outer_slice_samples) {
        out.write_record([format!("{t:e}"), format!("{s:e}"), format!("{o:e}")])
            .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads only the `schema` and `kind` fields of a document.
pub fn peek_kind(json: &str) -> Option<(u32, String)> {
    #[derive(Deserialize)]
    struct Head {
        schema: u32,
        kind: String,
    }
    serde_json::from_str::<Head>(json)
        .ok()
        .map(|h| (h.schema, h.kind))
}
