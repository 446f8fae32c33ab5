//! Report emission: JSON and CSV writers with lossless 17-significant-digit
//! numbers and atomic file replacement (temp file + rename).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use redmap_core::{
    AugmentationReport, ComplexMatrix, ConventionFit, ConventionSearchReport, DimensionRatio,
    GateConvention, JointPureState, McReport, ProfilePoint, ResolvedConvention, RootBranch,
    ScenarioReport, ScenarioVerdict, Slot, StateReading, SweepRow, TensorOrder,
};
use serde::{Deserialize, Serialize};

use crate::run::CliError;

/// 17 significant digits: enough for a lossless f64 round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// serde_json formatter that prints every float with 17 significant digits.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.7e}")
    }
}

/// Serialize to JSON text with the fixed-precision float format.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Scenario(format!("JSON serialization failed: {e}")))?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| CliError::Scenario(format!("non-UTF8 JSON: {e}")))
}

/// Write bytes atomically: to `<path>.tmp` in the same directory, then rename.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Io(dir.to_path_buf(), e.to_string()))?;
        }
    }
    let tmp: PathBuf = {
        let mut os = path.as_os_str().to_owned();
        os.push(".tmp");
        PathBuf::from(os)
    };
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::Io(tmp.clone(), e.to_string()))?;
    f.write_all(content.as_bytes())
        .map_err(|e| CliError::Io(tmp.clone(), e.to_string()))?;
    f.sync_all().map_err(|e| CliError::Io(tmp.clone(), e.to_string()))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| CliError::Io(path.to_path_buf(), e.to_string()))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// DTOs mirroring the domain types field for field
// ---------------------------------------------------------------------------

fn slot_str(s: Slot) -> &'static str {
    match s {
        Slot::First => "first",
        Slot::Second => "second",
    }
}

pub fn parse_slot(s: &str) -> Result<Slot, CliError> {
    match s {
        "first" => Ok(Slot::First),
        "second" => Ok(Slot::Second),
        other => Err(CliError::Usage(format!("unknown slot '{other}' (first|second)"))),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ConventionDto {
    pub control_slot: String,
    pub root_branch: String,
    pub tensor_order: String,
    pub state_reading: String,
}

impl ConventionDto {
    pub fn from_core(c: &ResolvedConvention) -> Self {
        ConventionDto {
            control_slot: slot_str(c.gate.control_slot).into(),
            root_branch: match c.gate.root_branch {
                RootBranch::Principal => "principal".into(),
                RootBranch::Alternate => "alternate".into(),
            },
            tensor_order: match c.gate.tensor_order {
                TensorOrder::SysEnv => "sys_env".into(),
                TensorOrder::EnvSys => "env_sys".into(),
            },
            state_reading: match c.reading {
                StateReading::EnvSystem => "env_system".into(),
                StateReading::SystemEnv => "system_env".into(),
            },
        }
    }

    pub fn to_core(&self) -> Result<ResolvedConvention, CliError> {
        Ok(ResolvedConvention {
            gate: GateConvention {
                control_slot: parse_slot(&self.control_slot)?,
                root_branch: match self.root_branch.as_str() {
                    "principal" => RootBranch::Principal,
                    "alternate" => RootBranch::Alternate,
                    other => {
                        return Err(CliError::Usage(format!(
                            "unknown root_branch '{other}' (principal|alternate)"
                        )))
                    }
                },
                tensor_order: match self.tensor_order.as_str() {
                    "sys_env" => TensorOrder::SysEnv,
                    "env_sys" => TensorOrder::EnvSys,
                    other => {
                        return Err(CliError::Usage(format!(
                            "unknown tensor_order '{other}' (sys_env|env_sys)"
                        )))
                    }
                },
            },
            reading: match self.state_reading.as_str() {
                "env_system" => StateReading::EnvSystem,
                "system_env" => StateReading::SystemEnv,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown state_reading '{other}' (env_system|system_env)"
                    )))
                }
            },
        })
    }
}

/// Matrix record {d_s, re[][], im[][]} used for map and Choi matrices.
#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixDto {
    pub d_s: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixDto {
    pub fn from_core(m: &ComplexMatrix, d_s: usize) -> Self {
        let mut re = Vec::with_capacity(m.rows());
        let mut im = Vec::with_capacity(m.rows());
        for i in 0..m.rows() {
            let mut row_re = Vec::with_capacity(m.cols());
            let mut row_im = Vec::with_capacity(m.cols());
            for j in 0..m.cols() {
                let z = m.get(i, j);
                row_re.push(z.re);
                row_im.push(z.im);
            }
            re.push(row_re);
            im.push(row_im);
        }
        MatrixDto { d_s, re, im }
    }
}

/// State record {d_first, d_second, system_slot, re[], im[]}.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDto {
    pub d_first: usize,
    pub d_second: usize,
    pub system_slot: String,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateDto {
    pub fn from_core(psi: &JointPureState) -> Self {
        StateDto {
            d_first: psi.d_first(),
            d_second: psi.d_second(),
            system_slot: slot_str(psi.system_slot()).into(),
            re: psi.amplitudes().iter().map(|z| z.re).collect(),
            im: psi.amplitudes().iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_core(&self) -> Result<JointPureState, CliError> {
        if self.re.len() != self.im.len() {
            return Err(CliError::Usage("state re[] and im[] lengths differ".into()));
        }
        let amps: Vec<redmap_core::Complex64> = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| redmap_core::Complex64::new(r, i))
            .collect();
        JointPureState::new(amps, self.d_first, self.d_second, parse_slot(&self.system_slot)?)
            .map_err(|e| CliError::Usage(format!("invalid state record: {e}")))
    }
}

#[derive(Debug, Serialize)]
pub struct NamedMatrixDto {
    pub name: String,
    #[serde(flatten)]
    pub matrix: MatrixDto,
}

#[derive(Debug, Serialize)]
pub struct ScenarioReportDto {
    pub scenario_id: String,
    pub theta: f64,
    pub convention: ConventionDto,
    pub matrices: Vec<NamedMatrixDto>,
    pub spectrum: Vec<f64>,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub verdict: String,
    pub min_choi_eigenvalue: f64,
    pub residual_vs_reference: Option<f64>,
}

impl ScenarioReportDto {
    pub fn from_core(r: &ScenarioReport) -> Self {
        ScenarioReportDto {
            scenario_id: r.scenario_id.clone(),
            theta: r.theta,
            convention: ConventionDto::from_core(&r.convention),
            matrices: r
                .matrices
                .iter()
                .map(|(name, m)| NamedMatrixDto {
                    name: name.clone(),
                    matrix: MatrixDto::from_core(m, 2),
                })
                .collect(),
            spectrum: r.spectrum.clone(),
            lambda_minus: r.lambda_minus,
            lambda_plus: r.lambda_plus,
            verdict: r.verdict.as_str().into(),
            min_choi_eigenvalue: r.min_choi_eigenvalue,
            residual_vs_reference: r.residual_vs_reference,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ConventionFitDto {
    #[serde(flatten)]
    pub convention: ConventionDto,
    pub residual_maps: f64,
    pub residual_spectrum: f64,
    pub residual_product_identity: f64,
    pub sup_residual: f64,
    pub reproduces_maps: bool,
    pub reproduces_spectrum: bool,
    pub reproduces_product_identity: bool,
}

impl ConventionFitDto {
    pub fn from_core(f: &ConventionFit) -> Self {
        ConventionFitDto {
            convention: ConventionDto::from_core(&ResolvedConvention {
                gate: f.gate,
                reading: f.reading,
            }),
            residual_maps: f.residual_maps,
            residual_spectrum: f.residual_spectrum,
            residual_product_identity: f.residual_product_identity,
            sup_residual: f.sup_residual,
            reproduces_maps: f.reproduces_maps(),
            reproduces_spectrum: f.reproduces_spectrum(),
            reproduces_product_identity: f.reproduces_product_identity(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ConventionSearchDto {
    pub winner: ConventionFitDto,
    pub table: Vec<ConventionFitDto>,
}

impl ConventionSearchDto {
    pub fn from_core(r: &ConventionSearchReport) -> Self {
        ConventionSearchDto {
            winner: ConventionFitDto::from_core(&r.winner),
            table: r.table.iter().map(ConventionFitDto::from_core).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct McReportDto {
    pub ensemble: String,
    pub n_samples: usize,
    pub seed: u64,
    pub fraction: f64,
    pub stderr: f64,
    pub cp: usize,
    pub ncp: usize,
    pub singular: usize,
}

impl McReportDto {
    pub fn from_core(r: &McReport, ensemble: &str, n: usize, seed: u64) -> Self {
        McReportDto {
            ensemble: ensemble.into(),
            n_samples: n,
            seed,
            fraction: r.fraction,
            stderr: r.stderr,
            cp: r.cp,
            ncp: r.ncp,
            singular: r.singular,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PreInitialDto {
    pub found: bool,
    pub s: Option<f64>,
    pub entropy_bits_at_phi: f64,
    /// The searched state, in the standard state record.
    pub phi: StateDto,
}

#[derive(Debug, Serialize)]
pub struct DimRatioRowDto {
    pub d_s: u32,
    pub d_e: u32,
    pub exact: f64,
    pub approx: f64,
    pub limit: f64,
}

impl DimRatioRowDto {
    pub fn from_core(d_s: u32, d_e: u32, r: &DimensionRatio) -> Self {
        DimRatioRowDto {
            d_s,
            d_e,
            exact: r.exact,
            approx: r.approx,
            limit: r.limit,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AugmentRowDto {
    pub u_l: String,
    pub locality_preserved: bool,
    pub verdict: String,
    pub min_choi_eigenvalue: f64,
    pub spectrum: Vec<f64>,
}

impl AugmentRowDto {
    pub fn from_core(label: &str, r: &AugmentationReport) -> Self {
        AugmentRowDto {
            u_l: label.into(),
            locality_preserved: r.locality_preserved,
            verdict: r.verdict.as_str().into(),
            min_choi_eigenvalue: r.min_choi_eigenvalue,
            spectrum: r.spectrum.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

/// Sweep CSV: `theta,lambda_minus,lambda_plus,verdict,residual`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("theta,lambda_minus,lambda_plus,verdict,residual\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.theta),
            fmt_f64(r.lambda_minus),
            fmt_f64(r.lambda_plus),
            r.verdict.as_str(),
            r.residual.map(fmt_f64).unwrap_or_else(|| "nan".into()),
        ));
    }
    out
}

/// Entropy profile CSV: t, reduced entries, entropies, residual.
pub fn profile_csv(points: &[ProfilePoint]) -> String {
    let mut out = String::from(
        "t,rho00_re,rho01_re,rho01_im,rho11_re,entropy_bits,entropy_nats,residual\n",
    );
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_f64(p.t),
            fmt_f64(p.reduced_system.get(0, 0).re),
            fmt_f64(p.reduced_system.get(0, 1).re),
            fmt_f64(p.reduced_system.get(0, 1).im),
            fmt_f64(p.reduced_system.get(1, 1).re),
            fmt_f64(p.entropy_bits),
            fmt_f64(p.entropy_nats),
            fmt_f64(p.residual_vs_reference),
        ));
    }
    out
}

/// Dimension-ratio CSV.
pub fn dimratio_csv(rows: &[DimRatioRowDto]) -> String {
    let mut out = String::from("d_s,d_e,exact,approx,limit\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.d_s,
            r.d_e,
            fmt_f64(r.exact),
            fmt_f64(r.approx),
            fmt_f64(r.limit)
        ));
    }
    out
}

/// Augmentation CSV.
pub fn augment_csv(rows: &[AugmentRowDto]) -> String {
    let mut out = String::from("u_l,locality_preserved,verdict,min_choi_eigenvalue\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.u_l,
            r.locality_preserved,
            r.verdict,
            fmt_f64(r.min_choi_eigenvalue)
        ));
    }
    out
}

/// Convention table CSV.
pub fn conventions_csv(rep: &ConventionSearchDto) -> String {
    let mut out = String::from(
        "control_slot,root_branch,tensor_order,state_reading,residual_maps,residual_spectrum,\
         residual_product_identity,sup_residual,reproduces_maps,reproduces_spectrum,\
         reproduces_product_identity,winner\n",
    );
    for f in &rep.table {
        let is_winner = f.convention.control_slot == rep.winner.convention.control_slot
            && f.convention.root_branch == rep.winner.convention.root_branch
            && f.convention.tensor_order == rep.winner.convention.tensor_order
            && f.convention.state_reading == rep.winner.convention.state_reading;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            f.convention.control_slot,
            f.convention.root_branch,
            f.convention.tensor_order,
            f.convention.state_reading,
            fmt_f64(f.residual_maps),
            fmt_f64(f.residual_spectrum),
            fmt_f64(f.residual_product_identity),
            fmt_f64(f.sup_residual),
            f.reproduces_maps,
            f.reproduces_spectrum,
            f.reproduces_product_identity,
            is_winner,
        ));
    }
    out
}

/// Parse a sweep CSV back into rows (round-trip check support).
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, CliError> {
    let mut rows = Vec::new();
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "theta,lambda_minus,lambda_plus,verdict,residual" {
        return Err(CliError::Usage(format!("unexpected CSV header '{header}'")));
    }
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            return Err(CliError::Usage(format!("CSV row {idx} has {} fields", parts.len())));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad float '{s}' in CSV row {idx}: {e}")))
        };
        let verdict = match parts[3] {
            "CP" => ScenarioVerdict::Cp,
            "NCP" => ScenarioVerdict::Ncp,
            "SINGULAR" => ScenarioVerdict::Singular,
            other => return Err(CliError::Usage(format!("bad verdict '{other}' in CSV"))),
        };
        rows.push(SweepRow {
            theta: parse(parts[0])?,
            lambda_minus: parse(parts[1])?,
            lambda_plus: parse(parts[2])?,
            verdict,
            residual: if parts[4] == "nan" {
                None
            } else {
                Some(parse(parts[4])?)
            },
        });
    }
    Ok(rows)
}
