//! File formats: self-describing JSON and binary containers for sampled
//! functions, coefficient arrays, operator matrices, measures and spectra.

use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;
use qha_core::array::NdArray;
use qha_core::grid::{ConfigGrid, Geometry, KernelGrid, PhaseGrid, Sampled};
use qha_core::hermite::{CoefficientArray, HermiteBasis};
use qha_core::linalg::CMatrix;
use qha_core::restriction::{Atom, CompactMeasure};
use qha_core::schatten::SingularSpectrum;
use qha_core::weyl::OperatorMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RunError};

const MAGIC: &[u8; 4] = b"QHA1";

fn interleave(values: &[C64]) -> Vec<f64> {
    values.iter().flat_map(|v| [v.re, v.im]).collect()
}

fn deinterleave(what: &'static str, flat: &[f64]) -> Result<Vec<C64>> {
    if flat.len() % 2 != 0 {
        return Err(RunError::format(what, "odd number of interleaved reals"));
    }
    Ok(flat.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect())
}

/// Lattice families that can be written to and read from a container header.
pub trait GridFormat: Geometry + Sized {
    const KIND: &'static str;
    fn axes(&self) -> Vec<String>;
    fn from_header(h: &GridHeader) -> Result<Self>;
}

fn axis_names(prefix: (&str, &str), d: usize) -> Vec<String> {
    [prefix.0, prefix.1].iter().flat_map(|p| (0..d).map(move |k| if d == 1 { p.to_string() } else { format!("{p}{k}") })).collect()
}

impl GridFormat for PhaseGrid {
    const KIND: &'static str = "phase";
    fn axes(&self) -> Vec<String> {
        axis_names(("x", "xi"), self.d)
    }
    fn from_header(h: &GridHeader) -> Result<Self> {
        Ok(PhaseGrid::new(h.d, h.l, h.n)?)
    }
}

impl GridFormat for ConfigGrid {
    const KIND: &'static str = "config";
    fn axes(&self) -> Vec<String> {
        axis_names(("x", "x"), self.d).into_iter().take(self.d).collect()
    }
    fn from_header(h: &GridHeader) -> Result<Self> {
        Ok(ConfigGrid::new(h.d, h.l, h.n)?)
    }
}

impl GridFormat for KernelGrid {
    const KIND: &'static str = "kernel";
    fn axes(&self) -> Vec<String> {
        axis_names(("t", "x"), self.config.d)
    }
    fn from_header(h: &GridHeader) -> Result<Self> {
        Ok(KernelGrid { config: ConfigGrid::new(h.d, h.l, h.n)? })
    }
}

/// `{kind, d, L, N, axes}` header of a sampled-function container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridHeader {
    pub kind: String,
    pub d: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub axes: Vec<String>,
}

fn header_of<G: GridFormat>(g: &G) -> GridHeader {
    let d = if G::KIND == "config" { g.dims() } else { g.dims() / 2 };
    GridHeader { kind: G::KIND.into(), d, l: g.half_width(), n: g.samples(), axes: g.axes() }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampledJson {
    header: GridHeader,
    samples: Vec<f64>,
}

fn rebuild<G: GridFormat>(header: &GridHeader, samples: Vec<C64>) -> Result<Sampled<G>> {
    if header.kind != G::KIND {
        return Err(RunError::format("grid container", format!("expected kind {:?}, found {:?}", G::KIND, header.kind)));
    }
    let grid = G::from_header(header)?;
    let values = NdArray::from_vec(&grid.shape(), samples)?;
    Ok(Sampled::new(grid, values)?)
}

pub fn sampled_to_json<G: GridFormat>(f: &Sampled<G>) -> String {
    let doc = SampledJson { header: header_of(f.grid()), samples: interleave(f.values().as_slice()) };
    serde_json::to_string(&doc).expect("finite samples serialize")
}

pub fn sampled_from_json<G: GridFormat>(text: &str) -> Result<Sampled<G>> {
    let doc: SampledJson = serde_json::from_str(text).map_err(|e| RunError::format("grid container", e))?;
    rebuild(&doc.header, deinterleave("grid container", &doc.samples)?)
}

/// `QHA1`, little-endian `u32` header length, JSON header, then
/// little-endian `f64` pairs `(re, im)` in row-major order.
pub fn sampled_to_binary<G: GridFormat>(f: &Sampled<G>) -> Vec<u8> {
    let header = serde_json::to_vec(&header_of(f.grid())).expect("header serializes");
    let mut out = Vec::with_capacity(8 + header.len() + 16 * f.values().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(&header);
    for v in f.values().as_slice() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn sampled_from_binary<G: GridFormat>(bytes: &[u8]) -> Result<Sampled<G>> {
    let bad = |reason: &str| RunError::format("binary grid container", reason);
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(bad("missing magic bytes"));
    }
    let hlen = u32::from_le_bytes(bytes[4..8].try_into().expect("four bytes")) as usize;
    let body = bytes.get(8..8 + hlen).ok_or_else(|| bad("truncated header"))?;
    let header: GridHeader = serde_json::from_slice(body).map_err(|e| RunError::format("binary grid container", e))?;
    let data = &bytes[8 + hlen..];
    if data.len() % 16 != 0 {
        return Err(bad("sample block is not a whole number of complex doubles"));
    }
    let samples = data
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("eight bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("eight bytes"));
            C64::new(re, im)
        })
        .collect();
    rebuild(&header, samples)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientJson {
    d: usize,
    #[serde(rename = "M")]
    m: usize,
    order: String,
    values: Vec<f64>,
}

pub fn coefficients_to_json(c: &CoefficientArray) -> String {
    let doc = CoefficientJson { d: c.d, m: c.m, order: "lex".into(), values: interleave(&c.values) };
    serde_json::to_string(&doc).expect("finite coefficients serialize")
}

pub fn coefficients_from_json(text: &str) -> Result<CoefficientArray> {
    let doc: CoefficientJson = serde_json::from_str(text).map_err(|e| RunError::format("coefficient array", e))?;
    if doc.order != "lex" {
        return Err(RunError::format("coefficient array", format!("unsupported order {:?}", doc.order)));
    }
    Ok(CoefficientArray::new(doc.d, doc.m, deinterleave("coefficient array", &doc.values)?)?)
}

/// Operator matrix plus the basis parameters needed to rebuild it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorJson {
    d: usize,
    #[serde(rename = "M")]
    m: usize,
    order: String,
    #[serde(rename = "L_x")]
    l_x: f64,
    #[serde(rename = "N_x")]
    n_x: usize,
    scale: f64,
    entries: Vec<f64>,
}

pub fn operator_to_json(t: &OperatorMatrix) -> String {
    let b = t.basis();
    let doc = OperatorJson {
        d: b.d(),
        m: b.m(),
        order: "lex".into(),
        l_x: b.grid().l,
        n_x: b.grid().n,
        scale: b.scale(),
        entries: interleave(t.entries().as_slice()),
    };
    serde_json::to_string(&doc).expect("finite entries serialize")
}

/// Rebuilds the basis from the stored parameters, so leakage checks run again.
pub fn operator_from_json(text: &str) -> Result<OperatorMatrix> {
    let doc: OperatorJson = serde_json::from_str(text).map_err(|e| RunError::format("operator matrix", e))?;
    if doc.order != "lex" {
        return Err(RunError::format("operator matrix", format!("unsupported order {:?}", doc.order)));
    }
    let basis = HermiteBasis::with_scale(ConfigGrid::new(doc.d, doc.l_x, doc.n_x)?, doc.m, doc.scale)?;
    let n = basis.dim();
    let entries = CMatrix::from_vec(n, n, deinterleave("operator matrix", &doc.entries)?)?;
    Ok(OperatorMatrix::new(basis, entries)?)
}

/// `{atoms: [[z, w], …], center, radius}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub atoms: Vec<(Vec<f64>, f64)>,
    pub center: Vec<f64>,
    pub radius: f64,
}

impl MeasureFile {
    pub fn from_measure(mu: &CompactMeasure) -> Self {
        Self { atoms: mu.atoms().iter().map(|a| (a.z.clone(), a.w)).collect(), center: mu.center().to_vec(), radius: mu.radius() }
    }

    pub fn to_measure(&self) -> Result<CompactMeasure> {
        let atoms = self.atoms.iter().map(|(z, w)| Atom { z: z.clone(), w: *w }).collect();
        Ok(CompactMeasure::new(atoms, self.center.clone(), self.radius)?)
    }
}

pub fn measure_to_json(mu: &CompactMeasure) -> String {
    serde_json::to_string(&MeasureFile::from_measure(mu)).expect("finite measure serializes")
}

pub fn measure_from_json(text: &str) -> Result<CompactMeasure> {
    let doc: MeasureFile = serde_json::from_str(text).map_err(|e| RunError::format("measure", e))?;
    doc.to_measure()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumJson {
    singular_values: Vec<f64>,
}

pub fn spectrum_to_json(s: &SingularSpectrum) -> String {
    serde_json::to_string(&SpectrumJson { singular_values: s.values().to_vec() }).expect("finite spectrum serializes")
}

pub fn spectrum_from_json(text: &str) -> Result<SingularSpectrum> {
    let doc: SpectrumJson = serde_json::from_str(text).map_err(|e| RunError::format("spectrum", e))?;
    Ok(SingularSpectrum::new(doc.singular_values)?)
}

/// One CSV row per exponent: `p, norm, s0, s1, …`.
pub fn spectrum_to_csv(s: &SingularSpectrum, ps: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["p".to_string(), "norm".to_string()];
    head.extend((0..s.len()).map(|k| format!("s{k}")));
    w.write_record(&head).map_err(|e| RunError::format("spectrum csv", e))?;
    for &p in ps {
        let mut row = vec![crate::report::fmt_exponent(p), crate::report::fmt_num(s.schatten(p)?)];
        row.extend(s.values().iter().map(|v| crate::report::fmt_num(*v)));
        w.write_record(&row).map_err(|e| RunError::format("spectrum csv", e))?;
    }
    let bytes = w.into_inner().map_err(|e| RunError::format("spectrum csv", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}
