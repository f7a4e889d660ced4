//! Plain-text data files.
//!
//! ```text
//! #MANIFEST {"version":"1","kind":"wavefunction","grids":[...],"params":{...},"provenance":"..."}
//! x re im
//! ...
//! ```
//!
//! Coordinates come first, then the value columns (complex values as real
//! and imaginary parts). Two-dimensional data is written in gnuplot's
//! blocked layout: one block per point of the first grid, separated by a
//! blank line. Numbers use 17 significant digits, so a write followed by a
//! read reproduces every value bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::grid::{RealField2D, SampledWavefunction, UniformGrid1D};
use crate::reconstruct::{DensityMatrix, PsiAutocorrelation, WignerFunction};
use crate::tomography::{FresnelTomogram, OpticalTomogram, TomogramPlane};

pub const FORMAT_VERSION: &str = "1";
const MANIFEST_PREFIX: &str = "#MANIFEST ";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("manifest: {0}")]
    Manifest(String),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Wavefunction,
    TomogramPlane,
    FresnelTomogram,
    DensityMatrix,
    Wigner,
    Autocorrelation,
    OpticalTomogram,
    WidthMap,
}

impl Kind {
    /// Number of grids in the manifest.
    pub fn grid_count(self) -> usize {
        match self {
            Kind::Wavefunction | Kind::Autocorrelation | Kind::DensityMatrix => 1,
            _ => 2,
        }
    }

    pub fn is_complex(self) -> bool {
        matches!(self, Kind::Wavefunction | Kind::Autocorrelation | Kind::DensityMatrix)
    }

    /// Grids spanned by the data: a density matrix uses its single grid twice.
    fn axes(self, grids: &[UniformGrid1D]) -> Vec<UniformGrid1D> {
        match self {
            Kind::DensityMatrix => vec![grids[0], grids[0]],
            _ => grids.to_vec(),
        }
    }

    fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: String,
    pub kind: Kind,
    pub grids: Vec<UniformGrid1D>,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub provenance: String,
}

impl Manifest {
    pub fn new(kind: Kind, grids: Vec<UniformGrid1D>) -> Self {
        Self { version: FORMAT_VERSION.into(), kind, grids, params: Map::new(), provenance: String::new() }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn param_f64(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(Value::as_f64)
    }

    fn check(&self) -> Result<(), FormatError> {
        if self.version != FORMAT_VERSION {
            return Err(FormatError::Manifest(format!("unsupported version {:?}", self.version)));
        }
        let want = self.kind.grid_count();
        if self.grids.len() != want {
            return Err(FormatError::Manifest(format!(
                "kind {} needs {want} grid(s), found {}",
                self.kind.name(),
                self.grids.len()
            )));
        }
        for g in &self.grids {
            if g.count() < 2 || !(g.step() > 0.0) || !g.start().is_finite() || !g.step().is_finite() {
                return Err(FormatError::Manifest(format!("invalid grid {g:?}")));
            }
        }
        if self.kind == Kind::TomogramPlane && self.param_f64("nu").is_none() {
            return Err(FormatError::Manifest("tomogram_plane needs a numeric \"nu\" parameter".into()));
        }
        Ok(())
    }
}

/// Sample values in file order.
#[derive(Debug, Clone, PartialEq)]
pub enum Data {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl Data {
    pub fn len(&self) -> usize {
        match self {
            Data::Real(v) => v.len(),
            Data::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    pub manifest: Manifest,
    pub data: Data,
}

fn num(out: &mut String, v: f64) {
    let _ = write!(out, "{v:.16e}");
}

impl DataFile {
    pub fn new(manifest: Manifest, data: Data) -> Result<Self, FormatError> {
        manifest.check()?;
        if manifest.kind.is_complex() != matches!(data, Data::Complex(_)) {
            return Err(FormatError::Manifest(format!("wrong value type for kind {}", manifest.kind.name())));
        }
        let expected: usize = manifest.kind.axes(&manifest.grids).iter().map(|g| g.count()).product();
        if data.len() != expected {
            return Err(FormatError::Manifest(format!("{} values for {expected} grid points", data.len())));
        }
        Ok(Self { manifest, data })
    }

    pub fn to_text(&self) -> String {
        let header = serde_json::to_string(&self.manifest).expect("manifest serialises");
        let axes = self.manifest.kind.axes(&self.manifest.grids);
        let mut out = String::with_capacity(64 * self.data.len() + header.len());
        out.push_str(MANIFEST_PREFIX);
        out.push_str(&header);
        out.push('\n');
        let inner = if axes.len() == 2 { axes[1].count() } else { 1 };
        for k in 0..self.data.len() {
            if axes.len() == 2 {
                let (i, j) = (k / inner, k % inner);
                if j == 0 && i > 0 {
                    out.push('\n');
                }
                num(&mut out, axes[0].point(i));
                out.push(' ');
                num(&mut out, axes[1].point(j));
            } else {
                num(&mut out, axes[0].point(k));
            }
            match &self.data {
                Data::Real(v) => {
                    out.push(' ');
                    num(&mut out, v[k]);
                }
                Data::Complex(v) => {
                    out.push(' ');
                    num(&mut out, v[k].re);
                    out.push(' ');
                    num(&mut out, v[k].im);
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
        let json = first.strip_prefix(MANIFEST_PREFIX).ok_or_else(|| parse_err(1, "missing #MANIFEST header"))?;
        let manifest: Manifest =
            serde_json::from_str(json).map_err(|e| parse_err(1, format!("bad manifest JSON: {e}")))?;
        manifest.check()?;
        let axes = manifest.kind.axes(&manifest.grids);
        let complex = manifest.kind.is_complex();
        let columns = axes.len() + if complex { 2 } else { 1 };
        let expected: usize = axes.iter().map(|g| g.count()).product();
        let inner = if axes.len() == 2 { axes[1].count() } else { 1 };

        let mut real = Vec::new();
        let mut cplx = Vec::new();
        let mut k = 0usize;
        for (n, line) in lines {
            let line_no = n + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if k >= expected {
                return Err(parse_err(line_no, format!("more than the {expected} data rows the grids call for")));
            }
            let fields: Vec<f64> = trimmed
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| parse_err(line_no, format!("not a number: {t:?}"))))
                .collect::<Result<_, _>>()?;
            if fields.len() != columns {
                return Err(parse_err(line_no, format!("expected {columns} columns, found {}", fields.len())));
            }
            let coords = if axes.len() == 2 {
                vec![axes[0].point(k / inner), axes[1].point(k % inner)]
            } else {
                vec![axes[0].point(k)]
            };
            for (c, (&got, want)) in fields.iter().zip(&coords).enumerate() {
                let tol = 1e-9 * axes[c].step();
                if !((got - want).abs() <= tol) {
                    return Err(parse_err(line_no, format!("coordinate {got} does not match grid node {want}")));
                }
            }
            let vals = &fields[axes.len()..];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(parse_err(line_no, "non-finite value"));
            }
            if complex {
                cplx.push(Complex64::new(vals[0], vals[1]));
            } else {
                real.push(vals[0]);
            }
            k += 1;
        }
        if k != expected {
            return Err(parse_err(text.lines().count(), format!("found {k} data rows, expected {expected}")));
        }
        let data = if complex { Data::Complex(cplx) } else { Data::Real(real) };
        DataFile::new(manifest, data)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), FormatError> {
        let path = path.as_ref();
        fs::write(path, self.to_text())
            .map_err(|e| FormatError::Io { path: path.display().to_string(), message: e.to_string() })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, FormatError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| FormatError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text).map_err(|e| match e {
            FormatError::Parse { line, message } => {
                FormatError::Parse { line, message: format!("{}: {message}", path.display()) }
            }
            other => other,
        })
    }

    fn expect(&self, kind: Kind) -> Result<(), FormatError> {
        if self.manifest.kind != kind {
            return Err(FormatError::Manifest(format!(
                "expected kind {}, found {}",
                kind.name(),
                self.manifest.kind.name()
            )));
        }
        Ok(())
    }

    fn real(&self) -> Vec<f64> {
        match &self.data {
            Data::Real(v) => v.clone(),
            Data::Complex(v) => v.iter().map(|c| c.re).collect(),
        }
    }

    fn complex(&self) -> Vec<Complex64> {
        match &self.data {
            Data::Complex(v) => v.clone(),
            Data::Real(v) => v.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        }
    }

    fn field(&self) -> Result<RealField2D, FormatError> {
        let g = &self.manifest.grids;
        RealField2D::new(g[0], g[1], self.real()).map_err(|e| FormatError::Manifest(e.to_string()))
    }

    pub fn from_wavefunction(psi: &SampledWavefunction) -> Self {
        let m = Manifest::new(Kind::Wavefunction, vec![*psi.grid()]);
        Self { manifest: m, data: Data::Complex(psi.values().to_vec()) }
    }

    pub fn to_wavefunction(&self) -> Result<SampledWavefunction, FormatError> {
        self.expect(Kind::Wavefunction)?;
        SampledWavefunction::new(self.manifest.grids[0], self.complex())
            .map_err(|e| FormatError::Manifest(e.to_string()))
    }

    pub fn from_plane(plane: &TomogramPlane) -> Self {
        let m =
            Manifest::new(Kind::TomogramPlane, vec![*plane.grid_x(), *plane.grid_mu()]).with_param("nu", plane.nu());
        Self { manifest: m, data: Data::Real(plane.field().values().to_vec()) }
    }

    pub fn to_plane(&self) -> Result<TomogramPlane, FormatError> {
        self.expect(Kind::TomogramPlane)?;
        let nu = self.manifest.param_f64("nu").unwrap_or_default();
        TomogramPlane::new(nu, self.field()?).map_err(|e| FormatError::Manifest(e.to_string()))
    }

    pub fn from_fresnel(wf: &FresnelTomogram) -> Self {
        let m = Manifest::new(Kind::FresnelTomogram, vec![*wf.grid_x(), *wf.grid_nu()]);
        Self { manifest: m, data: Data::Real(wf.field().values().to_vec()) }
    }

    pub fn to_fresnel(&self) -> Result<FresnelTomogram, FormatError> {
        self.expect(Kind::FresnelTomogram)?;
        FresnelTomogram::new(self.field()?).map_err(|e| FormatError::Manifest(e.to_string()))
    }

    pub fn from_optical(opt: &OpticalTomogram) -> Self {
        let m = Manifest::new(Kind::OpticalTomogram, vec![*opt.grid_x(), *opt.grid_theta()]);
        Self { manifest: m, data: Data::Real(opt.field().values().to_vec()) }
    }

    pub fn to_optical(&self) -> Result<OpticalTomogram, FormatError> {
        self.expect(Kind::OpticalTomogram)?;
        OpticalTomogram::new(self.field()?).map_err(|e| FormatError::Manifest(e.to_string()))
    }

    pub fn from_density_matrix(rho: &DensityMatrix) -> Self {
        let m = Manifest::new(Kind::DensityMatrix, vec![*rho.grid()]);
        Self { manifest: m, data: Data::Complex(rho.values().to_vec()) }
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix, FormatError> {
        self.expect(Kind::DensityMatrix)?;
        DensityMatrix::new(self.manifest.grids[0], self.complex()).map_err(|e| FormatError::Manifest(e.to_string()))
    }

    pub fn from_wigner(w: &WignerFunction) -> Self {
        let m = Manifest::new(Kind::Wigner, vec![*w.grid_q(), *w.grid_p()])
            .with_param("imaginary_residue", w.imaginary_residue());
        Self { manifest: m, data: Data::Real(w.field().values().to_vec()) }
    }

    pub fn to_wigner(&self) -> Result<WignerFunction, FormatError> {
        self.expect(Kind::Wigner)?;
        let residue = self.manifest.param_f64("imaginary_residue").unwrap_or(0.0);
        Ok(WignerFunction::new(self.field()?, residue))
    }

    pub fn from_autocorrelation(a: &PsiAutocorrelation) -> Self {
        let m = Manifest::new(Kind::Autocorrelation, vec![*a.grid_nu()]);
        Self { manifest: m, data: Data::Complex(a.values().to_vec()) }
    }

    pub fn to_autocorrelation(&self) -> Result<PsiAutocorrelation, FormatError> {
        self.expect(Kind::Autocorrelation)?;
        PsiAutocorrelation::new(self.manifest.grids[0], self.complex())
            .map_err(|e| FormatError::Manifest(e.to_string()))
    }

    /// Real field over `(mu, nu)`, e.g. the tomogram width.
    pub fn from_width_map(field: &RealField2D) -> Self {
        let m = Manifest::new(Kind::WidthMap, vec![*field.grid_x(), *field.grid_y()]);
        Self { manifest: m, data: Data::Real(field.values().to_vec()) }
    }

    pub fn to_width_map(&self) -> Result<RealField2D, FormatError> {
        self.expect(Kind::WidthMap)?;
        self.field()
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.manifest.params.insert(key.into(), value.into());
        self
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.manifest.provenance = provenance.into();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> UniformGrid1D {
        UniformGrid1D::from_range(a, b, n).unwrap()
    }

    #[test]
    fn wavefunction_round_trip_is_exact() {
        let psi = SampledWavefunction::from_fn(grid(-1.0, 1.0, 7), |x| Complex64::new(x.exp() / 3.0, -x * 0.1));
        let file = DataFile::from_wavefunction(&psi).with_param("sigma", 1.0).with_provenance("test");
        let back = DataFile::parse(&file.to_text()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_wavefunction().unwrap(), psi);
    }

    #[test]
    fn two_dimensional_layout_is_blocked() {
        let f = RealField2D::from_fn(grid(0.0, 1.0, 3), grid(0.0, 1.0, 2), |x, y| x + 10.0 * y);
        let text = DataFile::from_width_map(&f).to_text();
        let body: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(body.len(), 3 * 2 + 2);
        assert_eq!(body[2], "");
        assert_eq!(body[5], "");
        let back = DataFile::parse(&text).unwrap().to_width_map().unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn density_matrix_uses_one_grid() {
        let g = grid(-1.0, 1.0, 3);
        let rho = DensityMatrix::new(g, (0..9).map(|k| Complex64::new(k as f64, -(k as f64))).collect()).unwrap();
        let file = DataFile::from_density_matrix(&rho);
        assert_eq!(file.manifest.grids.len(), 1);
        let back = DataFile::parse(&file.to_text()).unwrap().to_density_matrix().unwrap();
        assert_eq!(back.values(), rho.values());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let psi = SampledWavefunction::from_fn(grid(-1.0, 1.0, 3), |x| Complex64::new(x, 0.0));
        let text = DataFile::from_wavefunction(&psi).to_text();
        let broken = text.replacen("0.0000000000000000e0 0.0000000000000000e0", "0.0 oops", 1);
        match DataFile::parse(&broken) {
            Err(FormatError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(DataFile::parse("x y\n"), Err(FormatError::Parse { line: 1, .. })));
        let short: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(DataFile::parse(&short).is_err());
        let bad_kind = text.replace("wavefunction", "hologram");
        assert!(DataFile::parse(&bad_kind).is_err());
    }

    #[test]
    fn plane_requires_nu() {
        let m = Manifest::new(Kind::TomogramPlane, vec![grid(0.0, 1.0, 2), grid(0.0, 1.0, 2)]);
        assert!(DataFile::new(m, Data::Real(vec![0.0; 4])).is_err());
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let psi = SampledWavefunction::from_fn(grid(-1.0, 1.0, 3), |x| Complex64::new(x, 0.0));
        let file = DataFile::from_wavefunction(&psi);
        assert!(file.to_plane().is_err());
    }
}
