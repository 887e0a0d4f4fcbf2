//! JSON matrix files.
//!
//! Entries are strings in the scalar grammar (`-3`, `2/5`, `0.125`,
//! `sqrt(7)`), so exact values survive a round trip. Float matrices carry
//! `"backend": "float"` because their decimal strings would otherwise load
//! as exact rationals.

use std::fmt;
use std::path::Path;

use cvame_core::stabilizer::StabilizerGenerators;
use cvame_core::uniformity::{RotorMatrix, ZakPair};
use cvame_core::{AdjacencyMatrix, Backend, GeneratorMatrix, Matrix, Scalar};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Adjacency,
    Generator,
    Stabilizer,
    Rotor,
    Zak,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kind::Adjacency => "adjacency",
            Kind::Generator => "generator",
            Kind::Stabilizer => "stabilizer",
            Kind::Rotor => "rotor",
            Kind::Zak => "zak",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub kind: Kind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub entries: Vec<Vec<String>>,
    #[serde(rename = "entriesP", default, skip_serializing_if = "Option::is_none")]
    pub entries_p: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

/// A validated matrix file.
#[derive(Debug, Clone)]
pub enum Input {
    Adjacency(AdjacencyMatrix),
    Generator(GeneratorMatrix),
    Stabilizer(StabilizerGenerators),
    Rotor(RotorMatrix),
    Zak(ZakPair),
}

fn grid(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(Scalar::to_string).collect()).collect()
}

fn backend_fields(m: &Matrix) -> (Option<String>, Option<f64>) {
    match m.backend() {
        Backend::Exact => (None, None),
        Backend::Float { tol } => (Some("float".into()), tol),
    }
}

impl MatrixFile {
    fn from_matrix(kind: Kind, n: usize, k: Option<usize>, m: &Matrix) -> Self {
        let (backend, tol) = backend_fields(m);
        MatrixFile { kind, n, k, entries: grid(m), entries_p: None, backend, tol }
    }

    pub fn adjacency(a: &AdjacencyMatrix) -> Self {
        Self::from_matrix(Kind::Adjacency, a.n(), None, a.matrix())
    }

    pub fn generator(g: &GeneratorMatrix) -> Self {
        Self::from_matrix(Kind::Generator, g.n(), Some(g.k()), g.matrix())
    }

    pub fn stabilizer(h: &StabilizerGenerators) -> Self {
        Self::from_matrix(Kind::Stabilizer, h.n(), None, h.matrix())
    }

    pub fn rotor(c: &RotorMatrix) -> Self {
        Self::from_matrix(Kind::Rotor, c.n(), None, c.matrix())
    }

    pub fn zak(z: &ZakPair) -> Self {
        let mut file = Self::from_matrix(Kind::Zak, z.n(), None, z.a().matrix());
        file.entries_p = Some(grid(z.p().matrix()));
        file
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed matrix file: {e}")))
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("matrix files serialize");
        s.push('\n');
        s
    }

    fn parse_grid(&self, g: &[Vec<String>], label: &str) -> Result<Matrix, CliError> {
        let rows = g
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, s)| {
                        s.parse::<Scalar>().map_err(|e| CliError::Input(format!("{label}[{}][{}]: {e}", i + 1, j + 1)))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        if rows.is_empty() {
            return Err(CliError::Input(format!("{label} is empty")));
        }
        let m = Matrix::from_rows(rows).map_err(|e| CliError::Input(format!("{label}: {e}")))?;
        match (self.backend.as_deref(), self.tol) {
            (None | Some("exact"), None) => Ok(m),
            (None | Some("float"), Some(tol)) => Ok(m.with_tolerance(tol)),
            (Some("float"), None) => Ok(m.into_float()),
            (Some(other), _) => Err(CliError::Input(format!("unknown backend {other:?}"))),
        }
    }

    /// Parses entries, applies an optional backend override and checks the
    /// kind-specific shape rules.
    pub fn load(&self, backend: Option<Backend>) -> Result<Input, CliError> {
        let apply = |m: Matrix| -> Result<Matrix, CliError> {
            match backend {
                None => Ok(m),
                Some(b) => m.with_backend(b).map_err(CliError::from),
            }
        };
        let m = apply(self.parse_grid(&self.entries, "entries")?)?;
        let shape = |rows: usize, cols: usize| -> Result<(), CliError> {
            if m.rows() != rows || m.cols() != cols {
                return Err(CliError::Input(format!(
                    "{} file with n = {} needs a {rows} x {cols} grid, found {} x {}",
                    self.kind,
                    self.n,
                    m.rows(),
                    m.cols()
                )));
            }
            Ok(())
        };
        if self.entries_p.is_some() && self.kind != Kind::Zak {
            return Err(CliError::Input("entriesP is only valid for zak files".into()));
        }
        Ok(match self.kind {
            Kind::Adjacency => {
                shape(self.n, self.n)?;
                Input::Adjacency(AdjacencyMatrix::new(m)?)
            }
            Kind::Generator => {
                let k = self.k.ok_or_else(|| CliError::Input("generator file needs \"k\"".into()))?;
                shape(k, self.n)?;
                Input::Generator(GeneratorMatrix::new(m)?)
            }
            Kind::Stabilizer => {
                shape(self.n, 2 * self.n)?;
                Input::Stabilizer(StabilizerGenerators::from_matrix(m)?)
            }
            Kind::Rotor => {
                shape(self.n, self.n)?;
                Input::Rotor(RotorMatrix::new(m)?)
            }
            Kind::Zak => {
                shape(self.n, self.n)?;
                let p = self.entries_p.as_ref().ok_or_else(|| CliError::Input("zak file needs \"entriesP\"".into()))?;
                let p = apply(self.parse_grid(p, "entriesP")?)?;
                if p.rows() != self.n || p.cols() != self.n {
                    return Err(CliError::Input(format!("entriesP must be {} x {}", self.n, self.n)));
                }
                Input::Zak(ZakPair::new(RotorMatrix::new(m)?, RotorMatrix::new(p)?)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cvame_core::families::{ghz_generator, pascal, random_adjacency, sqrt_primes};

    fn round_trip(file: &MatrixFile) -> MatrixFile {
        MatrixFile::parse(&file.to_json()).unwrap()
    }

    #[test]
    fn exact_adjacency_round_trips() {
        let a = pascal(4).unwrap();
        let file = MatrixFile::adjacency(&a);
        assert!(file.backend.is_none());
        assert_eq!(file.entries[3][3], "20");
        match round_trip(&file).load(None).unwrap() {
            Input::Adjacency(b) => assert_eq!(a, b),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn float_and_surd_entries_round_trip() {
        for a in [random_adjacency(5, 3).unwrap(), sqrt_primes(3).unwrap()] {
            let file = MatrixFile::adjacency(&a);
            assert_eq!(file.backend.as_deref(), Some("float"));
            match round_trip(&file).load(None).unwrap() {
                Input::Adjacency(b) => {
                    assert_eq!(b.matrix().backend(), a.matrix().backend());
                    for (x, y) in a.matrix().entries().iter().zip(b.matrix().entries()) {
                        assert_eq!(x.to_f64(), y.to_f64());
                    }
                }
                other => panic!("{other:?}"),
            }
        }
        assert_eq!(MatrixFile::adjacency(&sqrt_primes(2).unwrap()).entries[0][0], "sqrt(2)");
    }

    #[test]
    fn generator_needs_k_and_shape() {
        let file = MatrixFile::generator(&ghz_generator(3).unwrap());
        assert_eq!(file.k, Some(1));
        assert!(matches!(file.load(None).unwrap(), Input::Generator(_)));
        let mut bad = file.clone();
        bad.k = None;
        assert!(bad.load(None).is_err());
        bad.k = Some(2);
        assert!(bad.load(None).is_err());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(MatrixFile::parse("{\"kind\": \"adjacency\"}").is_err());
        assert!(MatrixFile::parse("{\"kind\": \"tensor\", \"n\": 1, \"entries\": [[\"1\"]]}").is_err());
        let asym = r#"{"kind": "adjacency", "n": 2, "entries": [["0", "1"], ["2", "0"]]}"#;
        assert!(MatrixFile::parse(asym).unwrap().load(None).is_err());
        let ragged = r#"{"kind": "adjacency", "n": 2, "entries": [["0", "1"], ["1"]]}"#;
        assert!(MatrixFile::parse(ragged).unwrap().load(None).is_err());
        let bad_entry = r#"{"kind": "adjacency", "n": 1, "entries": [["1e3"]]}"#;
        assert!(MatrixFile::parse(bad_entry).unwrap().load(None).is_err());
        let stray_p = r#"{"kind": "rotor", "n": 1, "entries": [["1"]], "entriesP": [["1"]]}"#;
        assert!(MatrixFile::parse(stray_p).unwrap().load(None).is_err());
    }

    #[test]
    fn backend_override() {
        let file = MatrixFile::adjacency(&pascal(3).unwrap());
        match file.load(Some(Backend::Float { tol: Some(1e-6) })).unwrap() {
            Input::Adjacency(a) => assert_eq!(a.matrix().backend(), Backend::Float { tol: Some(1e-6) }),
            other => panic!("{other:?}"),
        }
        let surds = MatrixFile::adjacency(&sqrt_primes(2).unwrap());
        assert!(surds.load(Some(Backend::Exact)).is_err());
    }

    #[test]
    fn zak_files_carry_both_sides() {
        let p = RotorMatrix::new(pascal(4).unwrap().into_matrix()).unwrap();
        let z = ZakPair::new(p.clone(), p).unwrap();
        let file = MatrixFile::zak(&z);
        assert!(file.to_json().contains("\"entriesP\""));
        assert!(matches!(round_trip(&file).load(None).unwrap(), Input::Zak(_)));
    }
}
