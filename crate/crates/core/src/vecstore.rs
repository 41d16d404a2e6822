//! Embedding stores loaded from word2vec/GloVe text files, plus the
//! `Vector`, `Embedding` and `EmbeddingSet` types every other module works on.
//!
//! Both supported formats share the row layout `token v1 v2 ... vn`. The
//! word2vec flavour prepends a `<vocab_size> <dim>` header line.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use indexmap::IndexMap;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra;
use crate::error::{Error, Result};

/// A dense vector of `f64` components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(components: Vec<f64>) -> Self {
        Vector(components)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm_squared(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, factor: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * factor).collect())
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector(v.to_vec())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A named vector, optionally remembering the expression that built it.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub name: String,
    pub vector: Vector,
    pub derivation: Option<String>,
}

impl Embedding {
    pub fn new(name: impl Into<String>, vector: impl Into<Vector>) -> Self {
        Embedding {
            name: name.into(),
            vector: vector.into(),
            derivation: None,
        }
    }

    pub fn with_derivation(mut self, derivation: impl Into<String>) -> Self {
        self.derivation = Some(derivation.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    /// The text used for this embedding wherever a derivation is displayed:
    /// the derivation when present, the name otherwise.
    pub fn display_name(&self) -> &str {
        self.derivation.as_deref().unwrap_or(&self.name)
    }

    /// The embedding written in the expression grammar, if it can be.
    pub(crate) fn expression(&self) -> Option<String> {
        if let Some(d) = &self.derivation {
            return Some(d.clone());
        }
        let ast = algebra::parse(&self.name).ok();
        match ast {
            Some(algebra::Expr::Word(_)) => Some(self.name.clone()),
            _ if !self.name.contains('"')
                && self.name.split_whitespace().count() > 1 =>
            {
                Some(format!("\"{}\"", self.name))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Emb[{}]", self.name)
    }
}

/// Anything retrieval can scan: stores and sets both qualify.
pub trait EmbeddingSource {
    fn dim(&self) -> usize;
    fn len(&self) -> usize;
    fn name_at(&self, index: usize) -> &str;
    fn vector_at(&self, index: usize) -> &[f64];
    fn position(&self, name: &str) -> Option<usize>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn embedding_at(&self, index: usize) -> Embedding {
        Embedding::new(self.name_at(index), self.vector_at(index))
    }

    fn get(&self, name: &str) -> Option<Embedding> {
        self.position(name).map(|i| self.embedding_at(i))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoreFormat {
    Auto,
    Word2vecText,
    GloveText,
}

/// Immutable token to vector table of uniform dimension.
#[derive(Clone, Debug)]
pub struct VectorStore {
    label: String,
    dim: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    duplicates: usize,
}

impl VectorStore {
    /// Builds a store from in-memory rows. Duplicate tokens keep the first
    /// occurrence and bump the duplicate counter.
    pub fn from_rows<I, S>(label: impl Into<String>, dim: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let mut store = VectorStore {
            label: label.into(),
            dim,
            tokens: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            duplicates: 0,
        };
        for (i, (token, values)) in rows.into_iter().enumerate() {
            let token = token.into();
            if values.len() != dim {
                return Err(Error::RowDimension {
                    line: i + 1,
                    expected: dim,
                    found: values.len(),
                });
            }
            if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    line: i + 1,
                    token,
                    value: v.to_string(),
                });
            }
            store.insert(token, &values);
        }
        Ok(store)
    }

    fn insert(&mut self, token: String, values: &[f64]) {
        if self.index.contains_key(&token) {
            self.duplicates += 1;
            return;
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.data.extend_from_slice(values);
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Number of rows dropped because their token was already present.
    pub fn duplicate_count(&self) -> usize {
        self.duplicates
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Fails with every missing token (deduplicated, in order) if any of
    /// `tokens` is out of vocabulary.
    pub fn require<'a>(&self, tokens: impl IntoIterator<Item = &'a str>) -> Result<()> {
        let mut missing: Vec<String> = Vec::new();
        for t in tokens {
            if !self.contains(t) && !missing.iter().any(|m| m == t) {
                missing.push(t.to_string());
            }
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::OutOfVocabulary(missing))
        }
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&i| self.row(i))
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn lookup(&self, token: &str) -> Result<Embedding> {
        self.vector(token)
            .map(|v| Embedding::new(token, v))
            .ok_or_else(|| Error::OutOfVocabulary(vec![token.to_string()]))
    }

    /// Sum of the vectors of the whitespace-separated tokens in `phrase`.
    pub fn embed_phrase(&self, phrase: &str) -> Result<Embedding> {
        let text = phrase.trim();
        if text.is_empty() {
            return Err(Error::Empty("cannot embed an empty phrase".into()));
        }
        let mut missing = Vec::new();
        let mut sum = vec![0.0; self.dim];
        for token in text.split_whitespace() {
            match self.vector(token) {
                Some(v) => sum.iter_mut().zip(v).for_each(|(s, x)| *s += x),
                None => missing.push(token.to_string()),
            }
        }
        if !missing.is_empty() {
            return Err(Error::OutOfVocabulary(missing));
        }
        Ok(Embedding::new(text, sum))
    }

    /// Parses and evaluates each expression, collecting the results in order.
    pub fn get_set<S: AsRef<str>>(&self, specs: &[S]) -> Result<EmbeddingSet> {
        if specs.is_empty() {
            return Err(Error::Empty("no expressions given".into()));
        }
        let mut set = EmbeddingSet::new(self.dim);
        for spec in specs {
            let ast = algebra::parse(spec.as_ref())?;
            set.push(algebra::evaluate(&ast, self)?)?;
        }
        Ok(set)
    }

    /// One row per text, each the phrase embedding of that text.
    pub fn featurize<S: AsRef<str>>(&self, texts: &[S]) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(texts.len(), self.dim);
        for (i, text) in texts.iter().enumerate() {
            let e = self.embed_phrase(text.as_ref()).map_err(|e| match e {
                Error::OutOfVocabulary(tokens) => Error::InvalidArgument(format!(
                    "row {i}: out-of-vocabulary token(s): {}",
                    tokens.join(", ")
                )),
                other => Error::InvalidArgument(format!("row {i}: {other}")),
            })?;
            for (j, v) in e.vector.as_slice().iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    /// Copies every entry into an `EmbeddingSet` in store order.
    pub fn to_set(&self) -> EmbeddingSet {
        let mut set = EmbeddingSet::new(self.dim);
        for i in 0..self.len() {
            // tokens are unique and share `dim`
            set.items
                .insert(self.tokens[i].clone(), self.embedding_at(i));
        }
        set
    }

    pub fn load(path: impl AsRef<Path>, format: StoreFormat) -> Result<Self> {
        let path = path.as_ref();
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = File::open(path).map_err(io_err)?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let mut lines = BufReader::new(file).lines().enumerate().peekable();

        let first = loop {
            match lines.peek() {
                None => {
                    return Err(Error::EmptyFile {
                        path: path.to_path_buf(),
                    })
                }
                Some((_, Ok(l))) if l.trim().is_empty() => {
                    lines.next();
                }
                Some((_, Ok(l))) => break l.clone(),
                Some((_, Err(_))) => {
                    let (n, e) = lines.next().unwrap();
                    return Err(line_read_error(n + 1, e.unwrap_err()));
                }
            }
        };

        let header = parse_header(&first);
        let format = match format {
            StoreFormat::Auto if header.is_some() => StoreFormat::Word2vecText,
            StoreFormat::Auto => StoreFormat::GloveText,
            f => f,
        };
        let mut declared = None;
        let mut dim = None;
        if format == StoreFormat::Word2vecText {
            let (n, _) = lines.next().unwrap();
            let (count, d) = header.ok_or_else(|| Error::Malformed {
                line: n + 1,
                message: "expected a \"<vocab_size> <dim>\" header".into(),
            })?;
            if d == 0 {
                return Err(Error::Malformed {
                    line: n + 1,
                    message: "header declares dimension 0".into(),
                });
            }
            declared = Some(count);
            dim = Some(d);
        }

        let mut store: Option<VectorStore> = None;
        let mut rows = 0usize;
        let mut values = Vec::new();
        for (n, line) in lines {
            let line_no = n + 1;
            let line = line.map_err(|e| line_read_error(line_no, e))?;
            let mut fields = line.split_ascii_whitespace();
            let Some(token) = fields.next() else {
                continue;
            };
            values.clear();
            for field in fields {
                let v: f64 = field.parse().map_err(|_| Error::Malformed {
                    line: line_no,
                    message: format!("cannot parse {field:?} as a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        line: line_no,
                        token: token.to_string(),
                        value: field.to_string(),
                    });
                }
                values.push(v);
            }
            let expected = *dim.get_or_insert(values.len());
            if values.len() != expected || expected == 0 {
                return Err(Error::RowDimension {
                    line: line_no,
                    expected,
                    found: values.len(),
                });
            }
            let store = store.get_or_insert_with(|| VectorStore {
                label: label.clone(),
                dim: expected,
                tokens: Vec::new(),
                index: HashMap::new(),
                data: Vec::new(),
                duplicates: 0,
            });
            store.insert(token.to_string(), &values);
            rows += 1;
        }

        let store = store.ok_or_else(|| Error::EmptyFile {
            path: path.to_path_buf(),
        })?;
        if let Some(count) = declared {
            if count != rows {
                return Err(Error::Malformed {
                    line: 1,
                    message: format!("header declares {count} rows but the file has {rows}"),
                });
            }
        }
        Ok(store)
    }

    /// Writes the store as text. Values use the shortest representation that
    /// parses back to the identical `f64`.
    pub fn save(&self, path: impl AsRef<Path>, format: StoreFormat) -> Result<()> {
        let path = path.as_ref();
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
        self.write_to(&mut out, format).map_err(io_err)?;
        out.flush().map_err(io_err)
    }

    pub fn write_to<W: Write>(&self, out: &mut W, format: StoreFormat) -> std::io::Result<()> {
        if format == StoreFormat::Word2vecText {
            writeln!(out, "{} {}", self.len(), self.dim)?;
        }
        for (i, token) in self.tokens.iter().enumerate() {
            out.write_all(token.as_bytes())?;
            for v in self.row(i) {
                write!(out, " {v:?}")?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

impl EmbeddingSource for VectorStore {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        self.tokens.len()
    }
    fn name_at(&self, index: usize) -> &str {
        &self.tokens[index]
    }
    fn vector_at(&self, index: usize) -> &[f64] {
        self.row(index)
    }
    fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut parts = line.split_ascii_whitespace();
    let (a, b) = (parts.next()?, parts.next()?);
    if parts.next().is_some() {
        return None;
    }
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|c| c.is_ascii_digit());
    if !digits(a) || !digits(b) {
        return None;
    }
    Some((a.parse().ok()?, b.parse().ok()?))
}

fn line_read_error(line: usize, e: std::io::Error) -> Error {
    Error::Malformed {
        line,
        message: format!("unreadable line ({e})"),
    }
}

/// Ordered collection of uniquely named embeddings sharing one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingSet {
    items: IndexMap<String, Embedding>,
    dim: usize,
}

impl EmbeddingSet {
    pub fn new(dim: usize) -> Self {
        EmbeddingSet {
            items: IndexMap::new(),
            dim,
        }
    }

    pub fn from_embeddings(dim: usize, items: impl IntoIterator<Item = Embedding>) -> Result<Self> {
        let mut set = EmbeddingSet::new(dim);
        for e in items {
            set.push(e)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, embedding: Embedding) -> Result<()> {
        check_dim(self.dim, embedding.dim())?;
        if self.items.contains_key(&embedding.name) {
            return Err(Error::DuplicateName(embedding.name));
        }
        self.items.insert(embedding.name.clone(), embedding);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Embedding> {
        self.items.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Embedding> {
        self.items.values()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.items.keys().map(String::as_str)
    }
}

impl<'a> IntoIterator for &'a EmbeddingSet {
    type Item = &'a Embedding;
    type IntoIter = indexmap::map::Values<'a, String, Embedding>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.values()
    }
}

impl EmbeddingSource for EmbeddingSet {
    fn dim(&self) -> usize {
        self.dim
    }
    fn len(&self) -> usize {
        self.items.len()
    }
    fn name_at(&self, index: usize) -> &str {
        self.items.get_index(index).unwrap().0
    }
    fn vector_at(&self, index: usize) -> &[f64] {
        self.items.get_index(index).unwrap().1.vector.as_slice()
    }
    fn position(&self, name: &str) -> Option<usize> {
        self.items.get_index_of(name)
    }
    fn embedding_at(&self, index: usize) -> Embedding {
        self.items.get_index(index).unwrap().1.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TOY_W2V: &str = "4 2\nman 0.5 0.1\nwoman 0.5 0.6\nking 0.7 0.33\nqueen 0.7 0.9\n";

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".txt").tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn toy() -> VectorStore {
        let f = write_tmp(TOY_W2V);
        VectorStore::load(f.path(), StoreFormat::Auto).unwrap()
    }

    #[test]
    fn loads_word2vec_header() {
        let s = toy();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.len(), 4);
        assert_eq!(s.tokens().collect::<Vec<_>>(), ["man", "woman", "king", "queen"]);
    }

    #[test]
    fn glove_auto_detection_matches_word2vec() {
        let glove = TOY_W2V.split_once('\n').unwrap().1;
        let f = write_tmp(glove);
        let g = VectorStore::load(f.path(), StoreFormat::Auto).unwrap();
        let w = toy();
        assert_eq!(g.tokens().collect::<Vec<_>>(), w.tokens().collect::<Vec<_>>());
        for t in w.tokens() {
            assert_eq!(g.vector(t), w.vector(t));
        }
    }

    #[test]
    fn dimension_mismatch_names_line() {
        let f = write_tmp("man 0.5 0.1\nwoman 0.5 0.6 0.2\n");
        let err = VectorStore::load(f.path(), StoreFormat::Auto).unwrap_err();
        assert!(matches!(err, Error::RowDimension { line: 2, expected: 2, found: 3 }), "{err}");
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        let f = write_tmp("a 1.0 NaN\n");
        assert!(matches!(
            VectorStore::load(f.path(), StoreFormat::Auto),
            Err(Error::NonFinite { line: 1, .. })
        ));
        let f = write_tmp("a 1.0 inf\n");
        assert!(matches!(
            VectorStore::load(f.path(), StoreFormat::Auto),
            Err(Error::NonFinite { .. })
        ));
        let f = write_tmp("");
        assert!(matches!(
            VectorStore::load(f.path(), StoreFormat::Auto),
            Err(Error::EmptyFile { .. })
        ));
        let f = write_tmp("3 2\n");
        assert!(matches!(
            VectorStore::load(f.path(), StoreFormat::Auto),
            Err(Error::EmptyFile { .. })
        ));
        assert!(matches!(
            VectorStore::load("/nonexistent/vectors.txt", StoreFormat::Auto),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn header_row_count_is_checked() {
        let f = write_tmp("3 2\na 1 2\nb 3 4\n");
        assert!(matches!(
            VectorStore::load(f.path(), StoreFormat::Word2vecText),
            Err(Error::Malformed { .. })
        ));
    }

    #[test]
    fn duplicate_tokens_keep_first() {
        let f = write_tmp("a 1 2\nb 3 4\na 5 6\n");
        let s = VectorStore::load(f.path(), StoreFormat::GloveText).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.duplicate_count(), 1);
        assert_eq!(s.vector("a"), Some(&[1.0, 2.0][..]));
    }

    #[test]
    fn label_defaults_to_file_stem() {
        let s = toy();
        let stem = s.label().to_string();
        assert!(!stem.ends_with(".txt"));
    }

    #[test]
    fn lookup_and_oov() {
        let s = toy();
        let man = s.lookup("man").unwrap();
        assert_eq!(man.name, "man");
        assert_eq!(man.vector.as_slice(), &[0.5, 0.1]);
        assert!(man.derivation.is_none());
        assert_eq!(s.lookup("king").unwrap().vector.as_slice(), &[0.7, 0.33]);
        match s.lookup("emperor") {
            Err(Error::OutOfVocabulary(t)) => assert_eq!(t, ["emperor"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn phrases_sum_tokens() {
        let s = toy();
        let e = s.embed_phrase("man woman").unwrap();
        assert_eq!(e.name, "man woman");
        assert!((e.vector.as_slice()[0] - 1.0).abs() < 1e-12);
        assert!((e.vector.as_slice()[1] - 0.7).abs() < 1e-12);
        assert_eq!(s.embed_phrase("king").unwrap(), s.lookup("king").unwrap());
        match s.embed_phrase("man emperor nobody") {
            Err(Error::OutOfVocabulary(t)) => assert_eq!(t, ["emperor", "nobody"]),
            other => panic!("{other:?}"),
        }
        assert!(matches!(s.embed_phrase("  \t"), Err(Error::Empty(_))));
    }

    #[test]
    fn get_set_preserves_order_and_rejects_duplicates() {
        let s = toy();
        let set = s.get_set(&["woman", "man"]).unwrap();
        assert_eq!(set.names().collect::<Vec<_>>(), ["woman", "man"]);
        assert_eq!(set.dim(), 2);

        let set = s.get_set(&["queen - king"]).unwrap();
        let diff = set.get("(queen - king)").unwrap();
        assert!((diff.vector.as_slice()[0] - 0.0).abs() < 1e-12);
        assert!((diff.vector.as_slice()[1] - 0.57).abs() < 1e-12);

        assert!(matches!(s.get_set(&["man", "man"]), Err(Error::DuplicateName(_))));
        assert!(matches!(s.get_set::<&str>(&[]), Err(Error::Empty(_))));
    }

    #[test]
    fn featurize_rows() {
        let s = toy();
        let m = s.featurize(&["man", "woman"]).unwrap();
        assert_eq!(m.shape(), (2, 2));
        assert_eq!(m.row(0).iter().copied().collect::<Vec<_>>(), [0.5, 0.1]);
        assert_eq!(m.row(1).iter().copied().collect::<Vec<_>>(), [0.5, 0.6]);
        let m = s.featurize(&["man woman"]).unwrap();
        assert!((m[(0, 0)] - 1.0).abs() < 1e-12 && (m[(0, 1)] - 0.7).abs() < 1e-12);
        assert_eq!(s.featurize::<&str>(&[]).unwrap().shape(), (0, 2));
        let err = s.featurize(&["man", "emperor"]).unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
    }

    #[test]
    fn save_formats() {
        let s = toy();
        let mut buf = Vec::new();
        s.write_to(&mut buf, StoreFormat::Word2vecText).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("4 2"));
        assert_eq!(text, TOY_W2V);

        let mut buf = Vec::new();
        s.write_to(&mut buf, StoreFormat::GloveText).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("man 0.5 0.1\n"));
    }

    #[test]
    fn save_then_load_round_trips() {
        let s = toy();
        let dir = tempfile::tempdir().unwrap();
        for format in [StoreFormat::Word2vecText, StoreFormat::GloveText] {
            let path = dir.path().join("out.txt");
            s.save(&path, format).unwrap();
            let back = VectorStore::load(&path, StoreFormat::Auto).unwrap();
            assert_eq!(back.tokens().collect::<Vec<_>>(), s.tokens().collect::<Vec<_>>());
            for t in s.tokens() {
                for (a, b) in s.vector(t).unwrap().iter().zip(back.vector(t).unwrap()) {
                    assert!((a - b).abs() <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn set_rejects_dimension_mismatch() {
        let mut set = EmbeddingSet::new(2);
        assert!(matches!(
            set.push(Embedding::new("x", vec![1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }
}
