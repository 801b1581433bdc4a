//! Dataset containers and their on-disk formats.
//!
//! Feature files (`AGLF`) and label files (`AGLL`) are little-endian binary:
//!
//! ```text
//! AGLF: magic "AGLF" | version u16 | n u64 | d u32 | n*d f32 (row-major)
//! AGLL: magic "AGLL" | version u16 | n u64 | c u32 | n u32
//! ```
//!
//! A manifest is a TOML file with one `[[dataset]]` table per entry, keys
//! `name`, `train_features`, `train_labels`, `test_features`, `test_labels`,
//! `num_classes` and `imbalanced`. Relative paths resolve against the
//! manifest's directory.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const FEATURE_MAGIC: &[u8; 4] = b"AGLF";
pub const LABEL_MAGIC: &[u8; 4] = b"AGLL";
pub const FORMAT_VERSION: u16 = 1;

const FEATURE_HEADER_LEN: u64 = 4 + 2 + 8 + 4;
const LABEL_HEADER_LEN: u64 = 4 + 2 + 8 + 4;

/// `n` instance embeddings of dimension `d`, stored as `f32`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n: usize,
    d: usize,
    values: Vec<f32>,
}

impl FeatureMatrix {
    pub fn new(n: usize, d: usize, values: Vec<f32>) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite feature value at flat position {pos}"
            )));
        }
        Ok(FeatureMatrix { n, d, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    /// Widened copy of the given rows, for 64-bit arithmetic.
    pub fn gather(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            data.extend(self.row(i).iter().map(|&v| v as f64));
        }
        Matrix::from_vec(indices.len(), self.d, data)
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_vec(
            self.n,
            self.d,
            self.values.iter().map(|&v| v as f64).collect(),
        )
    }
}

/// Class ids in `[0, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<u32>,
    c: u32,
}

impl LabelVector {
    pub fn new(labels: Vec<u32>, c: u32) -> Result<Self> {
        if let Some((position, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= c) {
            return Err(Error::LabelRange {
                position,
                label,
                classes: c,
            });
        }
        Ok(LabelVector { labels, c })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> u32 {
        self.c
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn gather(&self, indices: &[usize]) -> Vec<u32> {
        indices.iter().map(|&i| self.labels[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub features: FeatureMatrix,
    pub labels: LabelVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub name: String,
    pub train: Split,
    pub test: Split,
    pub num_classes: u32,
    /// Imbalanced datasets are scored with balanced accuracy.
    pub imbalanced: bool,
}

impl DatasetBundle {
    pub fn new(
        name: impl Into<String>,
        train: Split,
        test: Split,
        num_classes: u32,
        imbalanced: bool,
    ) -> Result<Self> {
        let name = name.into();
        for (split, s) in [("train", &train), ("test", &test)] {
            if s.features.n() != s.labels.len() {
                return Err(Error::Consistency(format!(
                    "{name}: {split} has {} feature rows but {} labels",
                    s.features.n(),
                    s.labels.len()
                )));
            }
            if s.labels.num_classes() != num_classes {
                return Err(Error::Consistency(format!(
                    "{name}: {split} labels declare {} classes, dataset declares {num_classes}",
                    s.labels.num_classes()
                )));
            }
        }
        if train.features.d() != test.features.d() {
            return Err(Error::Consistency(format!(
                "{name}: train dimension {} differs from test dimension {}",
                train.features.d(),
                test.features.d()
            )));
        }
        if num_classes < 2 {
            return Err(Error::Consistency(format!(
                "{name}: need at least 2 classes"
            )));
        }
        Ok(DatasetBundle {
            name,
            train,
            test,
            num_classes,
            imbalanced,
        })
    }

    pub fn dim(&self) -> usize {
        self.train.features.d()
    }
}

// ---------------------------------------------------------------------------
// binary formats

pub fn write_features<W: Write>(m: &FeatureMatrix, mut w: W) -> Result<()> {
    let mut buf = Vec::with_capacity(FEATURE_HEADER_LEN as usize + 4 * m.values.len());
    buf.extend_from_slice(FEATURE_MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(m.n as u64).to_le_bytes());
    buf.extend_from_slice(&(m.d as u32).to_le_bytes());
    for v in &m.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn write_labels<W: Write>(l: &LabelVector, mut w: W) -> Result<()> {
    let mut buf = Vec::with_capacity(LABEL_HEADER_LEN as usize + 4 * l.labels.len());
    buf.extend_from_slice(LABEL_MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(l.labels.len() as u64).to_le_bytes());
    buf.extend_from_slice(&l.c.to_le_bytes());
    for v in &l.labels {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < len {
            return Err(Error::format(
                self.pos as u64,
                format!(
                    "truncated {what}: need {len} bytes, {} remain",
                    self.bytes.len() - self.pos
                ),
            ));
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

fn read_header<'a>(bytes: &'a [u8], magic: &[u8; 4]) -> Result<Cursor<'a>> {
    let mut cur = Cursor { bytes, pos: 0 };
    let found = cur.take(4, "magic")?;
    if found != magic {
        return Err(Error::format(
            0,
            format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(found),
                String::from_utf8_lossy(magic)
            ),
        ));
    }
    let version = cur.u16("version")?;
    if version != FORMAT_VERSION {
        return Err(Error::format(
            4,
            format!("unsupported format version {version}, expected {FORMAT_VERSION}"),
        ));
    }
    Ok(cur)
}

fn payload_len(n: u64, width: u64, header: u64, total: usize) -> Result<usize> {
    let len = n
        .checked_mul(width)
        .filter(|&l| l <= usize::MAX as u64)
        .ok_or_else(|| Error::format(header, "payload size overflows"))?;
    let available = total as u64 - header;
    if available < len {
        return Err(Error::format(
            total as u64,
            format!("truncated payload: header declares {len} bytes, {available} present"),
        ));
    }
    if available > len {
        return Err(Error::format(
            header + len,
            format!("{} trailing bytes after payload", available - len),
        ));
    }
    Ok(len as usize)
}

pub fn read_features<R: Read>(mut r: R) -> Result<FeatureMatrix> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut cur = read_header(&bytes, FEATURE_MAGIC)?;
    let n = cur.u64("row count")?;
    let d = cur.u32("dimension")? as u64;
    let count = n
        .checked_mul(d)
        .ok_or_else(|| Error::format(6, "row count times dimension overflows"))?;
    let len = payload_len(count, 4, FEATURE_HEADER_LEN, bytes.len())?;
    let payload = cur.take(len, "payload")?;
    let mut values = Vec::with_capacity(len / 4);
    for (i, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::format(
                FEATURE_HEADER_LEN + 4 * i as u64,
                "non-finite feature value",
            ));
        }
        values.push(v);
    }
    Ok(FeatureMatrix {
        n: n as usize,
        d: d as usize,
        values,
    })
}

pub fn read_labels<R: Read>(mut r: R) -> Result<LabelVector> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut cur = read_header(&bytes, LABEL_MAGIC)?;
    let n = cur.u64("label count")?;
    let c = cur.u32("class count")?;
    let len = payload_len(n, 4, LABEL_HEADER_LEN, bytes.len())?;
    let payload = cur.take(len, "payload")?;
    let labels = payload
        .chunks_exact(4)
        .map(|chunk| u32::from_le_bytes(chunk.try_into().unwrap()))
        .collect();
    LabelVector::new(labels, c)
}

pub fn save_features(m: &FeatureMatrix, path: &Path) -> Result<()> {
    write_atomic(path, |w| write_features(m, w))
}

pub fn save_labels(l: &LabelVector, path: &Path) -> Result<()> {
    write_atomic(path, |w| write_labels(l, w))
}

pub fn load_features(path: &Path) -> Result<FeatureMatrix> {
    read_features(fs::File::open(path)?)
}

pub fn load_labels(path: &Path) -> Result<LabelVector> {
    read_labels(fs::File::open(path)?)
}

/// Write through a temp file in the destination directory, then rename.
pub(crate) fn write_atomic<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut std::io::BufWriter<&mut tempfile::NamedTempFile>) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = std::io::BufWriter::new(&mut tmp);
        write(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// manifest

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub train_features: PathBuf,
    pub train_labels: PathBuf,
    pub test_features: PathBuf,
    pub test_labels: PathBuf,
    pub num_classes: u32,
    pub imbalanced: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default, rename = "dataset")]
    pub datasets: Vec<ManifestEntry>,
    /// Directory relative paths resolve against; not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Manifest {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut m: Manifest = toml::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("manifest: {e}")))?;
        m.base_dir = base_dir.into();
        let mut seen = std::collections::HashSet::new();
        for e in &m.datasets {
            if !seen.insert(e.name.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "manifest: duplicate dataset name {:?}",
                    e.name
                )));
            }
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = self.to_toml();
        write_atomic(path, |w| Ok(w.write_all(text.as_bytes())?))
    }

    pub fn entry(&self, name: &str) -> Result<&ManifestEntry> {
        self.datasets
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::InvalidConfig(format!("dataset {name:?} not in manifest")))
    }

    /// Insert or replace the entry with the same name.
    pub fn upsert(&mut self, entry: ManifestEntry) {
        match self.datasets.iter_mut().find(|e| e.name == entry.name) {
            Some(slot) => *slot = entry,
            None => self.datasets.push(entry),
        }
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Loads all four files of an entry; fails without partial results.
    pub fn load_bundle(&self, name: &str) -> Result<DatasetBundle> {
        let e = self.entry(name)?;
        let ctx = |what: &str, p: &Path, err: Error| {
            Error::Consistency(format!("{name}: {what} {}: {err}", p.display()))
        };
        let load_f = |what: &str, p: &Path| {
            let p = self.resolve(p);
            load_features(&p).map_err(|err| ctx(what, &p, err))
        };
        let load_l = |what: &str, p: &Path| {
            let p = self.resolve(p);
            load_labels(&p).map_err(|err| ctx(what, &p, err))
        };
        let train = Split {
            features: load_f("train_features", &e.train_features)?,
            labels: load_l("train_labels", &e.train_labels)?,
        };
        let test = Split {
            features: load_f("test_features", &e.test_features)?,
            labels: load_l("test_labels", &e.test_labels)?,
        };
        DatasetBundle::new(name, train, test, e.num_classes, e.imbalanced)
    }
}

/// Writes the four files of a bundle into `dir` and returns the manifest
/// entry (paths relative to `dir`).
pub fn save_bundle(bundle: &DatasetBundle, dir: &Path) -> Result<ManifestEntry> {
    let name = &bundle.name;
    let entry = ManifestEntry {
        name: name.clone(),
        train_features: format!("{name}.train.aglf").into(),
        train_labels: format!("{name}.train.agll").into(),
        test_features: format!("{name}.test.aglf").into(),
        test_labels: format!("{name}.test.agll").into(),
        num_classes: bundle.num_classes,
        imbalanced: bundle.imbalanced,
    };
    save_features(&bundle.train.features, &dir.join(&entry.train_features))?;
    save_labels(&bundle.train.labels, &dir.join(&entry.train_labels))?;
    save_features(&bundle.test.features, &dir.join(&entry.test_features))?;
    save_labels(&bundle.test.labels, &dir.join(&entry.test_labels))?;
    Ok(entry)
}

// ---------------------------------------------------------------------------
// synthetic data

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub n_train: usize,
    pub n_test: usize,
    pub dim: usize,
    pub class_weights: Vec<f64>,
    pub cluster_spread: f64,
}

/// Gaussian blobs with one unit-sphere mean per class and isotropic noise.
///
/// Labels are drawn from `class_weights`; the bundle is flagged imbalanced
/// when the weights are not uniform.
pub fn synth_blobs<R: Rng + ?Sized>(
    name: impl Into<String>,
    spec: &BlobSpec,
    rng: &mut R,
) -> Result<DatasetBundle> {
    let c = spec.class_weights.len();
    if c < 2 {
        return Err(Error::InvalidConfig("need at least 2 classes".into()));
    }
    if spec.dim == 0 {
        return Err(Error::InvalidConfig("dimension must be at least 1".into()));
    }
    if spec.class_weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::InvalidConfig(
            "class weights must be non-negative".into(),
        ));
    }
    let total: f64 = spec.class_weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "class weights sum to {total}, expected 1"
        )));
    }
    if !(spec.cluster_spread > 0.0 && spec.cluster_spread.is_finite()) {
        return Err(Error::InvalidConfig(
            "cluster spread must be positive".into(),
        ));
    }

    let means: Vec<Vec<f64>> = (0..c)
        .map(|_| loop {
            let v: Vec<f64> = (0..spec.dim).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break v.into_iter().map(|x| x / norm).collect();
            }
        })
        .collect();

    let mut cumulative = Vec::with_capacity(c);
    let mut acc = 0.0;
    for &w in &spec.class_weights {
        acc += w;
        cumulative.push(acc);
    }

    let split = |n: usize, rng: &mut R| -> Result<Split> {
        let mut values = Vec::with_capacity(n * spec.dim);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let u: f64 = rng.random::<f64>() * acc;
            let class = cumulative
                .iter()
                .position(|&cw| u < cw)
                .unwrap_or(c - 1);
            labels.push(class as u32);
            for &m in &means[class] {
                let z: f64 = rng.sample(StandardNormal);
                values.push((m + spec.cluster_spread * z) as f32);
            }
        }
        Ok(Split {
            features: FeatureMatrix::new(n, spec.dim, values)?,
            labels: LabelVector::new(labels, c as u32)?,
        })
    };
    let train = split(spec.n_train, rng)?;
    let test = split(spec.n_test, rng)?;

    let uniform = 1.0 / c as f64;
    let imbalanced = spec
        .class_weights
        .iter()
        .any(|&w| (w - uniform).abs() > 1e-9);
    DatasetBundle::new(name, train, test, c as u32, imbalanced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Purpose};

    fn small() -> FeatureMatrix {
        FeatureMatrix::new(3, 2, vec![1.0, -2.0, 0.5, 3.25, -0.0, 7.0]).unwrap()
    }

    #[test]
    fn features_round_trip() {
        let m = small();
        let mut buf = Vec::new();
        write_features(&m, &mut buf).unwrap();
        assert_eq!(buf.len(), 18 + 6 * 4);
        assert_eq!(&buf[..4], b"AGLF");
        assert_eq!(read_features(&buf[..]).unwrap(), m);
    }

    #[test]
    fn header_layout_is_little_endian() {
        let mut buf = Vec::new();
        write_features(&small(), &mut buf).unwrap();
        assert_eq!(&buf[4..6], &[1, 0]);
        assert_eq!(&buf[6..14], &[3, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(&buf[14..18], &[2, 0, 0, 0]);
        assert_eq!(&buf[18..22], &1.0f32.to_le_bytes());
    }

    #[test]
    fn bad_magic_rejected() {
        let mut buf = Vec::new();
        write_features(&small(), &mut buf).unwrap();
        buf[..4].copy_from_slice(b"XXXX");
        match read_features(&buf[..]) {
            Err(Error::Format { offset: 0, .. }) => {}
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn version_mismatch_rejected() {
        let mut buf = Vec::new();
        write_features(&small(), &mut buf).unwrap();
        buf[4] = 9;
        assert!(matches!(
            read_features(&buf[..]),
            Err(Error::Format { offset: 4, .. })
        ));
    }

    #[test]
    fn truncated_rows_rejected() {
        // Header claims 10 rows of d=2, only 5 present.
        let m = FeatureMatrix::new(5, 2, vec![0.5; 10]).unwrap();
        let mut buf = Vec::new();
        write_features(&m, &mut buf).unwrap();
        buf[6..14].copy_from_slice(&10u64.to_le_bytes());
        match read_features(&buf[..]) {
            Err(Error::Format { offset, msg }) => {
                assert_eq!(offset, buf.len() as u64);
                assert!(msg.contains("truncated"), "{msg}");
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_header_rejected() {
        assert!(matches!(
            read_features(&b"AGLF\x01"[..]),
            Err(Error::Format { offset: 4, .. })
        ));
    }

    #[test]
    fn labels_round_trip() {
        let l = LabelVector::new(vec![0, 1, 2], 3).unwrap();
        let mut buf = Vec::new();
        write_labels(&l, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"AGLL");
        assert_eq!(read_labels(&buf[..]).unwrap(), l);
    }

    #[test]
    fn label_out_of_range() {
        assert!(matches!(
            LabelVector::new(vec![0, 5], 3),
            Err(Error::LabelRange {
                position: 1,
                label: 5,
                classes: 3
            })
        ));
        // same check on the read path
        let l = LabelVector::new(vec![0, 2], 3).unwrap();
        let mut buf = Vec::new();
        write_labels(&l, &mut buf).unwrap();
        buf[22..26].copy_from_slice(&5u32.to_le_bytes());
        assert!(matches!(
            read_labels(&buf[..]),
            Err(Error::LabelRange { label: 5, .. })
        ));
    }

    #[test]
    fn bundle_count_mismatch() {
        let train = Split {
            features: small(),
            labels: LabelVector::new(vec![0, 1], 2).unwrap(),
        };
        let test = Split {
            features: small(),
            labels: LabelVector::new(vec![0, 1, 1], 2).unwrap(),
        };
        assert!(matches!(
            DatasetBundle::new("x", train, test, 2, false),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn nan_features_rejected() {
        assert!(FeatureMatrix::new(1, 2, vec![0.0, f32::NAN]).is_err());
    }

    fn spec(weights: Vec<f64>, n_train: usize) -> BlobSpec {
        BlobSpec {
            n_train,
            n_test: 100,
            dim: 4,
            class_weights: weights,
            cluster_spread: 0.3,
        }
    }

    #[test]
    fn blob_class_ratio_concentrates() {
        // binomial sd at n=5000, p=0.9 is ~0.0042; 0.05 is ~12 sd
        let mut rng = substream(11, 0, Purpose::Synth);
        let b = synth_blobs("imb", &spec(vec![0.9, 0.1], 5000), &mut rng).unwrap();
        let zeros = b.train.labels.labels().iter().filter(|&&l| l == 0).count();
        let ratio = zeros as f64 / 5000.0;
        assert!((ratio - 0.9).abs() < 0.05, "ratio {ratio}");
        assert!(b.imbalanced);
    }

    #[test]
    fn blobs_deterministic() {
        let s = spec(vec![0.5, 0.5], 200);
        let a = synth_blobs("a", &s, &mut substream(5, 0, Purpose::Synth)).unwrap();
        let b = synth_blobs("a", &s, &mut substream(5, 0, Purpose::Synth)).unwrap();
        assert_eq!(a, b);
        assert!(!a.imbalanced);
    }

    #[test]
    fn blobs_reject_bad_weights() {
        let mut rng = substream(0, 0, Purpose::Synth);
        assert!(synth_blobs("x", &spec(vec![1.2, -0.2], 10), &mut rng).is_err());
        assert!(synth_blobs("x", &spec(vec![0.5, 0.4], 10), &mut rng).is_err());
        assert!(synth_blobs("x", &spec(vec![1.0], 10), &mut rng).is_err());
    }

    #[test]
    fn manifest_parse_and_upsert() {
        let text = r#"
[[dataset]]
name = "trec6"
train_features = "trec6/train.aglf"
train_labels = "trec6/train.agll"
test_features = "trec6/test.aglf"
test_labels = "trec6/test.agll"
num_classes = 6
imbalanced = false
"#;
        let mut m = Manifest::parse(text, "/data").unwrap();
        assert_eq!(m.entry("trec6").unwrap().num_classes, 6);
        assert_eq!(
            m.resolve(&m.datasets[0].train_features),
            PathBuf::from("/data/trec6/train.aglf")
        );
        let mut e = m.datasets[0].clone();
        e.imbalanced = true;
        m.upsert(e);
        assert_eq!(m.datasets.len(), 1);
        assert!(m.datasets[0].imbalanced);
        let again = Manifest::parse(&m.to_toml(), "/data").unwrap();
        assert_eq!(again, m);
    }
}
