//! Point containers and the CSV format shared by the generator and CLI.

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// `n` points in `d` dimensions, stored row-major.
///
/// Index `i` always refers to the same point; nothing reorders the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    coords: Vec<f64>,
    n: usize,
    d: usize,
}

impl Dataset {
    /// Builds a dataset from rows, rejecting ragged or non-finite input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptySet)?;
        let d = first.as_ref().len();
        if d == 0 {
            return Err(Error::invalid("points must have at least one coordinate"));
        }
        let mut coords = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: row.len() });
            }
            if let Some(column) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { point: i, column });
            }
            coords.extend_from_slice(row);
        }
        Ok(Self { coords, n: rows.len(), d })
    }

    pub fn from_flat(coords: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 || coords.is_empty() || !coords.len().is_multiple_of(d) {
            return Err(Error::invalid(format!(
                "flat buffer of length {} is not a non-empty multiple of d = {d}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { point: pos / d, column: pos % d });
        }
        let n = coords.len() / d;
        Ok(Self { coords, n, d })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, n: self.n })
        }
    }

    /// Copies the selected rows into a new dataset.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut coords = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            self.check_index(i)?;
            coords.extend_from_slice(self.point(i));
        }
        Ok(Self { coords, n: indices.len(), d: self.d })
    }
}

/// An ordered, possibly empty, set of centers. Centers need not be data points.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterSet {
    coords: Vec<f64>,
    d: usize,
}

impl CenterSet {
    pub fn empty(d: usize) -> Self {
        Self { coords: Vec::new(), d }
    }

    pub fn from_rows<R: AsRef<[f64]>>(d: usize, rows: &[R]) -> Result<Self> {
        let mut set = Self::empty(d);
        for row in rows {
            set.push(row.as_ref())?;
        }
        Ok(set)
    }

    /// Centers located at the given data points.
    pub fn from_indices(data: &Dataset, indices: &[usize]) -> Result<Self> {
        let mut set = Self::empty(data.dim());
        for &i in indices {
            data.check_index(i)?;
            set.coords.extend_from_slice(data.point(i));
        }
        Ok(set)
    }

    pub fn push(&mut self, center: &[f64]) -> Result<()> {
        if center.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: center.len() });
        }
        self.coords.extend_from_slice(center);
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn center(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }
}

/// Cluster ids `0..k` for each point of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<usize>,
    k: usize,
}

impl Labeling {
    /// `k` is taken as one past the largest label.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        if k == 0 {
            return Err(Error::EmptySet);
        }
        Ok(Self { labels, k })
    }

    pub fn with_k(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::invalid(format!("label {bad} out of range for k = {k}")));
        }
        if labels.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(Self { labels, k })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Member indices of every cluster, in index order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut clusters = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            clusters[l].push(i);
        }
        clusters
    }

    pub fn check_matches(&self, data: &Dataset) -> Result<()> {
        if self.labels.len() != data.len() {
            return Err(Error::invalid(format!(
                "labeling covers {} points but dataset has {}",
                self.labels.len(),
                data.len()
            )));
        }
        Ok(())
    }
}

/// Reads the dataset CSV: header `x0,...,x{d-1}[,label]`, one row per point.
pub fn read_csv<R: Read>(reader: R) -> Result<(Dataset, Option<Labeling>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let has_label = headers.iter().next_back() == Some("label");
    let d = headers.len() - usize::from(has_label);
    if d == 0 {
        return Err(Error::Format("no coordinate columns".into()));
    }
    for (j, h) in headers.iter().take(d).enumerate() {
        if h != format!("x{j}") {
            return Err(Error::Format(format!("expected column x{j}, found {h:?}")));
        }
    }

    let mut coords = Vec::new();
    let mut labels = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let line = row + 2;
        if record.len() != headers.len() {
            return Err(Error::Format(format!("line {line}: expected {} fields", headers.len())));
        }
        for field in record.iter().take(d) {
            let v: f64 = field.parse().map_err(|_| Error::Format(format!("line {line}: bad coordinate {field:?}")))?;
            coords.push(v);
        }
        if has_label {
            let field = &record[d];
            let l: usize = field.parse().map_err(|_| Error::Format(format!("line {line}: bad label {field:?}")))?;
            labels.push(l);
        }
    }
    if coords.is_empty() {
        return Err(Error::EmptySet);
    }
    let data = Dataset::from_flat(coords, d)?;
    let labeling = if has_label { Some(Labeling::new(labels)?) } else { None };
    Ok((data, labeling))
}

pub fn write_csv<W: Write>(writer: W, data: &Dataset, labels: Option<&Labeling>) -> Result<()> {
    if let Some(l) = labels {
        l.check_matches(data)?;
    }
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..data.dim()).map(|j| format!("x{j}")).collect();
    if labels.is_some() {
        header.push("label".into());
    }
    wtr.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for (i, p) in data.points().enumerate() {
        row.clear();
        row.extend(p.iter().map(|v| v.to_string()));
        if let Some(l) = labels {
            row.push(l.label(i).to_string());
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
