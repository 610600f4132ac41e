//! CSV and JSON exports.
//!
//! Every writer produces bytes first; files are written through a temporary
//! file in the target directory and renamed into place.
//!
//! Vertex coordinates are written twice: as exact dyadic fractions
//! `x = x_num/x_den` and `h = h_num/h_den`, where `h` is the height in units
//! of `√3/2` (corners `(0,0)`, `(1,0)`, `(1/2,1)`), and as Euclidean
//! floating-point `x, y`.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::fields::FieldSample;
use crate::gasket::GasketGraph;
use crate::lab::Series;
use crate::spectral::SpectralDecomposition;

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| e.into_error().into())
}

/// `index,x_num,x_den,h_num,h_den,x,y,boundary,address`
pub fn vertices_csv(graph: &GasketGraph) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "x_num", "x_den", "h_num", "h_den", "x", "y", "boundary", "address"])?;
    for (i, p) in graph.points().iter().enumerate() {
        let (xn, xd) = p.x_fraction();
        let (yn, yd) = p.t_fraction();
        let [x, y] = graph.coords()[i];
        w.write_record([
            i.to_string(),
            xn.to_string(),
            xd.to_string(),
            yn.to_string(),
            yd.to_string(),
            x.to_string(),
            y.to_string(),
            (graph.is_boundary(i) as u8).to_string(),
            graph.addresses()[i].to_string(),
        ])?;
    }
    finish(w)
}

/// `u,v` with `u < v`, sorted.
pub fn edges_csv(graph: &GasketGraph) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["u", "v"])?;
    for &(u, v) in graph.edges() {
        w.write_record([u.to_string(), v.to_string()])?;
    }
    finish(w)
}

/// `index,lambda`, one-based and ascending.
pub fn eigenvalues_csv(spec: &SpectralDecomposition) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "lambda"])?;
    for (i, l) in spec.eigenvalues().iter().enumerate() {
        w.write_record([(i + 1).to_string(), l.to_string()])?;
    }
    finish(w)
}

/// One row per vertex of `V_m`, one column `phi_j` per eigenfunction.
pub fn eigenvectors_csv(spec: &SpectralDecomposition) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["vertex".to_string()];
    header.extend((1..=spec.len()).map(|j| format!("phi_{j}")));
    w.write_record(&header)?;
    let columns: Vec<Vec<f64>> = (0..spec.len()).map(|j| spec.eigenfunction(j)).collect();
    for v in 0..spec.vertex_count() {
        let mut row = vec![v.to_string()];
        row.extend(columns.iter().map(|c| c[v].to_string()));
        w.write_record(&row)?;
    }
    finish(w)
}

/// `vertex,value` for one field.
pub fn field_csv(sample: &FieldSample) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["vertex", "value"])?;
    for (v, x) in sample.values.iter().enumerate() {
        w.write_record([v.to_string(), x.to_string()])?;
    }
    finish(w)
}

/// One row per vertex, one column per field, headed by its seed.
pub fn ensemble_csv(samples: &[FieldSample]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["vertex".to_string()];
    header.extend(samples.iter().map(|s| format!("seed_{}", s.seed)));
    w.write_record(&header)?;
    let len = samples.first().map_or(0, |s| s.values.len());
    for v in 0..len {
        let mut row = vec![v.to_string()];
        row.extend(samples.iter().map(|s| s.values[v].to_string()));
        w.write_record(&row)?;
    }
    finish(w)
}

/// Two columns named by the series labels.
pub fn series_csv(series: &Series) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([series.x_label.as_str(), series.y_label.as_str()])?;
    for (x, y) in series.x.iter().zip(&series.y) {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    finish(w)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes `bytes` to `path` by way of a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
