//! Builtin state and channel names, and the JSON operator/channel formats.
//!
//! Operator files: `{"dims": [d1, ...], "matrix": [[[re, im], ...], ...]}`
//! with an optional `"labels"` list. Channel files:
//! `{"dim_in": d, "dim_out": d', "kraus": [matrix, ...]}`.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::operator::{
    ComplexMatrix, DensityMatrix, HermitianOperator, PositiveOperator, SubsystemShape,
};
use crate::scalar::{cplx, Real};

type Rows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
pub struct OperatorFile {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub matrix: Rows,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ChannelFile {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<Rows>,
}

fn rows_to_matrix<T: Real>(rows: &Rows) -> Result<ComplexMatrix<T>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(Error::Empty);
    }
    if let Some(bad) = rows.iter().find(|row| row.len() != c) {
        return Err(Error::Parse(format!("ragged matrix: row of length {} vs {c}", bad.len())));
    }
    let mut m = ComplexMatrix::zeros(r, c);
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = cplx(T::lit(z[0]), T::lit(z[1]));
        }
    }
    Ok(m)
}

pub fn matrix_to_rows<T: Real>(m: &ComplexMatrix<T>) -> Rows {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re.as_f64(), m[(i, j)].im.as_f64()])
                .collect()
        })
        .collect()
}

impl OperatorFile {
    pub fn shape(&self) -> Result<SubsystemShape> {
        match &self.labels {
            Some(l) => SubsystemShape::new(self.dims.clone(), l.clone()),
            None => SubsystemShape::with_default_labels(self.dims.clone()),
        }
    }

    pub fn to_hermitian<T: Real>(&self) -> Result<(HermitianOperator<T>, SubsystemShape)> {
        let shape = self.shape()?;
        let m = rows_to_matrix::<T>(&self.matrix)?;
        shape.check_dim(m.nrows())?;
        Ok((HermitianOperator::new(m)?, shape))
    }

    pub fn from_hermitian<T: Real>(op: &HermitianOperator<T>, shape: &SubsystemShape) -> Self {
        Self {
            dims: shape.factor_dims().to_vec(),
            labels: Some(shape.labels().to_vec()),
            matrix: matrix_to_rows(op.matrix()),
        }
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("{what}: cannot parse {x:?} as a number")))
        })
        .collect()
}

fn parse_dim(s: &str, what: &str) -> Result<usize> {
    match s.trim().parse::<usize>() {
        Ok(d) if d >= 1 => Ok(d),
        _ => Err(Error::Parse(format!("{what}: expected a positive dimension, got {s:?}"))),
    }
}

/// A builtin operator (`bell`, `ghz3`, `maxmixed:<d>`, `diag:<p,...>`,
/// `classical:<p11,p12;p21,p22>`) or `None` when `name` is not one.
fn builtin<T: Real>(name: &str) -> Option<Result<(HermitianOperator<T>, SubsystemShape)>> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let labelled = |dims: Vec<usize>| SubsystemShape::with_default_labels(dims);
    let out = match (head, arg) {
        ("bell", None) => (|| -> Result<_> {
            let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
            let z = T::zero();
            let psi = [cplx(h, z), cplx(z, z), cplx(z, z), cplx(h, z)];
            let rho: DensityMatrix<T> = DensityMatrix::pure(&psi)?;
            Ok(((*rho).clone(), labelled(vec![2, 2])?))
        })(),
        ("ghz3", None) => (|| -> Result<_> {
            let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
            let mut psi = vec![Complex::new(T::zero(), T::zero()); 8];
            psi[0] = cplx(h, T::zero());
            psi[7] = cplx(h, T::zero());
            let rho: DensityMatrix<T> = DensityMatrix::pure(&psi)?;
            Ok(((*rho).clone(), labelled(vec![2, 2, 2])?))
        })(),
        ("maxmixed", Some(d)) => parse_dim(d, "maxmixed").and_then(|d| {
            Ok((HermitianOperator::clone(&DensityMatrix::<T>::maximally_mixed(d)), labelled(vec![d])?))
        }),
        ("diag", Some(list)) => parse_list(list, "diag").and_then(|p| {
            let p: Vec<T> = p.into_iter().map(T::lit).collect();
            let d = p.len();
            Ok((HermitianOperator::from_real_diagonal(&p), labelled(vec![d])?))
        }),
        ("classical", Some(table)) => (|| -> Result<_> {
            let rows: Vec<Vec<f64>> = table
                .split(';')
                .map(|r| parse_list(r, "classical"))
                .collect::<Result<_>>()?;
            let cols = rows[0].len();
            if rows.iter().any(|r| r.len() != cols) {
                return Err(Error::Parse("classical: rows have different lengths".into()));
            }
            let p: Vec<T> = rows.iter().flatten().map(|&x| T::lit(x)).collect();
            Ok((HermitianOperator::from_real_diagonal(&p), labelled(vec![rows.len(), cols])?))
        })(),
        _ => return None,
    };
    Some(out)
}

/// Hermitian operator from a builtin name or a JSON operator file.
pub fn load_operator<T: Real>(source: &str) -> Result<(HermitianOperator<T>, SubsystemShape)> {
    if let Some(b) = builtin(source) {
        return b;
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(Error::Parse(format!(
            "{source:?} is neither a builtin name nor an existing file"
        )));
    }
    let file: OperatorFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    file.to_hermitian()
}

pub fn load_state<T: Real>(source: &str) -> Result<(DensityMatrix<T>, SubsystemShape)> {
    let (h, shape) = load_operator(source)?;
    Ok((DensityMatrix::from_hermitian(h)?, shape))
}

/// Reference operator: `identity` (of dimension `dim`), a builtin or a file.
pub fn load_positive<T: Real>(source: &str, dim: usize) -> Result<PositiveOperator<T>> {
    if source == "identity" {
        return Ok(PositiveOperator::identity(dim));
    }
    let (h, _) = load_operator(source)?;
    if h.dim() != dim {
        return Err(Error::DimensionMismatch(h.dim(), dim));
    }
    PositiveOperator::new(h)
}

pub fn write_operator<T: Real>(
    path: &Path,
    op: &HermitianOperator<T>,
    shape: &SubsystemShape,
) -> Result<()> {
    let json = serde_json::to_string_pretty(&OperatorFile::from_hermitian(op, shape))?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

/// Channel from a builtin (`identity:<d>`, `dephase:<d>`,
/// `depolarize:<d>:<p>`, `amplitude_damping:<γ>`) or a JSON channel file.
pub fn load_channel<T: Real>(source: &str) -> Result<KrausChannel<T>> {
    let parts: Vec<&str> = source.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("{source}: cannot parse {s:?} as a number")))
    };
    match parts.as_slice() {
        ["identity", d] => return Ok(KrausChannel::identity(parse_dim(d, "identity")?)),
        ["dephase", d] => return Ok(KrausChannel::dephasing(parse_dim(d, "dephase")?)),
        ["depolarize", d, p] => {
            return KrausChannel::depolarizing(parse_dim(d, "depolarize")?, T::lit(num(p)?))
        }
        ["amplitude_damping", g] => return KrausChannel::amplitude_damping(T::lit(num(g)?)),
        _ => {}
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(Error::Parse(format!(
            "{source:?} is neither a builtin channel nor an existing file"
        )));
    }
    let file: ChannelFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let ops = file
        .kraus
        .iter()
        .map(rows_to_matrix::<T>)
        .collect::<Result<Vec<_>>>()?;
    let ch = KrausChannel::new(ops)?;
    if ch.dim_in() != file.dim_in || ch.dim_out() != file.dim_out {
        return Err(Error::Parse(format!(
            "channel file declares {}->{} but Kraus operators are {}->{}",
            file.dim_in,
            file.dim_out,
            ch.dim_in(),
            ch.dim_out()
        )));
    }
    Ok(ch)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_have_expected_shapes() {
        let (bell, s) = load_state::<f64>("bell").unwrap();
        assert_eq!(s.factor_dims(), &[2, 2]);
        assert!((bell.matrix()[(0, 3)].re - 0.5).abs() < 1e-15);
        let (_, s) = load_state::<f64>("ghz3").unwrap();
        assert_eq!(s.factor_dims(), &[2, 2, 2]);
        let (m, s) = load_state::<f64>("maxmixed:3").unwrap();
        assert_eq!(s.factor_dims(), &[3]);
        assert!((m.matrix()[(1, 1)].re - 1.0 / 3.0).abs() < 1e-15);
        let (c, s) = load_state::<f64>("classical:0.1,0.2;0.3,0.4").unwrap();
        assert_eq!(s.factor_dims(), &[2, 2]);
        assert_eq!(c.matrix()[(2, 2)].re, 0.3);
        let (d, _) = load_state::<f64>("diag:0.75,0.25").unwrap();
        assert_eq!(d.matrix()[(0, 0)].re, 0.75);
    }

    #[test]
    fn bad_sources_are_rejected() {
        assert!(load_state::<f64>("maxmixed:0").is_err());
        assert!(load_state::<f64>("diag:0.5,x").is_err());
        assert!(load_state::<f64>("diag:0.5,0.6").is_err());
        assert!(load_state::<f64>("classical:0.5;0.25,0.25").is_err());
        assert!(load_state::<f64>("/nonexistent/file.json").is_err());
        assert!(load_channel::<f64>("depolarize:2").is_err());
    }

    #[test]
    fn operator_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("qinfospec-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rho.json");
        let (bell, shape) = load_state::<f64>("bell").unwrap();
        write_operator(&path, &bell, &shape).unwrap();
        let (back, shape2) = load_state::<f64>(path.to_str().unwrap()).unwrap();
        assert_eq!(shape, shape2);
        assert!((back.matrix() - bell.matrix()).norm() < 1e-15);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn channel_builtins_and_file() {
        let ad = load_channel::<f64>("amplitude_damping:0.5").unwrap();
        assert_eq!(ad.kraus_ops().len(), 2);
        let dep = load_channel::<f64>("depolarize:2:0.3").unwrap();
        assert!(dep.is_unital().unwrap().unital);
        assert_eq!(load_channel::<f64>("dephase:3").unwrap().dim_in(), 3);
        assert_eq!(load_channel::<f64>("identity:2").unwrap().kraus_ops().len(), 1);

        let dir = std::env::temp_dir().join(format!("qinfospec-ch-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ch.json");
        let file = ChannelFile {
            dim_in: 2,
            dim_out: 2,
            kraus: ad.kraus_as_rows(),
        };
        std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        let back = load_channel::<f64>(path.to_str().unwrap()).unwrap();
        for (a, b) in back.kraus_ops().iter().zip(ad.kraus_ops()) {
            assert!((a - b).norm() < 1e-15);
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
