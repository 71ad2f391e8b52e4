//! Python bindings: the construction object plus the standalone space and
//! index helpers. Values cross the boundary as plain Python types; sparse
//! vectors become `{coordinate: coefficient}` dicts.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lp_averages::block_index::{self, BlockCoordinates, Sign};
use lp_averages::construction::{ConstructionSpec, SpecConfig};
use lp_averages::diagnostics;
use lp_averages::lp_space::{PExponent, SparseVector};
use lp_averages::moduli;
use lp_averages::{average, Error};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector_to_dict(v: &SparseVector) -> BTreeMap<u64, f64> {
    v.iter().collect()
}

/// (q, s, t, norm, predicted) row of the blow-up table.
type BlowupTuple = (u64, f64, f64, f64, f64);

fn sign_from_i8(sign: i8) -> PyResult<Sign> {
    match sign {
        -1 => Ok(Sign::Minus),
        1 => Ok(Sign::Plus),
        other => Err(PyValueError::new_err(format!(
            "sign must be -1 or +1, got {other}"
        ))),
    }
}

/// Quasi-norm `(sum |v_i|^p)^(1/p)` of a sparse vector given as a dict.
#[pyfunction]
fn quasi_norm(entries: BTreeMap<u64, f64>, p: f64) -> PyResult<f64> {
    let p = PExponent::new(p).map_err(py_err)?;
    Ok(SparseVector::from_entries(entries).quasi_norm(p))
}

/// The modulus C_q = q^(1/p - 1).
#[pyfunction]
fn concavity_modulus(q: u64, p: f64) -> PyResult<f64> {
    let p = PExponent::new(p).map_err(py_err)?;
    Ok(moduli::concavity_modulus(q, p))
}

/// Brute-force lower bound for C_q on a simplex grid (q <= 6).
#[pyfunction]
fn modulus_sup_oracle(q: u64, p: f64, resolution: f64) -> PyResult<f64> {
    let p = PExponent::new(p).map_err(py_err)?;
    moduli::modulus_sup_oracle(q, p, resolution).map_err(py_err)
}

/// Decompose a flat index into (q, j, sign).
#[pyfunction]
fn decode(k: u64) -> PyResult<(u64, u64, i8)> {
    let c = block_index::decode(k).map_err(py_err)?;
    Ok((c.q, c.j, c.sign.as_i8()))
}

/// Flat index of the block coordinates (q, j, sign).
#[pyfunction]
fn encode(q: u64, j: u64, sign: i8) -> PyResult<u64> {
    let sign = sign_from_i8(sign)?;
    let c = BlockCoordinates::new(q, j, sign).map_err(py_err)?;
    block_index::encode(c).map_err(py_err)
}

/// Basis coordinate assigned to the witness position (q, j).
#[pyfunction]
fn coordinate(q: u64, j: u64) -> PyResult<u64> {
    block_index::coordinate(q, j).map_err(py_err)
}

/// A resolved construction: exponent p plus the coefficient rules.
#[pyclass]
struct Construction {
    inner: ConstructionSpec,
}

#[pymethods]
impl Construction {
    #[new]
    #[pyo3(signature = (p, variant = "thm14", b = None, q_cap = None, tol = None, amplitude = None, beta = None))]
    fn new(
        p: f64,
        variant: &str,
        b: Option<f64>,
        q_cap: Option<u64>,
        tol: Option<f64>,
        amplitude: Option<String>,
        beta: Option<String>,
    ) -> PyResult<Self> {
        let cfg = SpecConfig {
            p,
            variant: variant.to_string(),
            b,
            q_cap,
            tol,
            amplitude,
            beta,
        };
        Ok(Self {
            inner: ConstructionSpec::try_from(cfg).map_err(py_err)?,
        })
    }

    /// Parse from the JSON config format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: ConstructionSpec =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p().get()
    }

    #[getter]
    fn variant(&self) -> &'static str {
        self.inner.variant().name()
    }

    #[getter]
    fn q_cap(&self) -> u64 {
        self.inner.q_cap()
    }

    fn __repr__(&self) -> String {
        format!(
            "Construction(p={}, variant={})",
            self.inner.p().get(),
            self.inner.variant().name()
        )
    }

    fn config_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("serializable config")
    }

    fn amplitude(&self, q: u64) -> f64 {
        self.inner.amplitude(q)
    }

    fn beta(&self, q: u64) -> f64 {
        self.inner.beta(q)
    }

    fn beta_tail(&self, q: u64) -> f64 {
        self.inner.beta_tail(q)
    }

    fn amplitude_modulus(&self, q: u64) -> f64 {
        self.inner.amplitude_modulus(q)
    }

    fn separate_ratio(&self, q: u64) -> f64 {
        self.inner.separate_ratio(q)
    }

    /// Interval length lambda_k.
    fn interval_length(&self, k: u64) -> PyResult<f64> {
        self.inner.lambda(k).map_err(py_err)
    }

    /// Partition node t_k.
    fn node(&self, k: u64) -> PyResult<f64> {
        self.inner.node(k).map_err(py_err)
    }

    /// The interval containing u, as (k, left, right, midpoint, length).
    fn locate(&self, u: f64) -> PyResult<(u64, f64, f64, f64, f64)> {
        let iv = self.inner.locate(u).map_err(py_err)?;
        Ok((iv.k, iv.left, iv.right, iv.midpoint, iv.length))
    }

    /// The block vector x_k as a dict.
    fn x_vector(&self, k: u64) -> PyResult<BTreeMap<u64, f64>> {
        Ok(vector_to_dict(&self.inner.x_vector(k).map_err(py_err)?))
    }

    /// Evaluate the tent-sum function at u.
    fn eval(&self, u: f64) -> PyResult<BTreeMap<u64, f64>> {
        Ok(vector_to_dict(&self.inner.f_eval(u).map_err(py_err)?))
    }

    fn eval_norm(&self, u: f64) -> PyResult<f64> {
        Ok(self
            .inner
            .f_eval(u)
            .map_err(py_err)?
            .quasi_norm(self.inner.p()))
    }

    /// `sum_{k=m}^{n} lambda_k x_k` as a dict.
    fn partial_sum(&self, m: u64, n: u64) -> PyResult<BTreeMap<u64, f64>> {
        Ok(vector_to_dict(
            &self.inner.partial_sum(m, n).map_err(py_err)?,
        ))
    }

    fn tail_ratio(&self, n: u64) -> PyResult<f64> {
        self.inner.tail_ratio(n).map_err(py_err)
    }

    /// `int_s^t f` as a dict.
    fn integral(&self, s: f64, t: f64) -> PyResult<BTreeMap<u64, f64>> {
        Ok(vector_to_dict(
            &average::integral(&self.inner, s, t).map_err(py_err)?,
        ))
    }

    /// The average over [s, t]: (norm, entries dict).
    fn average(&self, s: f64, t: f64) -> PyResult<(f64, BTreeMap<u64, f64>)> {
        let sample = average::ave(&self.inner, s, t).map_err(py_err)?;
        Ok((sample.norm, vector_to_dict(&sample.value)))
    }

    fn average_norm(&self, s: f64, t: f64) -> PyResult<f64> {
        Ok(average::ave(&self.inner, s, t).map_err(py_err)?.norm)
    }

    /// Norm of the midpoint Riemann sum at dyadic mesh 2^-m.
    fn riemann_norm(&self, m: u32) -> PyResult<f64> {
        let partition = average::TaggedPartition::uniform_dyadic(m, average::TagRule::Midpoint);
        Ok(average::riemann_sum(&self.inner, &partition)
            .map_err(py_err)?
            .quasi_norm(self.inner.p()))
    }

    /// Rows (q, s, t, norm, predicted) of the half-block blow-up table.
    fn blowup(&self, q_max: u64) -> PyResult<Vec<BlowupTuple>> {
        Ok(average::blowup_rows(&self.inner, q_max)
            .map_err(py_err)?
            .into_iter()
            .map(|r| (r.q, r.s, r.t, r.norm, r.predicted))
            .collect())
    }

    /// Largest half-block average norm up to block q_max: a lower bound
    /// for the Lipschitz quasi-norm of the primitive.
    fn lipschitz_quotient(&self, q_max: u64) -> PyResult<f64> {
        average::lipschitz_quotient(&self.inner, q_max).map_err(py_err)
    }

    /// Largest block-aligned average norm inside the window [lo, 1)^2.
    fn window_max(&self, lo: f64) -> PyResult<f64> {
        average::window_max(&self.inner, lo).map_err(py_err)
    }

    /// Taxonomy label, e.g. "BOUNDED_NOT_SEPARATELY".
    fn classify(&self) -> String {
        diagnostics::classify(&self.inner).to_string()
    }

    /// Full diagnostics report as a JSON document.
    fn diagnostics_json(&self, q_max: u64) -> PyResult<String> {
        let report = diagnostics::report(&self.inner, q_max).map_err(py_err)?;
        serde_json::to_string_pretty(&report).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

#[pymodule]
fn lp_averages_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Construction>()?;
    m.add_function(wrap_pyfunction!(quasi_norm, m)?)?;
    m.add_function(wrap_pyfunction!(concavity_modulus, m)?)?;
    m.add_function(wrap_pyfunction!(modulus_sup_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(coordinate, m)?)?;
    Ok(())
}
