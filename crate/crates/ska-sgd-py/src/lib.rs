use pyo3::prelude::*;
#[pymodule]
fn ska_sgd_py(_m: &Bound<'_, PyModule>) -> PyResult<()> { Ok(()) }
