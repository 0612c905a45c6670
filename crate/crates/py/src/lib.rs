use pyo3::prelude::*;

#[pymodule]
fn _foliate(_py: Python<'_>, _m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
