use nalgebra::{DVector, Matrix2};
use polyxfem::cli::bench;
use polyxfem::cli::{is_solver_failure, run_to_dir, RunConfig, Simulation as CoreSimulation};
use polyxfem::geometry::Vec2;
use polyxfem::material::{lame_from_engineering, MaterialModel};
use polyxfem::mesh::PolyMesh;
use polyxfem::{basis, fracture, io, Error};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(polyxfem, PolyxfemError, PyException);
create_exception!(polyxfem, ValidationError, PolyxfemError);
create_exception!(polyxfem, SolverError, PolyxfemError);

fn to_py(e: Error) -> PyErr {
    if is_solver_failure(&e) {
        SolverError::new_err(e.to_string())
    } else {
        ValidationError::new_err(e.to_string())
    }
}

fn pts(v: &[Vec2]) -> Vec<(f64, f64)> {
    v.iter().map(|p| (p.x, p.y)).collect()
}

fn mat2(m: &Matrix2<f64>) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

/// Parsed and validated run configuration.
#[pyclass(name = "Config", module = "polyxfem", skip_from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: RunConfig,
}

#[pymethods]
impl PyConfig {
    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        RunConfig::load(std::path::Path::new(path))
            .map(|inner| PyConfig { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (src, path = "<string>"))]
    fn from_str(src: &str, path: &str) -> PyResult<Self> {
        RunConfig::parse(src, path)
            .map(|inner| PyConfig { inner })
            .map_err(to_py)
    }

    /// One of the bundled benchmark configurations.
    #[staticmethod]
    fn bundled(name: &str) -> PyResult<Self> {
        bench::bundled(name)
            .map(|inner| PyConfig { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn bundled_names() -> Vec<&'static str> {
        bench::CONFIGS.iter().map(|(n, _)| *n).collect()
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn n_steps(&self) -> usize {
        self.inner.loading.n_steps
    }

    #[setter]
    fn set_n_steps(&mut self, n: usize) -> PyResult<()> {
        if n == 0 {
            return Err(ValidationError::new_err("n_steps must be at least 1"));
        }
        self.inner.loading.n_steps = n;
        Ok(())
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml()
    }

    fn build_mesh(&self) -> PyResult<PyMesh> {
        self.inner
            .build_mesh()
            .map(|inner| PyMesh { inner })
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Config(name={:?})", self.inner.name)
    }
}

/// Polygonal mesh.
#[pyclass(name = "Mesh", module = "polyxfem")]
struct PyMesh {
    inner: PolyMesh,
}

#[pymethods]
impl PyMesh {
    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        polyxfem::mesh::io::read(std::path::Path::new(path))
            .map(|inner| PyMesh { inner })
            .map_err(to_py)
    }

    #[getter]
    fn num_nodes(&self) -> usize {
        self.inner.num_nodes()
    }

    #[getter]
    fn num_elements(&self) -> usize {
        self.inner.num_elements()
    }

    #[getter]
    fn nodes(&self) -> Vec<(f64, f64)> {
        pts(&self.inner.nodes)
    }

    #[getter]
    fn elements(&self) -> Vec<Vec<usize>> {
        self.inner.elements.clone()
    }

    fn total_area(&self) -> f64 {
        self.inner.total_area()
    }

    fn boundary_sets(&self) -> Vec<String> {
        self.inner.boundary_sets.keys().cloned().collect()
    }

    fn to_text(&self) -> String {
        polyxfem::mesh::io::to_string(&self.inner)
    }

    #[pyo3(signature = (title = "mesh"))]
    fn to_vtk(&self, title: &str) -> String {
        io::vtk::to_string(&self.inner, &self.inner.nodes, &[], None, title)
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(elements={}, nodes={})",
            self.inner.num_elements(),
            self.inner.num_nodes()
        )
    }
}

/// Configured model with its load program; `solve` keeps the final state.
#[pyclass(name = "Simulation", module = "polyxfem")]
struct PySimulation {
    inner: CoreSimulation,
    u: Option<DVector<f64>>,
}

impl PySimulation {
    fn state(&self) -> PyResult<&DVector<f64>> {
        self.u
            .as_ref()
            .ok_or_else(|| PolyxfemError::new_err("call solve() first"))
    }
}

#[pymethods]
impl PySimulation {
    #[new]
    fn new(config: &PyConfig) -> PyResult<Self> {
        CoreSimulation::new(config.inner.clone())
            .map(|inner| PySimulation { inner, u: None })
            .map_err(to_py)
    }

    #[getter]
    fn num_dofs(&self) -> usize {
        self.inner.model.n_dofs()
    }

    #[getter]
    fn num_elements(&self) -> usize {
        self.inner.model.mesh.num_elements()
    }

    /// Run every load step; returns one dict per converged step.
    fn solve(&mut self, py: Python<'_>) -> PyResult<Vec<Py<pyo3::types::PyDict>>> {
        let (steps, out) = py.detach(|| self.inner.solve(|_, _| Ok(())));
        let state = out.map_err(to_py)?;
        self.u = Some(state.u);
        steps
            .iter()
            .map(|r| {
                let d = pyo3::types::PyDict::new(py);
                d.set_item("step", r.step)?;
                d.set_item("load", r.load)?;
                d.set_item("iterations", r.iterations)?;
                d.set_item("J", r.j)?;
                d.set_item("K", r.k)?;
                if let Some(t) = &r.tearing {
                    d.set_item("G_lake", t.g_lake())?;
                    d.set_item("G_lindley", t.g_lindley())?;
                    d.set_item("G_yeoh", t.g_yeoh())?;
                }
                Ok(d.unbind())
            })
            .collect()
    }

    /// Global dof vector of the solved state.
    fn dofs(&self) -> PyResult<Vec<f64>> {
        Ok(self.state()?.as_slice().to_vec())
    }

    /// J-integral of the solved state over a domain of `factor` cell sizes.
    fn j_integral(&self, factor: f64) -> PyResult<f64> {
        let u = self.state()?;
        let d = self.inner.domain_with_factor(factor).map_err(to_py)?;
        fracture::j_integral(&self.inner.model, u, &d).map_err(to_py)
    }

    fn stress_intensity_factors(&self, factor: f64) -> PyResult<(f64, f64)> {
        let u = self.state()?;
        let d = self.inner.domain_with_factor(factor).map_err(to_py)?;
        fracture::stress_intensity_factors(&self.inner.model, u, &d).map_err(to_py)
    }

    fn nodal_displacements(&self) -> PyResult<Vec<(f64, f64)>> {
        Ok(pts(&self.inner.model.nodal_displacements(self.state()?)))
    }

    fn element_stresses(&self) -> PyResult<Vec<[[f64; 2]; 2]>> {
        let s = self
            .inner
            .model
            .element_stresses(self.state()?)
            .map_err(to_py)?;
        Ok(s.iter().map(mat2).collect())
    }

    fn write_vtk(&self, path: &str) -> PyResult<()> {
        let u = self.state()?;
        io::vtk::write_solution(
            std::path::Path::new(path),
            &self.inner.model,
            u,
            &self.inner.config.name,
        )
        .map_err(to_py)
    }
}

/// Hyperelastic law evaluated at a 2x2 deformation gradient.
#[pyclass(name = "Material", module = "polyxfem", frozen)]
struct PyMaterial {
    inner: MaterialModel,
}

#[pymethods]
impl PyMaterial {
    #[staticmethod]
    fn linear(e: f64, nu: f64) -> PyResult<Self> {
        let (lambda, mu) = lame_from_engineering(e, nu).map_err(to_py)?;
        Ok(PyMaterial {
            inner: MaterialModel::LinearElastic { lambda, mu },
        })
    }

    #[staticmethod]
    fn neo_hookean(e: f64, nu: f64) -> PyResult<Self> {
        let (lambda, mu) = lame_from_engineering(e, nu).map_err(to_py)?;
        Ok(PyMaterial {
            inner: MaterialModel::NeoHookeanCompressible { lambda, mu },
        })
    }

    #[staticmethod]
    #[pyo3(signature = (mu, thickness = 1.0))]
    fn neo_hookean_ps(mu: f64, thickness: f64) -> PyResult<Self> {
        let inner = MaterialModel::NeoHookeanIncompressiblePS { mu, thickness };
        inner.validate().map_err(to_py)?;
        Ok(PyMaterial { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (mu1, mu2, thickness = 1.0))]
    fn mooney_rivlin_ps(mu1: f64, mu2: f64, thickness: f64) -> PyResult<Self> {
        let inner = MaterialModel::MooneyRivlinPS {
            mu1,
            mu2,
            thickness,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyMaterial { inner })
    }

    /// Cauchy stress at F.
    fn cauchy(&self, f: [[f64; 2]; 2]) -> PyResult<[[f64; 2]; 2]> {
        let f = Matrix2::new(f[0][0], f[0][1], f[1][0], f[1][1]);
        Ok(mat2(&self.inner.evaluate(&f).map_err(to_py)?.sigma))
    }

    /// Stored energy per undeformed volume at F.
    fn energy(&self, f: [[f64; 2]; 2]) -> PyResult<f64> {
        let f = Matrix2::new(f[0][0], f[0][1], f[1][0], f[1][1]);
        self.inner.strain_energy(&f).map_err(to_py)
    }
}

/// Mean value coordinates and their gradients at `x` in a counter-clockwise polygon.
#[pyfunction]
fn mean_value(ring: Vec<(f64, f64)>, x: (f64, f64)) -> PyResult<(Vec<f64>, Vec<(f64, f64)>)> {
    let ring: Vec<Vec2> = ring.iter().map(|p| Vec2::new(p.0, p.1)).collect();
    let s = basis::mean_value_grad(&ring, &Vec2::new(x.0, x.1)).map_err(to_py)?;
    Ok((s.values, pts(&s.grads)))
}

/// Patch-test rows (elements, L2 with, H1 with, L2 without, H1 without).
#[pyfunction]
#[pyo3(signature = (sizes = vec![10, 50, 250], seed = bench::PATCH_SEED))]
fn patch_test(sizes: Vec<usize>, seed: u64) -> PyResult<Vec<(usize, f64, f64, f64, f64)>> {
    bench::patch_table(&sizes, seed).map_err(to_py)
}

/// Full run with artifacts under `directory`; returns the JSON summary text.
#[pyfunction]
fn run(py: Python<'_>, config: &PyConfig, directory: &str) -> PyResult<String> {
    let cfg = config.inner.clone();
    let report = py
        .detach(|| run_to_dir(cfg, std::path::Path::new(directory)))
        .map_err(to_py)?;
    if let Some(e) = report.failure {
        return Err(to_py(e));
    }
    serde_json::to_string(&report.summary).map_err(|e| PolyxfemError::new_err(e.to_string()))
}

#[pymodule]
#[pyo3(name = "polyxfem")]
fn polyxfem_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("PolyxfemError", py.get_type::<PolyxfemError>())?;
    m.add("ValidationError", py.get_type::<ValidationError>())?;
    m.add("SolverError", py.get_type::<SolverError>())?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyMesh>()?;
    m.add_class::<PySimulation>()?;
    m.add_class::<PyMaterial>()?;
    m.add_function(wrap_pyfunction!(mean_value, m)?)?;
    m.add_function(wrap_pyfunction!(patch_test, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
