//! Uniform time meshes and functions sampled on them.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::fmt_f64;

/// Uniform mesh `a = t_0 < t_1 < ... < t_{n-1} = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn new(a: f64, b: f64, n_points: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::InvalidGrid(format!("need finite a < b, got [{a}, {b}]")));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 nodes, got {n_points}")));
        }
        let h = (b - a) / (n_points - 1) as f64;
        let mut nodes: Vec<f64> = (0..n_points).map(|k| a + k as f64 * h).collect();
        nodes[n_points - 1] = b;
        Ok(Self { a, b, nodes })
    }

    /// Accepts externally supplied nodes (e.g. from CSV) if they are uniform
    /// within `8 eps (b - a)`.
    pub fn from_nodes(nodes: &[f64]) -> Result<Self> {
        let n = nodes.len();
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 nodes, got {n}")));
        }
        let grid = Self::new(nodes[0], nodes[n - 1], n)?;
        let tol = 8.0 * f64::EPSILON * (grid.b - grid.a);
        for (k, (&given, &ideal)) in nodes.iter().zip(&grid.nodes).enumerate() {
            if (given - ideal).abs() > tol.max(4.0 * f64::EPSILON * ideal.abs()) {
                return Err(Error::InvalidGrid(format!(
                    "node {k} = {given} deviates from the uniform position {ideal}"
                )));
            }
        }
        Ok(grid)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / (self.nodes.len() - 1) as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> f64 {
        self.nodes[k]
    }

    /// Same interval and resolution.
    pub fn matches(&self, other: &Grid) -> bool {
        self.nodes.len() == other.nodes.len() && self.a == other.a && self.b == other.b
    }

    /// Grid with every other node removed. Requires an odd node count.
    pub fn coarsen(&self) -> Option<Grid> {
        let n = self.len();
        if n % 2 == 0 || n < 5 {
            return None;
        }
        Grid::new(self.a, self.b, (n + 1) / 2).ok()
    }

    /// Grid with the step halved.
    pub fn refine(&self) -> Grid {
        Grid::new(self.a, self.b, 2 * self.len() - 1).expect("refining a valid grid")
    }
}

/// Values of a scalar function at the nodes of a [`Grid`], optionally with
/// samples of its classical derivatives (`derivs[k-1]` holds the k-th one).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
    derivs: Vec<Vec<f64>>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::with_derivs(grid, values, Vec::new())
    }

    pub fn with_derivs(grid: Grid, values: Vec<f64>, derivs: Vec<Vec<f64>>) -> Result<Self> {
        let n = grid.len();
        for row in std::iter::once(&values).chain(derivs.iter()) {
            if row.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: row.len() });
            }
        }
        Ok(Self { grid, values, derivs })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self { grid: grid.clone(), values, derivs: Vec::new() }
    }

    /// Samples `f` together with its first derivatives `df[0]`, `df[1]`, ...
    pub fn from_fn_with_derivs(grid: &Grid, f: impl Fn(f64) -> f64, df: &[&dyn Fn(f64) -> f64]) -> Self {
        let mut s = Self::from_fn(grid, f);
        s.derivs = df.iter().map(|d| grid.nodes().iter().map(|&t| d(t)).collect()).collect();
        s
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::from_fn(grid, |_| 0.0)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Samples of the `k`-th classical derivative (`k >= 1`).
    pub fn deriv(&self, k: usize) -> Option<&[f64]> {
        k.checked_sub(1).and_then(|i| self.derivs.get(i)).map(Vec::as_slice)
    }

    pub fn deriv_rows(&self) -> usize {
        self.derivs.len()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn without_derivs(&self) -> Self {
        Self { grid: self.grid.clone(), values: self.values.clone(), derivs: Vec::new() }
    }

    pub fn map_values(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self.grid.nodes().iter().zip(&self.values).map(|(&t, &v)| f(t, v)).collect();
        Self { grid: self.grid.clone(), values, derivs: Vec::new() }
    }

    /// `ca * self + cb * other`; derivative rows are kept only where both sides have them.
    pub fn lin_comb(&self, ca: f64, other: &SampledFunction, cb: f64) -> Result<Self> {
        if !self.grid.matches(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let comb = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| ca * x + cb * y).collect::<Vec<_>>();
        let rows = self.derivs.len().min(other.derivs.len());
        Ok(Self {
            grid: self.grid.clone(),
            values: comb(&self.values, &other.values),
            derivs: (0..rows).map(|i| comb(&self.derivs[i], &other.derivs[i])).collect(),
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Serializes as `t,value[,d1,d2,...]`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value");
        for k in 1..=self.derivs.len() {
            let _ = write!(out, ",d{k}");
        }
        out.push('\n');
        for (i, &t) in self.grid.nodes().iter().enumerate() {
            out.push_str(&fmt_f64(t));
            out.push(',');
            out.push_str(&fmt_f64(self.values[i]));
            for row in &self.derivs {
                out.push(',');
                out.push_str(&fmt_f64(row[i]));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, line)) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break line;
                    }
                }
                None => return Err(Error::Csv { line: 1, msg: "empty input".into() }),
            }
        };
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 2 || cols[0] != "t" || cols[1] != "value" {
            return Err(Error::Csv { line: 1, msg: format!("expected header 't,value[,d1,...]', got '{header}'") });
        }
        for (k, c) in cols[2..].iter().enumerate() {
            if *c != format!("d{}", k + 1) {
                return Err(Error::Csv { line: 1, msg: format!("unexpected column '{c}'") });
            }
        }
        let width = cols.len();
        let mut table: Vec<Vec<f64>> = vec![Vec::new(); width];
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != width {
                return Err(Error::Csv { line: idx + 1, msg: format!("expected {width} fields, got {}", fields.len()) });
            }
            for (col, field) in table.iter_mut().zip(fields) {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::Csv { line: idx + 1, msg: format!("not a number: '{field}'") })?;
                col.push(v);
            }
        }
        if table[0].windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Csv { line: 0, msg: "nodes must be strictly increasing".into() });
        }
        let grid = Grid::from_nodes(&table[0])?;
        let mut cols = table.into_iter().skip(1);
        let values = cols.next().unwrap_or_default();
        Self::with_derivs(grid, values, cols.collect())
    }
}

/// Composite trapezoidal rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n - 1]))
}

/// Running trapezoidal integral, starting at 0.
pub fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_uniform_and_hits_endpoints() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(10), 1.0);
        assert!((g.step() - 0.1).abs() < 1e-15);
        assert!(Grid::from_nodes(g.nodes()).is_ok());
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(Grid::new(1.0, 0.0, 5).is_err());
        assert!(Grid::new(0.0, 1.0, 2).is_err());
        assert!(Grid::from_nodes(&[0.0, 0.3, 1.0]).is_err());
    }

    #[test]
    fn coarsen_and_refine_are_inverse() {
        let g = Grid::new(0.0, 2.0, 9).unwrap();
        assert!(g.refine().coarsen().unwrap().matches(&g));
        assert!(Grid::new(0.0, 1.0, 10).unwrap().coarsen().is_none());
    }

    #[test]
    fn csv_round_trip_keeps_derivative_rows() {
        let g = Grid::new(0.0, 1.0, 5).unwrap();
        let f = SampledFunction::from_fn_with_derivs(&g, |t| t * t, &[&|t| 2.0 * t]);
        let back = SampledFunction::from_csv(f.to_csv().as_bytes()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn csv_errors_are_located() {
        let err = SampledFunction::from_csv("t,value\n0,1\n0.5,x\n1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Csv { line: 3, .. }), "{err}");
        let err = SampledFunction::from_csv("time,value\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Csv { line: 1, .. }));
        let err = SampledFunction::from_csv("t,value\n0,1\n0,1\n1,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Csv { .. }));
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let g = Grid::new(0.0, 2.0, 21).unwrap();
        let f = SampledFunction::from_fn(&g, |t| 3.0 * t + 1.0);
        assert!((trapezoid(f.values(), g.step()) - 8.0).abs() < 1e-13);
        let c = cumulative_trapezoid(f.values(), g.step());
        assert_eq!(c[0], 0.0);
        assert!((c[20] - 8.0).abs() < 1e-13);
    }
}
