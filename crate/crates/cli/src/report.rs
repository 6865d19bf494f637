use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sizing {
    pub n: Option<usize>,
    pub degree: Option<u32>,
    /// Largest Gram (or PSD block) side.
    pub gram_side: usize,
    /// Matching rows not absorbed by the bound variable.
    pub matching_rows: usize,
    pub num_vars: usize,
    pub num_rows: usize,
    pub nnz: usize,
    pub density: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub compile_s: f64,
    pub solve_s: f64,
    pub verify_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub max_mismatch: f64,
    pub min_eigenvalues: Vec<f64>,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub input: String,
    pub seed: u64,
    pub cone: Option<String>,
    pub solver: String,
    pub mode: Option<String>,
    pub sizing: Sizing,
    pub status: Option<String>,
    pub bound: Option<f64>,
    pub objective: Option<f64>,
    pub dual_objective: Option<f64>,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    /// Wall-clock seconds on this machine.
    pub timing: Timing,
    pub verification: Option<Verification>,
    pub diagnostics: Vec<String>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary_rows(&self) -> Vec<Vec<String>> {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.8}"));
        let mut rows = vec![
            vec!["input".into(), self.input.clone()],
            vec!["cone".into(), self.cone.clone().unwrap_or_else(|| "-".into())],
            vec!["solver".into(), self.solver.clone()],
            vec!["N".into(), self.sizing.gram_side.to_string()],
            vec!["m".into(), self.sizing.matching_rows.to_string()],
            vec!["density".into(), format!("{:.3e}", self.sizing.density)],
        ];
        if let Some(s) = &self.status {
            rows.push(vec!["status".into(), s.clone()]);
        }
        if self.bound.is_some() {
            rows.push(vec!["bound".into(), opt(self.bound)]);
        }
        if self.objective.is_some() {
            rows.push(vec!["objective".into(), opt(self.objective)]);
        }
        if let Some(it) = self.iterations {
            rows.push(vec!["iterations".into(), it.to_string()]);
        }
        if let Some(v) = &self.verification {
            rows.push(vec!["mismatch".into(), format!("{:.3e}", v.max_mismatch)]);
            rows.push(vec!["certified".into(), v.certified.to_string()]);
        }
        rows.push(vec!["compile s".into(), format!("{:.3}", self.timing.compile_s)]);
        rows.push(vec!["solve s".into(), format!("{:.3}", self.timing.solve_s)]);
        rows
    }
}

/// Left-aligned text columns, or right-aligned when the cell parses as a number.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut width: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for r in rows {
        for (c, cell) in r.iter().enumerate().take(cols) {
            width[c] = width[c].max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(c, s)| if s.parse::<f64>().is_ok() { format!("{s:>w$}", w = width[c]) } else { format!("{s:<w$}", w = width[c]) })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(headers.to_vec());
    out.push('\n');
    out.push_str(&width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}
