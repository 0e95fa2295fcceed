//! Run manifests: every output artifact is accompanied by a sidecar JSON
//! recording the configuration hash, tool version, grid diagnostics, and
//! wall time.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

#[derive(Debug, Clone, Serialize, Default)]
pub struct GridDiagnostics {
    /// Analytic bound on the truncated tail mass.
    pub tail_bound: f64,
    /// Worst pre-rescale norm defect seen across evolutions.
    pub renorm_delta: f64,
    /// Worst edge-band mass seen across evolutions.
    pub edge_band_mass: f64,
    pub grid_cells: usize,
    pub grid_dx: f64,
    pub grid_half_width: f64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub diagnostics: GridDiagnostics,
    pub wall_time_ms: u128,
}

pub struct ManifestBuilder {
    start: Instant,
    config_hash: u64,
    pub diagnostics: GridDiagnostics,
}

impl ManifestBuilder {
    pub fn new(config_hash: u64) -> Self {
        Self {
            start: Instant::now(),
            config_hash,
            diagnostics: GridDiagnostics::default(),
        }
    }

    /// Folds one evolved packet's diagnostics into the running worst case.
    pub fn record(&mut self, tail_bound: f64, renorm_delta: f64, edge_band_mass: f64) {
        let d = &mut self.diagnostics;
        d.tail_bound = d.tail_bound.max(tail_bound);
        d.renorm_delta = d.renorm_delta.max(renorm_delta);
        d.edge_band_mass = d.edge_band_mass.max(edge_band_mass);
    }

    pub fn record_grid(&mut self, cells: usize, dx: f64, half_width: f64) {
        self.diagnostics.grid_cells = cells;
        self.diagnostics.grid_dx = dx;
        self.diagnostics.grid_half_width = half_width;
    }

    pub fn finish(self) -> RunManifest {
        RunManifest {
            tool: "causalflow",
            version: env!("CARGO_PKG_VERSION"),
            config_hash: format!("{:016x}", self.config_hash),
            diagnostics: self.diagnostics,
            wall_time_ms: self.start.elapsed().as_millis(),
        }
    }

    /// Writes `<out>.manifest.json` beside the artifact at `out`.
    pub fn write_beside(self, out: &Path) -> std::io::Result<()> {
        let manifest = self.finish();
        let path = out.with_extension(format!(
            "{}manifest.json",
            out.extension()
                .map(|e| format!("{}.", e.to_string_lossy()))
                .unwrap_or_default()
        ));
        std::fs::write(
            path,
            serde_json::to_string_pretty(&manifest).expect("manifest serialises"),
        )
    }
}
