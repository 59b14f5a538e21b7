//! `congame analyze-region`: rasterize a feasible region, label its
//! components and check slice contiguity.

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use congame_core::games::{counterexample_region, example_region, identical_interest_game, COUNTEREXAMPLE_BOX};
use congame_core::region::{
    parse_region, rasterize, slice_convexity_check, write_components_csv, write_pgm, GridRegion, SliceViolation,
};
use congame_core::Constraint;

use crate::CliError;

#[derive(Args, Clone, Debug)]
pub struct RegionArgs {
    /// example-1, example-2, identical-interest, counterexample or custom-file
    #[arg(long)]
    pub which: String,
    /// Cells per axis
    #[arg(long, default_value_t = 400)]
    pub resolution: usize,
    /// Region description for --which custom-file
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Threshold of the identical-interest constraint 1 - x1 x2 >= alpha
    #[arg(long, default_value_t = 0.85)]
    pub alpha: f64,
    #[arg(long, env = "CONGAME_OUTPUT_DIR", default_value = "congame-output")]
    pub output_dir: PathBuf,
}

#[derive(Debug)]
pub struct RegionOutcome {
    pub region: GridRegion,
    pub violations: Vec<SliceViolation>,
}

/// Constraints with the lower and upper corners of their box.
type RegionInput = (Vec<Constraint>, Vec<f64>, Vec<f64>);

fn region_input(args: &RegionArgs) -> Result<RegionInput, CliError> {
    let cfg = |e: congame_core::Error| CliError::config(e.to_string());
    let unit = (vec![0.0, 0.0], vec![1.0, 1.0]);
    Ok(match args.which.as_str() {
        "example-1" => (example_region(1).map_err(cfg)?, unit.0, unit.1),
        "example-2" => (example_region(2).map_err(cfg)?, unit.0, unit.1),
        "identical-interest" => {
            let spec = identical_interest_game(1.0, 1.0, args.alpha).map_err(cfg)?;
            (spec.constraints().to_vec(), unit.0, unit.1)
        }
        "counterexample" => (
            counterexample_region(),
            COUNTEREXAMPLE_BOX.0.to_vec(),
            COUNTEREXAMPLE_BOX.1.to_vec(),
        ),
        "custom-file" => {
            let path = args.file.as_ref().ok_or_else(|| CliError::config("--which custom-file needs --file"))?;
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
            let parsed = parse_region(&text).map_err(cfg)?;
            (parsed.constraints, parsed.lower, parsed.upper)
        }
        other => {
            return Err(CliError::config(format!(
                "unknown region '{other}' (expected example-1, example-2, identical-interest, counterexample or custom-file)"
            )))
        }
    })
}

pub fn analyze_region(args: &RegionArgs) -> Result<RegionOutcome, CliError> {
    let (constraints, lower, upper) = region_input(args)?;
    let resolution = vec![args.resolution; lower.len()];
    let region = rasterize(&constraints, &lower, &upper, &resolution).map_err(|e| CliError::config(e.to_string()))?;
    let violations = slice_convexity_check(&region);

    let dir = &args.output_dir;
    fs::create_dir_all(dir)?;
    if region.dims.len() == 2 {
        write_pgm(&region, BufWriter::new(fs::File::create(dir.join("region.pgm"))?))?;
    }
    write_components_csv(&region, BufWriter::new(fs::File::create(dir.join("components.csv"))?))?;

    let mut report = String::new();
    writeln!(report, "region={}", args.which).unwrap();
    writeln!(report, "resolution={}", args.resolution).unwrap();
    writeln!(report, "feasible_cells={}", region.mask.iter().filter(|m| **m).count()).unwrap();
    writeln!(report, "component_count={}", region.component_count).unwrap();
    writeln!(report, "slice_violations={}", violations.len()).unwrap();
    for v in violations.iter().take(20) {
        let line: Vec<String> = v.line.iter().map(|c| c.to_string()).collect();
        writeln!(
            report,
            "violation axis={} line={} component={} runs={}",
            v.axis + 1,
            line.join(","),
            v.component + 1,
            v.runs
        )
        .unwrap();
    }
    fs::write(dir.join("report.txt"), report)?;
    Ok(RegionOutcome { region, violations })
}
