//! Validation, MMP, collection assembly and verification in one pass.

use crate::collections::{self, ExceptionalCollection};
use crate::error::Result;
use crate::fan::{self, StackyFan, ValidateOptions};
use crate::mmp::{self, MmpOptions, MmpStep};
use crate::verify::{self, VerificationReport};

#[derive(Clone, Copy, Debug, Default)]
pub struct PipelineConfig {
    pub mmp: MmpOptions,
    pub validate: ValidateOptions,
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub steps: Vec<MmpStep>,
    pub collection: ExceptionalCollection,
    pub report: VerificationReport,
}

pub fn pipeline(fan: &StackyFan, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    fan::validate_with(fan, &cfg.validate)
        .into_result()
        .map_err(|e| e.at("validate"))?;
    let steps = mmp::run_mmp_with(fan, &cfg.mmp).map_err(|e| e.at("mmp"))?;
    let collection = collections::build_from_steps(fan, &steps, &cfg.mmp).map_err(|e| e.at("collection"))?;
    let report = verify::verify_collection(fan, &collection);
    Ok(PipelineOutput {
        steps,
        collection,
        report,
    })
}
