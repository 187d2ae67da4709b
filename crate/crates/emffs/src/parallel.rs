//! Parallel versions of the fitting steps. Work is split per sample or per
//! feature and recombined in a fixed order, so results are bit-identical
//! to the sequential functions in the core crate.

use std::collections::BTreeMap;

use emffs_core::discretizer::{mdl_cut_points, numeric_values};
use emffs_core::filters::{Neighbors, ReliefF, ReliefFParams};
use emffs_core::{Dataset, DiscretizationModel, Error, FeatureKind, Result};
use rayon::prelude::*;

/// Same as [`emffs_core::filters::relieff_weights`], with the neighbour
/// search spread over the rayon pool.
pub fn relieff_weights(d: &Dataset, params: &ReliefFParams) -> Result<Vec<f64>> {
    let r = ReliefF::new(d, params.k_neighbors)?;
    let samples = r.sample_rows(params.m_samples, params.seed)?;
    let neighbors: Vec<Neighbors> = samples.par_iter().map(|&s| r.neighbors(s)).collect();
    Ok(r.accumulate(&neighbors))
}

/// Same as [`emffs_core::fit_mdl_discretizer`], one feature per task.
pub fn fit_mdl_discretizer(d: &Dataset) -> Result<DiscretizationModel> {
    d.ensure_binarized()?;
    let continuous: Vec<usize> = d
        .schema()
        .features()
        .iter()
        .filter(|f| f.kind == FeatureKind::Continuous)
        .map(|f| f.index)
        .collect();
    let cuts = continuous
        .par_iter()
        .map(|&f| {
            let values = numeric_values(d.column(f)?)
                .ok_or_else(|| Error::Schema(format!("feature {f} is not numeric")))?;
            Ok((f, mdl_cut_points(&values, d.labels(), d.n_classes())))
        })
        .collect::<Result<BTreeMap<usize, Vec<f64>>>>()?;
    DiscretizationModel::from_cuts(d.schema().len(), cuts)
}
