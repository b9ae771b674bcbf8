//! Enumeration and uniform sampling of `N(r, s, n)`, null-model labelings,
//! the folded binomial law of the 2 x 2 null MED, and degree-of-overlap
//! perturbations.

mod enumerate;
mod folded;
mod perturb;
mod sampling;

pub use enumerate::{
    count_compositions, count_confusion_matrices, enumerate_confusion_matrices, first_rows, EnumerationCursor,
};
pub use folded::{folded_binomial_max_prob, folded_binomial_pmf, FoldedMax};
pub use perturb::{perturb_from_diagonal, DegreeOfOverlapState};
pub use sampling::{
    estimate_cardinality, null_labels, random_composition, random_composition_into, sample_confusion_matrix,
    CardinalityEstimate, SampleRng, SamplerConfig,
};
