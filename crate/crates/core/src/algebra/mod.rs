//! Exact linear algebra and simplicial cohomology.

mod cohomology;
mod reduce;
mod snf;

pub use cohomology::{
    cohomology, image_rank, induced_map, induced_map_degree, is_monomorphism, kernel_rank, subcomplex_cohomology,
    surface_cohomology, ChainData, CohomologyResult, InducedMap,
};
pub use reduce::{dense_rank, reduce_columns, Field, Reduction, SparseVec};
pub use snf::{gcd, invariant_factors, smith_diagonal, smith_normal_form, IntegerMatrix};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Coeff {
    Z,
    #[default]
    Z2,
}

impl Coeff {
    /// Field used for rank decisions: ℤ₂ itself, or a large prime for ℤ.
    pub fn field(self) -> Field {
        match self {
            Coeff::Z2 => Field::F2,
            Coeff::Z => Field::BIG,
        }
    }
}

impl std::str::FromStr for Coeff {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "z" | "Z" => Ok(Coeff::Z),
            "z2" | "Z2" => Ok(Coeff::Z2),
            _ => Err(crate::Error::Param(format!("unknown coefficients {s}; expected z or z2"))),
        }
    }
}

impl std::fmt::Display for Coeff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Coeff::Z => "z",
            Coeff::Z2 => "z2",
        })
    }
}
