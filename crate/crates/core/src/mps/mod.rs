//! Translation-invariant MPS families: canonical forms, overlap matrices, the
//! Berry and higher Berry connections and the integer invariants built from them.

mod family;
mod io;
mod overlap;
mod tensor;

pub use family::MPSFamily;
pub use io::{read_family, write_family, FamilyFile, TensorRecord, FAMILY_SCHEMA_VERSION};
pub use overlap::{edge_overlap, EdgeOverlap};
pub use tensor::{
    apply_gauge, injectivity_check, mixed_transfer, right_canonicalize, to_left_canonical,
    CanonicalResiduals, InjectivityReport, MPSTensor,
};
