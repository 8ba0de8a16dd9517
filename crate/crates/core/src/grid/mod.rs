//! Hybrid AC/DC network data: types, case documents, validation and incidence.

mod incidence;
mod io;
mod types;
mod validate;

pub use incidence::{incidence, IncidenceMatrices};
pub use io::{
    load_case, load_case_file, serialize_case, BusDoc, CaseDocument, CaseError, ConverterDoc, GeneratorDoc, LineDoc,
    WindFarmDoc, CASE_FORMAT,
};
pub use types::*;
pub use validate::{validate, ValidationReport, Violation};
