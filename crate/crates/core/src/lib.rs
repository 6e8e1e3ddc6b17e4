//! Exact combinatorics of labeled rational polytopes: the moment data of
//! compact symplectic toric orbifolds, their isotropy groups, coverings,
//! bundle structures and cohomology.

pub mod bundle;
pub mod cli;
pub mod cohomology;
pub mod constructors;
pub mod labeled;
pub mod lattice;
pub mod polytope;
pub mod quotient;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
    #[error(transparent)]
    Polytope(#[from] polytope::PolytopeError),
    #[error(transparent)]
    Labeled(#[from] labeled::LabeledError),
    #[error(transparent)]
    Constructor(#[from] constructors::ConstructorError),
    #[error(transparent)]
    Bundle(#[from] bundle::BundleError),
    #[error(transparent)]
    Quotient(#[from] quotient::QuotientError),
    #[error(transparent)]
    Cohomology(#[from] cohomology::CohomologyError),
}

fn variant_name(debug: String) -> String {
    debug.split(['(', ' ', '{']).next().unwrap_or_default().to_string()
}

impl Error {
    /// Name of the innermost error variant, e.g. `NotACover`.
    pub fn name(&self) -> String {
        use bundle::BundleError as B;
        use constructors::ConstructorError as C;
        use quotient::QuotientError as Q;
        match self {
            Error::Lattice(e) | Error::Quotient(Q::Lattice(e)) => variant_name(format!("{e:?}")),
            Error::Polytope(e) => variant_name(format!("{e:?}")),
            Error::Labeled(e)
            | Error::Constructor(C::Labeled(e))
            | Error::Bundle(B::Labeled(e))
            | Error::Quotient(Q::Labeled(e)) => variant_name(format!("{e:?}")),
            Error::Constructor(e) => variant_name(format!("{e:?}")),
            Error::Bundle(e) => variant_name(format!("{e:?}")),
            Error::Quotient(e) => variant_name(format!("{e:?}")),
            Error::Cohomology(e) => variant_name(format!("{e:?}")),
        }
    }
}
