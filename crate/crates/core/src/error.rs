use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("generated group exceeds the size cap of {cap}")]
    ClosureExceedsCap { cap: usize },
    #[error("unknown group family `{0}`")]
    UnknownFamily(String),
    #[error("parameter {n} out of range for family `{family}`")]
    ParameterOutOfRange { family: String, n: i64 },
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    #[error("invalid group descriptor: {0}")]
    InvalidDescriptor(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("numerator does not vanish on w = -z at total degree {degree}")]
    NotDivisible { degree: usize },
    #[error("division by a non-monomial equivariant scalar")]
    NonMonomialDivision,
    #[error("cannot parse `{0}`")]
    Parse(String),
    #[error("mismatched number of equivariant variables: {0} vs {1}")]
    VariableMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PsiError {
    #[error("unstable input: 2g-2+n = {excess} <= 0 (g = {g}, n = {n})")]
    UnstableInput { g: u32, n: usize, excess: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharError {
    #[error("character table computation failed: {0}")]
    TableComputationFailed(String),
    #[error("invalid character table: {0}")]
    InvalidTable(String),
    #[error("character sum did not cancel to a rational")]
    NonRationalResult,
    #[error("enumeration needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error(transparent)]
    Psi(#[from] PsiError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChenRuanError {
    #[error("eigenvalue multiplicity for summand {summand} at class {class}, l = {l} is not a nonnegative integer")]
    NonIntegerMultiplicity { summand: usize, class: usize, l: u32 },
    #[error("invalid representation: {0}")]
    InvalidRep(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RMatrixError {
    #[error("symplectic identity fails at z^{degree} (entry {row},{col})")]
    SymplecticCheckFailed { degree: usize, row: usize, col: usize },
    #[error("truncation order must be at least 1")]
    ZeroOrder,
    #[error("E-matrix entry is not fixed by complex conjugation")]
    NonRealEntry,
    #[error(transparent)]
    ChenRuan(#[from] ChenRuanError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("dilaton leaf height {0} is below 2")]
    HeightBelowTwo(u32),
    #[error("correlator coefficient is not rational")]
    NonRationalCoefficient,
    #[error("unstable request: 2g-2+n = {0} <= 0")]
    Unstable(i64),
    #[error("height {height} exceeds the R-matrix truncation {order}")]
    BeyondTruncation { height: usize, order: usize },
    #[error("invalid insertion: {0}")]
    InvalidInsertion(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Psi(#[from] PsiError),
    #[error(transparent)]
    RMatrix(#[from] RMatrixError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("potential needs more than {budget} terms")]
    BudgetExceeded { budget: usize },
    #[error("truncation too tight: {0}")]
    TruncationTooTight(String),
    #[error("mismatch at {monomial}: graph sum {graph}, quantization {oracle}")]
    MismatchFound { monomial: String, graph: String, oracle: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    RMatrix(#[from] RMatrixError),
    #[error(transparent)]
    Char(#[from] CharError),
}

/// Crate-wide error; `code()` gives the module-qualified name used by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Psi(#[from] PsiError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    ChenRuan(#[from] ChenRuanError),
    #[error(transparent)]
    RMatrix(#[from] RMatrixError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl Error {
    pub fn code(&self) -> String {
        fn variant<T: std::fmt::Debug>(e: &T) -> String {
            let s = format!("{e:?}");
            s.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("").to_string()
        }
        match self {
            Error::Group(e) => format!("group.{}", variant(e)),
            Error::Algebra(e) => format!("algebra.{}", variant(e)),
            Error::Psi(e) => format!("psi.{}", variant(e)),
            Error::Char(e) => format!("chars.{}", variant(e)),
            Error::ChenRuan(e) => format!("chen_ruan.{}", variant(e)),
            Error::RMatrix(e) => format!("rmatrix.{}", variant(e)),
            Error::Graph(e) => format!("graph_sum.{}", variant(e)),
            Error::Oracle(e) => format!("oracle.{}", variant(e)),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
