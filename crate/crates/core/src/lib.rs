//! Numerical verification of curvature identities for almost Hermitian
//! structures in dimension four.

pub mod algebra;
pub mod bianchi_bach;
pub mod chart;
pub mod decomp;
pub mod error;
pub mod expr;
pub mod gray;
pub mod jet;
pub mod report;
pub mod riemann;
pub mod sandbox;
pub mod tensor;
pub mod tolerance;

pub use chart::{catalog, load_chart, resolve_chart, structure_at, ChartSpec, StructurePoint};
pub use error::{ChartError, EvalError, GeometryError, JetError, ParseError, SandboxError};
pub use expr::{parse_expr, Expr};
pub use gray::Verdict;
pub use jet::Jet;
pub use report::{ReportDocument, RunConfig};
pub use tensor::{Field, Mat4, Tensor};
pub use tolerance::Tolerances;
