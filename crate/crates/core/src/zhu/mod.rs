//! Twisted Zhu products, the spans `O_{g,n,m}(V)`, truncated quotients
//! `A_{g,n}(V)`, `A_{g,n,m}(V)` and the annihilation checks against modules.

mod annihilation;
mod certify;
mod generators;
mod products;
mod quotient;

pub use annihilation::{check_annihilation, AnnihilationReport, Trace, Violation, ZeroModeTrace};
pub use certify::{certify_annihilation, CertifyStats};
pub use generators::{
    for_each_generator, prime_generators, GeneratorBounds, GeneratorKind, GeneratorLabel,
};
pub use products::{
    circ_product, circ_terms, circ_weight_bound, l_generator, left_action, residue, right_action,
    star_product, star_terms, star_weight_bound, zhu_product, ZhuParams,
};
pub use quotient::{
    build_o_span, build_o_span_keeping, quotient, InducedModule, OSpan, QuotientAlgebra,
    SpanCutoffs, TableEntry,
};
