//! The restricted I-function, its Picard–Fuchs operator, the asymptotic
//! expansion `e^{μ/z} Σ R_k z^k` and the L-variable differential system.

mod ifun;
mod lode;
mod solve;

pub use ifun::{ifun_coeff, ifun_series, pf_apply};
pub use lode::{derive_l_ode, derive_table, render_over, LOdeSystem};
pub use solve::{conjugated_operator, expand_asymptotic, solve_asymptotics, verify_asymptotic, AsymptoticData};
