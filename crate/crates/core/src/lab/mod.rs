//! Numerical side of the lower-bound argument and statistical checks of the
//! concentration lemmas used by the upper bound.

pub mod balance;
pub mod beta;
pub mod bound;
pub mod concentration;
pub mod normal;

pub use balance::{
    martingale_step_holds, merge_step, simulate_balance, AdversaryWorld, BalanceStats, ComponentState,
    MergeCase, Side, Strategy,
};
pub use beta::{beta_interval, beta_polynomial};
pub use bound::{bound_integrand, lower_bound_constant, predict_bound, predict_bound_fraction};
pub use normal::normal_cdf;
