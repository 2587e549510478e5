//! Finite-precision tilts of truncated rings, sharp maps, Teichmuller lifts,
//! and decision procedures for closure properties of monomial rings and
//! valuation rings.

pub mod arith;
pub mod closure;
pub mod error;
pub mod report;
pub mod tilt;
pub mod valuation;
pub mod witt;

pub use arith::{Ring, RingCtx, RingElem, RingExt, RingKind};
pub use closure::{complete_integral_closure_monoid, ideal_transfer_check, is_almost_integral, is_integral, is_p_root_closed, is_semiperfect, mt1_conclusion_check, mt2_hypotheses_audit, MonoElem, MonomialRing};
pub use error::{Error, Result};
pub use report::{CheckReport, Verdict};
pub use tilt::{limit_pth_powers, sharp, tilt_add, tilt_add_to, tilt_frobenius, tilt_frobenius_inv, tilt_lift, tilt_mul, TiltElem};
pub use witt::{sharp_equals_teichmuller, teichmuller, unique_p_root_in_sharp_image, WittCtx};
pub use valuation::{val_almost_integral, val_cic, val_completion_check, val_height_one_exists, GroupElem, ValModel, ValueGroup, ValueSet};
