//! JSON walk specifications:
//! `{"kernel": {"p_1_1": …, …, "p_-1_-1": …}}` or
//! `{"family": {"alpha": …, "beta": …, "p11": …, "p10": …}}`.

use std::path::Path;

use quarter_green_core::walk::{cubic_parameters, kernel_from_cubic_family, CubicFamilyParams, JumpKernel};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

/// Tolerance used to recognise a raw kernel as a family member.
const FAMILY_DETECT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    #[serde(rename = "p_1_1", default)]
    pub p_1_1: f64,
    #[serde(rename = "p_1_0", default)]
    pub p_1_0: f64,
    #[serde(rename = "p_1_-1", default)]
    pub p_1_m1: f64,
    #[serde(rename = "p_0_1", default)]
    pub p_0_1: f64,
    #[serde(rename = "p_0_-1", default)]
    pub p_0_m1: f64,
    #[serde(rename = "p_-1_1", default)]
    pub p_m1_1: f64,
    #[serde(rename = "p_-1_0", default)]
    pub p_m1_0: f64,
    #[serde(rename = "p_-1_-1", default)]
    pub p_m1_m1: f64,
}

impl KernelSpec {
    pub fn to_kernel(&self) -> JumpKernel {
        JumpKernel::from_entries(&[
            ((1, 1), self.p_1_1),
            ((1, 0), self.p_1_0),
            ((1, -1), self.p_1_m1),
            ((0, 1), self.p_0_1),
            ((0, -1), self.p_0_m1),
            ((-1, 1), self.p_m1_1),
            ((-1, 0), self.p_m1_0),
            ((-1, -1), self.p_m1_m1),
        ])
    }

    pub fn from_kernel(k: &JumpKernel) -> Self {
        Self {
            p_1_1: k.p(1, 1),
            p_1_0: k.p(1, 0),
            p_1_m1: k.p(1, -1),
            p_0_1: k.p(0, 1),
            p_0_m1: k.p(0, -1),
            p_m1_1: k.p(-1, 1),
            p_m1_0: k.p(-1, 0),
            p_m1_m1: k.p(-1, -1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub alpha: f64,
    pub beta: f64,
    pub p11: f64,
    pub p10: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
}

/// A spec resolved to a kernel, with the cubic parameters when known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedWalk {
    pub kernel: JumpKernel,
    /// `(α, β)` from the family block, or recovered from the kernel moments.
    pub cubic: Option<(f64, f64)>,
}

impl ResolvedWalk {
    pub fn require_cubic(&self) -> AppResult<(f64, f64)> {
        self.cubic
            .ok_or_else(|| AppError::Spec("kernel admits no harmonic cubic i j (i + alpha j + beta)".into()))
    }
}

impl WalkSpec {
    pub fn from_kernel(k: &JumpKernel) -> Self {
        Self {
            kernel: Some(KernelSpec::from_kernel(k)),
            family: None,
        }
    }

    pub fn from_family(alpha: f64, beta: f64, p11: f64, p10: f64) -> Self {
        Self {
            kernel: None,
            family: Some(FamilySpec { alpha, beta, p11, p10 }),
        }
    }

    pub fn parse(text: &str) -> AppResult<Self> {
        let spec: WalkSpec = serde_json::from_str(text).map_err(|e| AppError::Spec(e.to_string()))?;
        match (&spec.kernel, &spec.family) {
            (Some(_), Some(_)) => Err(AppError::Spec("give exactly one of \"kernel\" and \"family\", not both".into())),
            (None, None) => Err(AppError::Spec("one of \"kernel\" or \"family\" is required".into())),
            _ => Ok(spec),
        }
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::parse(&text)
    }

    /// Builds the kernel. Family blocks go through the feasibility checks;
    /// raw kernels are returned as given (validation is a separate step).
    pub fn resolve(&self) -> AppResult<ResolvedWalk> {
        match (&self.kernel, &self.family) {
            (Some(k), None) => {
                let kernel = k.to_kernel();
                Ok(ResolvedWalk {
                    kernel,
                    cubic: cubic_parameters(&kernel, FAMILY_DETECT_TOL),
                })
            }
            (None, Some(f)) => {
                let kernel = kernel_from_cubic_family(&CubicFamilyParams::new(f.alpha, f.beta, f.p11, f.p10))?;
                Ok(ResolvedWalk {
                    kernel,
                    cubic: Some((f.alpha, f.beta)),
                })
            }
            _ => Err(AppError::Spec("give exactly one of \"kernel\" and \"family\"".into())),
        }
    }
}
