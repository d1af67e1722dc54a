// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

namespace shrinktm {

/// |z| bound for the reference-normal scale; forward() never leaves [-bound, bound].
inline constexpr double kZClamp = 8.2;

/// log density of the standard Student t with `dof` degrees of freedom.
double student_t_log_pdf(double w, double dof);

/// Phi^{-1}(F_dof(w)), evaluated through the tail probability on whichever side
/// of zero w lies so that neither CDF saturates. The result is clamped to
/// [-kZClamp, kZClamp]; `clamped` is set when that happens.
double t_to_normal(double w, double dof, bool* clamped = nullptr);

/// F_dof^{-1}(Phi(z)), the inverse of t_to_normal on the unclamped range.
double normal_to_t(double z, double dof);

double normal_cdf(double z);
double normal_quantile(double p);
double student_t_cdf(double w, double dof);

}  // namespace shrinktm
