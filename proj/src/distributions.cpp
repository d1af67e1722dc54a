// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/distributions.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace shrinktm {

namespace {

using boost::math::complement;

const boost::math::normal_distribution<double> kNormal(0.0, 1.0);

}  // namespace

double student_t_log_pdf(double w, double dof) {
  return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) - 0.5 * std::log(dof * std::numbers::pi) -
         0.5 * (dof + 1.0) * std::log1p(w * w / dof);
}

double t_to_normal(double w, double dof, bool* clamped) {
  if (clamped) *clamped = false;
  if (w == 0.0) return 0.0;
  const boost::math::students_t_distribution<double> t(dof);
  // upper tail probability of |w|
  const double tail = boost::math::cdf(complement(t, std::abs(w)));
  const double tail_bound = boost::math::cdf(kNormal, -kZClamp);
  double z;
  if (!(tail > tail_bound)) {
    z = kZClamp;
    if (clamped) *clamped = true;
  } else {
    z = boost::math::quantile(complement(kNormal, tail));
  }
  return w > 0.0 ? z : -z;
}

double normal_to_t(double z, double dof) {
  if (z == 0.0) return 0.0;
  const boost::math::students_t_distribution<double> t(dof);
  const double tail = boost::math::cdf(kNormal, -std::abs(z));
  const double w = boost::math::quantile(complement(t, tail));
  return z > 0.0 ? w : -w;
}

double normal_cdf(double z) { return boost::math::cdf(kNormal, z); }
double normal_quantile(double p) { return boost::math::quantile(kNormal, p); }

double student_t_cdf(double w, double dof) {
  return boost::math::cdf(boost::math::students_t_distribution<double>(dof), w);
}

}  // namespace shrinktm
