#pragma once

#include <cstddef>
#include <vector>

namespace mehybrid {

/// One classical fourth-order Runge-Kutta step for an autonomous system
/// y' = f(y). `f(y, dydt)` writes the derivative into its second argument.
/// The scratch buffers are resized on first use so repeated calls do not
/// allocate.
class Rk4Stepper {
 public:
  template <class Rhs>
  void step(Rhs&& f, std::vector<double>& y, double dt) {
    const std::size_t n = y.size();
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    tmp_.resize(n);
    f(y, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k1_[i];
    f(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k2_[i];
    f(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];
    f(tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) y[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

 private:
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace mehybrid
