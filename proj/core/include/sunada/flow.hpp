#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "sunada/defaults.hpp"
#include "sunada/manifold.hpp"

namespace sunada::geo {

/// Hamilton's equations for H = |xi|^2_g / 2:
///   dx^a/dt = g^{ab} xi_b,   dxi_a/dt = -1/2 d_a g^{bc} xi_b xi_c.
PhaseVec hamilton_rhs(const Manifold& m, const PhasePoint& p);

struct StepControl {
  double abs_tol = defaults::rk_abs_tol;
  double rel_tol = defaults::rk_rel_tol;
  double initial_step = 1e-2;
  double min_step = 1e-13;
  std::size_t max_steps = 2'000'000;
};

struct FlowPath {
  std::vector<double> times;
  std::vector<PhasePoint> points;
  double max_energy_drift = 0.0;  ///< max | |xi|^2_g - 1 | seen before renormalization
  std::size_t steps = 0;
};

/// Dormand-Prince 5(4) with adaptive steps, unit-covector renormalization after
/// every accepted step, chart changes as needed. Records every accepted step.
FlowPath integrate_flow(const Manifold& m, const PhasePoint& p0, double t_end, const StepControl& step = {});

/// Endpoint of the flow together with dG^t in Sasaki-orthonormal frames.
struct FlowJet {
  PhasePoint start;
  PhasePoint endpoint;
  double time = 0.0;
  /// Columns: images of the start frame (X, h(e_i), v(e_i)) in the endpoint frame.
  FrameMat monodromy;
  FrameToCoord start_frame;
  FrameToCoord end_frame;
  double max_energy_drift = 0.0;
  /// |M e_X - e_X|_max: the flow direction maps to itself.
  double flow_residual = 0.0;
  /// |M^T W M - W|_max with W the contact symplectic pairing <h, v'> - <v, h'>.
  double symplectic_residual = 0.0;
};

/// Variational equations integrated alongside the flow for the 2n-1 frame
/// directions; chart changes multiply segment matrices in frame coordinates.
FlowJet integrate_monodromy(const Manifold& m, const PhasePoint& p0, double t_end, const StepControl& step = {});

/// Block-diagonal contact pairing W = diag(0, [[0, I], [-I, 0]]) of size 2n-1.
FrameMat contact_form(std::size_t n);

/// Stateful integrator that can be advanced in pieces; used where many stop
/// times along one trajectory are needed.
class FlowPropagator {
 public:
  FlowPropagator(const Manifold& m, const PhasePoint& p0, bool variational, const StepControl& step = {});
  ~FlowPropagator();
  FlowPropagator(FlowPropagator&&) noexcept;
  FlowPropagator& operator=(FlowPropagator&&) noexcept;

  /// Integrates forward to absolute time t (t >= time()).
  void advance_to(double t);
  /// Also records every accepted step into `path`.
  void advance_to(double t, FlowPath& path);

  double time() const;
  PhasePoint point() const;
  /// dG^t from the start frame to the current frame. Requires variational mode.
  FrameMat monodromy() const;
  double max_energy_drift() const;
  std::size_t steps() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sunada::geo
