#include "critsys/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "critsys/errors.hpp"

namespace critsys {

namespace {

template <class T>
T ipow(T base, int exponent) {
  T out(1);
  while (exponent > 0) {
    if (exponent & 1) out *= base;
    base *= base;
    exponent >>= 1;
  }
  return out;
}

template <class T>
void check_dims(const SystemParams& params, const BasicPhaseState<T>& state) {
  const auto m = static_cast<std::size_t>(params.m);
  if (state.u.size() != m || state.v.size() != m) {
    throw ContractViolation(fmt::format("phase state has ({}, {}) components, system has m = {}",
                                        state.u.size(), state.v.size(), params.m));
  }
}

template <class T>
T squared_radius(const std::vector<T>& u) {
  T s(0);
  for (const auto& x : u) s += x * x;
  return s;
}

void check_observable(const Observable& obs, const SystemParams& params) {
  switch (obs.kind) {
    case ObservableKind::Hamiltonian:
      return;
    case ObservableKind::Angular:
      if (params.m < 2 || obs.index < 1 || obs.index > params.m - 1) {
        throw ContractViolation(fmt::format("Angular({}) needs m >= 2 and 1 <= i <= m-1 (m = {})",
                                            obs.index, params.m));
      }
      return;
    case ObservableKind::Deformation:
      if (!std::isfinite(obs.s)) throw ContractViolation("deformation parameter must be finite");
      for (double mu : params.mu) {
        if (obs.s == mu) throw PoleError(fmt::format("deformation parameter s = {} equals some mu_j", obs.s));
      }
      return;
  }
}

/// Sums entering the quartic-coupling integral.
template <class T>
struct DeformationSums {
  std::vector<double> delta;
  T radius{0};   // sum u_j^2
  T du{0};       // sum delta_j u_j^2
  T dv{0};       // sum delta_j v_j^2
  T duv{0};      // sum delta_j u_j v_j
  T linear{0};   // sum delta_j (v_j^2 + mu_j u_j^2)
};

template <class T>
DeformationSums<T> deformation_sums(const Observable& obs, const SystemParams& params,
                                    const BasicPhaseState<T>& x) {
  DeformationSums<T> d;
  d.delta.resize(params.mu.size());
  for (std::size_t j = 0; j < params.mu.size(); ++j) {
    const double dj = 1.0 / (obs.s - params.mu[j]);
    d.delta[j] = dj;
    const T uu = x.u[j] * x.u[j];
    const T vv = x.v[j] * x.v[j];
    d.radius += uu;
    d.du += dj * uu;
    d.dv += dj * vv;
    d.duv += dj * x.u[j] * x.v[j];
    d.linear += dj * (vv + params.mu[j] * uu);
  }
  return d;
}

double form_sign(DeformationForm form) { return form == DeformationForm::AsPrinted ? 1.0 : -1.0; }

}  // namespace

SystemParams SystemParams::make(int k, int epsilon, std::vector<double> mu) {
  SystemParams p;
  p.m = static_cast<int>(mu.size());
  p.k = k;
  p.epsilon = epsilon;
  p.mu = std::move(mu);
  p.validate();
  return p;
}

void SystemParams::validate() const {
  if (m < 1) throw ContractViolation("m must be >= 1");
  if (k < 2) throw ContractViolation(fmt::format("k must be >= 2 (got {})", k));
  if (epsilon != 1 && epsilon != -1) throw ContractViolation("epsilon must be +1 or -1");
  if (mu.size() != static_cast<std::size_t>(m)) {
    throw ContractViolation(fmt::format("mu has {} entries, expected m = {}", mu.size(), m));
  }
  for (double x : mu) {
    if (!std::isfinite(x)) throw ContractViolation("mu entries must be finite");
  }
}

Observable Observable::hamiltonian() { return {}; }

Observable Observable::angular(int i) {
  Observable o;
  o.kind = ObservableKind::Angular;
  o.index = i;
  return o;
}

Observable Observable::deformation(double s, DeformationForm form) {
  Observable o;
  o.kind = ObservableKind::Deformation;
  o.s = s;
  o.form = form;
  return o;
}

std::string Observable::name() const {
  switch (kind) {
    case ObservableKind::Hamiltonian:
      return "H";
    case ObservableKind::Angular:
      return fmt::format("I{}", index);
    case ObservableKind::Deformation:
      return fmt::format("D(s={:.17g}{})", s, form == DeformationForm::AsPrinted ? "" : ",corrected");
  }
  return "?";
}

void check_state(const SystemParams& params, const PhaseState& state) {
  check_dims(params, state);
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    if (!std::isfinite(state.u[i]) || !std::isfinite(state.v[i])) {
      throw ContractViolation("phase state has non-finite entries");
    }
  }
}

template <class T>
T hamiltonian_value(const SystemParams& params, const BasicPhaseState<T>& x) {
  check_dims(params, x);
  T quadratic(0);
  for (std::size_t i = 0; i < x.u.size(); ++i) {
    quadratic += x.v[i] * x.v[i] + params.mu[i] * x.u[i] * x.u[i];
  }
  const T s = squared_radius(x.u);
  return T(0.5) * quadratic - T(params.epsilon / (2.0 * params.k)) * ipow(s, params.k);
}

template <class T>
BasicPhaseState<T> vector_field(const SystemParams& params, const BasicPhaseState<T>& x) {
  check_dims(params, x);
  const T coupling = T(params.epsilon) * ipow(squared_radius(x.u), params.k - 1);
  BasicPhaseState<T> out;
  out.u = x.v;
  out.v.resize(x.u.size());
  for (std::size_t i = 0; i < x.u.size(); ++i) {
    out.v[i] = (coupling - params.mu[i]) * x.u[i];
  }
  return out;
}

template <class T>
T eval_observable(const Observable& obs, const SystemParams& params, const BasicPhaseState<T>& x) {
  check_dims(params, x);
  check_observable(obs, params);
  switch (obs.kind) {
    case ObservableKind::Hamiltonian:
      return hamiltonian_value(params, x);
    case ObservableKind::Angular: {
      const auto i = static_cast<std::size_t>(obs.index);
      return x.u[0] * x.v[i] - x.u[i] * x.v[0];
    }
    case ObservableKind::Deformation: {
      const auto d = deformation_sums(obs, params, x);
      return d.radius * d.du - d.du * d.dv + d.duv * d.duv + T(2.0 * form_sign(obs.form)) * d.linear;
    }
  }
  return T(0);
}

template <class T>
BasicGradient<T> observable_gradient(const Observable& obs, const SystemParams& params,
                                     const BasicPhaseState<T>& x) {
  check_dims(params, x);
  check_observable(obs, params);
  const std::size_t m = x.u.size();
  BasicGradient<T> g{std::vector<T>(m, T(0)), std::vector<T>(m, T(0))};
  switch (obs.kind) {
    case ObservableKind::Hamiltonian: {
      const T coupling = T(params.epsilon) * ipow(squared_radius(x.u), params.k - 1);
      for (std::size_t i = 0; i < m; ++i) {
        g.du[i] = (params.mu[i] - coupling) * x.u[i];
        g.dv[i] = x.v[i];
      }
      break;
    }
    case ObservableKind::Angular: {
      const auto i = static_cast<std::size_t>(obs.index);
      g.du[0] = x.v[i];
      g.du[i] = -x.v[0];
      g.dv[0] = -x.u[i];
      g.dv[i] = x.u[0];
      break;
    }
    case ObservableKind::Deformation: {
      const auto d = deformation_sums(obs, params, x);
      const T sign4 = T(4.0 * form_sign(obs.form));
      for (std::size_t j = 0; j < m; ++j) {
        const T dj(d.delta[j]);
        g.du[j] = T(2) * x.u[j] * d.du + T(2) * dj * x.u[j] * (d.radius - d.dv) + T(2) * d.duv * dj * x.v[j] +
                  sign4 * dj * params.mu[j] * x.u[j];
        g.dv[j] = T(-2) * d.du * dj * x.v[j] + T(2) * d.duv * dj * x.u[j] + sign4 * dj * x.v[j];
      }
      break;
    }
  }
  return g;
}

template double hamiltonian_value(const SystemParams&, const PhaseState&);
template std::complex<double> hamiltonian_value(const SystemParams&, const ComplexPhaseState&);
template PhaseState vector_field(const SystemParams&, const PhaseState&);
template ComplexPhaseState vector_field(const SystemParams&, const ComplexPhaseState&);
template double eval_observable(const Observable&, const SystemParams&, const PhaseState&);
template std::complex<double> eval_observable(const Observable&, const SystemParams&, const ComplexPhaseState&);
template Gradient observable_gradient(const Observable&, const SystemParams&, const PhaseState&);
template BasicGradient<std::complex<double>> observable_gradient(const Observable&, const SystemParams&,
                                                                 const ComplexPhaseState&);

namespace {

Gradient operand_gradient(const BracketOperand& f, const SystemParams& params, const PhaseState& x) {
  if (const auto* obs = std::get_if<Observable>(&f)) return observable_gradient(*obs, params, x);
  const auto& user = std::get<UserFunction>(f);
  if (!user.gradient) {
    throw UnsupportedObservable(fmt::format("function '{}' does not provide a gradient", user.name));
  }
  Gradient g = user.gradient(x);
  if (g.du.size() != x.u.size() || g.dv.size() != x.v.size()) {
    throw ContractViolation(fmt::format("gradient of '{}' has the wrong dimension", user.name));
  }
  return g;
}

}  // namespace

double poisson_bracket(const BracketOperand& f, const BracketOperand& g, const SystemParams& params,
                       const PhaseState& state) {
  check_dims(params, state);
  const Gradient gf = operand_gradient(f, params, state);
  const Gradient gg = operand_gradient(g, params, state);
  double out = 0.0;
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    out += gf.dv[i] * gg.du[i] - gf.du[i] * gg.dv[i];
  }
  return out;
}

int independence_rank(std::span<const Observable> observables, const SystemParams& params,
                      std::span<const PhaseState> states) {
  if (observables.empty()) throw EmptyInput("independence_rank needs at least one observable");
  if (states.empty()) throw EmptyInput("independence_rank needs at least one state");
  const auto m = static_cast<Eigen::Index>(params.m);
  int best = 0;
  for (const auto& x : states) {
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(observables.size()), 2 * m);
    for (std::size_t r = 0; r < observables.size(); ++r) {
      const Gradient g = observable_gradient(observables[r], params, x);
      for (Eigen::Index i = 0; i < m; ++i) {
        jac(static_cast<Eigen::Index>(r), i) = g.du[static_cast<std::size_t>(i)];
        jac(static_cast<Eigen::Index>(r), m + i) = g.dv[static_cast<std::size_t>(i)];
      }
    }
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(jac).singularValues();
    int rank = 0;
    if (sv.size() > 0 && sv(0) > 0.0) {
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > 1e-10 * sv(0)) ++rank;
      }
    }
    best = std::max(best, rank);
  }
  return best;
}

Observable conserved_deformation(const SystemParams& params, double s) {
  return Observable::deformation(s, params.epsilon == -1 ? DeformationForm::AsPrinted
                                                         : DeformationForm::SignCorrected);
}

std::vector<double> generic_spectral_values(const SystemParams& params) {
  const double top = *std::max_element(params.mu.begin(), params.mu.end());
  std::vector<double> out;
  for (int j = 0; j < params.m; ++j) out.push_back(top + 0.75 + 0.5 * j);
  return out;
}

std::vector<Observable> applicable_integrals(const SystemParams& params) {
  params.validate();
  std::vector<Observable> out{Observable::hamiltonian()};
  const bool equal_mu =
      std::all_of(params.mu.begin(), params.mu.end(), [&](double x) { return x == params.mu.front(); });
  if (equal_mu) {
    for (int i = 1; i < params.m; ++i) out.push_back(Observable::angular(i));
  }
  if (params.k == 2) {
    for (double s : generic_spectral_values(params)) out.push_back(conserved_deformation(params, s));
  }
  return out;
}

}  // namespace critsys
