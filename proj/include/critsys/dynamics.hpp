#pragma once

// Polynomial Hamiltonian family
//
//   H = 1/2 sum_i (v_i^2 + mu_i u_i^2) - epsilon/(2k) (sum_j u_j^2)^k
//
// with m degrees of freedom, its vector field, the canonical Poisson bracket
// and the explicit first integrals known for the integrable members.

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace critsys {

struct SystemParams {
  int m = 1;
  int k = 2;
  int epsilon = 1;
  std::vector<double> mu;

  /// Builds and validates; m is taken from mu.size().
  static SystemParams make(int k, int epsilon, std::vector<double> mu);

  /// Throws ContractViolation unless m >= 1, k >= 2, epsilon = +-1 and
  /// mu holds m finite values.
  void validate() const;
};

template <class T>
struct BasicPhaseState {
  std::vector<T> u;
  std::vector<T> v;

  std::size_t dof() const noexcept { return u.size(); }
};

using PhaseState = BasicPhaseState<double>;
using ComplexPhaseState = BasicPhaseState<std::complex<double>>;

/// Gradient of a phase-space function, split into d/du and d/dv blocks.
template <class T>
struct BasicGradient {
  std::vector<T> du;
  std::vector<T> dv;
};

using Gradient = BasicGradient<double>;

/// Which sign the last term 2 sum delta_j (v_j^2 + mu_j u_j^2) of the
/// quartic-coupling integral carries. The textbook form (plus sign) is a
/// first integral when epsilon = -1; for epsilon = +1 the sign must be
/// flipped. See README "Deformation integral".
enum class DeformationForm { AsPrinted, SignCorrected };

enum class ObservableKind { Hamiltonian, Angular, Deformation };

struct Observable {
  ObservableKind kind = ObservableKind::Hamiltonian;
  int index = 0;      // Angular(i), 1-based, 1 <= i <= m-1
  double s = 0.0;     // Deformation(s), spectral parameter, s != mu_j
  DeformationForm form = DeformationForm::AsPrinted;

  static Observable hamiltonian();
  static Observable angular(int i);
  static Observable deformation(double s, DeformationForm form = DeformationForm::AsPrinted);

  std::string name() const;
};

template <class T>
T hamiltonian_value(const SystemParams& params, const BasicPhaseState<T>& state);

/// (u', v') with u'_i = v_i and v'_i = -mu_i u_i + epsilon (sum u_j^2)^(k-1) u_i.
template <class T>
BasicPhaseState<T> vector_field(const SystemParams& params, const BasicPhaseState<T>& state);

template <class T>
T eval_observable(const Observable& obs, const SystemParams& params, const BasicPhaseState<T>& state);

/// Hand-coded analytic gradient of a built-in observable.
template <class T>
BasicGradient<T> observable_gradient(const Observable& obs, const SystemParams& params,
                                     const BasicPhaseState<T>& state);

/// Arbitrary phase-space function. Brackets need the gradient callback;
/// leaving it empty makes poisson_bracket throw UnsupportedObservable.
struct UserFunction {
  std::string name;
  std::function<double(const PhaseState&)> value;
  std::function<Gradient(const PhaseState&)> gradient;
};

using BracketOperand = std::variant<Observable, UserFunction>;

/// {F, G} = sum_i (dF/dv_i dG/du_i - dF/du_i dG/dv_i).
double poisson_bracket(const BracketOperand& f, const BracketOperand& g, const SystemParams& params,
                       const PhaseState& state);

/// Max over states of the numerical rank of the stacked gradients; singular
/// values count when above 1e-10 times the largest one.
int independence_rank(std::span<const Observable> observables, const SystemParams& params,
                      std::span<const PhaseState> states);

/// Deformation integral in the form conserved for params.epsilon (k = 2).
Observable conserved_deformation(const SystemParams& params, double s);

/// m spectral values away from every mu_j, used to sample the deformation
/// integral instead of expanding it in powers of s.
std::vector<double> generic_spectral_values(const SystemParams& params);

/// Explicit first integrals for the integrable members: H always, I_i when all
/// mu are equal, and the deformation integral at generic_spectral_values when
/// k = 2. Empty extra list otherwise.
std::vector<Observable> applicable_integrals(const SystemParams& params);

/// Throws ContractViolation when the state does not have m components or
/// contains non-finite entries.
void check_state(const SystemParams& params, const PhaseState& state);

}  // namespace critsys
