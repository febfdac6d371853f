#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pseudomul/xreal.hpp"

namespace pseudomul {

/// Outcome of one operation evaluation: a value, or a tagged domain fault.
/// Builtins are total; faults come from user-defined (DSL) operations and
/// are treated downstream as data, never as control flow.
class EvalResult {
 public:
  static EvalResult value(XReal v) { return EvalResult(v, {}); }
  static EvalResult fault(std::string code) {
    return EvalResult(XReal::zero(), std::move(code));
  }

  bool ok() const { return fault_.empty(); }
  XReal get() const {
    if (!ok()) throw std::runtime_error("evaluation fault: " + fault_);
    return value_;
  }
  const std::string& fault_code() const { return fault_; }

 private:
  EvalResult(XReal v, std::string f) : value_(v), fault_(std::move(f)) {}
  XReal value_;
  std::string fault_;  // empty means ok
};

/// A named binary operation on [0, inf] with optional declared left
/// identity and metadata. `landmarks` are operation-specific distinguished
/// points (e.g. the phi of the tanh family) that samplers fold into their
/// sweeps so boundary behavior is probed at exact parameter values.
struct PseudoMulOp {
  std::string name;
  std::function<EvalResult(XReal, XReal)> apply_fn;
  std::optional<XReal> declared_identity;
  std::optional<bool> commutative_hint;
  std::vector<XReal> landmarks;

  EvalResult apply(XReal s, XReal t) const { return apply_fn(s, t); }

  /// Convenience for operations known to be total.
  XReal value(XReal s, XReal t) const { return apply_fn(s, t).get(); }
};

/// Ordinary multiplication extended by 0*inf = inf*0 = 0 (the annihilator
/// axiom forces this; IEEE would hand back NaN) and s*inf = inf for s > 0.
inline PseudoMulOp builtin_times() {
  PseudoMulOp op;
  op.name = "times";
  op.declared_identity = XReal::finite(1.0);
  op.commutative_hint = true;
  op.apply_fn = [](XReal s, XReal t) {
    if (s.is_zero() || t.is_zero()) return EvalResult::value(XReal::zero());
    if (s.is_infinite() || t.is_infinite()) {
      return EvalResult::value(XReal::infinity());
    }
    // Overflow saturates to the infinite element.
    return EvalResult::value(XReal::from_double(s.magnitude() * t.magnitude()));
  };
  return op;
}

/// The infimum, a pseudo-multiplication with identity inf.
inline PseudoMulOp builtin_min() {
  PseudoMulOp op;
  op.name = "min";
  op.declared_identity = XReal::infinity();
  op.commutative_hint = true;
  op.apply_fn = [](XReal s, XReal t) {
    return EvalResult::value(s < t ? s : t);
  };
  return op;
}

/// The degenerate right projection: s (*) t = t for s > 0, 0 (*) t = 0.
/// Every positive value is a left identity; 1 is the declared one.
inline PseudoMulOp builtin_degenerate_right() {
  PseudoMulOp op;
  op.name = "degenerate-right";
  op.declared_identity = XReal::finite(1.0);
  op.commutative_hint = false;
  op.apply_fn = [](XReal s, XReal t) {
    return EvalResult::value(s.is_zero() ? XReal::zero() : t);
  };
  return op;
}

/// The tanh family: s (.) t = phi * tanh(atanh(s/phi) * atanh(t/phi)) below
/// phi, max(s, t) once either argument reaches phi. As written this gives
/// s (.) 0 = s for s >= phi, which breaks the annihilator axiom; the patched
/// variant forces s (.) 0 = 0 (.) t = 0 and is the default elsewhere. Both
/// forms exist so the axiom checker can exhibit the conflict.
inline PseudoMulOp builtin_tanh_phi(XReal phi, bool patched) {
  if (phi.is_infinite() || phi.is_zero()) {
    throw std::invalid_argument("tanh-phi: phi must be finite and positive");
  }
  const double p = phi.magnitude();
  PseudoMulOp op;
  op.name = "tanh-phi:" + format_xreal(phi) +
            (patched ? ":patched" : ":verbatim");
  op.declared_identity = XReal::finite(p * std::tanh(1.0));
  op.commutative_hint = true;
  op.landmarks = {phi};
  op.apply_fn = [p, patched](XReal s, XReal t) {
    if (patched && (s.is_zero() || t.is_zero())) {
      return EvalResult::value(XReal::zero());
    }
    XReal phi_x = XReal::finite(p);
    // The max clause applies only when an argument reaches phi exactly;
    // just below phi the formula is evaluated and the output saturated,
    // so the atanh pole cannot leak Inf or NaN.
    if (s >= phi_x || t >= phi_x) return EvalResult::value(join(s, t));
    double a = std::atanh(s.magnitude() / p);
    double b = std::atanh(t.magnitude() / p);
    double r = p * std::tanh(a * b);
    if (r > p) r = p;
    return EvalResult::value(XReal::finite(r));
  };
  return op;
}

}  // namespace pseudomul
