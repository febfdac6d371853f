#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pseudomul/grid.hpp"
#include "pseudomul/op.hpp"
#include "pseudomul/xreal.hpp"

namespace pseudomul {

enum class Verdict { PassedOnSamples, Refuted };

/// One counterexample: an input tuple with what was observed against what
/// the axiom requires. Evaluation faults carry their tag in `detail` and
/// leave `observed` empty. Witnesses replay to a violation in isolation.
struct Witness {
  std::vector<XReal> inputs;
  std::optional<XReal> observed;
  std::optional<XReal> required;
  std::string detail;
};

inline bool witness_less(const Witness& a, const Witness& b) {
  if (a.inputs != b.inputs) {
    return std::lexicographical_compare(
        a.inputs.begin(), a.inputs.end(), b.inputs.begin(), b.inputs.end());
  }
  return a.detail < b.detail;
}

struct AxiomEntry {
  std::string name;
  Verdict verdict = Verdict::PassedOnSamples;
  bool heuristic = false;
  double tolerance = 0.0;
  std::size_t samples_used = 0;
  std::vector<Witness> witnesses;
  std::vector<XReal> identity_set;  // populated by the left-identity check

  bool passed() const { return verdict == Verdict::PassedOnSamples; }
};

struct AxiomReport {
  std::string op_name;
  GridSpec grid;
  std::vector<AxiomEntry> axioms;
  /// Conjunction over the non-heuristic axioms; the continuity probe can
  /// only ever suspect, so it never gates.
  bool overall_pass = true;

  const AxiomEntry* find(std::string_view name) const {
    for (const auto& e : axioms) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }
};

struct CheckOptions {
  double tol = 1e-9;
  int refinement_levels = 4;
  std::size_t max_assoc_triples = 50000;
  std::size_t witness_cap = 64;
  double continuity_radius = 0.02;  // level-0 radius, compactified coords
};

/// Sweep samples: the grid plus the operation's declared identity and
/// landmark points, so parameter boundaries are probed exactly.
inline std::vector<XReal> checker_samples(const PseudoMulOp& op,
                                          const GridSpec& grid) {
  std::vector<XReal> pts = build_grid(grid);
  if (op.declared_identity) pts.push_back(*op.declared_identity);
  pts.insert(pts.end(), op.landmarks.begin(), op.landmarks.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

namespace detail {

inline void finish_entry(AxiomEntry& e, std::size_t cap) {
  std::sort(e.witnesses.begin(), e.witnesses.end(), witness_less);
  if (e.witnesses.size() > cap) e.witnesses.resize(cap);
  e.verdict = e.witnesses.empty() ? Verdict::PassedOnSamples : Verdict::Refuted;
}

inline Witness fault_witness(std::vector<XReal> inputs,
                             const std::string& code) {
  return Witness{std::move(inputs), std::nullopt, std::nullopt,
                 "fault:" + code};
}

}  // namespace detail

/// Associativity |(s.t).u - s.(t.u)| <= tol over sampled triples, exact at
/// 0 and inf. Triple count above the cap is cut by seeded subsampling.
inline AxiomEntry check_associativity(const PseudoMulOp& op,
                                      const std::vector<XReal>& samples,
                                      const CheckOptions& opts,
                                      std::uint64_t seed) {
  AxiomEntry entry;
  entry.name = "associativity";
  entry.tolerance = opts.tol;

  auto probe = [&](XReal s, XReal t, XReal u) {
    ++entry.samples_used;
    EvalResult st = op.apply(s, t);
    EvalResult lhs = st.ok() ? op.apply(st.get(), u)
                             : EvalResult::fault(st.fault_code());
    EvalResult tu = op.apply(t, u);
    EvalResult rhs = tu.ok() ? op.apply(s, tu.get())
                             : EvalResult::fault(tu.fault_code());
    if (!lhs.ok() || !rhs.ok()) {
      entry.witnesses.push_back(detail::fault_witness(
          {s, t, u}, !lhs.ok() ? lhs.fault_code() : rhs.fault_code()));
      return;
    }
    if (!near_equal(lhs.get(), rhs.get(), opts.tol)) {
      entry.witnesses.push_back(
          Witness{{s, t, u}, lhs.get(), rhs.get(), "lhs-vs-rhs"});
    }
  };

  const std::size_t n = samples.size();
  if (n * n * n <= opts.max_assoc_triples) {
    for (XReal s : samples) {
      for (XReal t : samples) {
        for (XReal u : samples) probe(s, t, u);
      }
    }
  } else {
    std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = 0; i < opts.max_assoc_triples; ++i) {
      probe(samples[gen() % n], samples[gen() % n], samples[gen() % n]);
    }
  }
  detail::finish_entry(entry, opts.witness_cap);
  return entry;
}

/// Monotonicity in both components over all sampled pairs s <= s'.
inline AxiomEntry check_monotonicity(const PseudoMulOp& op,
                                     const std::vector<XReal>& samples,
                                     const CheckOptions& opts) {
  AxiomEntry entry;
  entry.name = "monotonicity";
  entry.tolerance = opts.tol;

  const std::size_t n = samples.size();
  std::vector<EvalResult> row;
  for (int side = 0; side < 2; ++side) {
    const char* tag = side == 0 ? "left-arg" : "right-arg";
    for (XReal t : samples) {
      row.clear();
      for (XReal s : samples) {
        row.push_back(side == 0 ? op.apply(s, t) : op.apply(t, s));
        ++entry.samples_used;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!row[i].ok()) {
          entry.witnesses.push_back(
              detail::fault_witness({samples[i], t}, row[i].fault_code()));
          continue;
        }
        for (std::size_t j = i + 1; j < n; ++j) {
          if (!row[j].ok()) continue;  // witnessed at its own index
          XReal lo = row[i].get(), hi = row[j].get();
          if (lo > hi && !near_equal(lo, hi, opts.tol)) {
            entry.witnesses.push_back(
                Witness{{samples[i], samples[j], t}, hi, lo, tag});
          }
        }
      }
    }
  }
  detail::finish_entry(entry, opts.witness_cap);
  return entry;
}

/// All sampled candidates e whose worst deviation |op(e, t) - t| stays
/// within tolerance (exact at 0 and inf). The declared identity is always
/// among the candidates, so identities off the grid are still found.
inline std::vector<XReal> find_left_identities(
    const PseudoMulOp& op, const std::vector<XReal>& samples,
    const CheckOptions& opts) {
  std::vector<XReal> found;
  for (XReal e : samples) {
    bool ok = true;
    for (XReal t : samples) {
      EvalResult r = op.apply(e, t);
      if (!r.ok() || !near_equal(r.get(), t, opts.tol)) {
        ok = false;
        break;
      }
    }
    if (ok) found.push_back(e);
  }
  return found;
}

inline AxiomEntry check_left_identity(const PseudoMulOp& op,
                                      const std::vector<XReal>& samples,
                                      const CheckOptions& opts) {
  AxiomEntry entry;
  entry.name = "left-identity";
  entry.tolerance = opts.tol;
  entry.samples_used = samples.size() * samples.size();
  entry.identity_set = find_left_identities(op, samples, opts);

  auto worst_witness = [&](XReal e, const char* tag) {
    XReal worst_t = XReal::zero();
    double worst_dev = -1.0;
    std::optional<Witness> fault;
    for (XReal t : samples) {
      EvalResult r = op.apply(e, t);
      if (!r.ok()) {
        fault = detail::fault_witness({e, t}, r.fault_code());
        break;
      }
      if (near_equal(r.get(), t, opts.tol)) continue;
      double dev = std::fabs(compactify(r.get()) - compactify(t));
      if (dev > worst_dev) {
        worst_dev = dev;
        worst_t = t;
      }
    }
    if (fault) {
      entry.witnesses.push_back(*fault);
    } else if (worst_dev >= 0.0) {
      entry.witnesses.push_back(
          Witness{{e, worst_t}, op.apply(e, worst_t).get(), worst_t, tag});
    }
  };

  bool declared_ok = true;
  if (op.declared_identity) {
    declared_ok = std::find(entry.identity_set.begin(),
                            entry.identity_set.end(),
                            *op.declared_identity) != entry.identity_set.end();
    if (!declared_ok) worst_witness(*op.declared_identity, "declared-identity");
  }
  if (entry.identity_set.empty()) {
    // Show the nearest misses so the refutation is actionable.
    std::size_t shown = 0;
    for (XReal e : samples) {
      if (shown++ >= 3) break;
      worst_witness(e, "candidate");
    }
  }
  entry.verdict = (!entry.identity_set.empty() && declared_ok)
                      ? Verdict::PassedOnSamples
                      : Verdict::Refuted;
  return entry;
}

/// No zero divisors: s, t > 0 on the grid with s . t = 0 exactly.
inline AxiomEntry check_zero_divisors(const PseudoMulOp& op,
                                      const std::vector<XReal>& samples,
                                      const CheckOptions& opts) {
  AxiomEntry entry;
  entry.name = "zero-divisors";
  entry.tolerance = 0.0;  // exact by design
  for (XReal s : samples) {
    if (s.is_zero()) continue;
    for (XReal t : samples) {
      if (t.is_zero()) continue;
      ++entry.samples_used;
      EvalResult r = op.apply(s, t);
      if (!r.ok()) {
        entry.witnesses.push_back(
            detail::fault_witness({s, t}, r.fault_code()));
      } else if (r.get().is_zero()) {
        entry.witnesses.push_back(
            Witness{{s, t}, r.get(), std::nullopt, "zero-divisor"});
      }
    }
  }
  detail::finish_entry(entry, opts.witness_cap);
  return entry;
}

/// 0 is an annihilator: 0 . t = t . 0 = 0 exactly for all sampled t.
inline AxiomEntry check_annihilator(const PseudoMulOp& op,
                                    const std::vector<XReal>& samples,
                                    const CheckOptions& opts) {
  AxiomEntry entry;
  entry.name = "annihilator";
  entry.tolerance = 0.0;
  for (XReal t : samples) {
    for (int side = 0; side < 2; ++side) {
      XReal a = side == 0 ? XReal::zero() : t;
      XReal b = side == 0 ? t : XReal::zero();
      ++entry.samples_used;
      EvalResult r = op.apply(a, b);
      if (!r.ok()) {
        entry.witnesses.push_back(
            detail::fault_witness({a, b}, r.fault_code()));
      } else if (!r.get().is_zero()) {
        entry.witnesses.push_back(
            Witness{{a, b}, r.get(), XReal::zero(), "annihilator"});
      }
    }
  }
  detail::finish_entry(entry, opts.witness_cap);
  return entry;
}

namespace detail {

/// Oscillation of the op over a compactified neighborhood, measured in the
/// compactified codomain so jumps at inf register as finite gaps. Faults
/// count as maximal oscillation.
inline double local_oscillation(const PseudoMulOp& op, double us, double ut,
                                double radius, bool joint_region) {
  double lo = 2.0, hi = -1.0;
  auto visit = [&](double u, double v) {
    // s stays inside (0, infinity), open below, open above unless the
    // left-region probe is running (there s = infinity is admitted).
    if (u <= 0.0) return;
    if (joint_region ? u >= 1.0 : u > 1.0) return;
    if (v < 0.0 || v > 1.0) return;
    EvalResult r = op.apply(decompactify(u), decompactify(v));
    if (!r.ok()) {
      lo = 0.0;
      hi = 1.0;
      return;
    }
    double c = compactify(r.get());
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  };
  if (joint_region) {
    const double offs[3] = {-radius, 0.0, radius};
    for (double du : offs) {
      for (double dv : offs) visit(us + du, ut + dv);
    }
  } else {
    for (double du : {-radius, -radius / 2, 0.0, radius / 2, radius}) {
      visit(us + du, ut);
    }
  }
  return hi < lo ? 0.0 : hi - lo;
}

/// True when the oscillation fails to shrink across the last two
/// refinement levels and stays above tolerance.
inline bool probe_point_suspect(const PseudoMulOp& op, XReal s, XReal t,
                                const CheckOptions& opts, bool joint_region,
                                double* osc_out, double* ratio_out) {
  double us = compactify(s), ut = compactify(t);
  double prev = -1.0, last = -1.0;
  double r = opts.continuity_radius;
  for (int level = 0; level < opts.refinement_levels; ++level) {
    prev = last;
    last = local_oscillation(op, us, ut, r, joint_region);
    r /= 10.0;
  }
  if (osc_out) *osc_out = last;
  if (ratio_out) *ratio_out = prev > 0.0 ? last / prev : (last > 0.0 ? 1.0 : 0.0);
  if (last <= opts.tol) return false;
  return prev <= 0.0 || last / prev > 0.5;
}

}  // namespace detail

/// Heuristic continuity probe for the two regions the axioms declare:
/// joint continuity on (0, inf) x [0, inf], and continuity of s -> s . t
/// on (0, inf] for every t. Shrinking neighborhoods around each sampled
/// point; a pass is NOT a proof and both entries carry heuristic = true.
inline std::pair<AxiomEntry, AxiomEntry> probe_continuity(
    const PseudoMulOp& op, const std::vector<XReal>& samples,
    const CheckOptions& opts) {
  AxiomEntry joint;
  joint.name = "continuity-joint";
  joint.heuristic = true;
  joint.tolerance = opts.tol;

  AxiomEntry left;
  left.name = "continuity-left";
  left.heuristic = true;
  left.tolerance = opts.tol;

  for (XReal s : samples) {
    if (s.is_zero()) continue;
    for (XReal t : samples) {
      double osc = 0.0, ratio = 0.0;
      if (s.is_finite()) {
        ++joint.samples_used;
        if (detail::probe_point_suspect(op, s, t, opts, true, &osc, &ratio)) {
          joint.witnesses.push_back(Witness{
              {s, t}, std::nullopt, std::nullopt,
              "suspected-discontinuity osc=" + std::to_string(osc)});
        }
      }
      ++left.samples_used;
      if (detail::probe_point_suspect(op, s, t, opts, false, &osc, &ratio)) {
        left.witnesses.push_back(Witness{
            {s, t}, std::nullopt, std::nullopt,
            "suspected-discontinuity osc=" + std::to_string(osc)});
      }
    }
  }
  detail::finish_entry(joint, opts.witness_cap);
  detail::finish_entry(left, opts.witness_cap);
  return {joint, left};
}

/// Runs all checks. The overall verdict is the conjunction of the
/// non-heuristic axioms; identical (op, grid, seed) inputs produce
/// identical reports.
inline AxiomReport check_all(const PseudoMulOp& op, const GridSpec& grid,
                             const CheckOptions& opts = {}) {
  AxiomReport report;
  report.op_name = op.name;
  report.grid = grid;
  std::vector<XReal> samples = checker_samples(op, grid);

  report.axioms.push_back(check_associativity(op, samples, opts, grid.seed));
  report.axioms.push_back(check_monotonicity(op, samples, opts));
  report.axioms.push_back(check_left_identity(op, samples, opts));
  report.axioms.push_back(check_zero_divisors(op, samples, opts));
  report.axioms.push_back(check_annihilator(op, samples, opts));
  auto [joint, left] = probe_continuity(op, samples, opts);
  report.axioms.push_back(std::move(joint));
  report.axioms.push_back(std::move(left));

  report.overall_pass = true;
  for (const auto& e : report.axioms) {
    if (!e.heuristic && !e.passed()) report.overall_pass = false;
  }
  return report;
}

/// Re-evaluates a witness in isolation; true means it still violates its
/// axiom. Reports are reproducible, so this must hold for every witness.
inline bool replay_witness(const PseudoMulOp& op, std::string_view axiom,
                           const Witness& w, const CheckOptions& opts = {}) {
  if (w.detail.starts_with("fault:")) {
    // Re-run the faulting evaluation.
    if (w.inputs.size() >= 2) {
      EvalResult r = op.apply(w.inputs[0], w.inputs[1]);
      if (w.inputs.size() == 3 && axiom == "associativity") {
        EvalResult st = op.apply(w.inputs[0], w.inputs[1]);
        EvalResult tu = op.apply(w.inputs[1], w.inputs[2]);
        bool lhs_bad = !st.ok() || !op.apply(st.get(), w.inputs[2]).ok();
        bool rhs_bad = !tu.ok() || !op.apply(w.inputs[0], tu.get()).ok();
        return lhs_bad || rhs_bad;
      }
      return !r.ok();
    }
    return false;
  }
  if (axiom == "associativity") {
    EvalResult st = op.apply(w.inputs[0], w.inputs[1]);
    EvalResult tu = op.apply(w.inputs[1], w.inputs[2]);
    if (!st.ok() || !tu.ok()) return true;
    EvalResult lhs = op.apply(st.get(), w.inputs[2]);
    EvalResult rhs = op.apply(w.inputs[0], tu.get());
    if (!lhs.ok() || !rhs.ok()) return true;
    return !near_equal(lhs.get(), rhs.get(), opts.tol);
  }
  if (axiom == "monotonicity") {
    XReal s = w.inputs[0], s2 = w.inputs[1], t = w.inputs[2];
    bool left = w.detail == "left-arg";
    EvalResult a = left ? op.apply(s, t) : op.apply(t, s);
    EvalResult b = left ? op.apply(s2, t) : op.apply(t, s2);
    if (!a.ok() || !b.ok()) return true;
    return a.get() > b.get() && !near_equal(a.get(), b.get(), opts.tol);
  }
  if (axiom == "left-identity") {
    EvalResult r = op.apply(w.inputs[0], w.inputs[1]);
    return !r.ok() || !near_equal(r.get(), w.inputs[1], opts.tol);
  }
  if (axiom == "zero-divisors") {
    EvalResult r = op.apply(w.inputs[0], w.inputs[1]);
    return !r.ok() || r.get().is_zero();
  }
  if (axiom == "annihilator") {
    EvalResult r = op.apply(w.inputs[0], w.inputs[1]);
    return !r.ok() || !r.get().is_zero();
  }
  if (axiom == "continuity-joint" || axiom == "continuity-left") {
    return detail::probe_point_suspect(op, w.inputs[0], w.inputs[1], opts,
                                       axiom == "continuity-joint", nullptr,
                                       nullptr);
  }
  return false;
}

}  // namespace pseudomul
