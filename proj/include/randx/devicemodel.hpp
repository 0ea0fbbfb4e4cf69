#pragma once

// Quantum devices: a state phi on Q, and for each input letter a projective
// measurement {P_a^x}_x followed by a unitary U_a. The four structure kinds
// are general, r-component (tensor-product measurements), contextual
// (measurements built from commuting observables), and abstract (phi only
// required to be nonzero PSD).

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "randx/matcore.hpp"

namespace randx {

/// Finite alphabet with an optional Cartesian-product structure. Letters are
/// flat indices in mixed radix, the first factor most significant.
struct Alphabet {
  std::vector<std::size_t> radices{1};

  static Alphabet plain(std::size_t n) { return Alphabet{{n}}; }
  static Alphabet product(std::vector<std::size_t> radices) { return Alphabet{std::move(radices)}; }

  std::size_t size() const {
    return std::accumulate(radices.begin(), radices.end(), std::size_t{1}, std::multiplies<>());
  }
  std::size_t factors() const { return radices.size(); }

  std::vector<std::size_t> decode(std::size_t letter) const {
    std::vector<std::size_t> digits(radices.size());
    for (std::size_t k = radices.size(); k-- > 0;) {
      digits[k] = letter % radices[k];
      letter /= radices[k];
    }
    return digits;
  }

  std::size_t encode(std::span<const std::size_t> digits) const {
    if (digits.size() != radices.size()) throw Error(ErrorCode::LengthMismatch, "letter arity");
    std::size_t letter = 0;
    for (std::size_t k = 0; k < radices.size(); ++k) {
      if (digits[k] >= radices[k]) throw Error(ErrorCode::UnknownLetter, "letter digit out of range");
      letter = letter * radices[k] + digits[k];
    }
    return letter;
  }

  bool operator==(const Alphabet&) const = default;
};

enum class DeviceKind { general, components, contextual, abstract };

inline std::string_view to_string(DeviceKind k) {
  switch (k) {
    case DeviceKind::general: return "general";
    case DeviceKind::components: return "components";
    case DeviceKind::contextual: return "contextual";
    case DeviceKind::abstract: return "abstract";
  }
  return "general";
}

struct Branch {
  std::size_t output;
  ComplexMatrix projector;
};

/// Projective measurement for one input letter. Outputs not listed have the
/// zero projector.
struct Measurement {
  std::vector<Branch> branches;

  const ComplexMatrix* find(std::size_t output) const {
    for (const auto& b : branches)
      if (b.output == output) return &b.projector;
    return nullptr;
  }
};

/// Observables {P_b^y}_y for each b in B and the allowed contexts (input
/// letters), each a non-repeating sequence over B. Output letters of a context
/// of length m are sequences in Y^m.
struct ContextualStructure {
  std::vector<std::vector<ComplexMatrix>> observables;  // [b][y], zero matrix if absent
  std::vector<std::vector<std::size_t>> contexts;       // [a] -> (b_1, ..., b_m)
  std::size_t outcomes = 2;                             // |Y|
};

struct Device {
  DeviceKind kind = DeviceKind::general;
  std::vector<std::size_t> dims;  // tensor factors of Q (one entry unless components)
  ComplexMatrix phi;
  Alphabet inputs;
  Alphabet outputs;
  std::vector<Measurement> measurements;  // indexed by input letter
  std::vector<ComplexMatrix> unitaries;   // indexed by input letter
  std::optional<ContextualStructure> contextual;

  std::size_t dim() const { return static_cast<std::size_t>(phi.rows()); }
  std::size_t num_inputs() const { return inputs.size(); }
  std::size_t num_outputs() const { return outputs.size(); }

  const ComplexMatrix* projector(std::size_t input, std::size_t output) const {
    return measurements.at(input).find(output);
  }
  const ComplexMatrix& unitary(std::size_t input) const { return unitaries.at(input); }

  bool unitary_is_identity(std::size_t input) const {
    return max_abs(unitaries.at(input) - identity(dim())) == 0.0;
  }
};

struct Violation {
  std::string check;
  double deviation = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  void add(std::string check, double deviation, std::string detail = {}) {
    violations.push_back({std::move(check), deviation, std::move(detail)});
  }
  bool has(std::string_view check) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.check == check; });
  }
  void merge(const ValidationReport& other) {
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
  }
};

namespace detail {

/// Partial trace keeping only subsystem `keep` of a matrix on (x)_i C^{dims[i]}.
inline ComplexMatrix partial_trace_keep(const ComplexMatrix& m, std::span<const std::size_t> dims, std::size_t keep) {
  std::size_t inner = 1;
  for (std::size_t k = keep + 1; k < dims.size(); ++k) inner *= dims[k];
  const std::size_t dk = dims[keep];
  const std::size_t outer = static_cast<std::size_t>(m.rows()) / (inner * dk);
  ComplexMatrix out = zeros(dk);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t in = 0; in < inner; ++in)
      for (std::size_t i = 0; i < dk; ++i)
        for (std::size_t j = 0; j < dk; ++j) {
          const auto r = static_cast<Eigen::Index>((o * dk + i) * inner + in);
          const auto c = static_cast<Eigen::Index>((o * dk + j) * inner + in);
          out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += m(r, c);
        }
  return out;
}

inline std::string letter_name(std::size_t a, std::size_t x) {
  return "input " + std::to_string(a) + ", output " + std::to_string(x);
}

inline void check_measurement(const Measurement& meas, std::size_t dim, std::size_t num_outputs, std::size_t a,
                              ValidationReport& report) {
  ComplexMatrix sum = zeros(dim);
  std::vector<bool> seen(num_outputs, false);
  for (std::size_t j = 0; j < meas.branches.size(); ++j) {
    const auto& b = meas.branches[j];
    if (b.output >= num_outputs) {
      report.add("output letter", static_cast<double>(b.output), letter_name(a, b.output));
      continue;
    }
    if (seen[b.output]) report.add("duplicate output", 0.0, letter_name(a, b.output));
    seen[b.output] = true;
    if (b.projector.rows() != static_cast<Eigen::Index>(dim) || b.projector.cols() != static_cast<Eigen::Index>(dim)) {
      report.add("projector dimension", 0.0, letter_name(a, b.output));
      continue;
    }
    const double pdev = Projector::deviation(b.projector);
    if (pdev > tol::kStructural) report.add("projector", pdev, letter_name(a, b.output));
    for (std::size_t k = j + 1; k < meas.branches.size(); ++k) {
      const auto& c = meas.branches[k];
      if (c.projector.rows() != b.projector.rows()) continue;
      const double odev = max_abs(b.projector * c.projector);
      if (odev > tol::kStructural)
        report.add("orthogonality", odev, letter_name(a, b.output) + " vs output " + std::to_string(c.output));
    }
    sum += b.projector;
  }
  const double cdev = max_abs(sum - identity(dim));
  if (cdev > tol::kStructural) report.add("completeness", cdev, "input " + std::to_string(a));
}

// Factor of a product projector on subsystem k, rescaled to be a projector.
inline ComplexMatrix projector_factor(const ComplexMatrix& p, std::span<const std::size_t> dims, std::size_t k) {
  const ComplexMatrix f = partial_trace_keep(p, dims, k);
  const double tr = f.trace().real();
  if (tr <= 0.0) return zeros(dims[k]);
  const double c = (f * f).trace().real() / tr;
  return f / c;
}

inline void check_components(const Device& d, ValidationReport& report) {
  const std::size_t r = d.dims.size();
  if (d.inputs.factors() != r || d.outputs.factors() != r) {
    report.add("component alphabets", 0.0, "input/output alphabets must factor into one alphabet per component");
    return;
  }
  // factors[k][a_k][x_k], populated from the first nonzero product seen
  std::vector<std::vector<std::vector<std::optional<ComplexMatrix>>>> factors(r);
  for (std::size_t k = 0; k < r; ++k)
    factors[k].assign(d.inputs.radices[k], std::vector<std::optional<ComplexMatrix>>(d.outputs.radices[k]));
  for (std::size_t a = 0; a < d.num_inputs(); ++a) {
    const auto ad = d.inputs.decode(a);
    for (const auto& b : d.measurements[a].branches) {
      if (b.output >= d.num_outputs() || b.projector.rows() != static_cast<Eigen::Index>(d.dim())) continue;
      if (max_abs(b.projector) <= tol::kStructural) continue;
      const auto xd = d.outputs.decode(b.output);
      std::vector<ComplexMatrix> fs;
      for (std::size_t k = 0; k < r; ++k) fs.push_back(projector_factor(b.projector, d.dims, k));
      const double pdev = max_abs(tensor(std::span<const ComplexMatrix>(fs)) - b.projector);
      if (pdev > tol::kStructural) {
        report.add("product form", pdev, letter_name(a, b.output));
        continue;
      }
      for (std::size_t k = 0; k < r; ++k) {
        auto& slot = factors[k][ad[k]][xd[k]];
        if (!slot) {
          slot = fs[k];
        } else {
          const double fdev = max_abs(*slot - fs[k]);
          if (fdev > tol::kStructural)
            report.add("component locality", fdev,
                       "component " + std::to_string(k) + " factor depends on other components' letters");
        }
      }
    }
  }
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t ak = 0; ak < d.inputs.radices[k]; ++ak) {
      ComplexMatrix sum = zeros(d.dims[k]);
      for (const auto& f : factors[k][ak])
        if (f) sum += *f;
      const double dev = max_abs(sum - identity(d.dims[k]));
      if (dev > tol::kStructural)
        report.add("component completeness", dev,
                   "component " + std::to_string(k) + ", input " + std::to_string(ak));
    }
}

inline ComplexMatrix context_product(const ContextualStructure& cs, std::span<const std::size_t> context,
                                     std::span<const std::size_t> ys, std::size_t dim) {
  ComplexMatrix p = identity(dim);
  for (std::size_t j = 0; j < context.size(); ++j) p = p * cs.observables[context[j]][ys[j]];
  return p;
}

inline void check_contextual(const Device& d, ValidationReport& report) {
  if (!d.contextual) {
    report.add("contextual structure", 0.0, "contextual device without observables/contexts");
    return;
  }
  const auto& cs = *d.contextual;
  for (std::size_t b = 0; b < cs.observables.size(); ++b) {
    Measurement m;
    for (std::size_t y = 0; y < cs.observables[b].size(); ++y) m.branches.push_back({y, cs.observables[b][y]});
    ValidationReport sub;
    check_measurement(m, d.dim(), cs.outcomes, b, sub);
    for (auto& v : sub.violations) report.add("observable " + v.check, v.deviation, "observable " + std::to_string(b));
  }
  if (cs.contexts.size() != d.num_inputs()) {
    report.add("contexts", 0.0, "one context per input letter required");
    return;
  }
  for (std::size_t a = 0; a < cs.contexts.size(); ++a) {
    const auto& ctx = cs.contexts[a];
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      if (ctx[i] >= cs.observables.size()) {
        report.add("contexts", 0.0, "context references unknown observable");
        return;
      }
      for (std::size_t j = i + 1; j < ctx.size(); ++j) {
        if (ctx[i] == ctx[j]) report.add("contexts", 0.0, "context repeats an observable");
        double dev = 0.0;
        for (const auto& p : cs.observables[ctx[i]])
          for (const auto& q : cs.observables[ctx[j]]) dev = std::max(dev, max_abs(p * q - q * p));
        if (dev > tol::kStructural)
          report.add("commutation", dev,
                     "context " + std::to_string(a) + ": observables " + std::to_string(ctx[i]) + ", " +
                         std::to_string(ctx[j]));
      }
    }
    // Stored P_a^x must equal the ordered product of the context's projectors.
    if (d.outputs.factors() != ctx.size()) {
      report.add("contextual alphabets", 0.0, "output arity differs from context length");
      continue;
    }
    for (std::size_t x = 0; x < d.num_outputs(); ++x) {
      const auto ys = d.outputs.decode(x);
      const ComplexMatrix expect = context_product(cs, ctx, ys, d.dim());
      const ComplexMatrix* stored = d.projector(a, x);
      const double dev = stored ? max_abs(*stored - expect) : max_abs(expect);
      if (dev > tol::kStructural) report.add("context product", dev, letter_name(a, x));
    }
  }
}

}  // namespace detail

/// Lists every violated device invariant with its maximal deviation.
inline ValidationReport validate_device(const Device& d) {
  ValidationReport report;
  if (d.phi.rows() == 0 || d.phi.rows() != d.phi.cols()) {
    report.add("phi shape", 0.0, "phi must be a non-empty square matrix");
    return report;
  }
  if (!all_finite(d.phi)) {
    report.add("phi finite", INFINITY);
    return report;
  }
  const std::size_t prod = std::accumulate(d.dims.begin(), d.dims.end(), std::size_t{1}, std::multiplies<>());
  if (d.dims.empty() || prod != d.dim())
    report.add("dims", static_cast<double>(prod), "product of dims differs from dim(phi)");
  const double herm = hermitian_deviation(d.phi);
  if (herm > tol::kStructural) report.add("phi hermitian", herm);
  const RealVector ev = eigenvalues(d.phi);
  const double top = std::max(ev.maxCoeff(), 0.0);
  if (ev.minCoeff() < -tol::kStructural) report.add("phi psd", -ev.minCoeff());
  const double tr = d.phi.trace().real();
  if (d.kind == DeviceKind::abstract) {
    if (top <= 0.0) report.add("phi nonzero", 0.0, "abstract device needs a nonzero state");
  } else if (std::abs(tr - 1.0) > tol::kStructural) {
    report.add("phi trace", std::abs(tr - 1.0));
  }
  if (d.measurements.size() != d.num_inputs()) {
    report.add("measurements", 0.0, "one measurement per input letter required");
    return report;
  }
  for (std::size_t a = 0; a < d.num_inputs(); ++a)
    detail::check_measurement(d.measurements[a], d.dim(), d.num_outputs(), a, report);
  if (d.unitaries.size() != d.num_inputs()) {
    report.add("unitaries", 0.0, "one unitary per input letter required");
  } else {
    for (std::size_t a = 0; a < d.num_inputs(); ++a) {
      const auto& u = d.unitaries[a];
      if (u.rows() != d.phi.rows() || u.cols() != d.phi.cols()) {
        report.add("unitary dimension", 0.0, "input " + std::to_string(a));
        continue;
      }
      const double dev = max_abs(u.adjoint() * u - identity(d.dim()));
      if (dev > tol::kStructural) report.add("unitary", dev, "input " + std::to_string(a));
    }
  }
  if (d.kind == DeviceKind::components) detail::check_components(d, report);
  if (d.kind == DeviceKind::contextual) detail::check_contextual(d, report);
  return report;
}

/// Fills identity unitaries for every input letter.
inline std::vector<ComplexMatrix> identity_unitaries(std::size_t inputs, std::size_t dim) {
  return std::vector<ComplexMatrix>(inputs, identity(dim));
}

/// r-component device from per-component measurements:
/// factors[k][a_k][x_k] is a projector on C^{dims[k]} (empty matrix = zero).
inline Device make_component_device(std::vector<std::size_t> dims, ComplexMatrix phi,
                                    const std::vector<std::vector<std::vector<ComplexMatrix>>>& factors) {
  Device d;
  d.kind = DeviceKind::components;
  d.dims = std::move(dims);
  d.phi = std::move(phi);
  std::vector<std::size_t> in_radix, out_radix;
  for (const auto& comp : factors) {
    in_radix.push_back(comp.size());
    out_radix.push_back(comp.empty() ? 0 : comp.front().size());
  }
  d.inputs = Alphabet::product(in_radix);
  d.outputs = Alphabet::product(out_radix);
  d.measurements.resize(d.inputs.size());
  for (std::size_t a = 0; a < d.inputs.size(); ++a) {
    const auto ad = d.inputs.decode(a);
    for (std::size_t x = 0; x < d.outputs.size(); ++x) {
      const auto xd = d.outputs.decode(x);
      std::vector<ComplexMatrix> fs;
      bool zero = false;
      for (std::size_t k = 0; k < factors.size() && !zero; ++k) {
        const ComplexMatrix& f = factors[k][ad[k]][xd[k]];
        if (f.size() == 0 || max_abs(f) == 0.0) zero = true;
        else fs.push_back(f);
      }
      if (!zero) d.measurements[a].branches.push_back({x, tensor(std::span<const ComplexMatrix>(fs))});
    }
  }
  d.unitaries = identity_unitaries(d.inputs.size(), d.dim());
  return d;
}

/// Contextual device: P_a^x = P_{b_1}^{y_1} ... P_{b_m}^{y_m} for context a = (b_1..b_m).
/// All contexts must have the same length m; outputs are Y^m.
inline Device make_contextual_device(ComplexMatrix phi, ContextualStructure cs) {
  if (cs.contexts.empty()) throw Error(ErrorCode::BadParams, "no contexts");
  const std::size_t m = cs.contexts.front().size();
  for (const auto& c : cs.contexts)
    if (c.size() != m) throw Error(ErrorCode::Unsupported, "contexts of unequal length");
  Device d;
  d.kind = DeviceKind::contextual;
  d.dims = {static_cast<std::size_t>(phi.rows())};
  d.phi = std::move(phi);
  d.inputs = Alphabet::plain(cs.contexts.size());
  d.outputs = Alphabet::product(std::vector<std::size_t>(m, cs.outcomes));
  d.measurements.resize(d.inputs.size());
  for (std::size_t a = 0; a < cs.contexts.size(); ++a)
    for (std::size_t x = 0; x < d.outputs.size(); ++x) {
      const auto ys = d.outputs.decode(x);
      ComplexMatrix p = detail::context_product(cs, cs.contexts[a], ys, d.dim());
      if (max_abs(p) > 0.0) d.measurements[a].branches.push_back({x, std::move(p)});
    }
  d.unitaries = identity_unitaries(d.inputs.size(), d.dim());
  d.contextual = std::move(cs);
  return d;
}

/// One-dimensional device that answers x = assignment[a] deterministically.
/// With product alphabets it is a components device with all dims 1.
inline Device deterministic_device(const Alphabet& inputs, const Alphabet& outputs,
                                   const std::vector<std::vector<std::size_t>>& per_component) {
  std::vector<std::vector<std::vector<ComplexMatrix>>> factors(per_component.size());
  for (std::size_t k = 0; k < per_component.size(); ++k) {
    factors[k].assign(inputs.radices[k], std::vector<ComplexMatrix>(outputs.radices[k], ComplexMatrix()));
    for (std::size_t ak = 0; ak < inputs.radices[k]; ++ak)
      factors[k][ak][per_component[k][ak]] = ComplexMatrix::Identity(1, 1);
  }
  return make_component_device(std::vector<std::size_t>(per_component.size(), 1), ComplexMatrix::Identity(1, 1),
                               factors);
}

/// Block-diagonal mixture: with probability weights[k] the device behaves as
/// devices[k]. The block index plays the role of a classical label register.
inline Device direct_sum(std::span<const double> weights, std::span<const Device> devices) {
  if (weights.size() != devices.size() || devices.empty())
    throw Error(ErrorCode::LengthMismatch, "weights and devices differ in length");
  const Device& first = devices.front();
  std::size_t total = 0;
  for (const auto& d : devices) {
    if (!(d.inputs == first.inputs) || !(d.outputs == first.outputs))
      throw Error(ErrorCode::Incompatible, "direct sum of devices with different alphabets");
    total += d.dim();
  }
  Device out;
  out.kind = DeviceKind::general;
  out.dims = {total};
  out.inputs = first.inputs;
  out.outputs = first.outputs;
  out.phi = zeros(total);
  out.measurements.resize(first.num_inputs());
  out.unitaries.assign(first.num_inputs(), zeros(total));
  std::vector<std::size_t> offset;
  std::size_t off = 0;
  for (std::size_t k = 0; k < devices.size(); ++k) {
    const auto n = static_cast<Eigen::Index>(devices[k].dim());
    const auto o = static_cast<Eigen::Index>(off);
    out.phi.block(o, o, n, n) = weights[k] * devices[k].phi;
    for (std::size_t a = 0; a < first.num_inputs(); ++a) out.unitaries[a].block(o, o, n, n) = devices[k].unitaries[a];
    offset.push_back(off);
    off += devices[k].dim();
  }
  for (std::size_t a = 0; a < first.num_inputs(); ++a)
    for (std::size_t x = 0; x < first.num_outputs(); ++x) {
      ComplexMatrix p = zeros(total);
      bool any = false;
      for (std::size_t k = 0; k < devices.size(); ++k)
        if (const ComplexMatrix* pk = devices[k].projector(a, x)) {
          const auto n = static_cast<Eigen::Index>(devices[k].dim());
          const auto o = static_cast<Eigen::Index>(offset[k]);
          p.block(o, o, n, n) = *pk;
          any = true;
        }
      if (any) out.measurements[a].branches.push_back({x, std::move(p)});
    }
  return out;
}

struct DeviceStatePair {
  ComplexMatrix phi_x;  // device state sqrt(X) phi sqrt(X)
  ComplexMatrix rho_x;  // adversary state (sqrt(phi) X sqrt(phi))^T
};

inline DeviceStatePair state_pair(const Device& d, const ComplexMatrix& x) {
  if (x.rows() != d.phi.rows() || x.cols() != d.phi.cols())
    throw Error(ErrorCode::DimMismatch, "X and phi differ in dimension");
  const ComplexMatrix sx = psd_sqrt(x);
  const ComplexMatrix sphi = psd_sqrt(d.phi);
  return {sx * d.phi * sx, (sphi * x * sphi).transpose()};
}

/// M_n ... M_1 with M_j = U_{a_j} P_{a_j}^{x_j}.
inline ComplexMatrix sequence_operator(const Device& d, std::span<const std::size_t> a_seq,
                                       std::span<const std::size_t> x_seq) {
  if (a_seq.size() != x_seq.size()) throw Error(ErrorCode::LengthMismatch, "input and output sequences differ");
  ComplexMatrix m = identity(d.dim());
  for (std::size_t j = 0; j < a_seq.size(); ++j) {
    if (a_seq[j] >= d.num_inputs()) throw Error(ErrorCode::UnknownLetter, "input letter " + std::to_string(a_seq[j]));
    if (x_seq[j] >= d.num_outputs())
      throw Error(ErrorCode::UnknownLetter, "output letter " + std::to_string(x_seq[j]));
    const ComplexMatrix* p = d.projector(a_seq[j], x_seq[j]);
    if (!p) return zeros(d.dim());
    m = d.unitary(a_seq[j]) * (*p) * m;
  }
  return m;
}

/// (phi_a^x, rho_a^x) after the rounds (a_1,x_1), ..., (a_n,x_n).
inline DeviceStatePair evolve_sequence(const Device& d, std::span<const std::size_t> a_seq,
                                       std::span<const std::size_t> x_seq) {
  const ComplexMatrix m = sequence_operator(d, a_seq, x_seq);
  const ComplexMatrix sphi = psd_sqrt(d.phi);
  return {m * d.phi * m.adjoint(), (sphi * m.adjoint() * m * sphi).transpose()};
}

/// The abstract device D_eps with initial operator phi^{1/(1+eps)}.
inline Device abstractify(const Device& d, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorCode::DomainError, "eps must lie in (0,1]");
  Device out = d;
  out.kind = DeviceKind::abstract;
  out.phi = psd_power(d.phi, 1.0 / (1.0 + eps));
  return out;
}

/// max |phi - sum_x P phi P| for input a (zero iff classically predictable on a).
inline double predictability_deviation(const Device& d, std::size_t a) {
  ComplexMatrix pinched = zeros(d.dim());
  for (const auto& b : d.measurements.at(a).branches) pinched += b.projector * d.phi * b.projector;
  return max_abs(d.phi - pinched);
}

/// The output x with phi = P_a^x phi P_a^x, if the device is deterministic on a.
inline std::optional<std::size_t> deterministic_output(const Device& d, std::size_t a,
                                                       double tolerance = tol::kStructural) {
  for (const auto& b : d.measurements.at(a).branches)
    if (max_abs(d.phi - b.projector * d.phi * b.projector) <= tolerance) return b.output;
  return std::nullopt;
}

/// Born-rule distribution Tr(P_a^x state) over all outputs.
inline std::vector<double> outcome_distribution(const Device& d, const ComplexMatrix& state, std::size_t a) {
  std::vector<double> probs(d.num_outputs(), 0.0);
  for (const auto& b : d.measurements.at(a).branches)
    probs[b.output] = std::max(0.0, (b.projector * state).trace().real());
  return probs;
}

}  // namespace randx
