#include "mufold/quadratizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace mufold {
namespace {

using PairKey = std::pair<uint32_t, uint32_t>;

struct Reduction {
  std::map<Monomial, double> terms;
  double constant = 0.0;
  std::vector<Ancilla> ancillas;
  double penalty_scale = 0.0;
  std::set<uint32_t> protected_linear;
  std::set<PairKey> protected_quadratic;
};

void add_entry(std::map<Monomial, double>& terms, Monomial mono, double coeff) {
  auto [it, inserted] = terms.try_emplace(std::move(mono), coeff);
  if (!inserted) it->second += coeff;
  if (std::abs(it->second) < BinaryPolynomial::kNoiseEps) terms.erase(it);
}

Reduction reduce(const BinaryPolynomial& poly, uint32_t n_original,
                 double penalty_scale) {
  Reduction red;
  red.constant = poly.constant();
  red.terms = poly.terms();

  if (penalty_scale <= 0.0) {
    double high_order_mass = 0.0;
    for (const auto& [mono, coeff] : red.terms) {
      if (mono.size() >= 3) high_order_mass += std::abs(coeff);
    }
    penalty_scale = 2.0 * (1.0 + high_order_mass);
  }
  red.penalty_scale = penalty_scale;

  uint32_t next_index = n_original;
  while (true) {
    // count pair occurrences across the remaining degree>=3 terms
    std::map<PairKey, int> counts;
    for (const auto& [mono, coeff] : red.terms) {
      if (mono.size() < 3) continue;
      for (size_t i = 0; i < mono.size(); ++i) {
        for (size_t j = i + 1; j < mono.size(); ++j) {
          ++counts[{mono[i], mono[j]}];
        }
      }
    }
    if (counts.empty()) break;
    PairKey best = counts.begin()->first;
    int best_count = counts.begin()->second;
    for (const auto& [pair, count] : counts) {
      if (count > best_count) {
        best = pair;
        best_count = count;
      }
    }

    const uint32_t a = next_index++;
    red.ancillas.push_back({a, best.first, best.second});

    std::vector<std::pair<Monomial, double>> rewritten;
    for (auto it = red.terms.begin(); it != red.terms.end();) {
      const Monomial& mono = it->first;
      if (mono.size() >= 3 &&
          std::binary_search(mono.begin(), mono.end(), best.first) &&
          std::binary_search(mono.begin(), mono.end(), best.second)) {
        Monomial repl;
        repl.reserve(mono.size() - 1);
        for (uint32_t v : mono) {
          if (v != best.first && v != best.second) repl.push_back(v);
        }
        repl.push_back(a);  // a is larger than every original index
        rewritten.emplace_back(std::move(repl), it->second);
        it = red.terms.erase(it);
      } else {
        ++it;
      }
    }
    for (auto& [mono, coeff] : rewritten) add_entry(red.terms, std::move(mono), coeff);

    // penalty: P * (uv - 2ua - 2va + 3a); equals 0 iff a == u AND v
    const double p = penalty_scale;
    add_entry(red.terms, {best.first, best.second}, p);
    add_entry(red.terms, {best.first, a}, -2.0 * p);
    add_entry(red.terms, {best.second, a}, -2.0 * p);
    add_entry(red.terms, {a}, 3.0 * p);
    red.protected_quadratic.insert({best.first, best.second});
    red.protected_quadratic.insert({best.first, a});
    red.protected_quadratic.insert({best.second, a});
    red.protected_linear.insert(a);
  }
  return red;
}

QuboProblem pack(Reduction&& red, uint32_t n_original) {
  QuboProblem q;
  q.n_original = n_original;
  q.constant = red.constant;
  q.ancillas = std::move(red.ancillas);
  q.n_total = n_original + static_cast<uint32_t>(q.ancillas.size());
  q.penalty_scale = red.penalty_scale;
  q.protected_linear = std::move(red.protected_linear);
  q.protected_quadratic = std::move(red.protected_quadratic);
  for (const auto& [mono, coeff] : red.terms) {
    if (mono.size() == 1) {
      q.linear[mono[0]] += coeff;
    } else if (mono.size() == 2) {
      q.quadratic[{mono[0], mono[1]}] += coeff;
    } else {
      throw std::logic_error("reduction left a term of degree > 2");
    }
  }
  return q;
}

}  // namespace

double QuboProblem::evaluate(const std::vector<uint8_t>& bits) const {
  double total = constant;
  for (const auto& [v, coeff] : linear) {
    if (bits.at(v)) total += coeff;
  }
  for (const auto& [pair, coeff] : quadratic) {
    if (bits.at(pair.first) && bits.at(pair.second)) total += coeff;
  }
  return total;
}

QuboProblem quadratize(const HuboProblem& h) {
  Reduction red = reduce(h.combined(), h.vm.n(), 0.0);
  // entries fed by the one-hot constraint stay through any chop
  for (const auto& [mono, coeff] : h.constraint.terms()) {
    if (mono.size() == 1) red.protected_linear.insert(mono[0]);
    if (mono.size() == 2) red.protected_quadratic.insert({mono[0], mono[1]});
  }
  return pack(std::move(red), h.vm.n());
}

QuboProblem quadratize_polynomial(const BinaryPolynomial& poly, uint32_t n_original,
                                  double penalty_scale) {
  return pack(reduce(poly, n_original, penalty_scale), n_original);
}

QuboProblem chop_qubo(const QuboProblem& q, double threshold) {
  if (threshold < 0) throw std::invalid_argument("chop threshold must be nonnegative");
  QuboProblem out = q;
  for (auto it = out.linear.begin(); it != out.linear.end();) {
    if (std::abs(it->second) < threshold && !out.protected_linear.count(it->first)) {
      it = out.linear.erase(it);
    } else {
      ++it;
    }
  }
  for (auto it = out.quadratic.begin(); it != out.quadratic.end();) {
    if (std::abs(it->second) < threshold && !out.protected_quadratic.count(it->first)) {
      it = out.quadratic.erase(it);
    } else {
      ++it;
    }
  }
  return out;
}

std::vector<uint8_t> lift_assignment(const QuboProblem& q,
                                     const std::vector<uint8_t>& original_bits) {
  if (original_bits.size() != q.n_original)
    throw std::invalid_argument("lift expects exactly the original variables");
  std::vector<uint8_t> bits = original_bits;
  bits.resize(q.n_total, 0);
  for (const Ancilla& a : q.ancillas) {
    bits[a.index] = bits[a.u] && bits[a.v];  // substitution order is index order
  }
  return bits;
}

std::string qubo_to_text(const QuboProblem& q) {
  std::string out;
  char buf[96];
  out += "# vars " + std::to_string(q.n_total) + "\n";
  out += "# original " + std::to_string(q.n_original) + "\n";
  std::snprintf(buf, sizeof(buf), "# constant %.17g\n", q.constant);
  out += buf;
  for (const auto& [v, coeff] : q.linear) {
    std::snprintf(buf, sizeof(buf), "%u %u %.17g\n", v, v, coeff);
    out += buf;
  }
  for (const auto& [pair, coeff] : q.quadratic) {
    std::snprintf(buf, sizeof(buf), "%u %u %.17g\n", pair.first, pair.second, coeff);
    out += buf;
  }
  return out;
}

std::string ancillas_to_json(const QuboProblem& q) {
  nlohmann::ordered_json j;
  j["penalty_scale"] = q.penalty_scale;
  j["n_original"] = q.n_original;
  j["n_total"] = q.n_total;
  auto& arr = j["ancillas"] = nlohmann::ordered_json::array();
  for (const Ancilla& a : q.ancillas) {
    arr.push_back({{"index", a.index}, {"pair", {a.u, a.v}}});
  }
  return j.dump(2);
}

}  // namespace mufold
