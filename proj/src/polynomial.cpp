#include "mufold/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mufold {
namespace {

void canonicalize(Monomial& vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
}

// union of two sorted duplicate-free monomials (x*x = x)
Monomial merge(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

void BinaryPolynomial::add_term(Monomial vars, double coeff) {
  canonicalize(vars);
  if (vars.empty()) {
    constant_ += coeff;
    return;
  }
  auto [it, inserted] = terms_.try_emplace(std::move(vars), coeff);
  if (!inserted) it->second += coeff;
  if (std::abs(it->second) < kNoiseEps) terms_.erase(it);
}

BinaryPolynomial& BinaryPolynomial::operator+=(const BinaryPolynomial& other) {
  constant_ += other.constant_;
  for (const auto& [mono, coeff] : other.terms_) {
    auto [it, inserted] = terms_.try_emplace(mono, coeff);
    if (!inserted) it->second += coeff;
    if (std::abs(it->second) < kNoiseEps) terms_.erase(it);
  }
  return *this;
}

BinaryPolynomial& BinaryPolynomial::operator-=(const BinaryPolynomial& other) {
  constant_ -= other.constant_;
  for (const auto& [mono, coeff] : other.terms_) {
    auto [it, inserted] = terms_.try_emplace(mono, -coeff);
    if (!inserted) it->second -= coeff;
    if (std::abs(it->second) < kNoiseEps) terms_.erase(it);
  }
  return *this;
}

BinaryPolynomial& BinaryPolynomial::operator*=(double scalar) {
  if (scalar == 0.0) {
    terms_.clear();
    constant_ = 0.0;
    return *this;
  }
  constant_ *= scalar;
  for (auto& [mono, coeff] : terms_) coeff *= scalar;
  return *this;
}

BinaryPolynomial operator*(const BinaryPolynomial& a, const BinaryPolynomial& b) {
  // Cross products into a flat list, then one sort+accumulate pass. Keeps the
  // expansion deterministic and avoids per-product map lookups.
  std::vector<std::pair<Monomial, double>> products;
  products.reserve((a.terms_.size() + 1) * (b.terms_.size() + 1));
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      products.emplace_back(merge(ma, mb), ca * cb);
    }
    if (b.constant_ != 0.0) products.emplace_back(ma, ca * b.constant_);
  }
  if (a.constant_ != 0.0) {
    for (const auto& [mb, cb] : b.terms_) products.emplace_back(mb, a.constant_ * cb);
  }
  std::sort(products.begin(), products.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  BinaryPolynomial out;
  out.constant_ = a.constant_ * b.constant_;
  size_t i = 0;
  while (i < products.size()) {
    double sum = products[i].second;
    size_t j = i + 1;
    while (j < products.size() && products[j].first == products[i].first) {
      sum += products[j].second;
      ++j;
    }
    if (std::abs(sum) >= BinaryPolynomial::kNoiseEps) {
      out.terms_.emplace_hint(out.terms_.end(), std::move(products[i].first), sum);
    }
    i = j;
  }
  return out;
}

double BinaryPolynomial::coefficient(const Monomial& vars) const {
  Monomial key = vars;
  canonicalize(key);
  const auto it = terms_.find(key);
  return it == terms_.end() ? 0.0 : it->second;
}

int BinaryPolynomial::degree() const {
  size_t deg = 0;
  for (const auto& [mono, coeff] : terms_) deg = std::max(deg, mono.size());
  return static_cast<int>(deg);
}

size_t BinaryPolynomial::count_terms_of_degree(size_t deg) const {
  size_t n = 0;
  for (const auto& [mono, coeff] : terms_) {
    if (mono.size() == deg) ++n;
  }
  return n;
}

uint32_t BinaryPolynomial::min_variable_bound() const {
  uint32_t n = 0;
  for (const auto& [mono, coeff] : terms_) {
    if (!mono.empty()) n = std::max(n, mono.back() + 1);
  }
  return n;
}

double BinaryPolynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [mono, coeff] : terms_) m = std::max(m, std::abs(coeff));
  return m;
}

void BinaryPolynomial::chop(double threshold) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < threshold) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

double BinaryPolynomial::evaluate(const std::vector<uint8_t>& bits) const {
  double total = constant_;
  for (const auto& [mono, coeff] : terms_) {
    bool active = true;
    for (uint32_t v : mono) {
      if (v >= bits.size())
        throw std::out_of_range("polynomial references variable " + std::to_string(v) +
                                " beyond assignment of size " +
                                std::to_string(bits.size()));
      if (!bits[v]) {
        active = false;
        break;
      }
    }
    if (active) total += coeff;
  }
  return total;
}

std::string BinaryPolynomial::to_text(uint32_t n_vars) const {
  std::string out;
  char buf[64];
  out += "# vars " + std::to_string(n_vars) + "\n";
  std::snprintf(buf, sizeof(buf), "# constant %.17g\n", constant_);
  out += buf;
  for (const auto& [mono, coeff] : terms_) {
    std::string line;
    for (uint32_t v : mono) {
      line += std::to_string(v);
      line += ' ';
    }
    std::snprintf(buf, sizeof(buf), ": %.17g\n", coeff);
    line += buf;
    out += line;
  }
  return out;
}

BinaryPolynomial BinaryPolynomial::from_text(const std::string& text,
                                             uint32_t* n_vars_out) {
  BinaryPolynomial poly;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "vars" && n_vars_out) {
        ls >> *n_vars_out;
      } else if (key == "constant") {
        ls >> poly.constant_;
      }
      continue;
    }
    Monomial mono;
    std::string tok;
    double coeff = 0.0;
    bool have_coeff = false;
    while (ls >> tok) {
      if (tok == ":") {
        ls >> coeff;
        have_coeff = true;
        break;
      }
      mono.push_back(static_cast<uint32_t>(std::stoul(tok)));
    }
    if (!have_coeff) throw std::runtime_error("polynomial text: missing ':' in line: " + line);
    poly.add_term(std::move(mono), coeff);
  }
  return poly;
}

}  // namespace mufold
