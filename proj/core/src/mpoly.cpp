#include "orthorot/mpoly.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace orthorot {

namespace {

// canonical term order: descending lexicographic on the exponent vector
bool exps_before(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

std::string format_coef(double c) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", c);
  return buf;
}

}  // namespace

MPoly::MPoly(int nvars) : nvars_(nvars) {
  if (nvars < 0) throw std::invalid_argument("MPoly: negative variable count");
}

MPoly MPoly::constant(int nvars, double value) {
  MPoly p(nvars);
  p.add_term(value, std::vector<std::uint8_t>(static_cast<std::size_t>(nvars), 0));
  return p;
}

MPoly MPoly::variable(int nvars, int var) {
  if (var < 0 || var >= nvars) throw std::invalid_argument("MPoly::variable: index out of range");
  MPoly p(nvars);
  std::vector<std::uint8_t> e(static_cast<std::size_t>(nvars), 0);
  e[static_cast<std::size_t>(var)] = 1;
  p.add_term(1.0, e);
  return p;
}

int MPoly::total_degree() const {
  int deg = 0;
  for (const auto& t : terms_) {
    int d = 0;
    for (auto e : t.exps) d += e;
    deg = std::max(deg, d);
  }
  return deg;
}

void MPoly::add_term(double coef, const std::vector<std::uint8_t>& exps) {
  if (static_cast<int>(exps.size()) != nvars_) {
    throw std::invalid_argument("MPoly::add_term: exponent tuple length mismatch");
  }
  auto it = std::lower_bound(terms_.begin(), terms_.end(), exps,
                             [](const Term& t, const std::vector<std::uint8_t>& e) {
                               return exps_before(t.exps, e);
                             });
  if (it != terms_.end() && it->exps == exps) {
    it->coef += coef;
    if (it->coef == 0.0) terms_.erase(it);
  } else if (coef != 0.0) {
    terms_.insert(it, Term{coef, exps});
  }
}

MPoly& MPoly::operator+=(const MPoly& other) {
  if (other.nvars_ != nvars_) throw std::invalid_argument("MPoly: variable count mismatch");
  for (const auto& t : other.terms_) add_term(t.coef, t.exps);
  return *this;
}

MPoly& MPoly::operator-=(const MPoly& other) {
  if (other.nvars_ != nvars_) throw std::invalid_argument("MPoly: variable count mismatch");
  for (const auto& t : other.terms_) add_term(-t.coef, t.exps);
  return *this;
}

MPoly& MPoly::operator*=(double scale) {
  if (scale == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coef *= scale;
  return *this;
}

MPoly operator*(const MPoly& a, const MPoly& b) {
  if (a.nvars_ != b.nvars_) throw std::invalid_argument("MPoly: variable count mismatch");
  std::map<std::vector<std::uint8_t>, double> acc;
  std::vector<std::uint8_t> e(static_cast<std::size_t>(a.nvars_));
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      for (std::size_t v = 0; v < e.size(); ++v) {
        e[v] = static_cast<std::uint8_t>(ta.exps[v] + tb.exps[v]);
      }
      acc[e] += ta.coef * tb.coef;
    }
  }
  MPoly out(a.nvars_);
  for (const auto& [exps, coef] : acc) {
    if (coef != 0.0) out.terms_.push_back(MPoly::Term{coef, exps});
  }
  std::sort(out.terms_.begin(), out.terms_.end(),
            [](const MPoly::Term& x, const MPoly::Term& y) { return exps_before(x.exps, y.exps); });
  return out;
}

MPoly MPoly::derivative(int var) const {
  if (var < 0 || var >= nvars_) throw std::invalid_argument("MPoly::derivative: index out of range");
  MPoly out(nvars_);
  for (const auto& t : terms_) {
    auto e = t.exps[static_cast<std::size_t>(var)];
    if (e == 0) continue;
    Term d;
    d.coef = t.coef * static_cast<double>(e);
    d.exps = t.exps;
    d.exps[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(e - 1);
    out.terms_.push_back(std::move(d));
  }
  // differentiation preserves the canonical order within the surviving terms
  return out;
}

template <typename Scalar>
Scalar MPoly::eval_impl(const Scalar* point) const {
  Scalar acc(0.0);
  for (const auto& t : terms_) {
    Scalar prod(t.coef);
    for (int v = 0; v < nvars_; ++v) {
      auto e = t.exps[static_cast<std::size_t>(v)];
      for (int rep = 0; rep < e; ++rep) prod *= point[v];
    }
    acc += prod;
  }
  return acc;
}

double MPoly::eval(const double* point) const { return eval_impl(point); }
std::complex<double> MPoly::eval(const std::complex<double>* point) const {
  return eval_impl(point);
}

std::string MPoly::to_string(const std::function<std::string(int)>& var_name) const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) out += " + ";
    first = false;
    out += format_coef(t.coef);
    for (int v = 0; v < nvars_; ++v) {
      auto e = t.exps[static_cast<std::size_t>(v)];
      if (e == 0) continue;
      out += "*" + var_name(v);
      if (e > 1) out += "^" + std::to_string(static_cast<int>(e));
    }
  }
  return out;
}

}  // namespace orthorot
