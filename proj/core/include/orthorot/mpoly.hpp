#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace orthorot {

// Sparse multivariate polynomial with real coefficients. Terms are kept in a
// canonical order (descending lexicographic on the exponent vector) with no
// duplicate exponent tuples and no zero coefficients, so two polynomials are
// equal iff their term lists are identical.
class MPoly {
 public:
  struct Term {
    double coef = 0.0;
    std::vector<std::uint8_t> exps;  // dense, length nvars
  };

  explicit MPoly(int nvars);
  static MPoly constant(int nvars, double value);
  static MPoly variable(int nvars, int var);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  int term_count() const { return static_cast<int>(terms_.size()); }
  // Max term degree; 0 for the zero polynomial.
  int total_degree() const;
  const std::vector<Term>& terms() const { return terms_; }

  void add_term(double coef, const std::vector<std::uint8_t>& exps);

  MPoly& operator+=(const MPoly& other);
  MPoly& operator-=(const MPoly& other);
  MPoly& operator*=(double scale);
  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
  friend MPoly operator*(MPoly a, double s) { return a *= s; }
  friend MPoly operator*(double s, MPoly a) { return a *= s; }
  friend MPoly operator*(const MPoly& a, const MPoly& b);

  MPoly derivative(int var) const;

  double eval(const double* point) const;
  std::complex<double> eval(const std::complex<double>* point) const;

  /// Terms joined by " + ", each as coef or coef*<var>^e*...; the zero
  /// polynomial prints "0". var_name maps a variable index to its display name.
  std::string to_string(const std::function<std::string(int)>& var_name) const;

 private:
  template <typename Scalar>
  Scalar eval_impl(const Scalar* point) const;

  int nvars_;
  std::vector<Term> terms_;
};

}  // namespace orthorot
