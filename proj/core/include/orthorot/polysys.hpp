#pragma once

#include <string>
#include <vector>

#include "orthorot/criterion.hpp"
#include "orthorot/matrix.hpp"
#include "orthorot/mpoly.hpp"

namespace orthorot {

// Where a system polynomial came from: the orthogonality constraint
// (T^T T - I)_jl = 0 or the stationarity condition
// (T^T grad Q)_jl - (T^T grad Q)_lj = 0 (divided by the common factor 4).
enum class PolyTag { orthogonality, symmetry };

struct PolyProvenance {
  PolyTag tag;
  int j;  // 1-based column indices, j <= l
  int l;
};

// Square polynomial system in the k^2 entries of T (row-major: variable
// u*k + v is t_{u+1,v+1}) whose real solutions are exactly the stationary
// rotations of A under the given criterion.
//
// `degrees` holds the structural degree of each polynomial (2 for
// orthogonality, 4 for symmetry) rather than the degree after coefficient
// cancellation; degenerate inputs can cancel a symmetry polynomial to zero,
// and the homotopy path count must not depend on that.
struct PolySystem {
  int nvars = 0;
  int k = 0;
  std::vector<MPoly> polys;
  std::vector<int> degrees;
  std::vector<PolyProvenance> provenance;
  Mat a;              // the matrix the system was built from
  OrthomaxSpec spec;  // and its criterion

  /// Product of structural degrees: the number of homotopy paths.
  double bezout_count() const;
  /// One polynomial per line, `<tag>(j,l): coef*t[u][v]^e*... + ...`,
  /// deterministic; used for debugging and golden tests.
  std::string dump() const;
};

/// k(k+1)/2 orthogonality polynomials (ordered by (j,l), j <= l) followed by
/// k(k-1)/2 symmetry polynomials (ordered by (j,l), j < l).
PolySystem build_stationarity_system(const Mat& a, const OrthomaxSpec& spec);

}  // namespace orthorot
