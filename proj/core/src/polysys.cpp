#include "orthorot/polysys.hpp"

#include <stdexcept>

namespace orthorot {

double PolySystem::bezout_count() const {
  double n = 1.0;
  for (int d : degrees) n *= static_cast<double>(d);
  return n;
}

std::string PolySystem::dump() const {
  auto var_name = [this](int v) {
    return "t[" + std::to_string(v / k + 1) + "][" + std::to_string(v % k + 1) + "]";
  };
  std::string out;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    const auto& prov = provenance[i];
    out += (prov.tag == PolyTag::orthogonality ? "orthogonality(" : "symmetry(");
    out += std::to_string(prov.j) + "," + std::to_string(prov.l) + "): ";
    out += polys[i].to_string(var_name);
    out += "\n";
  }
  return out;
}

PolySystem build_stationarity_system(const Mat& a, const OrthomaxSpec& spec) {
  if (a.rows() != spec.p || a.cols() != spec.k) {
    throw std::invalid_argument("build_stationarity_system: A shape does not match spec");
  }
  require_finite(a, "build_stationarity_system input");
  const int k = static_cast<int>(spec.k);
  const int p = static_cast<int>(spec.p);
  const int n = k * k;
  const double c = spec.omega / static_cast<double>(spec.p);
  auto var = [k](int u, int v) { return u * k + v; };  // t_{u+1,v+1}, 0-based u,v

  PolySystem sys;
  sys.nvars = n;
  sys.k = k;
  sys.a = a;
  sys.spec = spec;

  for (int j = 0; j < k; ++j) {
    for (int l = j; l < k; ++l) {
      MPoly g(n);
      for (int r = 0; r < k; ++r) {
        g += MPoly::variable(n, var(r, j)) * MPoly::variable(n, var(r, l));
      }
      if (j == l) g -= MPoly::constant(n, 1.0);
      sys.polys.push_back(std::move(g));
      sys.degrees.push_back(2);
      sys.provenance.push_back({PolyTag::orthogonality, j + 1, l + 1});
    }
  }

  if (k > 1) {
    // d[u][l] = (grad Q / 4)_{ul} = sum_i a_iu (l_il^3 - c l_il ||l_l||^2),
    // built column by column since Q is separable across columns of L = A T.
    std::vector<std::vector<MPoly>> d(static_cast<std::size_t>(k),
                                      std::vector<MPoly>(static_cast<std::size_t>(k), MPoly(n)));
    for (int l = 0; l < k; ++l) {
      std::vector<MPoly> lin;
      lin.reserve(static_cast<std::size_t>(p));
      for (int i = 0; i < p; ++i) {
        MPoly li(n);
        for (int v = 0; v < k; ++v) {
          li += a(i, v) * MPoly::variable(n, var(v, l));
        }
        lin.push_back(std::move(li));
      }
      std::vector<MPoly> sq;
      sq.reserve(static_cast<std::size_t>(p));
      MPoly norm(n);
      for (int i = 0; i < p; ++i) {
        sq.push_back(lin[static_cast<std::size_t>(i)] * lin[static_cast<std::size_t>(i)]);
        norm += sq.back();
      }
      for (int i = 0; i < p; ++i) {
        const MPoly e =
            lin[static_cast<std::size_t>(i)] * (sq[static_cast<std::size_t>(i)] - c * norm);
        for (int u = 0; u < k; ++u) {
          if (a(i, u) != 0.0) {
            d[static_cast<std::size_t>(u)][static_cast<std::size_t>(l)] += a(i, u) * e;
          }
        }
      }
    }

    for (int j = 0; j < k; ++j) {
      for (int l = j + 1; l < k; ++l) {
        MPoly s(n);
        for (int u = 0; u < k; ++u) {
          s += MPoly::variable(n, var(u, j)) * d[static_cast<std::size_t>(u)][static_cast<std::size_t>(l)];
          s -= MPoly::variable(n, var(u, l)) * d[static_cast<std::size_t>(u)][static_cast<std::size_t>(j)];
        }
        sys.polys.push_back(std::move(s));
        sys.degrees.push_back(4);
        sys.provenance.push_back({PolyTag::symmetry, j + 1, l + 1});
      }
    }
  }

  return sys;
}

}  // namespace orthorot
