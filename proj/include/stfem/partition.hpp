#pragma once
#include <stdexcept>
#include <vector>

namespace stfem {

// 1D mesh: strictly increasing breakpoints starting at 0.
struct Partition1D {
  std::vector<double> pts;

  static Partition1D uniform(int n, double length = 1.0) {
    if (n < 1 || length <= 0.0) throw std::invalid_argument("Partition1D::uniform: need n >= 1, length > 0");
    Partition1D p;
    p.pts.resize(n + 1);
    for (int i = 0; i <= n; ++i) p.pts[i] = length * double(i) / double(n);
    p.pts[n] = length;  // exact endpoint
    return p;
  }

  // Dyadic-style refinement: each cell split into `factor` equal parts.
  Partition1D refined(int factor) const {
    if (factor < 1) throw std::invalid_argument("Partition1D::refined: factor >= 1");
    Partition1D f;
    f.pts.reserve(cells() * factor + 1);
    for (int e = 0; e < cells(); ++e) {
      for (int k = 0; k < factor; ++k)
        f.pts.push_back(pts[e] + (pts[e + 1] - pts[e]) * double(k) / double(factor));
    }
    f.pts.push_back(pts.back());
    return f;
  }

  int cells() const { return int(pts.size()) - 1; }
  double h(int e) const { return pts[e + 1] - pts[e]; }
  double length() const { return pts.back(); }

  bool operator==(const Partition1D& o) const { return pts == o.pts; }

  // true if every breakpoint of *this appears in `fine` (so `fine` refines *this)
  bool refines(const Partition1D& fine) const {
    if (fine.length() != length()) return false;
    std::size_t j = 0;
    for (double p : pts) {
      while (j < fine.pts.size() && fine.pts[j] < p - 1e-14) ++j;
      if (j >= fine.pts.size() || std::abs(fine.pts[j] - p) > 1e-14) return false;
    }
    return true;
  }

  // index of the cell containing x (left-closed; x = endpoint maps to last cell)
  int find_cell(double x) const {
    if (x < pts.front() - 1e-14 || x > pts.back() + 1e-14)
      throw std::invalid_argument("Partition1D::find_cell: point outside interval");
    int lo = 0, hi = cells() - 1;
    while (lo < hi) {
      int mid = (lo + hi + 1) / 2;
      if (x >= pts[mid]) lo = mid; else hi = mid - 1;
    }
    return lo;
  }
};

}  // namespace stfem
