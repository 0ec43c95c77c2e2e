#include "ctmap/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "ctmap/persistence.hpp"

namespace ctmap {
namespace {

// Sentinel cost blocking a diagonal slot for every bar except its
// owner; large enough to never enter an optimal assignment, small
// enough for exact potential arithmetic.
constexpr double kUnmatchable = 1e100;

struct Bar {
  double birth, death;
};

double power_q(double v, double q) {
  return q == 2.0 ? v * v : std::pow(v, q);
}

double diag_cost(const Bar& x, GroundMetric g) {
  const double pers = x.death - x.birth;
  return g == GroundMetric::linf ? 0.5 * pers : pers / std::numbers::sqrt2;
}

double pair_cost(const Bar& x, const Bar& y, GroundMetric g) {
  const double db = std::abs(x.birth - y.birth);
  const double dd = std::abs(x.death - y.death);
  return g == GroundMetric::linf ? std::max(db, dd) : std::hypot(db, dd);
}

// Exact dense assignment via shortest augmenting paths with
// potentials. Returns row_of_col: the row matched to each column.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(n + 1,
                                  std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_of_col(n);
  for (int j = 1; j <= n; ++j) row_of_col[j - 1] = match[j] - 1;
  return row_of_col;
}

struct Side {
  std::vector<Bar> finite;
  std::vector<double> infinite_births;  // sorted
};

Side extract_side(const Barcode& bc, int dim) {
  Side s;
  for (const auto& p : bc.pairs) {
    if (p.dim != dim) continue;
    if (p.is_infinite()) {
      s.infinite_births.push_back(p.birth);
    } else {
      s.finite.push_back({p.birth, p.death});
    }
  }
  std::sort(s.infinite_births.begin(), s.infinite_births.end());
  return s;
}

// Total order on sides so both argument orders canonicalize to the
// same computation; together with a fixed summation order this makes
// the distance exactly symmetric.
bool side_less(const Side& a, const Side& b) {
  const auto key = [](const Bar& x) { return std::pair(x.birth, x.death); };
  return std::lexicographical_compare(
             a.finite.begin(), a.finite.end(), b.finite.begin(),
             b.finite.end(),
             [&](const Bar& x, const Bar& y) { return key(x) < key(y); }) ||
         (std::equal(a.finite.begin(), a.finite.end(), b.finite.begin(),
                     b.finite.end(),
                     [&](const Bar& x, const Bar& y) {
                       return key(x) == key(y);
                     }) &&
          a.infinite_births < b.infinite_births);
}

struct ComponentDsu {
  std::vector<int> parent;
  explicit ComponentDsu(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

const char* to_string(GroundMetric g) {
  switch (g) {
    case GroundMetric::linf: return "linf";
    case GroundMetric::l2: return "l2";
  }
  throw config_error("unknown ground metric");
}

GroundMetric ground_metric_from_string(const std::string& s) {
  if (s == "linf") return GroundMetric::linf;
  if (s == "l2") return GroundMetric::l2;
  throw config_error("unknown ground metric: " + s);
}

double wasserstein(const Barcode& a, const Barcode& b, int dim, double q,
                   GroundMetric ground) {
  if (dim < 0) throw config_error("diagram dimension must be nonnegative");
  if (!(q >= 1.0)) throw config_error("wasserstein order q must be >= 1");

  Side first = extract_side(a, dim);
  Side second = extract_side(b, dim);
  if (first.infinite_births.size() != second.infinite_births.size()) {
    throw incomparable_diagrams_error(
        "diagrams have different infinite-bar counts in this dimension");
  }
  if (side_less(second, first)) std::swap(first, second);

  double total = 0.0;
  for (std::size_t k = 0; k < first.infinite_births.size(); ++k) {
    total += power_q(
        std::abs(first.infinite_births[k] - second.infinite_births[k]), q);
  }

  const auto& fa = first.finite;
  const auto& fb = second.finite;
  const int na = static_cast<int>(fa.size());
  const int nb = static_cast<int>(fb.size());

  std::vector<double> da(na), db(nb);
  for (int i = 0; i < na; ++i) da[i] = power_q(diag_cost(fa[i], ground), q);
  for (int j = 0; j < nb; ++j) db[j] = power_q(diag_cost(fb[j], ground), q);

  // A matched pair whose cost is at least the two diagonal costs can
  // always be rewired to the diagonal without increasing the total, so
  // an optimal assignment only ever matches across "useful" pairs.
  // The useful-pair graph splits the problem into independent
  // components; bars in none of them go straight to the diagonal.
  ComponentDsu dsu(na + nb);  // 0..na-1 bars of A, na.. bars of B
  std::vector<char> involved(static_cast<std::size_t>(na) + nb, 0);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      if (power_q(pair_cost(fa[i], fb[j], ground), q) < da[i] + db[j]) {
        involved[i] = 1;
        involved[static_cast<std::size_t>(na) + j] = 1;
        dsu.unite(i, na + j);
      }
    }
  }
  for (int i = 0; i < na; ++i) {
    if (!involved[i]) total += da[i];
  }
  for (int j = 0; j < nb; ++j) {
    if (!involved[static_cast<std::size_t>(na) + j]) total += db[j];
  }

  std::vector<std::vector<int>> comp_a(static_cast<std::size_t>(na) + nb);
  std::vector<std::vector<int>> comp_b(static_cast<std::size_t>(na) + nb);
  for (int i = 0; i < na; ++i) {
    if (involved[i]) comp_a[dsu.find(i)].push_back(i);
  }
  for (int j = 0; j < nb; ++j) {
    if (involved[static_cast<std::size_t>(na) + j]) {
      comp_b[dsu.find(na + j)].push_back(j);
    }
  }

  std::vector<std::vector<double>> cost;
  for (std::size_t root = 0; root < comp_a.size(); ++root) {
    const auto& ca = comp_a[root];
    const auto& cb = comp_b[root];
    if (ca.empty() && cb.empty()) continue;
    const int m = static_cast<int>(ca.size() + cb.size());
    cost.assign(static_cast<std::size_t>(m),
                std::vector<double>(static_cast<std::size_t>(m), 0.0));
    // rows: A bars then diagonal slots of the B bars;
    // cols: B bars then diagonal slots of the A bars
    for (std::size_t r = 0; r < ca.size(); ++r) {
      for (std::size_t c = 0; c < cb.size(); ++c) {
        cost[r][c] = power_q(pair_cost(fa[ca[r]], fb[cb[c]], ground), q);
      }
      for (std::size_t c = 0; c < ca.size(); ++c) {
        cost[r][cb.size() + c] = (c == r) ? da[ca[r]] : kUnmatchable;
      }
    }
    for (std::size_t r = 0; r < cb.size(); ++r) {
      for (std::size_t c = 0; c < cb.size(); ++c) {
        cost[ca.size() + r][c] = (c == r) ? db[cb[r]] : kUnmatchable;
      }
      // diagonal-to-diagonal entries stay zero
    }
    const auto row_of_col = solve_assignment(cost);
    for (int j = 0; j < m; ++j) {
      total += cost[static_cast<std::size_t>(row_of_col[j])]
                   [static_cast<std::size_t>(j)];
    }
  }

  return q == 2.0 ? std::sqrt(total) : std::pow(total, 1.0 / q);
}

double topology_score(const PointCloud& cloud, const Barcode& ref, double q,
                      GroundMetric ground) {
  if (cloud.num_points() == 0) {
    throw shape_error("topology score needs a nonempty cloud");
  }
  const Barcode bc = vr_persistence(pairwise_distance_matrix(cloud.points), 1);
  return wasserstein(calibrate(bc), calibrate(ref), 1, q, ground);
}

}  // namespace ctmap
