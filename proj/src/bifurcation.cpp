#include "ctmap/bifurcation.hpp"

#include <cmath>
#include <string>

#include "ctmap/types.hpp"

namespace ctmap {
namespace {

// Exact for small arguments: every intermediate value of the
// multiplicative form is itself a binomial coefficient, so the double
// divisions never round.
double binom(int n, int k) {
  double r = 1.0;
  for (int j = 0; j < k; ++j) {
    r = r * static_cast<double>(n - j) / static_cast<double>(j + 1);
  }
  return r;
}

void validate_d_in(int k, int dNG, long long q_t, long long N) {
  if (dNG < 0) throw domain_error("non-geometric degree must be nonnegative");
  if (k < 0 || k > dNG) {
    throw domain_error("in-degree must lie between 0 and the degree");
  }
  if (N < 2) throw domain_error("network must have at least two nodes");
  if (q_t < 0 || q_t > N - 1) {
    throw domain_error("active count must lie between 0 and N-1");
  }
}

}  // namespace

double t_wfp(int dG, int dNG) {
  if (dNG < 0) throw domain_error("non-geometric degree must be nonnegative");
  int numerator = 0;
  switch (dG) {
    case 4: numerator = 1; break;
    case 8: numerator = 3; break;
    case 12: numerator = 4; break;
    default:
      throw domain_error(
          "no closed-form spreading threshold for geometric degree " +
          std::to_string(dG) + "; each lattice needs its own derivation "
          "(supported: 4, 8, 12)");
  }
  return static_cast<double>(numerator) / (dG + dNG);
}

double anc_horizon(int dG, int dNG) {
  if (dG + dNG <= 0) throw domain_error("total degree must be positive");
  return static_cast<double>(dNG) / (dG + dNG);
}

double anc_lower_bound(const RegimeQuery& q) {
  if (q.N < 2) throw domain_error("network must have at least two nodes");
  if (q.q_t < 0 || q.q_t > q.N) {
    throw domain_error("active count must lie between 0 and N");
  }
  if (q.dG + q.dNG <= 0) throw domain_error("total degree must be positive");
  return static_cast<double>(q.q_t) / static_cast<double>(q.N - 1) * q.dNG /
         (q.dG + q.dNG);
}

long long neighborhood_size(long long q_t, int w) {
  if (q_t < 0) throw domain_error("active count must be nonnegative");
  if (w < 0) throw domain_error("wavefront width must be nonnegative");
  const double side = std::sqrt(static_cast<double>(q_t)) + 2.0 * w;
  return std::llround(side * side);
}

long long q_max(long long N, int dG) {
  if (N < 1) throw domain_error("network must be nonempty");
  if (dG < 0) throw domain_error("geometric degree must be nonnegative");
  const double root = std::sqrt(0.9 * static_cast<double>(N)) - 2.0 * dG;
  if (root <= 0.0) {
    throw domain_error(
        "network too small for an active-count bound at this degree");
  }
  return static_cast<long long>(std::floor(root * root));
}

double d_in_pmf(int k, int dNG, long long q_t, long long N, DinMode mode) {
  validate_d_in(k, dNG, q_t, N);
  if (mode == DinMode::binomial) {
    const double p = static_cast<double>(q_t) / static_cast<double>(N);
    return binom(dNG, k) * std::pow(p, k) * std::pow(1.0 - p, dNG - k);
  }
  // Exact stub-matching count: the node's dNG partners are drawn
  // without replacement from the other N-1 nodes, q_t of them active.
  if (k > q_t || dNG - k > N - 1 - q_t) return 0.0;
  double prob = binom(dNG, k);
  for (int j = 0; j < k; ++j) {
    prob *= static_cast<double>(q_t - j) / static_cast<double>(N - 1 - j);
  }
  for (int j = 0; j < dNG - k; ++j) {
    prob *= static_cast<double>(N - 1 - q_t - j) /
            static_cast<double>(N - 1 - k - j);
  }
  return prob;
}

double d_in_cdf(int k, int dNG, long long q_t, long long N, DinMode mode) {
  validate_d_in(k, dNG, q_t, N);
  double sum = 0.0;
  for (int d = 0; d <= k; ++d) {
    sum += d_in_pmf(d, dNG, q_t, N, mode);
  }
  return sum;
}

TAncResult t_anc(const RegimeQuery& q, DinMode mode) {
  if (q.dNG < 1) {
    throw domain_error("ANC analysis needs at least one non-geometric edge");
  }
  if (q.dG < 1) throw domain_error("geometric degree must be positive");
  if (q.N < 2) throw domain_error("network must have at least two nodes");
  if (q.q_t < 0 || q.q_t > q.N - 1) {
    throw domain_error("active count must lie between 0 and N-1");
  }
  const long long nb = neighborhood_size(q.q_t, q.w);
  if (nb >= q.N) throw domain_error("neighborhood exceeds the network");

  const double tail_bound = static_cast<double>(q.N - nb - 1) /
                            static_cast<double>(q.N - nb);
  TAncResult res;
  res.neighborhood = nb;
  // The distribution function rises with k, so the first hit from
  // above is the largest qualifying k. d_in cannot exceed dNG, hence
  // k* < dNG and the estimate stays strictly under the horizon.
  for (int k = q.dNG - 1; k >= 0; --k) {
    if (d_in_cdf(k, q.dNG, q.q_t, q.N, mode) <= tail_bound) {
      res.k_star = k;
      break;
    }
  }
  if (res.k_star >= 1) {
    res.value = static_cast<double>(res.k_star) / (q.dG + q.dNG);
  } else {
    res.no_anc = true;
  }
  return res;
}

double scaled_horizon(int dG, int dNG, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw domain_error("horizon fraction must lie strictly between 0 and 1");
  }
  return delta * anc_horizon(dG, dNG);
}

}  // namespace ctmap
