// Closed-form and semi-analytic regime boundaries for threshold
// contagions on the noisy torus lattice: the largest threshold that
// still lets a wavefront spread over geometric edges (WFP), and the
// threshold band in which non-geometric edges seed new clusters far
// from the wavefront (ANC), estimated from the distribution of
// non-geometric links a node receives from the active set.
#pragma once

namespace ctmap {

// One point of the analysis: lattice degree dG, non-geometric degree
// dNG, network size N, current active count q_t, wavefront width w,
// and the horizon fraction delta used for scaled comparisons.
struct RegimeQuery {
  int dG = 8;
  int dNG = 0;
  long long N = 0;
  long long q_t = 0;
  int w = 0;
  double delta = 0.6;
};

// Largest threshold allowing wavefront spreading: a lattice node on
// the front sees 1, 3 or 4 active geometric neighbors for dG = 4, 8,
// 12, out of dG + dNG neighbors in total.
double t_wfp(int dG, int dNG);

// Upper limit of the ANC band: even if every non-geometric neighbor of
// a node were active, the active fraction cannot exceed this.
double anc_horizon(int dG, int dNG);

// Threshold below which every node is expected to activate through
// its non-geometric edges alone once q_t nodes are active.
double anc_lower_bound(const RegimeQuery& q);

// Nodes within lattice distance w of a square active region of q_t
// nodes: round of (sqrt(q_t) + 2w)^2.
long long neighborhood_size(long long q_t, int w);

// Largest active count for which "far from the active set" still makes
// sense on an N-node lattice: floor of (sqrt(0.9 N) - 2 dG)^2.
long long q_max(long long N, int dG);

// Distribution of the number of active non-geometric neighbors of a
// fixed inactive node: a binomial approximation with success
// probability q_t/N, or the exact count distribution under uniform
// stub matching.
enum class DinMode { binomial, exact };
double d_in_pmf(int k, int dNG, long long q_t, long long N, DinMode mode);
double d_in_cdf(int k, int dNG, long long q_t, long long N, DinMode mode);

struct TAncResult {
  double value = 0.0;
  bool no_anc = false;        // no k >= 1 satisfied the tail bound
  int k_star = 0;             // largest qualifying active in-degree
  long long neighborhood = 0; // nodes excluded as "near the front"
};

// ANC threshold estimate: the largest k such that a node outside the
// widened active neighborhood still has d_in > k with probability at
// least 1/(N - |neighborhood|), divided by the total degree.
TAncResult t_anc(const RegimeQuery& q, DinMode mode = DinMode::binomial);

// delta * anc_horizon, the comparison line drawn under the horizon.
double scaled_horizon(int dG, int dNG, double delta);

}  // namespace ctmap
